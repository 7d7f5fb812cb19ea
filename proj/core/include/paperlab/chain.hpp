#pragma once

// Bounded chain complexes of finitely presented modules and the colimits used
// by the push-out and enveloping constructions.
//
// A complex stores, per degree n, a free carrier of rank r_n, the differential
// d_n : C_n -> C_{n-1} and a relation matrix R_n whose columns generate a
// d-stable submodule. The module in degree n is coker(R_n); complexes built
// from free data have empty relation matrices.

#include "paperlab/exact.hpp"

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace paperlab {

class NotAComplex : public Error {
 public:
  NotAComplex(int degree, const std::string& what)
      : Error("not a complex at degree " + std::to_string(degree) + ": " + what), degree_(degree) {}
  int degree() const { return degree_; }

 private:
  int degree_;
};

class NotAChainMap : public Error {
 public:
  using Error::Error;
};

class RingMismatch : public Error {
 public:
  using Error::Error;
};

class NotParallel : public Error {
 public:
  using Error::Error;
};

class BadSection : public Error {
 public:
  using Error::Error;
};

class ChainComplex {
 public:
  explicit ChainComplex(Ring ring = Ring::integers()) : ring_(ring) {}

  /// The ground ring concentrated in degree 0.
  static ChainComplex unit(Ring ring, std::string label = "1");
  /// A free module of the given rank concentrated in one degree.
  static ChainComplex concentrated(Ring ring, int degree, std::size_t rank, std::vector<std::string> labels = {});

  const Ring& ring() const { return ring_; }

  void set_rank(int n, std::size_t rank, std::vector<std::string> labels = {});
  void set_differential(int n, Matrix d);
  void set_relations(int n, Matrix r);
  void set_labels(int n, std::vector<std::string> labels);

  std::size_t rank(int n) const;
  /// d_n : C_n -> C_{n-1}; the zero matrix of the right shape when unset.
  Matrix differential(int n) const;
  /// rank(n) x k; k = 0 for a free degree.
  Matrix relations(int n) const;
  std::vector<std::string> labels(int n) const;

  /// Degrees with nonzero carrier rank, ascending.
  std::vector<int> degrees() const;
  bool is_free() const;
  bool is_zero_carrier() const { return degrees().empty(); }
  std::size_t total_rank() const;

  /// Flat basis order: degrees ascending, then position within the degree.
  std::size_t flat_offset(int n) const;
  std::pair<int, std::size_t> unflatten(std::size_t flat) const;

  bool operator==(const ChainComplex& o) const;

 private:
  struct Part {
    std::size_t rank = 0;
    std::optional<Matrix> differential;
    std::optional<Matrix> relations;
    std::vector<std::string> labels;
  };
  const Part* part(int n) const;

  Ring ring_;
  std::map<int, Part> parts_;
};

/// Degree-0 chain map. Components are matrices on carriers; a map is valid when
/// it sends relations to relations and commutes with d modulo relations.
class ChainMap {
 public:
  ChainMap() = default;
  ChainMap(ChainComplex source, ChainComplex target);

  static ChainMap identity(const ChainComplex& c);
  static ChainMap zero(const ChainComplex& source, const ChainComplex& target);

  const ChainComplex& source() const { return *source_; }
  const ChainComplex& target() const { return *target_; }
  const Ring& ring() const { return source_->ring(); }

  void set_component(int n, Matrix m);
  Matrix component(int n) const;

  /// this ∘ f
  ChainMap after(const ChainMap& f) const;
  ChainMap operator+(const ChainMap& o) const;
  ChainMap operator-(const ChainMap& o) const;

 private:
  std::shared_ptr<const ChainComplex> source_;
  std::shared_ptr<const ChainComplex> target_;
  std::map<int, Matrix> components_;
};

/// Throws NotAComplex with the offending degree unless d^2 = 0 modulo relations,
/// shapes are coherent and relations are d-stable.
void validate(const ChainComplex& c);
/// Throws NotAChainMap unless f is well defined and commutes with d.
void validate(const ChainMap& f);

/// coker(R_n) as a module.
FgModule module_at(const ChainComplex& c, int n);
FgModule homology(const ChainComplex& c, int n);

struct DegreeInvariants {
  ModuleInvariants module;
  ModuleInvariants homology;
  bool operator==(const DegreeInvariants&) const = default;
};

/// Per-degree module and homology invariants; the equality used for complexes.
std::map<int, DegreeInvariants> complex_invariants(const ChainComplex& c);
bool same_invariants(const ChainComplex& a, const ChainComplex& b);
std::string describe(const std::map<int, DegreeInvariants>& inv);

/// True iff f - g maps into the relations of the common target.
bool maps_equal(const ChainMap& f, const ChainMap& g);

/// Kernel and cokernel modules of f_n.
FgModule map_kernel(const ChainMap& f, int n);
FgModule map_cokernel(const ChainMap& f, int n);
bool is_isomorphism(const ChainMap& f);

struct Presentation {
  ChainComplex complex;
  ChainMap projection;  // original -> minimized
  ChainMap lift;        // minimized -> original
};

/// Re-presents every degree with the fewest generators: relations become
/// invariant-factor columns and unit relations are eliminated.
Presentation minimize(const ChainComplex& c);

ChainComplex tensor(const ChainComplex& c, const ChainComplex& d);
/// f ⊗ g on tensor complexes built by tensor().
ChainMap tensor(const ChainMap& f, const ChainMap& g);
ChainComplex tensor_power(const ChainComplex& c, std::size_t t);

/// Flat coordinates of elementary tensors in the left-nested product
/// (...(F_1 ⊗ F_2) ⊗ ...) ⊗ F_k as built by tensor(); no factors gives the unit.
class TensorBasis {
 public:
  TensorBasis(const Ring& ring, std::vector<ChainComplex> factors);

  const ChainComplex& complex() const { return partial_.back(); }
  std::size_t factor_count() const { return factors_.size(); }
  std::size_t index(const std::vector<std::size_t>& flat) const;
  std::vector<std::size_t> decompose(std::size_t flat) const;

 private:
  std::vector<ChainComplex> factors_;
  std::vector<ChainComplex> partial_;  // partial_[k] = F_1 ⊗ ... ⊗ F_k
};

struct DirectSum {
  ChainComplex complex;
  std::vector<ChainMap> injections;
  std::vector<ChainMap> projections;
};
DirectSum direct_sum(const std::vector<ChainComplex>& summands, const Ring& ring);

struct PushoutResult {
  ChainComplex object;
  ChainMap from_a;  // A -> P
  ChainMap from_y;  // Y -> P
  ChainMap lift;    // P -> A ⊕ Y carrier
};

/// Push-out of A <-f- X -g-> Y.
PushoutResult pushout(const ChainMap& f, const ChainMap& g);
/// The map P -> W induced by a cocone (h_a, h_y).
ChainMap pushout_induced(const PushoutResult& p, const ChainMap& h_a, const ChainMap& h_y);

struct CoequalizerResult {
  ChainComplex object;
  ChainMap projection;
  ChainMap lift;
};

/// Coequalizer of f, g : X ⇉ Y; a section s : Y -> X, when given, must satisfy
/// f∘s = g∘s = id_Y.
CoequalizerResult coequalizer(const ChainMap& f, const ChainMap& g, const std::optional<ChainMap>& section = {});

/// Quotient of a complex by the images of the given maps into it.
CoequalizerResult quotient_by_images(const ChainComplex& y, const std::vector<ChainMap>& maps);

struct SequentialColimit {
  ChainComplex colimit;
  bool stabilized = false;
  std::size_t stable_from = 0;  // index of the first stage after which all maps are isomorphisms
};

SequentialColimit sequential_colimit(const std::vector<ChainMap>& maps, std::size_t window = 2);

/// Functor from the poset 2^t: vertex bitmask -> complex, edges flip one bit 0 -> 1.
struct ComplexCube {
  int dimension = 0;
  std::vector<ChainComplex> vertices;
  std::map<std::pair<unsigned, int>, ChainMap> edges;

  const ChainMap& edge(unsigned vertex, int direction) const;
  /// Composite along the path that flips bits of (to & ~from) in ascending order.
  ChainMap path(unsigned from, unsigned to) const;
};

void validate(const ComplexCube& cube);
/// Cube of X_{v_1} ⊗ ... ⊗ X_{v_t} with X_0 = source(f_i), X_1 = target(f_i).
ComplexCube tensor_cube(const std::vector<ChainMap>& maps);

struct LatchingMap {
  ChainMap map;         // latching object -> cube(1,...,1)
  ChainMap lift;        // latching object -> ⊕ punctured vertices
};

/// The canonical map from the colimit over the punctured cube to the terminal vertex.
LatchingMap cube_latching_map(const ComplexCube& cube);

/// Push-out product f □ g : (A⊗D) ∪_{A⊗C} (B⊗C) -> B⊗D for f : A -> B, g : C -> D.
ChainMap pushout_product(const ChainMap& f, const ChainMap& g);
/// f^{□t}; t = 0 is rejected.
ChainMap pushout_product_power(const ChainMap& f, std::size_t t);

struct QuasiIsoDegree {
  FgModule source_homology;
  FgModule target_homology;
  FgModule kernel;
  FgModule cokernel;
};

struct QuasiIsoReport {
  bool quasi_isomorphism = true;
  std::map<int, QuasiIsoDegree> degrees;
};

QuasiIsoReport is_quasi_iso(const ChainMap& f);

}  // namespace paperlab
