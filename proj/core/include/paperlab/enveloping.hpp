#pragma once

// Enveloping operads O_A as truncated reflexive coequalizers of labeled trees.
//
// O_A^0(n) has a basis of corollas: an operation of O(n+s) whose leaves are n
// snaky leaves and s straight leaves labeled by basis elements of A. The
// coequalizer identifies o(..., γ(o'; b), ...) with ±(o ∘_j o')(..., b, ...).
// Components are computed for straight-leaf bounds S = 0, 1, ... until the
// invariants repeat for a whole stabilization window.

#include "paperlab/algebras.hpp"

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace paperlab {

class WindowExceeded : public Error {
 public:
  using Error::Error;
};

class NotStabilized : public Error {
 public:
  using Error::Error;
};

class DescentFailure : public Error {
 public:
  using Error::Error;
};

struct TruncationBounds {
  std::size_t max_inner_vertices = 8;
  std::size_t max_straight_leaves = 6;
  std::size_t max_arity = 4;
  std::size_t stabilization_window = 2;
  void validate() const;
};

inline constexpr std::uint32_t kSnakyLeaf = UINT32_MAX;

/// Basis element of O_A^0(n).
struct Corolla {
  std::size_t op = 0;                 // basis index in O(leaves.size())
  std::vector<std::uint32_t> leaves;  // kSnakyLeaf or a basis index of A
  std::size_t straight() const;
  std::size_t snaky() const;
  PlanarTree shape() const;
  std::string code() const;
  auto operator<=>(const Corolla&) const = default;
};

using CorollaVec = std::map<Corolla, Scalar>;

int corolla_degree(const OAlgebra& a, const Corolla& g);
CorollaVec corolla_differential(const OAlgebra& a, const Corolla& g);
/// Grafts y into the i-th snaky leaf of x (1-based).
CorollaVec compose_corollas(const OAlgebra& a, const Corolla& x, std::size_t i, const Corolla& y);

struct StabilizationStep {
  std::size_t straight_bound = 0;
  std::map<int, DegreeInvariants> invariants;
};

struct EnvelopingComponent {
  std::size_t arity = 0;
  ChainComplex complex;
  /// Straight-leaf bound of the snapshot whose basis is used.
  std::size_t bound = 0;
  bool stabilized = false;
  std::vector<StabilizationStep> history;
  /// Leading generator of each basis element's representative.
  std::vector<std::string> basis_codes;
};

/// Lazily computed enveloping operad of one algebra. With quotient = false no
/// relations are imposed and the components are the truncated O_A^0(n).
class Envelope {
 public:
  Envelope(AlgebraPtr algebra, TruncationBounds bounds, bool quotient = true);
  ~Envelope();
  Envelope(const Envelope&) = delete;
  Envelope& operator=(const Envelope&) = delete;

  const OAlgebra& algebra() const { return *algebra_; }
  const AlgebraPtr& algebra_ptr() const { return algebra_; }
  const Operad& operad() const { return *algebra_->operad(); }
  const Ring& ring() const { return algebra_->ring(); }
  const TruncationBounds& bounds() const { return bounds_; }
  bool quotient() const { return quotient_; }

  const EnvelopingComponent& component(std::size_t n);
  /// Class of a combination of generators, in the basis of component(n).
  SparseVec project(std::size_t n, const CorollaVec& x);
  /// A representative of a basis element of component(n).
  CorollaVec lift(std::size_t n, std::size_t basis);

  /// x ∘_i y on basis elements of component(p) and component(q).
  SparseVec compose(std::size_t p, std::size_t x, std::size_t i, std::size_t q, std::size_t y);
  SparseVec compose(std::size_t p, const SparseVec& x, std::size_t i, std::size_t q, const SparseVec& y);
  /// ∘_i as a map O_A(p) ⊗ O_A(q) -> O_A(p+q-1) on the bases of tensor().
  ChainMap composition_map(std::size_t p, std::size_t q, std::size_t i);
  /// Checks that ∘_i kills the relations of both factors, up to the snapshot
  /// bounds. Throws DescentFailure naming a relation.
  void check_descent(std::size_t p, std::size_t q, std::size_t i);
  SparseVec unit();

  /// x ∘_i a for x a basis element of component(n) and a ∈ A; lands in component(n-1).
  SparseVec insert(std::size_t n, std::size_t x, std::size_t i, const SparseVec& a);
  /// O_A(0) -> A.
  ChainMap evaluation();
  /// A -> O_A(0), a |-> (u; a).
  ChainMap coevaluation();

  /// Generator-level operations shared with the tree blocks.
  CorollaVec compose_generators(const Corolla& x, std::size_t i, const Corolla& y) const;
  CorollaVec generator_differential(const Corolla& g) const;
  int generator_degree(const Corolla& g) const;

 private:
  struct Engine;
  struct Canonical;
  Engine& engine(std::size_t n);
  Canonical& canonical(std::size_t n);

  AlgebraPtr algebra_;
  TruncationBounds bounds_;
  bool quotient_;
  std::map<std::size_t, std::unique_ptr<Engine>> engines_;
  std::map<std::size_t, std::unique_ptr<Canonical>> canonical_;
};

struct EnvelopingResult {
  std::vector<EnvelopingComponent> components;  // arities 0..n
  bool stabilized = false;
  TruncationBounds bounds;
};

/// Components of O_A in arities 0..n.
EnvelopingResult enveloping_operad(Envelope& env, std::size_t n);
EnvelopingResult enveloping_operad(AlgebraPtr algebra, std::size_t n, const TruncationBounds& bounds);

/// O_φ : O_A(n) -> O_C(n) induced by φ on straight leaves.
ChainMap enveloping_map(Envelope& source, Envelope& target, const AlgebraMorphism& phi, std::size_t n);

// ---------------------------------------------------------------- tree blocks

/// Basis element of O_A^1(n): a root operation whose children are snaky leaves,
/// labeled straight leaves, or level-2 vertices carrying only labeled leaves.
struct LevelTree {
  struct Child {
    enum class Kind { Snaky, Label, Vertex } kind = Kind::Snaky;
    std::uint32_t label = 0;             // Label
    std::size_t op = 0;                  // Vertex: basis index in O(labels.size())
    std::vector<std::uint32_t> labels;   // Vertex
    auto operator<=>(const Child&) const = default;
  };
  std::size_t op = 0;
  std::vector<Child> children;
  PlanarTree shape() const;
  std::string code() const;
  auto operator<=>(const LevelTree&) const = default;
};

struct OA0Block {
  ChainComplex complex;
  std::vector<Corolla> basis;  // flat order
};

struct OA1Block {
  ChainComplex complex;
  std::vector<LevelTree> basis;  // flat order
};

/// Corollas with n snaky leaves and at most max_straight_leaves straight ones.
OA0Block build_OA0(const OAlgebra& a, std::size_t n, const TruncationBounds& b);
/// Trees with r level-2 vertices of arities m_k and s0 labels on the root,
/// r < max_inner_vertices, s0 + r and s0 + Σ m_k at most max_straight_leaves.
OA1Block build_OA1(const OAlgebra& a, std::size_t n, const TruncationBounds& b);

struct CoequalizerArrows {
  OA1Block upper;
  OA0Block lower;
  ChainMap d_corolla;
  ChainMap d_edge;
  ChainMap section;  // subdivides straight leaves by the unit
};

/// Throws WindowExceeded when the section would leave the truncation window.
CoequalizerArrows coequalizer_arrows(const OAlgebra& a, std::size_t n, const TruncationBounds& b);

// ---------------------------------------------------------------- closed forms

enum class ClosedFormKind { Initial, Uass, Ass, Arity1, A3zero, Free };

ClosedFormKind parse_closed_form_kind(const std::string& s);
std::string to_string(ClosedFormKind k);

/// A / (images of all operations of arity ≥ 2 up to arity_bound), as a
/// presented complex on the carrier of A.
ChainComplex decomposables_quotient(const OAlgebra& a, std::size_t arity_bound);

/// Components 0..max_arity of the stated closed form. Free gives the reduced
/// trees with at most bounds.max_straight_leaves straight leaves and requires
/// zero differentials on V and A. Throws Error on a kind/operad mismatch.
std::vector<ChainComplex> closed_form(ClosedFormKind kind, const AlgebraPtr& a, const TruncationBounds& bounds);

// ---------------------------------------------------------------- split coequalizers

/// U ⇉ V -> W with e f = e g, e s = id_W, f t = id_V, s e = g t.
struct SplitCoequalizerWitness {
  OA1Block upper;
  OA0Block lower;
  ChainComplex quotient;
  std::vector<std::string> quotient_labels;
  ChainMap f, g, e, s, t;
};

SplitCoequalizerWitness split_coequalizer_witness(ClosedFormKind kind, const AlgebraPtr& a, std::size_t n,
                                                  const TruncationBounds& bounds);
/// Throws AxiomViolation naming the identity and a basis element where it fails.
void check_split_coequalizer(const SplitCoequalizerWitness& w);

// ---------------------------------------------------------------- filtrations

/// A free attaching datum: f : Y -> Z and ḡ : Y -> A.
struct FreeAttachment {
  ChainMap f;
  ChainMap gbar;
};

enum class StageStatus { Stabilized, NotStabilized };

struct FiltrationStages {
  std::size_t arity = 0;
  std::vector<ChainComplex> stages;  // stages[t]
  std::vector<ChainMap> maps;        // maps[t-1] : stages[t-1] -> stages[t]
  /// Characteristic maps ⊕_patterns E_{t+n} ⊗ Z^{⊗t} -> stages[t], t ≥ 1.
  std::vector<ChainMap> characteristic;
  /// Attaching maps ⊕_patterns E_{t+n} ⊗ L_t -> stages[t-1] and the maps Φ̃_t they are glued along.
  std::vector<ChainMap> attaching;
  std::vector<ChainMap> glued_along;
  StageStatus status = StageStatus::NotStabilized;
};

/// Stages O_{B,t}(n), t ≤ max_t, of the enveloping operad of A ∪ F(Z) along
/// the attachment. The n = 0 stages are the algebra push-out stages B_t.
FiltrationStages filtration_algebra_pushout(Envelope& env, const FreeAttachment& att, std::size_t n,
                                            std::size_t max_t);

/// Stages P_{A,t}(n) for an operad push-out along F(U) -> F(V) with U = 0;
/// the tree blocks carry O_A on odd and V on even vertices.
FiltrationStages filtration_operad_pushout(Envelope& env, const SequenceV& u, const SequenceV& v, std::size_t n,
                                           std::size_t max_t);

}  // namespace paperlab
