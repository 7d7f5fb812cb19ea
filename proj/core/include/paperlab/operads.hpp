#pragma once

// Nonsymmetric operads in chain complexes, described on bases.
//
// Each component O(n) is a free complex; its basis is the flat basis of the
// ChainComplex (degrees ascending). Partial compositions are given on basis
// elements and extended bilinearly.

#include "paperlab/chain.hpp"
#include "paperlab/trees.hpp"

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace paperlab {

/// Sparse vector on a flat basis, sorted by index, no zero entries.
using SparseVec = std::vector<std::pair<std::size_t, Scalar>>;

void sparse_axpy(SparseVec& y, const Scalar& a, const SparseVec& x);
SparseVec sparse_normalized(const Ring& ring, std::map<std::size_t, Scalar> entries);
SparseVec sparse_unit(std::size_t index);
/// Reduces coefficients into the ring and drops zeros.
SparseVec sparse_normalize(const Ring& ring, const SparseVec& v);
std::string sparse_show(const SparseVec& v);
/// d of a flat basis element of a free complex, on the flat basis.
SparseVec flat_differential(const ChainComplex& c, std::size_t flat);

class AxiomViolation : public Error {
 public:
  using Error::Error;
};

class Operad {
 public:
  explicit Operad(Ring ring) : ring_(ring) {}
  virtual ~Operad() = default;
  Operad(const Operad&) = delete;
  Operad& operator=(const Operad&) = delete;

  const Ring& ring() const { return ring_; }
  virtual std::string name() const = 0;
  /// Largest arity with a nonzero component; nullopt when the support is unbounded.
  virtual std::optional<std::size_t> max_arity() const = 0;

  /// O(n), materialized once and cached.
  const ChainComplex& component(std::size_t n) const;
  std::size_t dim(std::size_t n) const { return component(n).total_rank(); }
  int degree(std::size_t n, std::size_t basis) const;
  std::string label(std::size_t n, std::size_t basis) const;
  /// d of a basis element of O(n).
  SparseVec differential(std::size_t n, std::size_t basis) const;

  /// a ∘_i b for a ∈ O(p), b ∈ O(q), 1 ≤ i ≤ p.
  SparseVec compose(std::size_t p, std::size_t a, std::size_t i, std::size_t q, std::size_t b) const;
  SparseVec compose(std::size_t p, const SparseVec& a, std::size_t i, std::size_t q, const SparseVec& b) const;
  /// The unit as an element of O(1).
  virtual SparseVec unit() const = 0;

  /// ∘_i as a chain map O(p) ⊗ O(q) -> O(p+q-1) on the bases of tensor().
  ChainMap composition_map(std::size_t p, std::size_t q, std::size_t i) const;

 protected:
  virtual ChainComplex make_component(std::size_t n) const = 0;
  virtual SparseVec compose_basis(std::size_t p, std::size_t a, std::size_t i, std::size_t q, std::size_t b) const = 0;

 private:
  struct Cached {
    ChainComplex complex;
    std::vector<int> degrees;
    std::vector<std::string> labels;
  };
  const Cached& cached(std::size_t n) const;

  Ring ring_;
  mutable std::mutex mutex_;
  mutable std::map<std::size_t, std::unique_ptr<Cached>> cache_;
};

using OperadPtr = std::shared_ptr<const Operad>;

/// Degree-0 associative unital algebra given by structure constants:
/// e_i e_j = Σ_k table[i][j][k] e_k.
struct Monoid {
  std::size_t rank = 1;
  std::vector<std::vector<std::vector<long>>> table;
  std::vector<long> unit;
  std::vector<std::string> labels;

  static Monoid ground();
  /// k[t]/t^m with basis 1, t, ..., t^{m-1}.
  static Monoid truncated_polynomial(std::size_t m);
};

OperadPtr builtin_uass(Ring ring);
OperadPtr builtin_ass(Ring ring);
OperadPtr builtin_a3zero(Ring ring);
OperadPtr builtin_arity1(Ring ring, const Monoid& m);
/// The initial operad: O(1) = k, zero elsewhere.
OperadPtr builtin_initial(Ring ring);
/// Looks up "uass", "ass", "a3zero", "initial".
OperadPtr builtin_operad(const std::string& name, Ring ring);

/// A vertex-labeled planar tree: labels[k] is the basis index in V(arity) of
/// the k-th inner vertex in preorder.
struct LabeledTree {
  PlanarTree shape;
  std::vector<std::size_t> labels;
  std::string code() const;
};

/// Arity -> complex; finite support.
using SequenceV = std::map<std::size_t, ChainComplex>;

class FreeOperad : public Operad {
 public:
  FreeOperad(Ring ring, SequenceV v, std::size_t size_bound);

  std::string name() const override { return "free"; }
  std::optional<std::size_t> max_arity() const override;
  SparseVec unit() const override;

  const SequenceV& generators() const { return v_; }
  std::size_t size_bound() const { return size_bound_; }
  /// Basis trees of F(V)(n) in flat order.
  const std::vector<LabeledTree>& basis(std::size_t n) const;
  std::optional<std::size_t> index_of(std::size_t n, const LabeledTree& t) const;

 protected:
  ChainComplex make_component(std::size_t n) const override;
  SparseVec compose_basis(std::size_t p, std::size_t a, std::size_t i, std::size_t q, std::size_t b) const override;

 private:
  struct Basis {
    std::vector<LabeledTree> trees;
    std::map<std::string, std::size_t> index;
  };
  const Basis& basis_data(std::size_t n) const;
  int tree_degree(const LabeledTree& t) const;

  SequenceV v_;
  std::size_t size_bound_;
  mutable std::mutex basis_mutex_;
  mutable std::map<std::size_t, std::unique_ptr<Basis>> bases_;
};

std::shared_ptr<const FreeOperad> free_operad(Ring ring, SequenceV v, std::size_t size_bound);

/// Wraps an operad and overrides one basis composition; used to build
/// deliberately broken operads for checker tests.
OperadPtr with_composition_override(OperadPtr base, std::size_t p, std::size_t a, std::size_t i, std::size_t q,
                                    std::size_t b, SparseVec value);

/// Checks unit laws, nested and disjoint associativity, the Leibniz rule and
/// d^2 = 0 on basis elements, for arities up to arity_bound.
/// Throws AxiomViolation naming the witness.
void check_operad_axioms(const Operad& o, std::size_t arity_bound);

struct OperadMorphism {
  OperadPtr source;
  OperadPtr target;
  /// Image of a basis element of source(n).
  std::function<SparseVec(std::size_t n, std::size_t basis)> map;

  SparseVec apply(std::size_t n, const SparseVec& x) const;
};

void check_operad_morphism(const OperadMorphism& m, std::size_t arity_bound);

}  // namespace paperlab
