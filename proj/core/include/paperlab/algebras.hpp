#pragma once

// Algebras over nonsymmetric operads, described on bases like operads are:
// the carrier is a free complex and the structure maps O(n) ⊗ A^{⊗n} -> A are
// given on basis elements.

#include "paperlab/operads.hpp"

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace paperlab {

class OAlgebra {
 public:
  /// Image of op ⊗ e_{args[0]} ⊗ ... ⊗ e_{args[n-1]}, op a basis index of O(n).
  using Action = std::function<SparseVec(std::size_t n, std::size_t op, const std::vector<std::size_t>& args)>;

  OAlgebra(OperadPtr operad, ChainComplex carrier, Action action, std::string name = "algebra");

  const OperadPtr& operad() const { return operad_; }
  const Ring& ring() const { return operad_->ring(); }
  const ChainComplex& carrier() const { return carrier_; }
  const std::string& name() const { return name_; }
  std::size_t dim() const { return degrees_.size(); }
  int degree(std::size_t basis) const { return degrees_.at(basis); }
  std::string label(std::size_t basis) const { return labels_.at(basis); }
  SparseVec differential(std::size_t basis) const;

  SparseVec act(std::size_t n, std::size_t op, const std::vector<std::size_t>& args) const;
  /// Multilinear extension.
  SparseVec act(std::size_t n, const SparseVec& op, const std::vector<SparseVec>& args) const;

  /// O(n) ⊗ A^{⊗n} -> A on the bases of TensorBasis({O(n), A, ..., A}).
  ChainMap structure_map(std::size_t n) const;

  /// Set when the carrier is a truncation and products leaving it were dropped.
  bool truncated = false;

 private:
  OperadPtr operad_;
  ChainComplex carrier_;
  Action action_;
  std::string name_;
  std::vector<int> degrees_;
  std::vector<std::string> labels_;
  std::vector<SparseVec> d_;
  mutable std::mutex mutex_;
  mutable std::map<std::vector<std::size_t>, SparseVec> cache_;  // key: n, op, args...
};

using AlgebraPtr = std::shared_ptr<const OAlgebra>;

/// e_i · e_j as a sparse vector, for products[i][j].
using ProductTable = std::vector<std::vector<SparseVec>>;

/// An algebra over uass, ass or a3zero from a bilinear product on the carrier.
/// uass needs the unit element; arity-0 operations of other operads are absent.
AlgebraPtr associative_algebra(OperadPtr operad, ChainComplex carrier, ProductTable products,
                               std::optional<SparseVec> unit = {}, std::string name = "algebra");

/// A left module over the monoid M of an arity-1 operad: action[m][a] = e_m · e_a.
AlgebraPtr module_algebra(OperadPtr operad, ChainComplex carrier, ProductTable action, std::string name = "module");

/// Image of v ⊗ e_{args[0]} ⊗ ... for v a basis index of V(args.size()).
using GeneratorAction = std::function<SparseVec(std::size_t v, const std::vector<std::size_t>& args)>;

/// An algebra over F(V) from the actions of the generators; trees act by
/// iterated generator actions.
AlgebraPtr free_operad_algebra(std::shared_ptr<const FreeOperad> operad, ChainComplex carrier, GeneratorAction action,
                               std::string name = "algebra");

/// The initial algebra: carrier O(0), structure by operad composition.
AlgebraPtr initial_algebra(OperadPtr operad);
/// The zero complex with the only possible structure.
AlgebraPtr zero_algebra(OperadPtr operad);
/// k[x]/x^m as a uass-algebra with x in the given degree.
AlgebraPtr truncated_polynomial_algebra(Ring ring, std::size_t m, int x_degree = 0);

/// Z x ⊕ Z y over a3zero with x^2 = 2y and xy = yx = y^2 = 0.
AlgebraPtr a3zero_torsion_example(Ring ring = Ring::integers());
/// k z -> k y ⊕ k y2 over a3zero with d z = y2, y·y = y2, all other products zero.
AlgebraPtr a3zero_dg_example(Ring ring = Ring::rationals());
/// k x over a3zero with x^2 = 0.
AlgebraPtr a3zero_square_zero(Ring ring = Ring::rationals());

/// Checks structure maps are chain maps, the unit law and compatibility with
/// every ∘_i, for operations of arity at most arity_bound. Throws AxiomViolation.
void check_algebra_axioms(const OAlgebra& a, std::size_t arity_bound);

struct AlgebraMorphism {
  AlgebraPtr source;
  AlgebraPtr target;
  ChainMap map;
  /// Image of a basis element of the source carrier.
  SparseVec apply(std::size_t basis) const;
  SparseVec apply(const SparseVec& x) const;
};

/// Throws AxiomViolation unless the map is a chain map commuting with all
/// operations of arity at most arity_bound.
void check_algebra_morphism(const AlgebraMorphism& f, std::size_t arity_bound);

/// Basis element of a free algebra: op ∈ O(n) applied to n generators.
struct FreeWord {
  std::size_t arity;
  std::size_t op;
  std::vector<std::size_t> letters;
};

struct FreeAlgebra {
  AlgebraPtr algebra;
  std::vector<FreeWord> words;  // flat basis order of the carrier
  /// The generators X -> F(X), as the arity-1 words u ⊗ x.
  ChainMap unit_map;
};

/// ⊕_{n ≤ arity_bound} O(n) ⊗ X^{⊗n}; products of total arity above the bound
/// are dropped and the truncated flag records whether that can happen.
FreeAlgebra free_algebra(OperadPtr operad, const ChainComplex& x, std::size_t arity_bound);

}  // namespace paperlab
