#pragma once

// Push-outs of algebras along free maps F(Y) -> F(Z).

#include "paperlab/enveloping.hpp"

namespace paperlab {

struct PushoutStage {
  ChainComplex object;  // B_t
  ChainMap phi;         // B_{t-1} -> B_t
  ChainMap attaching;   // ψ_t
  ChainMap characteristic;
};

struct PushoutTrace {
  ChainComplex b0;
  std::vector<PushoutStage> stages;  // t = 1, 2, ...
  ChainComplex result;
  ChainMap f_prime;  // A -> B
  bool stabilized = false;
};

/// B as the colimit of B_0 = A -> B_1 -> ..., B_t the push-out along O_A(t) ⊗ f^{□t}.
/// Runs at most max_stages stages; `stabilized` reports whether the colimit was reached.
PushoutTrace pushout_along_free_corrected(AlgebraPtr a, const FreeAttachment& att, const TruncationBounds& bounds,
                                          std::size_t max_stages);

/// The same sequence glued from the raw corolla complexes O_A^0(t) instead of O_A(t).
PushoutTrace pushout_along_free_original_wrong(AlgebraPtr a, const FreeAttachment& att,
                                               const TruncationBounds& bounds, std::size_t max_stages);

struct CoproductWithFree {
  ChainComplex complex;  // ⊕_{n ≤ max_arity} O_A(n)
  ChainMap f_prime;      // A -> O_A(0) -> sum
  std::vector<std::size_t> arities;
  bool stabilized = true;
};

/// A ⨿ F_O(k) = ⊕_n O_A(n), truncated at bounds.max_arity.
CoproductWithFree coproduct_with_free_unit(AlgebraPtr a, const TruncationBounds& bounds);

enum class KPrimeKind { LeftTensor, RightTensor, EnvelopingPower };

struct KPrimeConstituents {
  ChainMap f;
  ChainComplex x;           // LeftTensor / RightTensor
  Envelope* env = nullptr;  // EnvelopingPower
  std::size_t t = 0;
};

/// f ⊗ X, X ⊗ f or O_A(t) ⊗ f^{□t}.
ChainMap kprime_map(KPrimeKind kind, const KPrimeConstituents& c);

/// Graded total rank of the module invariants, Σ_n (free rank + torsion count).
std::size_t graded_dimension(const ChainComplex& c);

}  // namespace paperlab
