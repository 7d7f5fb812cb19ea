#pragma once

// The concrete instances the counterexamples and cross-checks run on.

#include "paperlab/pushouts.hpp"

#include <string>
#include <vector>

namespace paperlab {

/// The zero uass-algebra attached along 0 -> k (k in degree 0).
struct YauInstance {
  AlgebraPtr algebra;
  FreeAttachment attachment;
};
YauInstance yau_instance(Ring ring = Ring::rationals());

/// Attachment along 0 -> Z.
FreeAttachment attachment_from_zero(const AlgebraPtr& a, const ChainComplex& z);

/// k in one degree.
ChainComplex ground_complex(const Ring& ring, int degree = 0);

/// φ : A -> B with A = (k z -> k y ⊕ k y²), B = k x, φ(y) = x.
AlgebraMorphism quasi_iso_example_map(Ring ring = Ring::rationals());

/// k[t]/t² acting on itself, over the arity-1 operad of k[t]/t².
AlgebraPtr dual_numbers_module(Ring ring);

struct CrosscheckInstance {
  std::string id;
  ClosedFormKind kind;
  AlgebraPtr algebra;
  std::string provenance;  // PAPER, DERIVED or TRIVIAL
};

/// initial × (uass, a3zero, arity1), uass × (k, k[x]/x²), a3zero × the torsion
/// example (always over Z), arity1 × k[t]/t².
std::vector<CrosscheckInstance> crosscheck_instances(const Ring& ring);

}  // namespace paperlab
