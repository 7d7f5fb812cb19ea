#include "paperlab/corpus.hpp"

namespace paperlab {

ChainComplex ground_complex(const Ring& ring, int degree) { return ChainComplex::concentrated(ring, degree, 1); }

FreeAttachment attachment_from_zero(const AlgebraPtr& a, const ChainComplex& z) {
  ChainComplex y(a->ring());
  return FreeAttachment{ChainMap::zero(y, z), ChainMap::zero(y, a->carrier())};
}

YauInstance yau_instance(Ring ring) {
  auto a = zero_algebra(builtin_uass(ring));
  return YauInstance{a, attachment_from_zero(a, ground_complex(ring))};
}

AlgebraMorphism quasi_iso_example_map(Ring ring) {
  auto a = a3zero_dg_example(ring);
  auto b = a3zero_square_zero(ring);
  ChainMap phi(a->carrier(), b->carrier());
  phi.set_component(0, Matrix(ring, 1, 2, {{1, 0}}));
  return AlgebraMorphism{a, b, phi};
}

AlgebraPtr dual_numbers_module(Ring ring) {
  auto o = builtin_arity1(ring, Monoid::truncated_polynomial(2));
  ChainComplex c = ChainComplex::concentrated(ring, 0, 2, {"1", "t"});
  ProductTable act(2, std::vector<SparseVec>(2));
  act[0][0] = sparse_unit(0);
  act[0][1] = sparse_unit(1);
  act[1][0] = sparse_unit(1);
  return module_algebra(o, c, act, "k[t]/t^2");
}

std::vector<CrosscheckInstance> crosscheck_instances(const Ring& ring) {
  auto dual = Monoid::truncated_polynomial(2);
  return {
      {"initial-uass", ClosedFormKind::Initial, initial_algebra(builtin_uass(ring)), "PAPER"},
      {"initial-a3zero", ClosedFormKind::Initial, initial_algebra(builtin_a3zero(ring)), "PAPER"},
      {"initial-arity1", ClosedFormKind::Initial, initial_algebra(builtin_arity1(ring, dual)), "PAPER"},
      {"uass-k", ClosedFormKind::Uass, truncated_polynomial_algebra(ring, 1), "DERIVED"},
      {"uass-dual-numbers", ClosedFormKind::Uass, truncated_polynomial_algebra(ring, 2), "DERIVED"},
      {"a3zero-torsion", ClosedFormKind::A3zero, a3zero_torsion_example(Ring::integers()), "PAPER"},
      {"arity1-dual-numbers", ClosedFormKind::Arity1, dual_numbers_module(ring), "TRIVIAL"},
  };
}

}  // namespace paperlab
