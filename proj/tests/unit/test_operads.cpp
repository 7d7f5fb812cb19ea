#include "doctest.h"

#include <paperlab/operads.hpp>

using namespace paperlab;

namespace {

const Ring Qr = Ring::rationals();
const Ring Zr = Ring::integers();

std::size_t catalan(std::size_t n) {
  std::size_t c = 1;
  for (std::size_t k = 0; k < n; ++k) c = c * 2 * (2 * k + 1) / (k + 2);
  return c;
}

}  // namespace

TEST_CASE("builtin uass") {
  auto o = builtin_uass(Zr);
  CHECK(o->component(0) == ChainComplex::concentrated(Zr, 0, 1));
  CHECK(o->component(5) == ChainComplex::concentrated(Zr, 0, 1));
  CHECK_NOTHROW(check_operad_axioms(*o, 4));
}

TEST_CASE("builtin ass") {
  auto o = builtin_ass(Qr);
  CHECK(o->dim(0) == 0);
  CHECK(o->dim(1) == 1);
  CHECK(o->dim(4) == 1);
  CHECK_NOTHROW(check_operad_axioms(*o, 4));
}

TEST_CASE("builtin a3zero") {
  auto o = builtin_a3zero(Zr);
  CHECK(o->dim(1) == 1);
  CHECK(o->dim(2) == 1);
  CHECK(o->label(2, 0) == "mu");
  CHECK(o->dim(3) == 0);
  CHECK(o->dim(0) == 0);
  CHECK_NOTHROW(check_operad_axioms(*o, 4));
  CHECK(o->compose(2, 0, 1, 2, 0).empty());
  CHECK(o->compose(2, 0, 2, 2, 0).empty());
  for (std::size_t p = 1; p <= 2; ++p)
    for (std::size_t q = 0; q <= 2; ++q)
      if (p + q - 1 >= 3 && o->dim(q) > 0)
        for (std::size_t i = 1; i <= p; ++i) CHECK(o->compose(p, 0, i, q, 0).empty());
}

TEST_CASE("builtin arity1") {
  auto init = builtin_initial(Qr);
  CHECK(init->dim(1) == 1);
  CHECK(init->dim(2) == 0);
  CHECK(init->dim(0) == 0);
  CHECK_NOTHROW(check_operad_axioms(*init, 3));

  auto dual = builtin_arity1(Qr, Monoid::truncated_polynomial(2));
  CHECK(dual->dim(1) == 2);
  CHECK(dual->dim(2) == 0);
  CHECK(dual->compose(1, 1, 1, 1, 1).empty());
  CHECK_NOTHROW(check_operad_axioms(*dual, 3));
}

TEST_CASE("corrupted operads are rejected with a witness") {
  auto bad = with_composition_override(builtin_uass(Zr), 2, 0, 1, 2, 0, {{0, Scalar(-1)}});
  try {
    check_operad_axioms(*bad, 3);
    FAIL("expected AxiomViolation");
  } catch (const AxiomViolation& e) {
    CHECK(std::string(e.what()).find("p=") != std::string::npos);
  }
  auto bad_unit = with_composition_override(builtin_ass(Zr), 1, 0, 1, 3, 0, {});
  CHECK_THROWS_AS(check_operad_axioms(*bad_unit, 3), AxiomViolation);
}

TEST_CASE("free operad on a binary generator") {
  SequenceV v;
  v[2] = ChainComplex::concentrated(Qr, 0, 1, {"m"});
  auto f = free_operad(Qr, v, 5);
  for (std::size_t n = 1; n <= 6; ++n) CHECK(f->dim(n) == catalan(n - 1));
  CHECK(f->dim(3) == 2);
  CHECK(f->label(1, 0) == "~[]");
  CHECK(f->unit() == sparse_unit(0));
  CHECK_NOTHROW(check_operad_axioms(*f, 4));
}

TEST_CASE("free operad on zero generators is the initial operad") {
  auto f = free_operad(Qr, {}, 3);
  CHECK(f->dim(1) == 1);
  for (std::size_t n : {0, 2, 3, 4}) CHECK(f->dim(n) == 0);
  CHECK_NOTHROW(check_operad_axioms(*f, 3));
}

TEST_CASE("free operad with a differential and mixed arities satisfies the axioms") {
  // V(2) = k·m (deg 0) ⊕ k·h (deg 1) with d h = m; V(0) = k·c.
  ChainComplex v2(Qr);
  v2.set_rank(0, 1, {"m"});
  v2.set_rank(1, 1, {"h"});
  v2.set_differential(1, Matrix(Qr, 1, 1, {{1}}));
  SequenceV v{{2, v2}, {0, ChainComplex::concentrated(Qr, 0, 1, {"c"})}};
  auto f = free_operad(Qr, v, 3);
  CHECK_NOTHROW(validate(f->component(2)));
  CHECK_NOTHROW(check_operad_axioms(*f, 3));
  CHECK_NOTHROW(validate(f->composition_map(2, 2, 1)));
}

TEST_CASE("free operad basis is closed under grafting within the bound") {
  SequenceV v{{2, ChainComplex::concentrated(Qr, 0, 1)}, {1, ChainComplex::concentrated(Qr, 0, 1)}};
  auto f = free_operad(Qr, v, 3);
  for (std::size_t p = 1; p <= 4; ++p)
    for (std::size_t q = 1; q <= 4; ++q)
      for (std::size_t a = 0; a < f->dim(p); ++a)
        for (std::size_t b = 0; b < f->dim(q); ++b) {
          std::size_t size = f->basis(p)[a].labels.size() + f->basis(q)[b].labels.size();
          for (std::size_t i = 1; i <= p; ++i) {
            auto r = f->compose(p, a, i, q, b);
            if (size <= 3) {
              REQUIRE(r.size() == 1);
              CHECK(f->basis(p + q - 1)[r[0].first].shape == graft(f->basis(p)[a].shape, i, f->basis(q)[b].shape));
            } else {
              CHECK(r.empty());
            }
          }
        }
}

TEST_CASE("composition maps are chain maps") {
  auto o = builtin_uass(Zr);
  auto m = o->composition_map(2, 3, 2);
  CHECK_NOTHROW(validate(m));
  CHECK(m.component(0) == Matrix(Zr, 1, 1, {{1}}));
}

TEST_CASE("operad morphisms") {
  // ass -> uass is the inclusion on every arity n >= 1.
  OperadMorphism inc{builtin_ass(Qr), builtin_uass(Qr), [](std::size_t, std::size_t) { return sparse_unit(0); }};
  CHECK_NOTHROW(check_operad_morphism(inc, 3));
  OperadMorphism zero{builtin_ass(Qr), builtin_uass(Qr), [](std::size_t, std::size_t) { return SparseVec{}; }};
  CHECK_THROWS_AS(check_operad_morphism(zero, 3), AxiomViolation);
}
