#include "doctest.h"

#include <paperlab/algebras.hpp>

using namespace paperlab;

namespace {

const Ring Qr = Ring::rationals();
const Ring Zr = Ring::integers();

}  // namespace

TEST_CASE("torsion example over a3zero satisfies the axioms and A^3 = 0") {
  auto a = a3zero_torsion_example();
  CHECK_NOTHROW(check_algebra_axioms(*a, 4));
  CHECK(a->act(2, 0, {0, 0}) == SparseVec{{1, Scalar(2)}});
  CHECK(a->act(2, 0, {0, 1}).empty());
  CHECK(a->act(2, 0, {1, 1}).empty());
  for (std::size_t x = 0; x < 2; ++x)
    for (std::size_t y = 0; y < 2; ++y)
      for (std::size_t z = 0; z < 2; ++z) {
        auto xy = a->act(2, sparse_unit(0), {sparse_unit(x), sparse_unit(y)});
        CHECK(a->act(2, sparse_unit(0), {xy, sparse_unit(z)}).empty());
      }
}

TEST_CASE("dg example: multiplication is a chain map") {
  auto a = a3zero_dg_example();
  CHECK_NOTHROW(check_algebra_axioms(*a, 4));
  CHECK_NOTHROW(validate(a->structure_map(2)));
  CHECK(a->differential(2) == sparse_unit(1));

  // d z = y instead of y^2 breaks the Leibniz rule on y·z.
  ChainComplex c = a->carrier();
  c.set_differential(1, Matrix(Qr, 2, 1, {{1}, {0}}));
  ProductTable t(3, std::vector<SparseVec>(3));
  t[0][0] = sparse_unit(1);
  auto bad = associative_algebra(builtin_a3zero(Qr), c, t);
  try {
    check_algebra_axioms(*bad, 2);
    FAIL("expected AxiomViolation");
  } catch (const AxiomViolation& e) {
    CHECK(std::string(e.what()).find("chain-map") != std::string::npos);
  }
}

TEST_CASE("zero algebra over uass") {
  auto z = zero_algebra(builtin_uass(Qr));
  CHECK(z->dim() == 0);
  CHECK_NOTHROW(check_algebra_axioms(*z, 4));
  CHECK(z->act(0, 0, {}).empty());
}

TEST_CASE("unital algebras over uass") {
  for (int deg : {0, 2, 1}) {
    auto a = truncated_polynomial_algebra(Qr, 3, deg);
    CHECK(a->dim() == 3);
    CHECK_NOTHROW(check_algebra_axioms(*a, 4));
  }
  auto k = truncated_polynomial_algebra(Zr, 1);
  CHECK(k->act(0, 0, {}) == sparse_unit(0));
  CHECK(k->act(3, 0, {0, 0, 0}) == sparse_unit(0));
}

TEST_CASE("broken associativity is detected") {
  ChainComplex c = ChainComplex::concentrated(Qr, 0, 2, {"1", "x"});
  ProductTable t(2, std::vector<SparseVec>(2));
  t[0][0] = sparse_unit(0);
  t[0][1] = sparse_unit(1);
  t[1][0] = sparse_unit(1);
  t[1][1] = sparse_unit(0);  // x^2 = 1 is fine
  CHECK_NOTHROW(check_algebra_axioms(*associative_algebra(builtin_uass(Qr), c, t, sparse_unit(0)), 3));
  t[1][1] = sparse_unit(1);  // x^2 = x with unit 1 is fine too
  CHECK_NOTHROW(check_algebra_axioms(*associative_algebra(builtin_uass(Qr), c, t, sparse_unit(0)), 3));
  t[0][1] = {};  // 1·x = 0 breaks the unit
  CHECK_THROWS_AS(check_algebra_axioms(*associative_algebra(builtin_uass(Qr), c, t, sparse_unit(0)), 3),
                  AxiomViolation);
}

TEST_CASE("initial algebras") {
  auto k = initial_algebra(builtin_uass(Zr));
  CHECK(k->dim() == 1);
  CHECK_NOTHROW(check_algebra_axioms(*k, 4));
  CHECK(initial_algebra(builtin_ass(Zr))->dim() == 0);

  SequenceV v{{2, ChainComplex::concentrated(Qr, 0, 1, {"m"})}, {0, ChainComplex::concentrated(Qr, 0, 1, {"c"})}};
  auto f = free_operad(Qr, v, 4);
  auto init = initial_algebra(f);
  CHECK(init->dim() == f->dim(0));
  CHECK_NOTHROW(check_algebra_axioms(*init, 2));
}

TEST_CASE("modules over arity-1 operads") {
  auto o = builtin_arity1(Qr, Monoid::truncated_polynomial(2));
  // k[t]/t^2 acting on itself.
  ProductTable act(2, std::vector<SparseVec>(2));
  act[0][0] = sparse_unit(0);
  act[0][1] = sparse_unit(1);
  act[1][0] = sparse_unit(1);
  auto m = module_algebra(o, ChainComplex::concentrated(Qr, 0, 2, {"1", "t"}), act);
  CHECK_NOTHROW(check_algebra_axioms(*m, 3));
  CHECK_THROWS(module_algebra(builtin_uass(Qr), ChainComplex(Qr), {}));
}

TEST_CASE("free algebras") {
  auto k = ChainComplex::concentrated(Qr, 0, 1, {"z"});
  auto fu = free_algebra(builtin_uass(Qr), k, 6);
  CHECK(fu.algebra->dim() == 7);
  CHECK(fu.algebra->truncated);
  CHECK_NOTHROW(check_algebra_axioms(*fu.algebra, 3));
  CHECK_NOTHROW(validate(fu.unit_map));

  auto fz = free_algebra(builtin_uass(Qr), ChainComplex(Qr), 5);
  CHECK(fz.algebra->carrier() == builtin_uass(Qr)->component(0));

  auto fa = free_algebra(builtin_a3zero(Zr), ChainComplex::concentrated(Zr, 0, 1), 6);
  CHECK(fa.algebra->dim() == 2);
  CHECK_FALSE(fa.algebra->truncated);
  CHECK_NOTHROW(check_algebra_axioms(*fa.algebra, 4));

  // Generators in odd degree with a differential.
  ChainComplex x(Qr);
  x.set_rank(0, 1, {"a"});
  x.set_rank(1, 1, {"b"});
  x.set_differential(1, Matrix(Qr, 1, 1, {{1}}));
  auto fx = free_algebra(builtin_ass(Qr), x, 3);
  CHECK(fx.algebra->dim() == 2 + 4 + 8);
  CHECK_NOTHROW(validate(fx.algebra->carrier()));
  CHECK_NOTHROW(check_algebra_axioms(*fx.algebra, 3));
}

TEST_CASE("algebra morphisms") {
  auto a = a3zero_dg_example();
  auto b = a3zero_square_zero();
  ChainMap phi(a->carrier(), b->carrier());
  phi.set_component(0, Matrix(Qr, 1, 2, {{1, 0}}));
  AlgebraMorphism f{a, b, phi};
  CHECK_NOTHROW(check_algebra_morphism(f, 3));
  CHECK(is_quasi_iso(phi).quasi_isomorphism);

  ChainMap bad(a->carrier(), b->carrier());
  bad.set_component(0, Matrix(Qr, 1, 2, {{1, 1}}));
  CHECK_THROWS_AS(check_algebra_morphism(AlgebraMorphism{a, b, bad}, 3), AxiomViolation);
}
