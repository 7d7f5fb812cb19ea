#include "doctest.h"

#include <paperlab/pushouts.hpp>

using namespace paperlab;

namespace {

const Ring Qr = Ring::rationals();
const Ring Zr = Ring::integers();

TruncationBounds bounds(std::size_t straight = 4, std::size_t arity = 4) {
  TruncationBounds b;
  b.max_straight_leaves = straight;
  b.max_arity = arity;
  return b;
}

ChainComplex k_in(int degree, const Ring& r = Qr) {
  ChainComplex c(r);
  c.set_rank(degree, 1);
  return c;
}

FreeAttachment from_zero(const AlgebraPtr& a, const ChainComplex& z) {
  ChainComplex y(a->ring());
  return FreeAttachment{ChainMap::zero(y, z), ChainMap::zero(y, a->carrier())};
}

std::map<int, ModuleInvariants> modules_below(const ChainComplex& c, int top) {
  std::map<int, ModuleInvariants> out;
  for (auto& [d, x] : complex_invariants(c))
    if (d <= top && !(x.module.rank == 0 && x.module.torsion.empty())) out.emplace(d, x.module);
  return out;
}

std::size_t catalan(std::size_t n) {
  std::size_t c = 1;
  for (std::size_t k = 0; k < n; ++k) c = c * 2 * (2 * k + 1) / (k + 2);
  return c;
}

}  // namespace

TEST_CASE("Yau instance: corrected push-out is zero") {
  auto A = zero_algebra(builtin_uass(Qr));
  auto tr = pushout_along_free_corrected(A, from_zero(A, k_in(0)), bounds(), 6);
  CHECK(graded_dimension(tr.b0) == 0);
  for (const auto& s : tr.stages) CHECK(graded_dimension(s.object) == 0);
  CHECK(graded_dimension(tr.result) == 0);
  CHECK(tr.stabilized);
}

TEST_CASE("Yau instance: the uncorrected construction has dimension N") {
  auto A = zero_algebra(builtin_uass(Qr));
  for (std::size_t N : {1u, 3u, 6u}) {
    CAPTURE(N);
    TruncationBounds b = bounds(4, N + 1);
    auto tr = pushout_along_free_original_wrong(A, from_zero(A, k_in(0)), b, N);
    CHECK(graded_dimension(tr.result) == N);
    CHECK_FALSE(tr.stabilized);
  }
}

TEST_CASE("f = id leaves A unchanged") {
  auto A = truncated_polynomial_algebra(Qr, 2);
  ChainComplex y = k_in(0);
  ChainMap gbar(y, A->carrier());
  Matrix m(Qr, 2, 1);
  m.add_to(1, 0, Scalar(1));
  gbar.set_component(0, m);
  auto tr = pushout_along_free_corrected(A, FreeAttachment{ChainMap::identity(y), gbar}, bounds(4, 3), 3);
  CHECK(tr.stabilized);
  CHECK(same_invariants(tr.result, A->carrier()));
  CHECK(is_isomorphism(tr.f_prime));
}

TEST_CASE("initial algebra along 0 -> k gives the free algebra") {
  for (std::string name : {"uass", "ass", "a3zero"}) {
    CAPTURE(name);
    auto O = builtin_operad(name, Qr);
    auto A = initial_algebra(O);
    const std::size_t T = 3;
    auto att = from_zero(A, k_in(0));
    auto good = pushout_along_free_corrected(A, att, bounds(4, T + 1), T);
    auto bad = pushout_along_free_original_wrong(A, att, bounds(4, T + 1), T);
    auto F = free_algebra(O, k_in(0), T);
    CHECK(same_invariants(good.result, F.algebra->carrier()));
    // Raw corollas keep the O(0)-labelled straight leaves, which are nonzero only for uass.
    if (name != "uass") CHECK(same_invariants(bad.result, good.result));
  }
}

TEST_CASE("f' is injective for a free attachment along 0 -> k") {
  auto A = truncated_polynomial_algebra(Qr, 2);
  auto tr = pushout_along_free_corrected(A, from_zero(A, k_in(1)), bounds(4, 3), 2);
  for (int d : A->carrier().degrees()) {
    Matrix m = tr.f_prime.component(d);
    CHECK(m.rank() == A->carrier().rank(d));
  }
}

TEST_CASE("filtration: stage 0 is O_A and the Yau stages vanish") {
  {
    Envelope env(truncated_polynomial_algebra(Qr, 2), bounds(4, 4));
    auto att = from_zero(env.algebra_ptr(), k_in(2));
    for (std::size_t n = 0; n <= 2; ++n) {
      auto fs = filtration_algebra_pushout(env, att, n, 1);
      CHECK(same_invariants(fs.stages[0], env.component(n).complex));
    }
  }
  Envelope env(zero_algebra(builtin_uass(Qr)), bounds(4, 5));
  auto att = from_zero(env.algebra_ptr(), k_in(0));
  for (std::size_t n = 0; n <= 3; ++n) {
    CAPTURE(n);
    auto fs = filtration_algebra_pushout(env, att, n, 3);
    for (const auto& s : fs.stages) CHECK(graded_dimension(s) == 0);
  }
}

TEST_CASE("filtration coherence: uass, A = k, f : 0 -> k") {
  const std::size_t T = 3;
  const int top = 2 * static_cast<int>(T);
  auto A = initial_algebra(builtin_uass(Qr));
  Envelope env(A, bounds(4, 4));
  auto att = from_zero(A, k_in(2));
  auto B = free_algebra(builtin_uass(Qr), k_in(2), T);
  Envelope envB(B.algebra, bounds(4, 4));
  for (std::size_t n = 0; n <= 2; ++n) {
    CAPTURE(n);
    auto fs = filtration_algebra_pushout(env, att, n, T);
    REQUIRE(fs.stages.size() == T + 1);
    CHECK(modules_below(fs.stages.back(), top) == modules_below(envB.component(n).complex, top));
  }
}

TEST_CASE("filtration with a nonzero attaching map") {
  // A = k[x]/x^2 and Z the cone on Y = k, with ḡ(y) = x; x becomes a boundary.
  auto A = truncated_polynomial_algebra(Qr, 2);
  ChainComplex y = k_in(0);
  ChainComplex z(Qr);
  z.set_rank(0, 1);
  z.set_rank(1, 1);
  Matrix d(Qr, 1, 1);
  d.add_to(0, 0, Scalar(1));
  z.set_differential(1, d);
  ChainMap f(y, z);
  Matrix i(Qr, 1, 1);
  i.add_to(0, 0, Scalar(1));
  f.set_component(0, i);
  ChainMap gbar(y, A->carrier());
  Matrix g(Qr, 2, 1);
  g.add_to(1, 0, Scalar(1));
  gbar.set_component(0, g);
  auto tr = pushout_along_free_corrected(A, FreeAttachment{f, gbar}, bounds(5, 4), 2);
  for (const auto& s : tr.stages) CHECK_NOTHROW(validate(s.phi));
  CHECK(homology(tr.result, 0).rank == 1);
}

TEST_CASE("operad filtration: U = V = 0 is constant") {
  Envelope env(truncated_polynomial_algebra(Qr, 2), bounds(4, 3));
  auto fs = filtration_operad_pushout(env, {}, {}, 2, 3);
  for (const auto& s : fs.stages) CHECK(same_invariants(s, env.component(2).complex));
  CHECK(fs.status == StageStatus::Stabilized);
}

TEST_CASE("operad filtration: a binary generator over the initial operad") {
  Envelope env(initial_algebra(builtin_initial(Qr)), bounds(4, 3));
  SequenceV v{{2, k_in(0)}};
  auto fs = filtration_operad_pushout(env, {}, v, 2, 1);
  CHECK(graded_dimension(fs.stages[1]) - graded_dimension(fs.stages[0]) == 1);
  // The colimit is the free operad on one binary operation.
  for (std::size_t n = 1; n <= 5; ++n) {
    CAPTURE(n);
    auto full = filtration_operad_pushout(env, {}, v, n, 5);
    CHECK(graded_dimension(full.stages.back()) == catalan(n - 1));
  }
  auto t2 = filtration_operad_pushout(env, {}, v, 4, 2);
  CHECK(graded_dimension(t2.characteristic[1].source()) == 0);
  auto t3 = filtration_operad_pushout(env, {}, v, 4, 3);
  CHECK(graded_dimension(t3.characteristic[2].source()) == 5);
}

TEST_CASE("operad filtration: nonzero U is rejected") {
  Envelope env(initial_algebra(builtin_initial(Qr)), bounds(4, 3));
  SequenceV u{{2, k_in(0)}};
  CHECK_THROWS_AS(filtration_operad_pushout(env, u, u, 2, 1), Error);
}

TEST_CASE("coproduct with a free unit") {
  auto A = zero_algebra(builtin_uass(Qr));
  auto c = coproduct_with_free_unit(A, bounds(4, 3));
  CHECK(graded_dimension(c.complex) == 0);

  auto O = builtin_a3zero(Qr);
  auto init = coproduct_with_free_unit(initial_algebra(O), bounds(4, 4));
  std::size_t expect = 0;
  for (std::size_t n = 0; n <= 4; ++n) expect += graded_dimension(O->component(n));
  CHECK(graded_dimension(init.complex) == expect);
}

TEST_CASE("K' maps") {
  ChainComplex k = k_in(0);
  ChainMap zero = ChainMap::zero(ChainComplex(Qr), k);
  CHECK(graded_dimension(kprime_map(KPrimeKind::LeftTensor, {zero, k}).target()) == 1);
  ChainMap id = ChainMap::identity(k);
  CHECK(is_isomorphism(kprime_map(KPrimeKind::RightTensor, {id, k})));

  auto O = builtin_uass(Qr);
  Envelope env(initial_algebra(O), bounds(4, 3));
  KPrimeConstituents c{id, ChainComplex(Qr), &env, 1};
  ChainMap m = kprime_map(KPrimeKind::EnvelopingPower, c);
  CHECK(same_invariants(m.target(), tensor(O->component(1), k)));
  CHECK(is_isomorphism(m));
  c.t = 0;
  CHECK_THROWS_AS(kprime_map(KPrimeKind::EnvelopingPower, c), Error);
}
