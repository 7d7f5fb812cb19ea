#include "doctest.h"

#include <paperlab/enveloping.hpp>

using namespace paperlab;

namespace {

const Ring Qr = Ring::rationals();
const Ring Zr = Ring::integers();

TruncationBounds small(std::size_t straight = 4) {
  TruncationBounds b;
  b.max_straight_leaves = straight;
  b.max_arity = 3;
  return b;
}

FgModule at0(const ChainComplex& c) { return module_at(c, 0); }

AlgebraPtr ground_uass(Ring r) { return truncated_polynomial_algebra(r, 1); }

}  // namespace

TEST_CASE("initial algebra: O_A(n) agrees with O(n)") {
  for (const char* name : {"uass", "ass", "a3zero"}) {
    CAPTURE(name);
    auto O = builtin_operad(name, Qr);
    Envelope env(initial_algebra(O), small());
    for (std::size_t n = 0; n <= 3; ++n) {
      CAPTURE(n);
      const auto& c = env.component(n);
      CHECK(c.stabilized);
      CHECK(same_invariants(c.complex, O->component(n)));
    }
  }
}

TEST_CASE("uass with A = k gives k in every arity") {
  Envelope env(ground_uass(Qr), small());
  for (std::size_t n = 0; n <= 3; ++n) {
    CAPTURE(n);
    const auto& c = env.component(n);
    CHECK(c.stabilized);
    CHECK(c.complex.total_rank() == 1);
    CHECK(at0(c.complex).rank == 1);
  }
}

TEST_CASE("uass with A = k[x]/x^2 gives A^(n+1)") {
  Envelope env(truncated_polynomial_algebra(Qr, 2), small());
  for (std::size_t n = 0; n <= 2; ++n) {
    CAPTURE(n);
    const auto& c = env.component(n);
    CHECK(c.stabilized);
    std::size_t expect = 1;
    for (std::size_t k = 0; k <= n; ++k) expect *= 2;
    CHECK(at0(c.complex).rank == expect);
  }
}

TEST_CASE("a3zero torsion example: O_A(1) is Z^3 + (Z/2)^2") {
  auto a = a3zero_torsion_example();
  Envelope env(a, small());
  const auto& c0 = env.component(0);
  CHECK(same_invariants(c0.complex, a->carrier()));
  const auto& c1 = env.component(1);
  CHECK(c1.stabilized);
  auto m = at0(c1.complex);
  CHECK(m.rank == 3);
  CHECK(m.torsion == std::vector<Integer>{2, 2});
  CHECK(at0(env.component(2).complex).rank == 1);
  CHECK(env.component(3).complex.total_rank() == 0);
}

TEST_CASE("O_A(0) has the invariants of A") {
  std::vector<AlgebraPtr> corpus{ground_uass(Qr), truncated_polynomial_algebra(Qr, 3), a3zero_dg_example(),
                                 a3zero_square_zero(), zero_algebra(builtin_uass(Qr))};
  for (const auto& a : corpus) {
    CAPTURE(a->name());
    Envelope env(a, small());
    CHECK(same_invariants(env.component(0).complex, a->carrier()));
  }
}

TEST_CASE("the unit composes as the identity") {
  Envelope env(truncated_polynomial_algebra(Qr, 2), small());
  SparseVec u = env.unit();
  for (std::size_t n = 1; n <= 2; ++n)
    for (std::size_t x = 0; x < env.component(n).complex.total_rank(); ++x) {
      CAPTURE(n);
      CAPTURE(x);
      CHECK(env.compose(1, u, 1, n, sparse_unit(x)) == sparse_unit(x));
      for (std::size_t i = 1; i <= n; ++i) CHECK(env.compose(n, sparse_unit(x), i, 1, u) == sparse_unit(x));
    }
}

TEST_CASE("composition is associative on the torsion example") {
  Envelope env(a3zero_torsion_example(), small());
  const std::size_t d1 = env.component(1).complex.total_rank();
  const std::size_t d2 = env.component(2).complex.total_rank();
  for (std::size_t x = 0; x < d2; ++x)
    for (std::size_t y = 0; y < d1; ++y)
      for (std::size_t z = 0; z < d1; ++z) {
        // (x ∘_1 y) ∘_2 z = (x ∘_2 z) ∘_1 y
        auto lhs = env.compose(2, env.compose(2, x, 1, 1, y), 2, 1, sparse_unit(z));
        auto rhs = env.compose(2, env.compose(2, x, 2, 1, z), 1, 1, sparse_unit(y));
        CHECK(lhs == rhs);
        // (x ∘_1 y) ∘_1 z = x ∘_1 (y ∘_1 z)
        auto a = env.compose(2, env.compose(2, x, 1, 1, y), 1, 1, sparse_unit(z));
        auto b = env.compose(2, sparse_unit(x), 1, 1, env.compose(1, y, 1, 1, z));
        CHECK(a == b);
      }
  CHECK_NOTHROW(env.check_descent(1, 1, 1));
  CHECK_NOTHROW(env.check_descent(2, 1, 2));
}

TEST_CASE("uass with A = k: compositions are k ⊗ k -> k") {
  Envelope env(ground_uass(Qr), small());
  for (std::size_t p = 1; p <= 2; ++p)
    for (std::size_t q = 0; q <= 2; ++q)
      for (std::size_t i = 1; i <= p; ++i) {
        auto r = env.compose(p, 0, i, q, 0);
        REQUIRE(r.size() == 1);
        CHECK(abs(r[0].second) == 1);
        CHECK_NOTHROW(validate(env.composition_map(p, q, i)));
      }
}

TEST_CASE("initial algebra: compositions agree with the operad") {
  auto O = builtin_uass(Qr);
  Envelope env(initial_algebra(O), small());
  for (std::size_t p = 1; p <= 3; ++p)
    for (std::size_t q = 0; q + p <= 4; ++q)
      for (std::size_t i = 1; i <= p; ++i) {
        auto r = env.compose(p, 0, i, q, 0);
        REQUIRE(r.size() == 1);
        CHECK(r[0].second == O->compose(p, 0, i, q, 0).at(0).second);
      }
}

TEST_CASE("evaluation and coevaluation identify O_A(0) with A") {
  for (const auto& a : {truncated_polynomial_algebra(Qr, 3), a3zero_torsion_example(), a3zero_dg_example()}) {
    CAPTURE(a->name());
    Envelope env(a, small());
    auto ev = env.evaluation();
    auto co = env.coevaluation();
    CHECK_NOTHROW(validate(ev));
    CHECK_NOTHROW(validate(co));
    CHECK(maps_equal(ev.after(co), ChainMap::identity(a->carrier())));
    CHECK(is_isomorphism(ev));
  }
}

TEST_CASE("insertion of an algebra element lowers arity") {
  Envelope env(truncated_polynomial_algebra(Qr, 2), small());
  // u with x inserted is the class of x in O_A(0).
  auto r = env.insert(1, env.unit().at(0).first, 1, sparse_unit(1));
  auto ev = env.evaluation();
  CHECK(r.size() == 1);
  CHECK(ev.component(0)(1, r[0].first) * r[0].second == 1);
}

TEST_CASE("functoriality: identities and composites") {
  auto A = truncated_polynomial_algebra(Qr, 3);
  auto B = truncated_polynomial_algebra(Qr, 2);
  auto C = ground_uass(Qr);
  ChainMap ab(A->carrier(), B->carrier());
  ab.set_component(0, Matrix(Qr, 2, 3, {{1, 0, 0}, {0, 1, 0}}));
  ChainMap bc(B->carrier(), C->carrier());
  bc.set_component(0, Matrix(Qr, 1, 2, {{1, 0}}));
  AlgebraMorphism f{A, B, ab}, g{B, C, bc}, gf{A, C, bc.after(ab)};
  AlgebraMorphism id{A, A, ChainMap::identity(A->carrier())};
  CHECK_NOTHROW(check_algebra_morphism(f, 3));
  CHECK_NOTHROW(check_algebra_morphism(g, 3));
  Envelope ea(A, small()), eb(B, small()), ec(C, small());
  for (std::size_t n = 0; n <= 2; ++n) {
    CAPTURE(n);
    auto Fid = enveloping_map(ea, ea, id, n);
    CHECK(maps_equal(Fid, ChainMap::identity(ea.component(n).complex)));
    auto Ff = enveloping_map(ea, eb, f, n);
    auto Fg = enveloping_map(eb, ec, g, n);
    auto Fgf = enveloping_map(ea, ec, gf, n);
    CHECK_NOTHROW(validate(Ff));
    CHECK(maps_equal(Fg.after(Ff), Fgf));
  }
}

TEST_CASE("without the quotient the components are the raw corollas") {
  Envelope env(ground_uass(Qr), small(3), false);
  // uass(n+s) with s labels: one corolla per straight-leaf placement, s ≤ 3.
  CHECK(env.component(1).complex.total_rank() == 1 + 2 + 3 + 4);
  CHECK_FALSE(env.component(1).stabilized);
}

TEST_CASE("OA0 blocks: spec examples") {
  TruncationBounds b = small(2);
  auto tors = a3zero_torsion_example();
  auto blk = build_OA0(*tors, 1, b);
  // O(1) ⊗ 1 and O(2) with one label on either side.
  CHECK(blk.basis.size() == 1 + 2 * 2);
  for (const auto& g : blk.basis) CHECK(g.leaves.size() <= 2);
  auto zero = build_OA0(*zero_algebra(builtin_uass(Qr)), 2, b);
  REQUIRE(zero.basis.size() == 1);
  CHECK(zero.basis[0].straight() == 0);
  CHECK(build_OA0(*initial_algebra(builtin_initial(Qr)), 2, b).complex.total_rank() == 0);
}

TEST_CASE("OA1 blocks: arity-1 operad has only arity-1 level-2 vertices") {
  Monoid m = Monoid::truncated_polynomial(2);
  auto O = builtin_arity1(Qr, m);
  ChainComplex c = ChainComplex::concentrated(Qr, 0, 1);
  ProductTable act(2, std::vector<SparseVec>(1));
  act[0][0] = sparse_unit(0);
  auto a = module_algebra(O, c, act);
  auto blk = build_OA1(*a, 0, small(3));
  // Root O(1) with one child that is a label or an O(1)-vertex on one label.
  CHECK(blk.basis.size() == 2 * (1 + 2));
  for (const auto& t : blk.basis)
    for (const auto& ch : t.children)
      if (ch.kind == LevelTree::Child::Kind::Vertex) CHECK(ch.labels.size() == 1);
}

TEST_CASE("coequalizer arrows are reflexive chain maps") {
  for (const auto& a : {truncated_polynomial_algebra(Qr, 2), a3zero_torsion_example(), a3zero_dg_example()}) {
    CAPTURE(a->name());
    for (std::size_t n = 0; n <= 2; ++n) {
      CAPTURE(n);
      auto r = coequalizer_arrows(*a, n, small(3));
      CHECK_NOTHROW(validate(r.d_corolla));
      CHECK_NOTHROW(validate(r.d_edge));
      CHECK_NOTHROW(validate(r.section));
      auto id = ChainMap::identity(r.lower.complex);
      CHECK(maps_equal(r.d_corolla.after(r.section), id));
      CHECK(maps_equal(r.d_edge.after(r.section), id));
    }
  }
}

TEST_CASE("both arrows agree on trees without level-2 vertices") {
  auto a = truncated_polynomial_algebra(Qr, 2);
  auto r = coequalizer_arrows(*a, 1, small(2));
  for (std::size_t j = 0; j < r.upper.basis.size(); ++j) {
    bool flat = true;
    for (const auto& ch : r.upper.basis[j].children) flat = flat && ch.kind != LevelTree::Child::Kind::Vertex;
    if (!flat) continue;
    auto [d, local] = r.upper.complex.unflatten(j);
    CHECK(r.d_corolla.component(d).column(local) == r.d_edge.component(d).column(local));
  }
}

TEST_CASE("the engine agrees with the block coequalizer") {
  struct Case {
    AlgebraPtr a;
    std::size_t n;
    std::size_t S;
  };
  for (const auto& c : {Case{a3zero_torsion_example(), 1, 3}, Case{truncated_polynomial_algebra(Qr, 2), 1, 3},
                        Case{a3zero_dg_example(), 1, 3}, Case{ground_uass(Zr), 2, 3}}) {
    CAPTURE(c.a->name());
    CAPTURE(c.n);
    TruncationBounds b = small(c.S);
    auto r = coequalizer_arrows(*c.a, c.n, b);
    auto q = coequalizer(r.d_corolla, r.d_edge, r.section);
    Envelope env(c.a, b);
    const auto& comp = env.component(c.n);
    REQUIRE(comp.stabilized);
    CHECK(describe(complex_invariants(q.object)) == describe(complex_invariants(comp.complex)));
  }
}

namespace {

AlgebraPtr k_module_over_dual_numbers() {
  auto O = builtin_arity1(Qr, Monoid::truncated_polynomial(2));
  // k[t]/t^2 acting on itself.
  ChainComplex c = ChainComplex::concentrated(Qr, 0, 2);
  ProductTable act(2, std::vector<SparseVec>(2));
  act[0][0] = sparse_unit(0);
  act[0][1] = sparse_unit(1);
  act[1][0] = sparse_unit(1);
  return module_algebra(O, c, act);
}

AlgebraPtr square_zero_ass() {
  ChainComplex c = ChainComplex::concentrated(Qr, 0, 1);
  ProductTable t(1, std::vector<SparseVec>(1));
  return associative_algebra(builtin_ass(Qr), c, t);
}

std::shared_ptr<const FreeOperad> binary_free(std::size_t size_bound) {
  SequenceV v;
  v.emplace(2, ChainComplex::concentrated(Qr, 0, 1, {"mu"}));
  return free_operad(Qr, v, size_bound);
}

AlgebraPtr binary_k(std::size_t size_bound, long product) {
  return free_operad_algebra(binary_free(size_bound), ChainComplex::concentrated(Qr, 0, 1),
                             [product](std::size_t, const std::vector<std::size_t>&) {
                               return product ? SparseVec{{0, Scalar(product)}} : SparseVec{};
                             });
}

}  // namespace

TEST_CASE("closed forms match the coequalizer") {
  struct Case {
    ClosedFormKind kind;
    AlgebraPtr a;
  };
  std::vector<Case> cases{
      {ClosedFormKind::Initial, initial_algebra(builtin_uass(Qr))},
      {ClosedFormKind::Initial, initial_algebra(builtin_a3zero(Qr))},
      {ClosedFormKind::Initial, initial_algebra(builtin_arity1(Qr, Monoid::truncated_polynomial(2)))},
      {ClosedFormKind::Uass, ground_uass(Qr)},
      {ClosedFormKind::Uass, truncated_polynomial_algebra(Qr, 2)},
      {ClosedFormKind::Uass, zero_algebra(builtin_uass(Qr))},
      {ClosedFormKind::A3zero, a3zero_torsion_example()},
      {ClosedFormKind::A3zero, a3zero_dg_example()},
      {ClosedFormKind::Arity1, k_module_over_dual_numbers()},
      {ClosedFormKind::Ass, square_zero_ass()},
  };
  for (const auto& c : cases) {
    CAPTURE(to_string(c.kind));
    CAPTURE(c.a->name());
    TruncationBounds b = small(5);
    Envelope env(c.a, b);
    auto cf = closed_form(c.kind, c.a, b);
    for (std::size_t n = 0; n <= 3; ++n) {
      CAPTURE(n);
      if (c.kind == ClosedFormKind::Uass && c.a->dim() == 2 && n == 3) continue;  // needs S ≥ 6
      const auto& comp = env.component(n);
      CHECK(comp.stabilized);
      CHECK(describe(complex_invariants(comp.complex)) == describe(complex_invariants(cf[n])));
    }
  }
}

TEST_CASE("closed forms: spec examples") {
  auto cf = closed_form(ClosedFormKind::Uass, zero_algebra(builtin_uass(Qr)), small());
  for (const auto& c : cf) CHECK(c.total_rank() == 0);
  auto a = a3zero_torsion_example();
  auto q = decomposables_quotient(*a, 2);
  CHECK(module_at(q, 0).rank == 1);
  CHECK(module_at(q, 0).torsion == std::vector<Integer>{2});
  auto f = closed_form(ClosedFormKind::A3zero, a, small());
  CHECK(module_at(f[1], 0).torsion == std::vector<Integer>{2, 2});
  CHECK(f[3].total_rank() == 0);
  CHECK_THROWS_AS(closed_form(ClosedFormKind::Uass, a, small()), Error);
  CHECK(parse_closed_form_kind("free") == ClosedFormKind::Free);
  CHECK_THROWS(parse_closed_form_kind("nope"));
}

TEST_CASE("free operad: enveloping basis counts reduced trees") {
  const std::size_t S = 4;
  TruncationBounds b = small(S);
  for (long product : {0L, 1L}) {
    CAPTURE(product);
    auto a = binary_k(b.max_arity + S - 1, product);
    CHECK_NOTHROW(check_algebra_axioms(*a, 4));
    Envelope env(a, b);
    auto cf = closed_form(ClosedFormKind::Free, a, b);
    for (std::size_t n = 0; n <= 3; ++n) {
      CAPTURE(n);
      CHECK(env.component(n).complex.total_rank() == cf[n].total_rank());
    }
  }
  // Binary trees with three leaves.
  CHECK(binary_free(4)->dim(3) == 2);
}

TEST_CASE("split coequalizer witnesses satisfy the four identities") {
  struct Case {
    ClosedFormKind kind;
    AlgebraPtr a;
    std::size_t n;
  };
  TruncationBounds b = small(3);
  std::vector<Case> cases{
      {ClosedFormKind::Initial, initial_algebra(builtin_uass(Qr)), 2},
      {ClosedFormKind::Initial, initial_algebra(builtin_a3zero(Qr)), 1},
      {ClosedFormKind::Uass, ground_uass(Qr), 1},
      {ClosedFormKind::Uass, ground_uass(Qr), 2},
      {ClosedFormKind::Uass, truncated_polynomial_algebra(Qr, 2), 1},
      {ClosedFormKind::Uass, truncated_polynomial_algebra(Qr, 2, 2), 1},
      {ClosedFormKind::Uass, zero_algebra(builtin_uass(Qr)), 2},
      {ClosedFormKind::Ass, square_zero_ass(), 0},
      {ClosedFormKind::Ass, square_zero_ass(), 1},
      {ClosedFormKind::Free, binary_k(5, 1), 0},
      {ClosedFormKind::Free, binary_k(5, 1), 1},
      {ClosedFormKind::Free, binary_k(5, 0), 2},
  };
  for (const auto& c : cases) {
    CAPTURE(to_string(c.kind));
    CAPTURE(c.a->name());
    CAPTURE(c.n);
    auto w = split_coequalizer_witness(c.kind, c.a, c.n, b);
    CHECK_NOTHROW(validate(w.e));
    CHECK_NOTHROW(validate(w.t));
    CHECK_NOTHROW(check_split_coequalizer(w));
    if (c.kind == ClosedFormKind::Uass && c.a->dim() == 0) {
      CHECK(w.e.target().total_rank() == 0);
      CHECK_FALSE(w.t.component(0).is_zero());
    }
  }
}

TEST_CASE("a broken witness is reported") {
  auto w = split_coequalizer_witness(ClosedFormKind::Uass, ground_uass(Qr), 1, small(3));
  std::swap(w.f, w.g);
  CHECK_THROWS_AS(check_split_coequalizer(w), AxiomViolation);
}
