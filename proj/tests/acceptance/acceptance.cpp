// Acceptance criteria 1-7, one line per criterion. Exit status is the number of failures.

#include "support.hpp"

#include <paperlab/corpus.hpp>

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

using namespace paperlab;

namespace {

const Ring Qr = Ring::rationals();
const Ring Zr = Ring::integers();

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
  std::string failures;

  void expect(bool ok, const std::string& what) {
    if (ok) return;
    failures += (pass ? "" : "; ") + what;
    pass = false;
  }
};

std::string torsion_list(const FgModule& m) {
  std::string s = "[";
  for (std::size_t i = 0; i < m.torsion.size(); ++i) s += (i ? "," : "") + m.torsion[i].get_str();
  return s + "]";
}

TruncationBounds acceptance_bounds(std::size_t straight, std::size_t arity) {
  TruncationBounds b;
  b.max_straight_leaves = straight;
  b.max_arity = arity;
  b.stabilization_window = 2;
  return b;
}

// 1. Yau counterexample.
void yau(Outcome& o) {
  const std::size_t N = 6;
  auto inst = yau_instance(Qr);
  auto good = pushout_along_free_corrected(inst.algebra, inst.attachment, acceptance_bounds(4, N + 1), N);
  auto bad = pushout_along_free_original_wrong(inst.algebra, inst.attachment, acceptance_bounds(4, N + 1), N);
  const std::size_t g = graded_dimension(good.result), w = graded_dimension(bad.result);
  o.detail << "corrected dim " << g << ", uncorrected dim " << w << " at N = " << N;
  o.expect(g == 0, "corrected push-out is not zero");
  o.expect(good.stabilized, "corrected push-out did not stabilize");
  o.expect(w == N, "uncorrected dimension differs from N");
}

// 2. The torsion example over Z.
void torsion(Outcome& o) {
  auto a = a3zero_torsion_example(Zr);
  auto q = module_at(decomposables_quotient(*a, 3), 0);
  Envelope env(a, acceptance_bounds(6, 4));
  auto oa1 = module_at(env.component(1).complex, 0);
  auto coprod = coproduct_with_free_unit(a, acceptance_bounds(6, 4));
  auto coker = map_cokernel(coprod.f_prime, 0);
  o.detail << "A/A^2 = (" << q.rank << "," << torsion_list(q) << "), O_A(1) = (" << oa1.rank << ","
           << torsion_list(oa1) << "), coker f' torsion " << torsion_list(coker);
  o.expect(q.rank == 1 && q.torsion == std::vector<Integer>{2}, "A/A^2 mismatch");
  o.expect(oa1.rank == 3 && oa1.torsion == std::vector<Integer>{2, 2}, "O_A(1) mismatch");
  o.expect(std::count(coker.torsion.begin(), coker.torsion.end(), Integer(2)) >= 1, "no invariant factor 2");
}

// 3. The quasi-isomorphism example over Q.
void quasi_iso(Outcome& o) {
  auto phi = quasi_iso_example_map(Qr);
  const bool qi = is_quasi_iso(phi.map).quasi_isomorphism;
  Envelope ea(phi.source, acceptance_bounds(6, 3)), eb(phi.target, acceptance_bounds(6, 3));
  const std::size_t ha = homology(ea.component(1).complex, 1).rank;
  const std::size_t hb = homology(eb.component(1).complex, 1).rank;
  const bool lifted = is_quasi_iso(enveloping_map(ea, eb, phi, 1)).quasi_isomorphism;
  o.detail << "phi quasi-iso " << (qi ? "yes" : "no") << ", dim H1(O_A(1)) = " << ha << ", dim H1(O_B(1)) = " << hb
           << ", arity-1 map quasi-iso " << (lifted ? "yes" : "no");
  o.expect(qi, "phi is not a quasi-isomorphism");
  o.expect(ha == 2, "dim H1(O_A(1)) != 2");
  o.expect(hb == 0, "dim H1(O_B(1)) != 0");
  o.expect(!lifted, "arity-1 map is a quasi-isomorphism");
}

// 4. Closed forms against the truncated coequalizer.
void crosscheck(Outcome& o) {
  const TruncationBounds b = acceptance_bounds(6, 4);
  std::size_t checked = 0;
  for (const auto& inst : crosscheck_instances(Qr)) {
    Envelope env(inst.algebra, b);
    auto cf = closed_form(inst.kind, inst.algebra, b);
    for (std::size_t n = 0; n <= b.max_arity; ++n) {
      const std::string where = inst.id + " arity " + std::to_string(n);
      try {
        const auto& comp = env.component(n);
        o.expect(comp.stabilized, where + " not stabilized");
        o.expect(comp.stabilized && same_invariants(comp.complex, cf[n]), where + " differs");
      } catch (const Error& e) {
        o.expect(false, where + ": " + e.what());
      }
      ++checked;
    }
  }
  o.detail << checked << " components compared";
}

// 5. Free operad on one binary generator.
void free_count(Outcome& o) {
  SequenceV v;
  v.emplace(2, ChainComplex::concentrated(Qr, 0, 1, {"mu"}));
  const std::size_t S = 4;
  TruncationBounds b = acceptance_bounds(S, 3);
  for (long product : {0L, 1L}) {
    auto fo = free_operad(Qr, v, b.max_arity + S - 1);
    auto a = free_operad_algebra(fo, ChainComplex::concentrated(Qr, 0, 1), [product](auto, const auto&) {
      return product ? SparseVec{{0, Scalar(product)}} : SparseVec{};
    });
    Envelope env(a, b);
    auto cf = closed_form(ClosedFormKind::Free, a, b);
    for (std::size_t n = 0; n <= 3; ++n)
      o.expect(env.component(n).complex.total_rank() == cf[n].total_rank(),
               "arity " + std::to_string(n) + " count differs (product " + std::to_string(product) + ")");
  }
  const std::size_t d3 = free_operad(Qr, v, 4)->dim(3);
  o.detail << "counts agree for arities 0-3, dim F(V)(3) = " << d3;
  o.expect(d3 == 2, "dim F(V)(3) != 2");
}

// 6. Filtration coherence.
void filtration(Outcome& o) {
  const std::size_t T = 3;
  const int top = 2 * static_cast<int>(T);
  auto a = initial_algebra(builtin_uass(Qr));
  auto z = ground_complex(Qr, 2);
  Envelope env(a, acceptance_bounds(4, 4));
  auto B = free_algebra(builtin_uass(Qr), z, T);
  Envelope envB(B.algebra, acceptance_bounds(4, 4));
  auto below = [top](const ChainComplex& c) {
    std::map<int, ModuleInvariants> out;
    for (auto& [d, x] : complex_invariants(c))
      if (d <= top && (x.module.rank > 0 || !x.module.torsion.empty())) out.emplace(d, x.module);
    return out;
  };
  for (std::size_t n = 0; n <= 2; ++n) {
    auto fs = filtration_algebra_pushout(env, attachment_from_zero(a, z), n, T);
    o.expect(below(fs.stages.back()) == below(envB.component(n).complex), "arity " + std::to_string(n) + " differs");
  }
  o.detail << "arities 0-2 agree in degrees <= " << top << " after " << T << " stages";
}

// 7. Property suites.
void properties(Outcome& o) {
  using testing_support::random_complex;
  std::mt19937 rng(7);
  std::size_t failures = 0, runs = 0;
  auto check = [&](bool ok, const std::string& what) {
    ++runs;
    if (!ok) {
      ++failures;
      o.expect(false, what);
    }
  };
  auto valid = [](const auto& x) {
    try {
      validate(x);
      return true;
    } catch (const Error&) {
      return false;
    }
  };

  for (int trial = 0; trial < 200; ++trial) {
    Ring r = trial % 2 ? Qr : Zr;
    auto c = random_complex(rng, r, 0, 2, 2);
    auto d = random_complex(rng, r, -1, 1, 2);
    auto id = ChainMap::identity(c);
    bool ok = valid(c) && valid(tensor(c, d)) && valid(direct_sum({c, d}, r).complex) &&
              valid(pushout(id, id).object) && valid(coequalizer(id, id).object) && valid(minimize(c).complex);
    check(ok, "d^2 = 0 closure, trial " + std::to_string(trial));
  }

  std::uniform_int_distribution<std::size_t> dim(1, 5);
  for (int trial = 0; trial < 200; ++trial) {
    Matrix M = testing_support::random_int_matrix(rng, dim(rng), dim(rng), -9, 9);
    auto s = snf(M);
    bool ok = s.U * M * s.V == s.D && abs(s.U.determinant()) == 1 && abs(s.V.determinant()) == 1;
    for (std::size_t i = 0; i < s.D.rows(); ++i)
      for (std::size_t j = 0; j < s.D.cols(); ++j)
        if (i != j && sgn(s.D(i, j)) != 0) ok = false;
    for (std::size_t i = 0; i + 1 < s.rank; ++i)
      if (s.D(i + 1, i + 1).get_num() % s.D(i, i).get_num() != 0) ok = false;
    check(ok, "SNF contract, trial " + std::to_string(trial));
  }

  for (const char* name : {"uass", "ass", "a3zero", "initial"}) {
    bool ok = true;
    try {
      check_operad_axioms(*builtin_operad(name, Qr), 4);
      check_operad_axioms(*builtin_operad(name, Zr), 4);
    } catch (const Error&) {
      ok = false;
    }
    check(ok, std::string("operad axioms for ") + name);
  }
  {
    bool ok = true;
    try {
      check_operad_axioms(*builtin_arity1(Qr, Monoid::truncated_polynomial(3)), 4);
    } catch (const Error&) {
      ok = false;
    }
    check(ok, "operad axioms for arity1");
  }

  {
    TruncationBounds b = acceptance_bounds(3, 3);
    SequenceV v;
    v.emplace(2, ChainComplex::concentrated(Qr, 0, 1, {"mu"}));
    auto binary_k = [&](long product) {
      return free_operad_algebra(free_operad(Qr, v, 5), ChainComplex::concentrated(Qr, 0, 1),
                                 [product](auto, const auto&) {
                                   return product ? SparseVec{{0, Scalar(product)}} : SparseVec{};
                                 });
    };
    auto square_zero = associative_algebra(builtin_ass(Qr), ChainComplex::concentrated(Qr, 0, 1),
                                           ProductTable(1, std::vector<SparseVec>(1)));
    struct Case {
      ClosedFormKind kind;
      AlgebraPtr a;
      std::size_t n;
    };
    std::vector<Case> cases{
        {ClosedFormKind::Initial, initial_algebra(builtin_uass(Qr)), 2},
        {ClosedFormKind::Initial, initial_algebra(builtin_a3zero(Qr)), 1},
        {ClosedFormKind::Uass, truncated_polynomial_algebra(Qr, 1), 1},
        {ClosedFormKind::Uass, truncated_polynomial_algebra(Qr, 1), 2},
        {ClosedFormKind::Uass, truncated_polynomial_algebra(Qr, 2), 1},
        {ClosedFormKind::Uass, truncated_polynomial_algebra(Qr, 2, 2), 1},
        {ClosedFormKind::Uass, zero_algebra(builtin_uass(Qr)), 2},
        {ClosedFormKind::Ass, square_zero, 0},
        {ClosedFormKind::Ass, square_zero, 1},
        {ClosedFormKind::Free, binary_k(1), 0},
        {ClosedFormKind::Free, binary_k(1), 1},
        {ClosedFormKind::Free, binary_k(0), 2},
    };
    for (const auto& c : cases) {
      bool ok = true;
      try {
        check_split_coequalizer(split_coequalizer_witness(c.kind, c.a, c.n, b));
      } catch (const Error&) {
        ok = false;
      }
      check(ok, "split coequalizer " + to_string(c.kind) + " n=" + std::to_string(c.n));
    }
  }

  for (int trial = 0; trial < 50; ++trial) {
    auto c = random_complex(rng, Qr, 0, 2, 3);
    auto d = random_complex(rng, Qr, 0, 2, 3);
    auto betti = [](const ChainComplex& x) {
      std::map<int, std::size_t> b;
      for (int n : x.degrees())
        if (auto h = homology(x, n); h.rank > 0) b[n] = h.rank;
      return b;
    };
    std::map<int, std::size_t> expect;
    for (auto [p, x] : betti(c))
      for (auto [q, y] : betti(d)) expect[p + q] += x * y;
    check(betti(tensor(c, d)) == expect, "Kunneth, trial " + std::to_string(trial));
  }

  {
    std::vector<ChainMap> corpus;
    auto k = ChainComplex::unit(Qr);
    ChainComplex disk(Qr);
    disk.set_rank(0, 1);
    disk.set_rank(1, 1);
    disk.set_differential(1, Matrix(Qr, 1, 1, {{1}}));
    ChainMap into_disk(k, disk);
    into_disk.set_component(0, Matrix(Qr, 1, 1, {{1}}));
    corpus.push_back(into_disk);
    ChainMap into_two(k, ChainComplex::concentrated(Qr, 0, 2));
    into_two.set_component(0, Matrix(Qr, 2, 1, {{1}, {0}}));
    corpus.push_back(into_two);
    auto z = ChainComplex::unit(Zr);
    ChainMap twice(z, z);
    twice.set_component(0, Matrix(Zr, 1, 1, {{2}}));
    corpus.push_back(twice);
    corpus.push_back(ChainMap::zero(ChainComplex(Qr), a3zero_dg_example(Qr)->carrier()));
    for (std::size_t i = 0; i < corpus.size(); ++i)
      for (std::size_t t = 1; t <= 3; ++t) {
        auto lat = cube_latching_map(tensor_cube(std::vector<ChainMap>(t, corpus[i]))).map;
        auto pp = pushout_product_power(corpus[i], t);
        bool ok = same_invariants(lat.source(), pp.source()) && same_invariants(lat.target(), pp.target());
        for (int n : pp.target().degrees())
          ok = ok && map_kernel(lat, n) == map_kernel(pp, n) && map_cokernel(lat, n) == map_cokernel(pp, n);
        check(ok, "latching vs push-out product, map " + std::to_string(i) + " t=" + std::to_string(t));
      }
  }
  o.detail << runs - failures << "/" << runs << " property checks";
}

struct Criterion {
  int number;
  const char* title;
  double limit_seconds;
  std::function<void(Outcome&)> run;
};

}  // namespace

int main(int argc, char** argv) {
  std::vector<Criterion> criteria{
      {1, "Yau counterexample", 5, yau},
      {2, "torsion example over Z", 5, torsion},
      {3, "quasi-isomorphism example over Q", 5, quasi_iso},
      {4, "closed forms vs coequalizer", 60, crosscheck},
      {5, "free operad reduced-tree count", 10, free_count},
      {6, "filtration coherence", 30, filtration},
      {7, "property suites", 120, properties},
  };
  int only = argc > 1 ? std::atoi(argv[1]) : 0;
  int failed = 0;
  for (auto& c : criteria) {
    if (only && c.number != only) continue;
    Outcome o;
    const auto start = std::chrono::steady_clock::now();
    try {
      c.run(o);
    } catch (const std::exception& e) {
      o.expect(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (secs > c.limit_seconds) o.expect(false, "over the time limit");
    if (!o.pass) ++failed;
    char timing[32];
    std::snprintf(timing, sizeof timing, "%.2f s", secs);
    std::cout << "criterion " << c.number << " " << (o.pass ? "PASS" : "FAIL") << "  " << c.title << ": "
              << o.detail.str() << " (" << timing << ")";
    if (!o.pass) std::cout << " -- " << o.failures;
    std::cout << std::endl;
  }
  return failed;
}
