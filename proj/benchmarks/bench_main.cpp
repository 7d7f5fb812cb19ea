#include <benchmark/benchmark.h>

#include <random>

#include <paperlab/pushouts.hpp>

using namespace paperlab;

namespace {

Matrix random_matrix(const Ring& r, std::size_t n, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_int_distribution<int> coeff(-3, 3);
  Matrix m(r, n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (int c = coeff(rng); c != 0 && rng() % 3 == 0) m.add_to(i, j, Scalar(c));
  return m;
}

TruncationBounds bounds(std::size_t straight, std::size_t arity) {
  TruncationBounds b;
  b.max_straight_leaves = straight;
  b.max_arity = arity;
  return b;
}

void BM_SmithNormalForm(benchmark::State& state) {
  Matrix m = random_matrix(Ring::integers(), static_cast<std::size_t>(state.range(0)), 7);
  for (auto _ : state) benchmark::DoNotOptimize(snf(m));
}
BENCHMARK(BM_SmithNormalForm)->Arg(8)->Arg(16)->Arg(32);

void BM_EnvelopeComponent(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    Envelope env(truncated_polynomial_algebra(Ring::rationals(), 3), bounds(5, n + 1));
    benchmark::DoNotOptimize(env.component(n).complex);
  }
}
BENCHMARK(BM_EnvelopeComponent)->DenseRange(0, 3);

void BM_PushoutFiltration(benchmark::State& state) {
  const auto T = static_cast<std::size_t>(state.range(0));
  auto A = initial_algebra(builtin_uass(Ring::rationals()));
  ChainComplex y(Ring::rationals());
  ChainComplex z(Ring::rationals());
  z.set_rank(0, 1);
  FreeAttachment att{ChainMap::zero(y, z), ChainMap::zero(y, A->carrier())};
  for (auto _ : state) benchmark::DoNotOptimize(pushout_along_free_corrected(A, att, bounds(4, T + 1), T).result);
}
BENCHMARK(BM_PushoutFiltration)->DenseRange(1, 4);

}  // namespace

BENCHMARK_MAIN();
