#pragma once

// Shared generators and independent oracles for the test suites.

#include <paperlab/chain.hpp>

#include <algorithm>
#include <numeric>
#include <random>
#include <vector>

namespace testing_support {

using paperlab::ChainComplex;
using paperlab::Integer;
using paperlab::kernel_basis;
using paperlab::Matrix;
using paperlab::Ring;
using paperlab::Scalar;

inline Matrix random_int_matrix(std::mt19937& rng, std::size_t rows, std::size_t cols, int lo, int hi) {
  std::uniform_int_distribution<int> d(lo, hi);
  Matrix m(Ring::integers(), rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) m.set(i, j, Scalar(d(rng)));
  return m;
}

/// Random unimodular matrix as a product of elementary operations.
inline Matrix random_unimodular(std::mt19937& rng, std::size_t n, int steps = 12) {
  Matrix u = Matrix::identity(Ring::integers(), n);
  if (n < 2) return u;
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  std::uniform_int_distribution<int> coef(-3, 3);
  for (int s = 0; s < steps; ++s) {
    std::size_t a = pick(rng), b = pick(rng);
    if (a == b) {
      u.scale_row(a, Scalar(-1));
      continue;
    }
    u.add_row_multiple(a, b, Scalar(coef(rng)));
    if (s % 5 == 0) u.swap_rows(a, b);
  }
  return u;
}

/// Determinant by cofactor expansion over the integers.
inline Integer cofactor_det(const std::vector<std::vector<Integer>>& m) {
  const std::size_t n = m.size();
  if (n == 0) return 1;
  if (n == 1) return m[0][0];
  Integer det = 0;
  for (std::size_t c = 0; c < n; ++c) {
    if (m[0][c] == 0) continue;
    std::vector<std::vector<Integer>> minor;
    for (std::size_t r = 1; r < n; ++r) {
      std::vector<Integer> row;
      for (std::size_t k = 0; k < n; ++k)
        if (k != c) row.push_back(m[r][k]);
      minor.push_back(row);
    }
    Integer term = m[0][c] * cofactor_det(minor);
    det += (c % 2 == 0) ? term : Integer(-term);
  }
  return det;
}

inline void subsets(std::size_t n, std::size_t k, std::size_t start, std::vector<std::size_t>& cur,
                    std::vector<std::vector<std::size_t>>& out) {
  if (cur.size() == k) {
    out.push_back(cur);
    return;
  }
  for (std::size_t i = start; i < n; ++i) {
    cur.push_back(i);
    subsets(n, k, i + 1, cur, out);
    cur.pop_back();
  }
}

/// Invariant factors from determinantal divisors: d_k = D_k / D_{k-1} where D_k
/// is the gcd of all k x k minors. Independent of any elimination order.
inline std::vector<Integer> invariant_factors_by_minors(const Matrix& M) {
  std::vector<Integer> out;
  Integer prev = 1;
  const std::size_t kmax = std::min(M.rows(), M.cols());
  for (std::size_t k = 1; k <= kmax; ++k) {
    std::vector<std::vector<std::size_t>> rs, cs;
    std::vector<std::size_t> cur;
    subsets(M.rows(), k, 0, cur, rs);
    subsets(M.cols(), k, 0, cur, cs);
    Integer g = 0;
    for (const auto& r : rs)
      for (const auto& c : cs) {
        std::vector<std::vector<Integer>> sub(k, std::vector<Integer>(k));
        for (std::size_t i = 0; i < k; ++i)
          for (std::size_t j = 0; j < k; ++j) sub[i][j] = M(r[i], c[j]).get_num();
        Integer d = cofactor_det(sub);
        mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), d.get_mpz_t());
      }
    if (g == 0) break;
    out.push_back(g / prev);
    prev = g;
  }
  return out;
}

/// Random complex with d^2 = 0: each d_n factors through the kernel of d_{n-1}.
inline ChainComplex random_complex(std::mt19937& rng, Ring r, int lo, int hi, std::size_t max_rank) {
  std::uniform_int_distribution<std::size_t> rk(0, max_rank);
  std::uniform_int_distribution<int> coef(-2, 2);
  ChainComplex c(r);
  for (int n = lo; n <= hi; ++n) c.set_rank(n, rk(rng));
  for (int n = lo + 1; n <= hi; ++n) {
    Matrix prev = c.differential(n - 1);
    Matrix K = prev.rows() == 0 ? Matrix::identity(r, c.rank(n - 1)) : kernel_basis(prev);
    if (K.cols() == 0 || c.rank(n) == 0) continue;
    Matrix X(r, K.cols(), c.rank(n));
    for (std::size_t i = 0; i < X.rows(); ++i)
      for (std::size_t j = 0; j < X.cols(); ++j) X.set(i, j, Scalar(coef(rng)));
    c.set_differential(n, K * X);
  }
  return c;
}

}  // namespace testing_support
