#include "paperlab/exact.hpp"

#include <algorithm>
#include <sstream>
#include <utility>

namespace paperlab {

namespace {

bool is_prime(unsigned long p) {
  if (p < 2) return false;
  for (unsigned long d = 2; d * d <= p; ++d)
    if (p % d == 0) return false;
  return true;
}

// Arithmetic in the fraction field of a ring: Q for Z and Q, F_p for F_p.
struct FieldOps {
  const Ring& ring;
  Scalar norm(const Scalar& x) const {
    return ring.kind() == Ring::Kind::PrimeField ? ring.normalize(x) : x;
  }
  Scalar inv(const Scalar& x) const {
    if (ring.kind() == Ring::Kind::PrimeField) return ring.inverse(x);
    return Scalar(1) / x;
  }
};

// Row echelon form over the fraction field; returns pivot columns.
std::vector<std::size_t> echelon(std::vector<std::vector<Scalar>>& a, std::size_t cols, const FieldOps& f) {
  std::vector<std::size_t> pivots;
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < a.size(); ++c) {
    std::size_t p = r;
    while (p < a.size() && sgn(a[p][c]) == 0) ++p;
    if (p == a.size()) continue;
    std::swap(a[p], a[r]);
    Scalar iv = f.inv(a[r][c]);
    for (std::size_t j = c; j < a[r].size(); ++j) a[r][j] = f.norm(a[r][j] * iv);
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (i == r || sgn(a[i][c]) == 0) continue;
      Scalar k = a[i][c];
      for (std::size_t j = c; j < a[i].size(); ++j) a[i][j] = f.norm(a[i][j] - k * a[r][j]);
    }
    pivots.push_back(c);
    ++r;
  }
  return pivots;
}

std::vector<std::vector<Scalar>> to_rows(const Matrix& m) {
  std::vector<std::vector<Scalar>> a(m.rows(), std::vector<Scalar>(m.cols()));
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) a[i][j] = m(i, j);
  return a;
}

void require_integral(const Matrix& M) {
  for (std::size_t i = 0; i < M.rows(); ++i)
    for (std::size_t j = 0; j < M.cols(); ++j)
      if (M(i, j).get_den() != 1) throw InvalidRing("snf requires integer entries");
}

}  // namespace

Ring Ring::prime_field(unsigned long p) {
  if (!is_prime(p)) throw InvalidRing("F_p requires prime p, got " + std::to_string(p));
  return Ring(Kind::PrimeField, p);
}

Ring Ring::parse(const std::string& tag) {
  if (tag == "Z") return integers();
  if (tag == "Q") return rationals();
  if (tag.size() > 2 && tag[0] == 'F' && tag[1] == '_') {
    try {
      return prime_field(std::stoul(tag.substr(2)));
    } catch (const std::invalid_argument&) {
    }
  }
  throw InvalidRing("unknown ring tag '" + tag + "'");
}

std::string Ring::name() const {
  switch (kind_) {
    case Kind::Integers: return "Z";
    case Kind::Rationals: return "Q";
    case Kind::PrimeField: return "F_" + std::to_string(p_);
  }
  return "?";
}

bool Ring::contains(const Scalar& x) const {
  switch (kind_) {
    case Kind::Integers: return x.get_den() == 1;
    case Kind::Rationals: return true;
    case Kind::PrimeField: return x.get_den() == 1 && sgn(x) >= 0 && x.get_num() < p_;
  }
  return false;
}

Scalar Ring::normalize(const Scalar& x) const {
  switch (kind_) {
    case Kind::Integers:
      if (x.get_den() != 1) throw InvalidRing("non-integer entry " + x.get_str() + " over Z");
      return x;
    case Kind::Rationals: return x;
    case Kind::PrimeField: {
      Integer P(p_);
      Integer num = x.get_num() % P;
      Integer den = x.get_den() % P;
      if (den == 0) throw InvalidRing("denominator divisible by p in F_" + std::to_string(p_));
      Integer inv;
      mpz_invert(inv.get_mpz_t(), den.get_mpz_t(), P.get_mpz_t());
      Integer r = (num * inv) % P;
      if (r < 0) r += P;
      return Scalar(r);
    }
  }
  return x;
}

bool Ring::is_unit(const Scalar& x) const {
  if (sgn(x) == 0) return false;
  if (kind_ == Kind::Integers) return x == 1 || x == -1;
  return true;
}

Scalar Ring::inverse(const Scalar& x) const {
  if (!is_unit(x)) throw Error("element " + x.get_str() + " is not a unit in " + name());
  if (kind_ == Kind::PrimeField) return normalize(Scalar(1) / normalize(x));
  return Scalar(1) / x;
}

std::string to_string(const Scalar& x) { return x.get_str(); }

Scalar parse_scalar(const std::string& s) {
  Scalar q;
  if (q.set_str(s, 10) != 0) throw Error("malformed scalar '" + s + "'");
  q.canonicalize();
  return q;
}

// ---------------------------------------------------------------- Matrix

Matrix::Matrix(Ring ring, std::size_t rows, std::size_t cols)
    : ring_(ring), rows_(rows), cols_(cols), data_(rows * cols) {}

Matrix::Matrix(Ring ring, std::size_t rows, std::size_t cols, const std::vector<std::vector<long>>& entries)
    : Matrix(ring, rows, cols) {
  if (entries.size() != rows) throw ShapeMismatch("row count mismatch");
  for (std::size_t i = 0; i < rows; ++i) {
    if (entries[i].size() != cols) throw ShapeMismatch("column count mismatch");
    for (std::size_t j = 0; j < cols; ++j) set(i, j, Scalar(entries[i][j]));
  }
}

Matrix Matrix::identity(Ring ring, std::size_t n) {
  Matrix m(ring, n, n);
  for (std::size_t i = 0; i < n; ++i) m.data_[i * n + i] = 1;
  return m;
}

Matrix Matrix::diagonal(Ring ring, const std::vector<Scalar>& d, std::size_t rows, std::size_t cols) {
  Matrix m(ring, rows, cols);
  for (std::size_t i = 0; i < d.size() && i < rows && i < cols; ++i) m.set(i, i, d[i]);
  return m;
}

void Matrix::set(std::size_t r, std::size_t c, const Scalar& v) { data_[r * cols_ + c] = ring_.normalize(v); }

void Matrix::add_to(std::size_t r, std::size_t c, const Scalar& v) {
  auto& e = data_[r * cols_ + c];
  e = ring_.normalize(e + v);
}

Matrix Matrix::operator*(const Matrix& o) const {
  if (cols_ != o.rows_) throw ShapeMismatch("matrix product shape mismatch");
  Matrix r(ring_, rows_, o.cols_);
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t k = 0; k < cols_; ++k) {
      const Scalar& a = data_[i * cols_ + k];
      if (sgn(a) == 0) continue;
      for (std::size_t j = 0; j < o.cols_; ++j) {
        const Scalar& b = o.data_[k * o.cols_ + j];
        if (sgn(b) == 0) continue;
        r.data_[i * o.cols_ + j] += a * b;
      }
    }
  }
  if (ring_.kind() == Ring::Kind::PrimeField)
    for (auto& e : r.data_) e = ring_.normalize(e);
  return r;
}

Matrix Matrix::operator+(const Matrix& o) const {
  if (rows_ != o.rows_ || cols_ != o.cols_) throw ShapeMismatch("matrix sum shape mismatch");
  Matrix r(ring_, rows_, cols_);
  for (std::size_t i = 0; i < data_.size(); ++i) r.data_[i] = ring_.normalize(data_[i] + o.data_[i]);
  return r;
}

Matrix Matrix::operator-(const Matrix& o) const { return *this + (-o); }

Matrix Matrix::operator-() const { return scaled(Scalar(-1)); }

Matrix Matrix::scaled(const Scalar& s) const {
  Matrix r(ring_, rows_, cols_);
  for (std::size_t i = 0; i < data_.size(); ++i) r.data_[i] = ring_.normalize(data_[i] * s);
  return r;
}

bool Matrix::operator==(const Matrix& o) const {
  return rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
}

bool Matrix::is_zero() const {
  return std::all_of(data_.begin(), data_.end(), [](const Scalar& x) { return sgn(x) == 0; });
}

bool Matrix::is_identity() const { return rows_ == cols_ && *this == identity(ring_, rows_); }

Matrix Matrix::transpose() const {
  Matrix r(ring_, cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) r.data_[j * rows_ + i] = data_[i * cols_ + j];
  return r;
}

Matrix Matrix::column(std::size_t c) const { return columns(c, c + 1); }

Matrix Matrix::columns(std::size_t begin, std::size_t end) const {
  Matrix r(ring_, rows_, end - begin);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = begin; j < end; ++j) r.data_[i * (end - begin) + (j - begin)] = data_[i * cols_ + j];
  return r;
}

Matrix Matrix::rows_range(std::size_t begin, std::size_t end) const {
  Matrix r(ring_, end - begin, cols_);
  std::copy(data_.begin() + begin * cols_, data_.begin() + end * cols_, r.data_.begin());
  return r;
}

Matrix Matrix::select_rows(std::span<const std::size_t> idx) const {
  Matrix r(ring_, idx.size(), cols_);
  for (std::size_t i = 0; i < idx.size(); ++i)
    for (std::size_t j = 0; j < cols_; ++j) r.data_[i * cols_ + j] = data_[idx[i] * cols_ + j];
  return r;
}

Matrix Matrix::select_columns(std::span<const std::size_t> idx) const {
  Matrix r(ring_, rows_, idx.size());
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < idx.size(); ++j) r.data_[i * idx.size() + j] = data_[i * cols_ + idx[j]];
  return r;
}

Matrix Matrix::hstack(const Matrix& a, const Matrix& b) {
  if (a.rows_ != b.rows_) throw ShapeMismatch("hstack row mismatch");
  Matrix r(a.ring_, a.rows_, a.cols_ + b.cols_);
  for (std::size_t i = 0; i < a.rows_; ++i) {
    for (std::size_t j = 0; j < a.cols_; ++j) r.data_[i * r.cols_ + j] = a.data_[i * a.cols_ + j];
    for (std::size_t j = 0; j < b.cols_; ++j) r.data_[i * r.cols_ + a.cols_ + j] = b.data_[i * b.cols_ + j];
  }
  return r;
}

Matrix Matrix::vstack(const Matrix& a, const Matrix& b) {
  if (a.cols_ != b.cols_) throw ShapeMismatch("vstack column mismatch");
  Matrix r(a.ring_, a.rows_ + b.rows_, a.cols_);
  std::copy(a.data_.begin(), a.data_.end(), r.data_.begin());
  std::copy(b.data_.begin(), b.data_.end(), r.data_.begin() + a.data_.size());
  return r;
}

Matrix Matrix::block_diagonal(const Matrix& a, const Matrix& b) {
  Matrix r(a.ring_, a.rows_ + b.rows_, a.cols_ + b.cols_);
  for (std::size_t i = 0; i < a.rows_; ++i)
    for (std::size_t j = 0; j < a.cols_; ++j) r.data_[i * r.cols_ + j] = a.data_[i * a.cols_ + j];
  for (std::size_t i = 0; i < b.rows_; ++i)
    for (std::size_t j = 0; j < b.cols_; ++j) r.data_[(a.rows_ + i) * r.cols_ + a.cols_ + j] = b.data_[i * b.cols_ + j];
  return r;
}

Matrix Matrix::kronecker(const Matrix& a, const Matrix& b) {
  Matrix r(a.ring_, a.rows_ * b.rows_, a.cols_ * b.cols_);
  for (std::size_t i = 0; i < a.rows_; ++i)
    for (std::size_t j = 0; j < a.cols_; ++j) {
      const Scalar& x = a.data_[i * a.cols_ + j];
      if (sgn(x) == 0) continue;
      for (std::size_t k = 0; k < b.rows_; ++k)
        for (std::size_t l = 0; l < b.cols_; ++l)
          r.data_[(i * b.rows_ + k) * r.cols_ + j * b.cols_ + l] = a.ring_.normalize(x * b.data_[k * b.cols_ + l]);
    }
  return r;
}

std::size_t Matrix::rank() const {
  auto a = to_rows(*this);
  return echelon(a, cols_, FieldOps{ring_}).size();
}

Scalar Matrix::determinant() const {
  if (rows_ != cols_) throw ShapeMismatch("determinant of non-square matrix");
  FieldOps f{ring_};
  auto a = to_rows(*this);
  Scalar det = 1;
  for (std::size_t c = 0; c < cols_; ++c) {
    std::size_t p = c;
    while (p < rows_ && sgn(a[p][c]) == 0) ++p;
    if (p == rows_) return 0;
    if (p != c) {
      std::swap(a[p], a[c]);
      det = -det;
    }
    det = f.norm(det * a[c][c]);
    Scalar iv = f.inv(a[c][c]);
    for (std::size_t i = c + 1; i < rows_; ++i) {
      if (sgn(a[i][c]) == 0) continue;
      Scalar k = f.norm(a[i][c] * iv);
      for (std::size_t j = c; j < cols_; ++j) a[i][j] = f.norm(a[i][j] - k * a[c][j]);
    }
  }
  return det;
}

Matrix Matrix::inverse() const {
  if (rows_ != cols_) throw ShapeMismatch("inverse of non-square matrix");
  FieldOps f{ring_};
  std::vector<std::vector<Scalar>> a(rows_, std::vector<Scalar>(2 * cols_));
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t j = 0; j < cols_; ++j) a[i][j] = data_[i * cols_ + j];
    a[i][cols_ + i] = 1;
  }
  auto piv = echelon(a, cols_, f);
  if (piv.size() != rows_) throw Error("matrix is singular");
  Matrix r(ring_, rows_, cols_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) r.set(i, j, a[i][cols_ + j]);
  return r;
}

void Matrix::swap_rows(std::size_t a, std::size_t b) {
  if (a == b) return;
  for (std::size_t j = 0; j < cols_; ++j) std::swap(data_[a * cols_ + j], data_[b * cols_ + j]);
}

void Matrix::swap_cols(std::size_t a, std::size_t b) {
  if (a == b) return;
  for (std::size_t i = 0; i < rows_; ++i) std::swap(data_[i * cols_ + a], data_[i * cols_ + b]);
}

void Matrix::add_row_multiple(std::size_t dst, std::size_t src, const Scalar& k) {
  if (sgn(k) == 0) return;
  for (std::size_t j = 0; j < cols_; ++j) {
    const Scalar& s = data_[src * cols_ + j];
    if (sgn(s) != 0) data_[dst * cols_ + j] = ring_.normalize(data_[dst * cols_ + j] + k * s);
  }
}

void Matrix::add_col_multiple(std::size_t dst, std::size_t src, const Scalar& k) {
  if (sgn(k) == 0) return;
  for (std::size_t i = 0; i < rows_; ++i) {
    const Scalar& s = data_[i * cols_ + src];
    if (sgn(s) != 0) data_[i * cols_ + dst] = ring_.normalize(data_[i * cols_ + dst] + k * s);
  }
}

void Matrix::scale_row(std::size_t r, const Scalar& k) {
  for (std::size_t j = 0; j < cols_; ++j) data_[r * cols_ + j] = ring_.normalize(data_[r * cols_ + j] * k);
}

void Matrix::scale_col(std::size_t c, const Scalar& k) {
  for (std::size_t i = 0; i < rows_; ++i) data_[i * cols_ + c] = ring_.normalize(data_[i * cols_ + c] * k);
}

std::string Matrix::to_string() const {
  std::ostringstream os;
  os << "[";
  for (std::size_t i = 0; i < rows_; ++i) {
    os << (i ? ", [" : "[");
    for (std::size_t j = 0; j < cols_; ++j) os << (j ? ", " : "") << data_[i * cols_ + j].get_str();
    os << "]";
  }
  os << "]";
  return os.str();
}

// ---------------------------------------------------------------- Smith form

SmithForm snf(const Matrix& M) {
  require_integral(M);
  const Ring Z = Ring::integers();
  const std::size_t m = M.rows(), n = M.cols();
  std::vector<Integer> a(m * n);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) a[i * n + j] = M(i, j).get_num();
  auto A = [&](std::size_t i, std::size_t j) -> Integer& { return a[i * n + j]; };
  Matrix U = Matrix::identity(Z, m), V = Matrix::identity(Z, n);

  auto row_op = [&](std::size_t dst, std::size_t src, const Integer& q) {  // row dst -= q row src
    for (std::size_t j = 0; j < n; ++j) A(dst, j) -= q * A(src, j);
    U.add_row_multiple(dst, src, Scalar(-q));
  };
  auto col_op = [&](std::size_t dst, std::size_t src, const Integer& q) {  // col dst -= q col src
    for (std::size_t i = 0; i < m; ++i) A(i, dst) -= q * A(i, src);
    V.add_col_multiple(dst, src, Scalar(-q));
  };
  auto swap_r = [&](std::size_t x, std::size_t y) {
    if (x == y) return;
    for (std::size_t j = 0; j < n; ++j) std::swap(A(x, j), A(y, j));
    U.swap_rows(x, y);
  };
  auto swap_c = [&](std::size_t x, std::size_t y) {
    if (x == y) return;
    for (std::size_t i = 0; i < m; ++i) std::swap(A(i, x), A(i, y));
    V.swap_cols(x, y);
  };

  std::size_t k = 0;
  for (; k < std::min(m, n); ++k) {
    // Smallest nonzero |entry| in the trailing block, first in (row, col) order.
    auto find_pivot = [&](std::size_t& pi, std::size_t& pj) {
      bool found = false;
      Integer best;
      for (std::size_t i = k; i < m; ++i)
        for (std::size_t j = k; j < n; ++j) {
          if (A(i, j) == 0) continue;
          Integer v = abs(A(i, j));
          if (!found || v < best) {
            found = true;
            best = v;
            pi = i;
            pj = j;
          }
        }
      return found;
    };
    std::size_t pi = 0, pj = 0;
    if (!find_pivot(pi, pj)) break;
    swap_r(k, pi);
    swap_c(k, pj);
    for (;;) {
      bool dirty = false;
      for (std::size_t i = k + 1; i < m; ++i) {
        if (A(i, k) == 0) continue;
        Integer q;
        mpz_tdiv_q(q.get_mpz_t(), A(i, k).get_mpz_t(), A(k, k).get_mpz_t());
        row_op(i, k, q);
        if (A(i, k) != 0) dirty = true;
      }
      for (std::size_t j = k + 1; j < n; ++j) {
        if (A(k, j) == 0) continue;
        Integer q;
        mpz_tdiv_q(q.get_mpz_t(), A(k, j).get_mpz_t(), A(k, k).get_mpz_t());
        col_op(j, k, q);
        if (A(k, j) != 0) dirty = true;
      }
      if (dirty) {
        // Move the smallest remainder in row k / column k to the pivot.
        std::size_t bi = k, bj = k;
        Integer best = abs(A(k, k));
        for (std::size_t i = k + 1; i < m; ++i)
          if (A(i, k) != 0 && abs(A(i, k)) < best) best = abs(A(i, k)), bi = i, bj = k;
        for (std::size_t j = k + 1; j < n; ++j)
          if (A(k, j) != 0 && abs(A(k, j)) < best) best = abs(A(k, j)), bi = k, bj = j;
        swap_r(k, bi);
        swap_c(k, bj);
        continue;
      }
      // Row and column are clear; enforce divisibility of the trailing block.
      bool divisible = true;
      for (std::size_t i = k + 1; i < m && divisible; ++i)
        for (std::size_t j = k + 1; j < n; ++j)
          if (A(i, j) % A(k, k) != 0) {
            row_op(k, i, Integer(-1));
            divisible = false;
            break;
          }
      if (divisible) break;
    }
    if (A(k, k) < 0) {
      for (std::size_t j = 0; j < n; ++j) A(k, j) = -A(k, j);
      U.scale_row(k, Scalar(-1));
    }
  }

  SmithForm s{U, Matrix(Z, m, n), V, k};
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (A(i, j) != 0) s.D.set(i, j, Scalar(A(i, j)));
  return s;
}

SmithForm diagonalize(const Matrix& M) {
  const Ring& R = M.ring();
  if (!R.is_field()) return snf(M);
  const std::size_t m = M.rows(), n = M.cols();
  Matrix A = M, U = Matrix::identity(R, m), V = Matrix::identity(R, n);
  std::size_t k = 0;
  for (; k < std::min(m, n); ++k) {
    std::size_t pi = m, pj = n;
    for (std::size_t i = k; i < m && pi == m; ++i)
      for (std::size_t j = k; j < n; ++j)
        if (sgn(A(i, j)) != 0) {
          pi = i;
          pj = j;
          break;
        }
    if (pi == m) break;
    A.swap_rows(k, pi);
    U.swap_rows(k, pi);
    A.swap_cols(k, pj);
    V.swap_cols(k, pj);
    Scalar iv = R.inverse(A(k, k));
    A.scale_row(k, iv);
    U.scale_row(k, iv);
    for (std::size_t i = 0; i < m; ++i) {
      if (i == k || sgn(A(i, k)) == 0) continue;
      Scalar q = -A(i, k);
      A.add_row_multiple(i, k, q);
      U.add_row_multiple(i, k, q);
    }
    for (std::size_t j = k + 1; j < n; ++j) {
      if (sgn(A(k, j)) == 0) continue;
      Scalar q = -A(k, j);
      A.add_col_multiple(j, k, q);
      V.add_col_multiple(j, k, q);
    }
  }
  return SmithForm{U, A, V, k};
}

// ---------------------------------------------------------------- modules

bool FgModule::operator==(const FgModule& o) const {
  return ring == o.ring && rank == o.rank && torsion == o.torsion;
}

std::string FgModule::to_string() const {
  std::string r = ring.name();
  std::string out;
  if (rank > 0) out = r + (rank > 1 ? "^" + std::to_string(rank) : "");
  for (const auto& d : torsion) out += (out.empty() ? "" : " + ") + r + "/" + d.get_str();
  return out.empty() ? "0" : out;
}

ModuleInvariants module_invariants(const FgModule& A) {
  ModuleInvariants inv{A.ring.name(), A.rank, {}};
  for (const auto& d : A.torsion) inv.torsion.push_back(d.get_str());
  return inv;
}

FgModule module_from_diagonal(const Ring& ring, const Matrix& D, std::size_t generators) {
  FgModule mod{ring, 0, {}};
  std::size_t nonzero = 0;
  for (std::size_t i = 0; i < std::min(D.rows(), D.cols()); ++i) {
    const Scalar& d = D(i, i);
    if (sgn(d) == 0) break;
    ++nonzero;
    if (!ring.is_unit(d)) mod.torsion.push_back(abs(d.get_num()));
  }
  mod.rank = generators - nonzero;
  return mod;
}

FgModule cokernel(const Matrix& M) {
  if (M.cols() == 0) return FgModule{M.ring(), M.rows(), {}};
  if (M.ring().is_field()) return FgModule{M.ring(), M.rows() - M.rank(), {}};
  auto s = snf(M);
  return module_from_diagonal(M.ring(), s.D, M.rows());
}

Matrix kernel_basis(const Matrix& M) {
  if (M.cols() == 0) return Matrix(M.ring(), 0, 0);
  auto s = diagonalize(M);
  return s.V.columns(s.rank, M.cols());
}

Matrix image_basis(const Matrix& M) {
  if (M.cols() == 0 || M.rows() == 0) return Matrix(M.ring(), M.rows(), 0);
  auto s = diagonalize(M);
  Matrix Uinv = s.U.inverse();
  Matrix B = Uinv.columns(0, s.rank);
  for (std::size_t j = 0; j < s.rank; ++j) B.scale_col(j, s.D(j, j));
  return B;
}

Matrix solve_full_column_rank(const Matrix& B, const Matrix& H) {
  const Ring& R = B.ring();
  if (B.rows() != H.rows()) throw ShapeMismatch("solve: row mismatch");
  const std::size_t r = B.cols();
  Matrix X(R, r, H.cols());
  if (r == 0) {
    if (!H.is_zero()) throw Error("solve: no solution");
    return X;
  }
  FieldOps f{R};
  std::vector<std::vector<Scalar>> a(B.rows(), std::vector<Scalar>(r + H.cols()));
  for (std::size_t i = 0; i < B.rows(); ++i) {
    for (std::size_t j = 0; j < r; ++j) a[i][j] = B(i, j);
    for (std::size_t j = 0; j < H.cols(); ++j) a[i][r + j] = H(i, j);
  }
  auto piv = echelon(a, r, f);
  if (piv.size() != r) throw Error("solve: matrix lacks full column rank");
  for (std::size_t i = r; i < a.size(); ++i)
    for (std::size_t j = 0; j < H.cols(); ++j)
      if (sgn(a[i][r + j]) != 0) throw Error("solve: no solution");
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < H.cols(); ++j) {
      if (!R.is_field() && a[i][r + j].get_den() != 1) throw Error("solve: no integral solution");
      X.set(i, j, a[i][r + j]);
    }
  return X;
}

bool columns_in_span(const Matrix& G, const Matrix& H) {
  if (H.cols() == 0) return true;
  if (G.cols() == 0) return H.is_zero();
  auto s = diagonalize(G);
  Matrix Y = s.U * H;
  for (std::size_t j = 0; j < Y.cols(); ++j)
    for (std::size_t i = 0; i < Y.rows(); ++i) {
      const Scalar& y = Y(i, j);
      if (sgn(y) == 0) continue;
      if (i >= s.rank) return false;
      if (!G.ring().is_field() && y.get_num() % s.D(i, i).get_num() != 0) return false;
    }
  return true;
}

FgModule subquotient(const Matrix& G, const Matrix& H) {
  Matrix B = image_basis(G);
  if (B.cols() == 0) return FgModule{G.ring(), 0, {}};
  Matrix Hc = H.cols() == 0 ? Matrix(G.ring(), G.rows(), 0) : H;
  Matrix X = solve_full_column_rank(B, Hc);
  return cokernel(X);
}

}  // namespace paperlab
