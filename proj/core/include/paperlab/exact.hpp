#pragma once

// Exact scalars, dense matrices and finitely generated modules over Z, Q and F_p.

#include <gmpxx.h>

#include <cstddef>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace paperlab {

using Integer = mpz_class;
using Scalar = mpq_class;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidRing : public Error {
 public:
  using Error::Error;
};

class ShapeMismatch : public Error {
 public:
  using Error::Error;
};

class Ring {
 public:
  enum class Kind { Integers, Rationals, PrimeField };

  static Ring integers() { return Ring(Kind::Integers, 0); }
  static Ring rationals() { return Ring(Kind::Rationals, 0); }
  static Ring prime_field(unsigned long p);
  /// Parses "Z", "Q" or "F_p".
  static Ring parse(const std::string& tag);

  Kind kind() const { return kind_; }
  unsigned long characteristic() const { return p_; }
  bool is_field() const { return kind_ != Kind::Integers; }
  std::string name() const;

  bool contains(const Scalar& x) const;
  /// Canonical representative; reduces mod p over F_p. Throws InvalidRing for
  /// non-integral values over Z.
  Scalar normalize(const Scalar& x) const;
  bool is_unit(const Scalar& x) const;
  Scalar inverse(const Scalar& x) const;

  bool operator==(const Ring& o) const { return kind_ == o.kind_ && p_ == o.p_; }

 private:
  Ring(Kind k, unsigned long p) : kind_(k), p_(p) {}
  Kind kind_;
  unsigned long p_;
};

std::string to_string(const Scalar& x);
Scalar parse_scalar(const std::string& s);

/// Dense row-major matrix with entries normalized into its ring.
class Matrix {
 public:
  Matrix() : ring_(Ring::integers()) {}
  Matrix(Ring ring, std::size_t rows, std::size_t cols);
  Matrix(Ring ring, std::size_t rows, std::size_t cols, const std::vector<std::vector<long>>& entries);

  static Matrix identity(Ring ring, std::size_t n);
  static Matrix zero(Ring ring, std::size_t rows, std::size_t cols) { return Matrix(ring, rows, cols); }
  static Matrix diagonal(Ring ring, const std::vector<Scalar>& d, std::size_t rows, std::size_t cols);

  const Ring& ring() const { return ring_; }
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return rows_ == 0 || cols_ == 0; }

  const Scalar& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  void set(std::size_t r, std::size_t c, const Scalar& v);
  /// Adds v to entry (r, c).
  void add_to(std::size_t r, std::size_t c, const Scalar& v);

  Matrix operator*(const Matrix& o) const;
  Matrix operator+(const Matrix& o) const;
  Matrix operator-(const Matrix& o) const;
  Matrix operator-() const;
  Matrix scaled(const Scalar& s) const;
  bool operator==(const Matrix& o) const;
  bool is_zero() const;
  bool is_identity() const;

  Matrix transpose() const;
  Matrix column(std::size_t c) const;
  Matrix columns(std::size_t begin, std::size_t end) const;
  Matrix rows_range(std::size_t begin, std::size_t end) const;
  Matrix select_rows(std::span<const std::size_t> idx) const;
  Matrix select_columns(std::span<const std::size_t> idx) const;

  static Matrix hstack(const Matrix& a, const Matrix& b);
  static Matrix vstack(const Matrix& a, const Matrix& b);
  static Matrix block_diagonal(const Matrix& a, const Matrix& b);
  /// Kronecker product; row (i,k) -> i*b.rows()+k.
  static Matrix kronecker(const Matrix& a, const Matrix& b);

  /// Rank over the fraction field.
  std::size_t rank() const;
  /// Determinant over the fraction field (square only).
  Scalar determinant() const;
  /// Inverse over the fraction field, entries normalized into the ring.
  Matrix inverse() const;

  void swap_rows(std::size_t a, std::size_t b);
  void swap_cols(std::size_t a, std::size_t b);
  /// row[dst] += k * row[src]
  void add_row_multiple(std::size_t dst, std::size_t src, const Scalar& k);
  void add_col_multiple(std::size_t dst, std::size_t src, const Scalar& k);
  void scale_row(std::size_t r, const Scalar& k);
  void scale_col(std::size_t c, const Scalar& k);

  std::string to_string() const;

 private:
  Ring ring_;
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Scalar> data_;
};

struct SmithForm {
  Matrix U;
  Matrix D;
  Matrix V;
  std::size_t rank = 0;
};

/// Smith normal form over Z: D = U*M*V, U and V unimodular, d_1 | d_2 | ...
/// Pivot is the nonzero entry of smallest absolute value, ties broken by
/// (row, col). Throws InvalidRing unless M is an integer matrix.
SmithForm snf(const Matrix& M);

/// Rank normal form over any ring: D = U*M*V with U, V invertible over the ring.
/// Over Z this is snf(); over a field D has ones on the leading diagonal.
SmithForm diagonalize(const Matrix& M);

/// Finitely generated module by rank and invariant factors.
struct FgModule {
  Ring ring = Ring::integers();
  std::size_t rank = 0;
  std::vector<Integer> torsion;

  bool is_zero() const { return rank == 0 && torsion.empty(); }
  bool is_free() const { return torsion.empty(); }
  bool operator==(const FgModule& o) const;
  std::string to_string() const;
};

/// Canonical isomorphism-class descriptor (ring, rank, invariant factors).
struct ModuleInvariants {
  std::string ring;
  std::size_t rank = 0;
  std::vector<std::string> torsion;
  bool operator==(const ModuleInvariants&) const = default;
  auto operator<=>(const ModuleInvariants&) const = default;
};

ModuleInvariants module_invariants(const FgModule& A);

/// Builds a module from the diagonal of a Smith form with `generators` rows.
FgModule module_from_diagonal(const Ring& ring, const Matrix& D, std::size_t generators);

/// (target free module) / im(M).
FgModule cokernel(const Matrix& M);

/// Columns form a basis of ker(M); over Z a basis of the kernel lattice.
Matrix kernel_basis(const Matrix& M);

/// Columns form a basis of im(M) (a lattice basis over Z).
Matrix image_basis(const Matrix& M);

/// Solves B*X = H for X when B has full column rank and the columns of H lie
/// in the image of B. Throws Error when there is no exact solution over the ring.
Matrix solve_full_column_rank(const Matrix& B, const Matrix& H);

/// True iff every column of H lies in the span (lattice over Z) of the columns of G.
bool columns_in_span(const Matrix& G, const Matrix& H);

/// L/K where L = span(G) and K = span(H) is a submodule of L.
FgModule subquotient(const Matrix& G, const Matrix& H);

}  // namespace paperlab
