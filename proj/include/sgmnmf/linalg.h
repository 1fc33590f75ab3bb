// Copyright 2026 The sgmnmf Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

// Small dense complex linear algebra for the per-frequency M x M problems.

#ifndef SGMNMF_LINALG_H_
#define SGMNMF_LINALG_H_

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace sgmnmf {

using cdouble = std::complex<double>;

/// Row-major dense complex matrix.
class ComplexMatrix {
 public:
  ComplexMatrix() = default;
  ComplexMatrix(std::size_t rows, std::size_t cols);
  /// Throws NonFinite if any entry is NaN or Inf.
  ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<cdouble> entries);

  static ComplexMatrix identity(std::size_t n);
  static ComplexMatrix diagonal(std::span<const cdouble> diag);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool square() const { return rows_ == cols_; }

  cdouble& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const cdouble& operator()(std::size_t r, std::size_t c) const {
    return data_[r * cols_ + c];
  }

  std::span<cdouble> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const cdouble> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }

  const std::vector<cdouble>& data() const { return data_; }
  std::vector<cdouble>& data() { return data_; }

  /// Conjugate transpose.
  ComplexMatrix adjoint() const;

  double frobenius_norm() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<cdouble> data_;
};

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix operator+(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix operator-(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix operator*(cdouble s, const ComplexMatrix& a);

/// LU factorization with partial pivoting, P A = L U.
/// Throws SingularMatrix when a pivot magnitude falls below 1e-13 times the
/// largest input magnitude.
class LuDecomposition {
 public:
  explicit LuDecomposition(const ComplexMatrix& a);

  std::size_t size() const { return n_; }

  /// Solves A x = b.
  std::vector<cdouble> solve(std::span<const cdouble> b) const;
  ComplexMatrix inverse() const;
  double log_abs_det() const;

 private:
  std::size_t n_;
  ComplexMatrix lu_;
  std::vector<std::size_t> perm_;
};

inline constexpr double kSingularThreshold = 1e-13;

ComplexMatrix invert(const ComplexMatrix& a);
double log_abs_det(const ComplexMatrix& a);

/// Solves A x = b for square A.
std::vector<cdouble> solve(const ComplexMatrix& a, std::span<const cdouble> b);

/// Returns |q^H x|^2.
double hermitian_form(std::span<const cdouble> q, std::span<const cdouble> x);

/// Returns q^H x.
cdouble inner(std::span<const cdouble> q, std::span<const cdouble> x);

/// Returns q^H A q (real part; A is assumed Hermitian).
double quadratic_form(const ComplexMatrix& a, std::span<const cdouble> q);

/// Returns A x.
std::vector<cdouble> multiply(const ComplexMatrix& a, std::span<const cdouble> x);

/// A += w * x x^H.
void add_outer(ComplexMatrix& a, double w, std::span<const cdouble> x);

}  // namespace sgmnmf

#endif  // SGMNMF_LINALG_H_
