// Copyright 2026 The sgmnmf Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "sgmnmf/linalg.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <utility>

#include "sgmnmf/error.h"

namespace sgmnmf {

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols) {}

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols,
                             std::vector<cdouble> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
  if (data_.size() != rows * cols)
    throw DimensionMismatch("ComplexMatrix: " + std::to_string(data_.size()) +
                            " entries for " + std::to_string(rows) + "x" +
                            std::to_string(cols));
  for (const auto& v : data_)
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      throw NonFinite("ComplexMatrix: non-finite entry");
}

ComplexMatrix ComplexMatrix::identity(std::size_t n) {
  ComplexMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

ComplexMatrix ComplexMatrix::diagonal(std::span<const cdouble> diag) {
  ComplexMatrix m(diag.size(), diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
  return m;
}

ComplexMatrix ComplexMatrix::adjoint() const {
  ComplexMatrix out(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) out(c, r) = std::conj((*this)(r, c));
  return out;
}

double ComplexMatrix::frobenius_norm() const {
  double s = 0.0;
  for (const auto& v : data_) s += std::norm(v);
  return std::sqrt(s);
}

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.cols() != b.rows()) throw DimensionMismatch("matrix product: inner dimensions differ");
  ComplexMatrix out(a.rows(), b.cols());
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const cdouble ark = a(r, k);
      for (std::size_t c = 0; c < b.cols(); ++c) out(r, c) += ark * b(k, c);
    }
  return out;
}

namespace {

template <class Op>
ComplexMatrix elementwise(const ComplexMatrix& a, const ComplexMatrix& b, Op op) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw DimensionMismatch("elementwise matrix op: shapes differ");
  ComplexMatrix out(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.data().size(); ++i)
    out.data()[i] = op(a.data()[i], b.data()[i]);
  return out;
}

}  // namespace

ComplexMatrix operator+(const ComplexMatrix& a, const ComplexMatrix& b) {
  return elementwise(a, b, std::plus<>());
}

ComplexMatrix operator-(const ComplexMatrix& a, const ComplexMatrix& b) {
  return elementwise(a, b, std::minus<>());
}

ComplexMatrix operator*(cdouble s, const ComplexMatrix& a) {
  ComplexMatrix out = a;
  for (auto& v : out.data()) v *= s;
  return out;
}

LuDecomposition::LuDecomposition(const ComplexMatrix& a) : n_(a.rows()), lu_(a), perm_(a.rows()) {
  if (!a.square()) throw DimensionMismatch("LU: matrix must be square");
  std::iota(perm_.begin(), perm_.end(), std::size_t{0});
  double max_mag = 0.0;
  for (const auto& v : a.data()) max_mag = std::max(max_mag, std::abs(v));
  const double tol = kSingularThreshold * max_mag;
  if (n_ > 0 && max_mag == 0.0) throw SingularMatrix("LU: zero matrix");

  for (std::size_t k = 0; k < n_; ++k) {
    std::size_t piv = k;
    double best = std::abs(lu_(k, k));
    for (std::size_t r = k + 1; r < n_; ++r) {
      const double mag = std::abs(lu_(r, k));
      if (mag > best) {
        best = mag;
        piv = r;
      }
    }
    if (!(best > tol))
      throw SingularMatrix("LU: pivot " + std::to_string(k) + " below threshold");
    if (piv != k) {
      for (std::size_t c = 0; c < n_; ++c) std::swap(lu_(k, c), lu_(piv, c));
      std::swap(perm_[k], perm_[piv]);
    }
    const cdouble inv_pivot = 1.0 / lu_(k, k);
    for (std::size_t r = k + 1; r < n_; ++r) {
      const cdouble f = lu_(r, k) * inv_pivot;
      lu_(r, k) = f;
      for (std::size_t c = k + 1; c < n_; ++c) lu_(r, c) -= f * lu_(k, c);
    }
  }
}

std::vector<cdouble> LuDecomposition::solve(std::span<const cdouble> b) const {
  if (b.size() != n_) throw DimensionMismatch("LU solve: rhs length differs");
  std::vector<cdouble> x(n_);
  for (std::size_t r = 0; r < n_; ++r) {
    cdouble s = b[perm_[r]];
    for (std::size_t c = 0; c < r; ++c) s -= lu_(r, c) * x[c];
    x[r] = s;
  }
  for (std::size_t r = n_; r-- > 0;) {
    cdouble s = x[r];
    for (std::size_t c = r + 1; c < n_; ++c) s -= lu_(r, c) * x[c];
    x[r] = s / lu_(r, r);
  }
  return x;
}

ComplexMatrix LuDecomposition::inverse() const {
  ComplexMatrix inv(n_, n_);
  std::vector<cdouble> e(n_);
  for (std::size_t c = 0; c < n_; ++c) {
    std::fill(e.begin(), e.end(), cdouble{});
    e[c] = 1.0;
    const auto col = solve(e);
    for (std::size_t r = 0; r < n_; ++r) inv(r, c) = col[r];
  }
  return inv;
}

double LuDecomposition::log_abs_det() const {
  double s = 0.0;
  for (std::size_t k = 0; k < n_; ++k) s += std::log(std::abs(lu_(k, k)));
  return s;
}

ComplexMatrix invert(const ComplexMatrix& a) { return LuDecomposition(a).inverse(); }

double log_abs_det(const ComplexMatrix& a) { return LuDecomposition(a).log_abs_det(); }

std::vector<cdouble> solve(const ComplexMatrix& a, std::span<const cdouble> b) {
  return LuDecomposition(a).solve(b);
}

cdouble inner(std::span<const cdouble> q, std::span<const cdouble> x) {
  if (q.size() != x.size()) throw DimensionMismatch("inner: lengths differ");
  cdouble s{};
  for (std::size_t k = 0; k < q.size(); ++k) s += std::conj(q[k]) * x[k];
  return s;
}

double hermitian_form(std::span<const cdouble> q, std::span<const cdouble> x) {
  return std::norm(inner(q, x));
}

double quadratic_form(const ComplexMatrix& a, std::span<const cdouble> q) {
  if (!a.square() || a.rows() != q.size())
    throw DimensionMismatch("quadratic_form: shape mismatch");
  cdouble s{};
  for (std::size_t r = 0; r < q.size(); ++r) {
    cdouble row{};
    for (std::size_t c = 0; c < q.size(); ++c) row += a(r, c) * q[c];
    s += std::conj(q[r]) * row;
  }
  return s.real();
}

std::vector<cdouble> multiply(const ComplexMatrix& a, std::span<const cdouble> x) {
  if (a.cols() != x.size()) throw DimensionMismatch("multiply: shape mismatch");
  std::vector<cdouble> y(a.rows());
  for (std::size_t r = 0; r < a.rows(); ++r) {
    cdouble s{};
    for (std::size_t c = 0; c < a.cols(); ++c) s += a(r, c) * x[c];
    y[r] = s;
  }
  return y;
}

void add_outer(ComplexMatrix& a, double w, std::span<const cdouble> x) {
  if (!a.square() || a.rows() != x.size()) throw DimensionMismatch("add_outer: shape mismatch");
  for (std::size_t r = 0; r < x.size(); ++r) {
    const cdouble xr = w * x[r];
    for (std::size_t c = 0; c < x.size(); ++c) a(r, c) += xr * std::conj(x[c]);
  }
}

}  // namespace sgmnmf
