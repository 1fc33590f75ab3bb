// Copyright 2026 The sgmnmf Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

// Random instance generators and naive reference implementations shared by
// the test binaries. The references here deliberately avoid the library's
// code paths (no LU, no tensor kernels).

#ifndef SGMNMF_TESTS_TEST_UTIL_H_
#define SGMNMF_TESTS_TEST_UTIL_H_

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include "sgmnmf/linalg.h"
#include "sgmnmf/model.h"
#include "sgmnmf/signal.h"

namespace sgmnmf::testing {

inline double rel_diff(double a, double b) {
  const double scale = std::max({std::abs(a), std::abs(b), 1e-300});
  return std::abs(a - b) / scale;
}

inline cdouble random_complex(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  return {n(rng), n(rng)};
}

/// Random matrix shifted towards the identity so it is well conditioned.
inline ComplexMatrix random_well_conditioned(std::size_t n, std::mt19937_64& rng, double shift = 3.0) {
  ComplexMatrix a(n, n);
  for (auto& v : a.data()) v = random_complex(rng) * 0.5;
  for (std::size_t i = 0; i < n; ++i) a(i, i) += shift;
  return a;
}

/// Determinant by cofactor expansion along the first row.
inline cdouble cofactor_det(const ComplexMatrix& a) {
  const std::size_t n = a.rows();
  if (n == 1) return a(0, 0);
  if (n == 2) return a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
  cdouble det{};
  for (std::size_t c = 0; c < n; ++c) {
    ComplexMatrix minor(n - 1, n - 1);
    for (std::size_t r = 1; r < n; ++r)
      for (std::size_t cc = 0, k = 0; cc < n; ++cc) {
        if (cc == c) continue;
        minor(r - 1, k++) = a(r, cc);
      }
    det += ((c % 2 == 0) ? 1.0 : -1.0) * a(0, c) * cofactor_det(minor);
  }
  return det;
}

/// Inverse via the adjugate.
inline ComplexMatrix adjugate_inverse(const ComplexMatrix& a) {
  const std::size_t n = a.rows();
  const cdouble det = cofactor_det(a);
  ComplexMatrix inv(n, n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) {
      ComplexMatrix minor(n - 1, n - 1);
      for (std::size_t rr = 0, i = 0; rr < n; ++rr) {
        if (rr == r) continue;
        for (std::size_t cc = 0, k = 0; cc < n; ++cc) {
          if (cc == c) continue;
          minor(i, k++) = a(rr, cc);
        }
        ++i;
      }
      const double sign = ((r + c) % 2 == 0) ? 1.0 : -1.0;
      inv(c, r) = sign * (n == 1 ? cdouble(1.0) : cofactor_det(minor)) / det;
    }
  return inv;
}

/// Random state with factors uniform on (0.1, 1) and a random invertible Q.
inline SeparationState random_state(std::size_t I, std::size_t J, std::size_t K, std::size_t M,
                                    std::size_t N, double beta, std::uint64_t seed,
                                    bool identity_q = false) {
  Hyperparams h;
  h.beta = beta;
  h.algorithm = beta == 2.0 ? Algorithm::kGaussian : Algorithm::kSubGaussian;
  h.n_bases = K;
  h.n_sources = N;
  h.seed = seed;
  SeparationState s = initialize_state(I, J, M, h);
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::uniform_real_distribution<double> uni(0.2, 1.5);
  for (auto& g : s.spatial.g.data) g = uni(rng);
  if (!identity_q)
    for (auto& q : s.spatial.q) q = random_well_conditioned(M, rng, 1.5);
  return s;
}

inline Spectrogram random_spectrogram(std::size_t I, std::size_t J, std::size_t M,
                                      std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Spectrogram x(I, J, M);
  for (auto& v : x.data) v = random_complex(rng);
  return x;
}

/// chi_ijm by the literal quadruple sum.
inline double naive_chi(const SeparationState& s, std::size_t i, std::size_t j, std::size_t m) {
  double acc = 0.0;
  for (std::size_t k = 0; k < s.bases(); ++k)
    for (std::size_t n = 0; n < s.sources(); ++n)
      acc += s.source.t(i, k) * s.source.v(k, j) * s.source.z(k, n) * s.spatial.g(i, n, m);
  return acc;
}

inline double naive_power(const SeparationState& s, const Spectrogram& x, std::size_t i,
                          std::size_t j, std::size_t m) {
  cdouble acc{};
  for (std::size_t c = 0; c < s.channels(); ++c) acc += s.spatial.q[i](m, c) * x(i, j, c);
  return std::norm(acc);
}

/// Joint-diagonal GGD cost from literal loops with the determinant taken by
/// cofactor expansion.
inline double naive_cost_jd(const SeparationState& s, const Spectrogram& x, double beta) {
  double total = 0.0;
  for (std::size_t i = 0; i < s.bins(); ++i) {
    total -= 2.0 * static_cast<double>(s.frames()) * std::log(std::abs(cofactor_det(s.spatial.q[i])));
    for (std::size_t j = 0; j < s.frames(); ++j) {
      double ratio = 0.0;
      for (std::size_t m = 0; m < s.channels(); ++m) {
        const double c = naive_chi(s, i, j, m);
        total += std::log(c);
        ratio += naive_power(s, x, i, j, m) / c;
      }
      total += std::pow(ratio, beta / 2.0);
    }
  }
  return total;
}


/// Builds an observation for which every multiplicative factor of the
/// t/v/z/g rules equals one at `state`: |q_im^H x_ij|^2 = c chi_ijm with
/// c = (2/beta)^(2/beta) M^(-(beta-2)/beta), random phases, x = Q^-1 p.
inline Spectrogram fixed_point_observation(const SeparationState& state, std::uint64_t seed) {
  const std::size_t I = state.bins(), J = state.frames(), M = state.channels();
  const double beta = state.hyper.beta;
  const double c = std::pow(2.0 / beta, 2.0 / beta) *
                   std::pow(static_cast<double>(M), -(beta - 2.0) / beta);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> phase(0.0, 6.283185307179586);
  Spectrogram x(I, J, M);
  for (std::size_t i = 0; i < I; ++i) {
    const ComplexMatrix qinv = adjugate_inverse(state.spatial.q[i]);
    for (std::size_t j = 0; j < J; ++j) {
      std::vector<cdouble> p(M);
      for (std::size_t m = 0; m < M; ++m)
        p[m] = std::polar(std::sqrt(c * naive_chi(state, i, j, m)), phase(rng));
      for (std::size_t r = 0; r < M; ++r) {
        cdouble acc{};
        for (std::size_t k = 0; k < M; ++k) acc += qinv(r, k) * p[k];
        x(i, j, r) = acc;
      }
    }
  }
  return x;
}

/// Column vector q_im from the row-conjugate storage of Q_i.
inline std::vector<cdouble> column_of(const ComplexMatrix& q_i, std::size_t m) {
  std::vector<cdouble> q(q_i.cols());
  for (std::size_t c = 0; c < q.size(); ++c) q[c] = std::conj(q_i(m, c));
  return q;
}

/// q^H x_ij.
inline cdouble project(const std::vector<cdouble>& q, const Spectrogram& x, std::size_t i, std::size_t j) {
  cdouble acc{};
  for (std::size_t c = 0; c < q.size(); ++c) acc += std::conj(q[c]) * x(i, j, c);
  return acc;
}

/// Normalized Frobenius distance between the directions of a and b.
inline double direction_gap(const ComplexMatrix& a, const ComplexMatrix& b) {
  const double na = a.frobenius_norm(), nb = b.frobenius_norm();
  double acc = 0.0;
  for (std::size_t k = 0; k < a.data().size(); ++k) acc += std::norm(a.data()[k] / na - b.data()[k] / nb);
  return std::sqrt(acc);
}

/// B_im from the explicit chain l -> H -> a -> A -> B at q~ = q, entry by entry.
inline ComplexMatrix b_chain_oracle(const std::vector<cdouble>& q, const Spectrogram& x, std::size_t bin,
                                    const std::vector<double>& r, double beta) {
  const std::size_t J = x.frames, M = x.channels;
  ComplexMatrix h(M, J);
  std::vector<cdouble> a(J);
  double a_norm2 = 0.0, a4 = 0.0;
  for (std::size_t j = 0; j < J; ++j) {
    const double mag = std::abs(project(q, x, bin, j));
    const double l = std::pow(std::pow(mag, 4.0 - beta) * std::pow(r[j], beta), 0.25);
    for (std::size_t c = 0; c < M; ++c) h(c, j) = x(bin, j, c) / l;
    for (std::size_t c = 0; c < M; ++c) a[j] += std::conj(h(c, j)) * q[c];
    a_norm2 += std::norm(a[j]);
    a4 += std::pow(std::norm(a[j]), 2.0);
  }
  ComplexMatrix big_a(J, J);
  for (std::size_t u = 0; u < J; ++u)
    for (std::size_t w = 0; w < J; ++w) big_a(u, w) = u == w ? cdouble(a_norm2) : -a[u] * std::conj(a[w]);
  const double scale = std::sqrt(beta) / (2.0 * std::sqrt(static_cast<double>(J) * a4));
  ComplexMatrix b(M, M);
  for (std::size_t rr = 0; rr < M; ++rr)
    for (std::size_t c = 0; c < M; ++c) {
      cdouble acc{};
      for (std::size_t u = 0; u < J; ++u)
        for (std::size_t w = 0; w < J; ++w) acc += h(rr, u) * big_a(u, w) * std::conj(h(c, w));
      b(rr, c) = scale * acc;
    }
  return b;
}

/// G_in = Q^-1 diag(g_in) Q^-H with the adjugate inverse.
inline ComplexMatrix scm_oracle(const SeparationState& s, std::size_t i, std::size_t n) {
  const ComplexMatrix qinv = adjugate_inverse(s.spatial.q[i]);
  const std::size_t M = s.channels();
  ComplexMatrix g(M, M);
  for (std::size_t r = 0; r < M; ++r)
    for (std::size_t c = 0; c < M; ++c)
      for (std::size_t k = 0; k < M; ++k) g(r, c) += qinv(r, k) * s.spatial.g(i, n, k) * std::conj(qinv(c, k));
  return g;
}

inline double psd_oracle(const SeparationState& s, std::size_t i, std::size_t j, std::size_t n) {
  double acc = 0.0;
  for (std::size_t k = 0; k < s.bases(); ++k) acc += s.source.t(i, k) * s.source.v(k, j) * s.source.z(k, n);
  return acc;
}

/// s_ijn = sigma_ijn G_in (sum_n' sigma_ijn' G_in')^-1 x_ij.
inline std::vector<cdouble> wiener_oracle(const SeparationState& s, const Spectrogram& x, std::size_t i,
                                          std::size_t j, std::size_t n) {
  const std::size_t M = s.channels();
  ComplexMatrix total(M, M), part(M, M);
  for (std::size_t k = 0; k < s.sources(); ++k) {
    const ComplexMatrix g = scm_oracle(s, i, k);
    const double sigma = psd_oracle(s, i, j, k);
    for (std::size_t e = 0; e < g.data().size(); ++e) {
      total.data()[e] += sigma * g.data()[e];
      if (k == n) part.data()[e] = sigma * g.data()[e];
    }
  }
  const ComplexMatrix inv = adjugate_inverse(total);
  std::vector<cdouble> y(M);
  for (std::size_t r = 0; r < M; ++r)
    for (std::size_t c = 0; c < M; ++c)
      for (std::size_t k = 0; k < M; ++k) y[r] += part(r, k) * inv(k, c) * x(i, j, c);
  return y;
}

}  // namespace sgmnmf::testing

#endif  // SGMNMF_TESTS_TEST_UTIL_H_
