// Copyright 2026 The sgmnmf Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "sgmnmf/optimizer.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>

#include "sgmnmf/error.h"
#include "sgmnmf/parallel.h"

namespace sgmnmf {

namespace {

void check_shapes(const SeparationState& state, const Spectrogram& x) {
  state.validate();
  if (x.bins != state.bins() || x.frames != state.frames() || x.channels != state.channels())
    throw DimensionMismatch("optimizer: spectrogram shape does not match the model");
}

// Per-(i, j, m) weights of the multiplicative rules at the current point:
// a = phi / chi^2 and b = 1 / chi, with
// phi_ijm = |q_im^H x_ij|^2 (sum_m' |q_im'^H x_ij|^2 / chi_ijm')^((beta - 2) / 2).
struct Weights {
  Tensor3 psd;
  Tensor3 a;
  Tensor3 b;
};

Weights current_weights(const SeparationState& state, const Spectrogram& x) {
  check_shapes(state, x);
  const std::size_t I = state.bins(), J = state.frames(), M = state.channels();
  const double beta = state.hyper.beta;
  Weights w;
  w.psd = compute_source_psd(state.source);
  const Tensor3 chi = mixture_gain(w.psd, state.spatial.g);
  const Tensor3 pw = projection_power(x, state);
  w.a = Tensor3(I, J, M);
  w.b = Tensor3(I, J, M);
  parallel_for(I, [&](std::size_t i) {
    for (std::size_t j = 0; j < J; ++j) {
      const double* c = chi.slice(i, j);
      const double* p = pw.slice(i, j);
      double s = 0.0;
      for (std::size_t m = 0; m < M; ++m) {
        if (!(c[m] > 0.0) || !std::isfinite(c[m]))
          throw NonFinite("update: chi underflow at bin " + std::to_string(i));
        s += p[m] / c[m];
      }
      const double scale = beta == 2.0 ? 1.0 : std::pow(s, 0.5 * (beta - 2.0));
      double* a = w.a.slice(i, j);
      double* b = w.b.slice(i, j);
      for (std::size_t m = 0; m < M; ++m) {
        b[m] = 1.0 / c[m];
        a[m] = p[m] * scale * b[m] * b[m];
      }
    }
  });
  return w;
}

// Collapses the channel axis with g: out_ijn = sum_m g_inm w_ijm.
Tensor3 fold_channels(const Tensor3& w, const Tensor3& g) {
  const std::size_t I = w.d0, J = w.d1, M = w.d2, N = g.d1;
  Tensor3 out(I, J, N);
  for (std::size_t i = 0; i < I; ++i)
    for (std::size_t j = 0; j < J; ++j) {
      const double* src = w.slice(i, j);
      double* dst = out.slice(i, j);
      for (std::size_t n = 0; n < N; ++n) {
        const double* gin = g.slice(i, n);
        double acc = 0.0;
        for (std::size_t m = 0; m < M; ++m) acc += gin[m] * src[m];
        dst[n] = acc;
      }
    }
  return out;
}

double mm_factor(double num, double den, double beta) {
  const double f = std::pow(beta * num / (2.0 * den), 2.0 / (beta + 2.0));
  if (!std::isfinite(f)) throw NonFinite("update: multiplicative factor is not finite");
  return f;
}

void floor_values(std::vector<double>& v, double eps) {
  for (auto& x : v) x = std::max(x, eps);
}

}  // namespace

void update_t(SeparationState& state, const Spectrogram& x) {
  const Weights w = current_weights(state, x);
  const Tensor3 num_in = fold_channels(w.a, state.spatial.g);
  const Tensor3 den_in = fold_channels(w.b, state.spatial.g);
  const std::size_t I = state.bins(), J = state.frames(), K = state.bases(), N = state.sources();
  const double beta = state.hyper.beta;
  auto& src = state.source;
  parallel_for(I, [&](std::size_t i) {
    std::vector<double> num(K, 0.0), den(K, 0.0);
    for (std::size_t j = 0; j < J; ++j) {
      const double* na = num_in.slice(i, j);
      const double* da = den_in.slice(i, j);
      for (std::size_t k = 0; k < K; ++k) {
        double zn = 0.0, zd = 0.0;
        for (std::size_t n = 0; n < N; ++n) {
          zn += src.z(k, n) * na[n];
          zd += src.z(k, n) * da[n];
        }
        num[k] += src.v(k, j) * zn;
        den[k] += src.v(k, j) * zd;
      }
    }
    for (std::size_t k = 0; k < K; ++k) src.t(i, k) *= mm_factor(num[k], den[k], beta);
  });
  floor_values(src.t.data, state.hyper.floor_eps);
}

void update_v(SeparationState& state, const Spectrogram& x) {
  const Weights w = current_weights(state, x);
  const Tensor3 num_in = fold_channels(w.a, state.spatial.g);
  const Tensor3 den_in = fold_channels(w.b, state.spatial.g);
  const std::size_t I = state.bins(), J = state.frames(), K = state.bases(), N = state.sources();
  const double beta = state.hyper.beta;
  auto& src = state.source;
  parallel_for(J, [&](std::size_t j) {
    std::vector<double> num(K, 0.0), den(K, 0.0);
    for (std::size_t i = 0; i < I; ++i) {
      const double* na = num_in.slice(i, j);
      const double* da = den_in.slice(i, j);
      for (std::size_t k = 0; k < K; ++k) {
        double zn = 0.0, zd = 0.0;
        for (std::size_t n = 0; n < N; ++n) {
          zn += src.z(k, n) * na[n];
          zd += src.z(k, n) * da[n];
        }
        num[k] += src.t(i, k) * zn;
        den[k] += src.t(i, k) * zd;
      }
    }
    for (std::size_t k = 0; k < K; ++k) src.v(k, j) *= mm_factor(num[k], den[k], beta);
  });
  floor_values(src.v.data, state.hyper.floor_eps);
}

void update_z(SeparationState& state, const Spectrogram& x) {
  const Weights w = current_weights(state, x);
  const Tensor3 num_in = fold_channels(w.a, state.spatial.g);
  const Tensor3 den_in = fold_channels(w.b, state.spatial.g);
  const std::size_t I = state.bins(), J = state.frames(), K = state.bases(), N = state.sources();
  const double beta = state.hyper.beta;
  auto& src = state.source;
  // Per-bin partial sums, reduced afterwards in bin order.
  Tensor3 num_part(I, K, N), den_part(I, K, N);
  parallel_for(I, [&](std::size_t i) {
    for (std::size_t j = 0; j < J; ++j) {
      const double* na = num_in.slice(i, j);
      const double* da = den_in.slice(i, j);
      for (std::size_t k = 0; k < K; ++k) {
        const double tv = src.t(i, k) * src.v(k, j);
        double* np = num_part.slice(i, k);
        double* dp = den_part.slice(i, k);
        for (std::size_t n = 0; n < N; ++n) {
          np[n] += tv * na[n];
          dp[n] += tv * da[n];
        }
      }
    }
  });
  for (std::size_t k = 0; k < K; ++k)
    for (std::size_t n = 0; n < N; ++n) {
      double num = 0.0, den = 0.0;
      for (std::size_t i = 0; i < I; ++i) {
        num += num_part(i, k, n);
        den += den_part(i, k, n);
      }
      src.z(k, n) *= mm_factor(num, den, beta);
    }
  floor_values(src.z.data, state.hyper.floor_eps);
}

void update_g(SeparationState& state, const Spectrogram& x) {
  const Weights w = current_weights(state, x);
  const std::size_t I = state.bins(), J = state.frames(), M = state.channels(),
                    N = state.sources();
  const double beta = state.hyper.beta;
  auto& g = state.spatial.g;
  parallel_for(I, [&](std::size_t i) {
    std::vector<double> num(N * M, 0.0), den(N * M, 0.0);
    for (std::size_t j = 0; j < J; ++j) {
      const double* psd = w.psd.slice(i, j);
      const double* a = w.a.slice(i, j);
      const double* b = w.b.slice(i, j);
      for (std::size_t n = 0; n < N; ++n)
        for (std::size_t m = 0; m < M; ++m) {
          num[n * M + m] += psd[n] * a[m];
          den[n * M + m] += psd[n] * b[m];
        }
    }
    for (std::size_t n = 0; n < N; ++n)
      for (std::size_t m = 0; m < M; ++m)
        g(i, n, m) *= mm_factor(num[n * M + m], den[n * M + m], beta);
  });
  floor_values(g.data, state.hyper.floor_eps);
}

void update_tvzg(SeparationState& state, const Spectrogram& x) {
  update_t(state, x);
  update_v(state, x);
  update_z(state, x);
  update_g(state, x);
}

// ---------------------------------------------------------------------------
// Q updates

namespace {

std::vector<cdouble> project(const ComplexMatrix& q, std::span<const cdouble> x) {
  return multiply(q, x);
}

std::vector<cdouble> unit_vector(std::size_t size, std::size_t at) {
  std::vector<cdouble> e(size);
  e[at] = 1.0;
  return e;
}

}  // namespace

RowStep subgaussian_row_step(const ComplexMatrix& q_i, const Spectrogram& x, std::size_t bin,
                             const double* chi_bin, std::size_t row, double beta, double eps) {
  const std::size_t J = x.frames, M = x.channels;
  RowStep step;
  step.r.assign(J, 0.0);
  step.u = ComplexMatrix(M, M);
  ComplexMatrix weighted(M, M);
  std::vector<char> active(J, 0);

  for (std::size_t j = 0; j < J; ++j) {
    const auto xv = x.vec(bin, j);
    const auto p = project(q_i, xv);
    const double* chi = chi_bin + j * M;
    double s = 0.0;
    for (std::size_t m = 0; m < M; ++m) s += std::norm(p[m]) / chi[m];
    if (!(s > 0.0)) continue;  // x_ij projects to zero: no contribution
    active[j] = 1;
    const double mag = std::abs(p[row]);
    const double r = std::max(std::pow(mag, 1.0 - 2.0 / beta) * std::pow(chi[row], 1.0 / beta) *
                                  std::pow(s, 1.0 / beta - 0.5),
                              eps);
    step.r[j] = r;
    const double r_beta = std::pow(r, beta);
    const double l2 = std::max(std::sqrt(std::pow(mag, 4.0 - beta) * r_beta), eps);
    add_outer(step.u, 1.0 / l2, xv);
    add_outer(weighted, std::pow(mag, beta - 2.0) / r_beta, xv);
  }

  std::vector<cdouble> q_old(M);
  for (std::size_t c = 0; c < M; ++c) q_old[c] = std::conj(q_i(row, c));
  const auto uq = multiply(step.u, q_old);
  const double quad = inner(q_old, uq).real();
  step.b_prime = ComplexMatrix(M, M);
  for (std::size_t r = 0; r < M; ++r)
    for (std::size_t c = 0; c < M; ++c)
      step.b_prime(r, c) = quad * step.u(r, c) + weighted(r, c) - uq[r] * std::conj(uq[c]);

  step.q = solve(q_i * step.b_prime, unit_vector(M, row));

  double s = 0.0;
  for (std::size_t j = 0; j < J; ++j) {
    if (!active[j]) continue;
    const double mag = std::abs(inner(step.q, x.vec(bin, j)));
    s += std::pow(mag / step.r[j], beta);
  }
  if (!(s > 0.0) || !std::isfinite(s))
    throw NonFinite("generalized IP: degenerate scale sum at bin " + std::to_string(bin));
  const double scale = std::pow(2.0 * static_cast<double>(J) / (beta * s), 1.0 / beta);
  for (auto& v : step.q) v *= scale;
  return step;
}

RowStep gaussian_row_step(const ComplexMatrix& q_i, const Spectrogram& x, std::size_t bin,
                          const double* chi_bin, std::size_t row) {
  const std::size_t J = x.frames, M = x.channels;
  RowStep step;
  step.u = ComplexMatrix(M, M);
  const double inv_j = 1.0 / static_cast<double>(J);
  for (std::size_t j = 0; j < J; ++j) add_outer(step.u, inv_j / chi_bin[j * M + row], x.vec(bin, j));
  step.q = solve(q_i * step.u, unit_vector(M, row));
  const double quad = quadratic_form(step.u, step.q);
  if (!(quad > 0.0)) throw SingularMatrix("IP: q^H U q is not positive at bin " + std::to_string(bin));
  const double scale = 1.0 / std::sqrt(quad);
  for (auto& v : step.q) v *= scale;
  return step;
}

std::size_t update_q_row(SeparationState& state, const Spectrogram& x, std::size_t row) {
  check_shapes(state, x);
  if (row >= state.channels()) throw InvalidArgument("update_q_row: row out of range");
  const Tensor3 chi = mixture_gain(state);
  const bool gaussian = state.hyper.algorithm == Algorithm::kGaussian;
  const double beta = state.hyper.beta;
  const double eps = state.hyper.floor_eps;
  const std::size_t M = state.channels();
  std::vector<char> skipped(state.bins(), 0);
  parallel_for(state.bins(), [&](std::size_t i) {
    ComplexMatrix& q = state.spatial.q[i];
    const double* chi_bin = chi.slice(i, 0);
    RowStep step;
    try {
      step = gaussian ? gaussian_row_step(q, x, i, chi_bin, row)
                      : subgaussian_row_step(q, x, i, chi_bin, row, beta, eps);
    } catch (const SingularMatrix&) {
      skipped[i] = 1;  // no unique step; the old row leaves the cost unchanged
      return;
    }
    for (std::size_t c = 0; c < M; ++c) q(row, c) = std::conj(step.q[c]);
  });
  return static_cast<std::size_t>(std::count(skipped.begin(), skipped.end(), 1));
}

std::size_t update_q_subgaussian(SeparationState& state, const Spectrogram& x) {
  if (state.hyper.algorithm != Algorithm::kSubGaussian)
    throw InvalidArgument("update_q_subgaussian: state is configured for the gaussian path");
  std::size_t skipped = 0;
  for (std::size_t m = 0; m < state.channels(); ++m) skipped += update_q_row(state, x, m);
  return skipped;
}

std::size_t update_q_gaussian(SeparationState& state, const Spectrogram& x) {
  if (state.hyper.algorithm != Algorithm::kGaussian)
    throw InvalidArgument("update_q_gaussian: state is configured for the subgaussian path");
  std::size_t skipped = 0;
  for (std::size_t m = 0; m < state.channels(); ++m) skipped += update_q_row(state, x, m);
  return skipped;
}

void normalize_and_rescale(SeparationState& state) {
  state.validate();
  const std::size_t I = state.bins(), J = state.frames(), K = state.bases(),
                    N = state.sources(), M = state.channels();
  auto& src = state.source;
  auto& g = state.spatial.g;
  const double target = static_cast<double>(N * M);
  for (std::size_t i = 0; i < I; ++i) {
    double sum = 0.0;
    for (std::size_t n = 0; n < N; ++n)
      for (std::size_t m = 0; m < M; ++m) sum += g(i, n, m);
    const double c = sum / target;
    if (!(c > 0.0) || !std::isfinite(c))
      throw NonFinite("normalize: degenerate spatial gains at bin " + std::to_string(i));
    for (std::size_t n = 0; n < N; ++n)
      for (std::size_t m = 0; m < M; ++m) g(i, n, m) /= c;
    for (std::size_t k = 0; k < K; ++k) src.t(i, k) *= c;
  }
  for (std::size_t k = 0; k < K; ++k) {
    double sum = 0.0;
    for (std::size_t n = 0; n < N; ++n) sum += src.z(k, n);
    if (!(sum > 0.0) || !std::isfinite(sum))
      throw NonFinite("normalize: degenerate basis weights at basis " + std::to_string(k));
    for (std::size_t n = 0; n < N; ++n) src.z(k, n) /= sum;
    for (std::size_t j = 0; j < J; ++j) src.v(k, j) *= sum;
  }
  apply_floor(state);
}

// ---------------------------------------------------------------------------

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point from, Clock::time_point to) {
  return std::chrono::duration<double, std::milli>(to - from).count();
}

template <class E>
[[noreturn]] void rethrow_as(const E& e, const std::string& context) {
  throw E(context + e.what());
}

}  // namespace

CostTrace run(SeparationState& state, const Spectrogram& x, const RunOptions& options) {
  check_shapes(state, x);
  state.hyper.validate();
  CostTrace trace;
  const std::size_t iterations = state.hyper.iterations;
  if (iterations == 0) return trace;

  double cost = cost_ggd_jd(x, state);
  for (std::size_t it = 1; it <= iterations; ++it) {
    const std::string context = "iteration " + std::to_string(it) + ": ";
    IterationReport report;
    report.iteration = it;
    report.cost_before = cost;
    try {
      const auto t0 = Clock::now();
      update_tvzg(state, x);
      const auto t1 = Clock::now();
      for (std::size_t m = 0; m < state.channels(); ++m) report.q_rows_skipped += update_q_row(state, x, m);
      normalize_and_rescale(state);
      const auto t2 = Clock::now();
      cost = cost_ggd_jd(x, state);
      const auto t3 = Clock::now();
      report.ms_tvzg = elapsed_ms(t0, t1);
      report.ms_q = elapsed_ms(t1, t2);
      report.ms_total = elapsed_ms(t0, t3);
    } catch (const SingularMatrix& e) {
      rethrow_as(e, context);
    } catch (const NonFinite& e) {
      rethrow_as(e, context);
    } catch (const DimensionMismatch& e) {
      rethrow_as(e, context);
    }
    report.cost_after = cost;
    trace.append(it, cost, report.ms_total);
    if (options.on_iteration) options.on_iteration(report);
  }
  return trace;
}

}  // namespace sgmnmf
