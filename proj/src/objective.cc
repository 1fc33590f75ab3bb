// Copyright 2026 The sgmnmf Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "sgmnmf/objective.h"

#include <cmath>
#include <limits>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <string>

#include "sgmnmf/error.h"
#include "sgmnmf/parallel.h"

namespace sgmnmf {

namespace {

void check_shapes(const Spectrogram& x, const SeparationState& state) {
  state.validate();
  if (x.bins != state.bins() || x.frames != state.frames() || x.channels != state.channels())
    throw DimensionMismatch("spectrogram shape (" + std::to_string(x.bins) + ", " +
                            std::to_string(x.frames) + ", " + std::to_string(x.channels) +
                            ") does not match the model");
}

// Which cost is being summed.
enum class CostKind { kGgd, kGaussian };

double joint_diag_cost(const Spectrogram& x, const SeparationState& state, CostKind kind) {
  check_shapes(x, state);
  const std::size_t I = state.bins(), J = state.frames(), M = state.channels();
  const double beta = state.hyper.beta;
  const double half_beta = 0.5 * beta;
  const Tensor3 chi = mixture_gain(state);
  const Tensor3 pw = projection_power(x, state);

  std::vector<double> partial(I, 0.0);
  parallel_for(I, [&](std::size_t i) {
    double acc = -2.0 * static_cast<double>(J) * LuDecomposition(state.spatial.q[i]).log_abs_det();
    for (std::size_t j = 0; j < J; ++j) {
      const double* c = chi.slice(i, j);
      const double* p = pw.slice(i, j);
      double logs = 0.0, ratio = 0.0;
      for (std::size_t m = 0; m < M; ++m) {
        if (!(c[m] > 0.0) || !std::isfinite(c[m]))
          throw NonFinite("cost: chi at bin " + std::to_string(i) + ", frame " +
                          std::to_string(j) + " is not a positive finite number");
        if (kind == CostKind::kGaussian) {
          acc += p[m] / c[m] + std::log(c[m]);
        } else {
          logs += std::log(c[m]);
          ratio += p[m] / c[m];
        }
      }
      if (kind == CostKind::kGgd) acc += logs + (beta == 2.0 ? ratio : std::pow(ratio, half_beta));
    }
    partial[i] = acc;
  });
  double total = 0.0;
  for (double v : partial) total += v;
  if (!std::isfinite(total)) throw NonFinite("cost: non-finite total");
  return total;
}

}  // namespace

Tensor3 projection_power(const Spectrogram& x, const SeparationState& state) {
  check_shapes(x, state);
  const std::size_t I = x.bins, J = x.frames, M = x.channels;
  Tensor3 out(I, J, M);
  for (std::size_t i = 0; i < I; ++i) {
    const ComplexMatrix& q = state.spatial.q[i];
    for (std::size_t j = 0; j < J; ++j) {
      const auto xv = x.vec(i, j);
      double* o = out.slice(i, j);
      for (std::size_t m = 0; m < M; ++m) {
        cdouble s{};
        for (std::size_t c = 0; c < M; ++c) s += q(m, c) * xv[c];
        o[m] = std::norm(s);
      }
    }
  }
  return out;
}

double sum_log_abs_det(const SeparationState& state) {
  double s = 0.0;
  for (const auto& q : state.spatial.q) s += log_abs_det(q);
  return s;
}

double cost_ggd_jd(const Spectrogram& x, const SeparationState& state) {
  return joint_diag_cost(x, state, CostKind::kGgd);
}

double cost_gaussian_jd(const Spectrogram& x, const SeparationState& state) {
  return joint_diag_cost(x, state, CostKind::kGaussian);
}

namespace {

double fullrank_cost(const Spectrogram& x, const std::vector<ComplexMatrix>& scm,
                     const Tensor3& psd, double beta, bool gaussian) {
  const std::size_t I = x.bins, J = x.frames, M = x.channels, N = psd.d2;
  if (psd.d0 != I || psd.d1 != J || scm.size() != I * N)
    throw DimensionMismatch("full-rank cost: shapes disagree");
  double total = 0.0;
  for (std::size_t i = 0; i < I; ++i)
    for (std::size_t j = 0; j < J; ++j) {
      ComplexMatrix cov(M, M);
      for (std::size_t n = 0; n < N; ++n) {
        const double s = psd(i, j, n);
        const ComplexMatrix& g = scm[i * N + n];
        for (std::size_t e = 0; e < M * M; ++e) cov.data()[e] += s * g.data()[e];
      }
      const LuDecomposition lu(cov);
      const auto y = lu.solve(x.vec(i, j));
      const double quad = inner(x.vec(i, j), y).real();
      total += (gaussian ? quad : std::pow(quad, 0.5 * beta)) + lu.log_abs_det();
    }
  return total;
}

}  // namespace

double cost_ggd_fullrank(const Spectrogram& x, const std::vector<ComplexMatrix>& scm,
                         const Tensor3& psd, double beta) {
  return fullrank_cost(x, scm, psd, beta, false);
}

double cost_gaussian_fullrank(const Spectrogram& x, const std::vector<ComplexMatrix>& scm,
                              const Tensor3& psd) {
  return fullrank_cost(x, scm, psd, 2.0, true);
}

SurrogateAux::SurrogateAux(std::size_t i, std::size_t j, std::size_t m, std::size_t k,
                           std::size_t n)
    : bins(i),
      frames(j),
      channels(m),
      bases(k),
      sources(n),
      xi(i, j, m),
      zeta(i, j, m),
      eta(i * j * m * k * n, 0.0) {}

SurrogateAux equality_aux(const Spectrogram& x, const SeparationState& state) {
  check_shapes(x, state);
  const std::size_t I = state.bins(), J = state.frames(), M = state.channels(),
                    K = state.bases(), N = state.sources();
  const auto& src = state.source;
  const auto& g = state.spatial.g;
  const Tensor3 chi = mixture_gain(state);
  const Tensor3 pw = projection_power(x, state);

  SurrogateAux aux(I, J, M, K, N);
  for (std::size_t i = 0; i < I; ++i)
    for (std::size_t j = 0; j < J; ++j) {
      double total = 0.0;
      for (std::size_t m = 0; m < M; ++m) total += pw(i, j, m) / chi(i, j, m);
      for (std::size_t m = 0; m < M; ++m) {
        const double c = chi(i, j, m);
        if (!(c > 0.0) || !std::isfinite(c)) throw NonFinite("equality_aux: chi underflow");
        aux.xi(i, j, m) = total > 0.0 ? (pw(i, j, m) / c) / total : 1.0 / static_cast<double>(M);
        aux.zeta(i, j, m) = c;
        for (std::size_t k = 0; k < K; ++k)
          for (std::size_t n = 0; n < N; ++n)
            aux.eta_at(i, j, m, k, n) = src.t(i, k) * src.v(k, j) * src.z(k, n) * g(i, n, m) / c;
      }
    }
  return aux;
}

double surrogate_tvzg(const Spectrogram& x, const SeparationState& state, const SurrogateAux& aux) {
  check_shapes(x, state);
  const std::size_t I = state.bins(), J = state.frames(), M = state.channels(),
                    K = state.bases(), N = state.sources();
  if (aux.bins != I || aux.frames != J || aux.channels != M || aux.bases != K || aux.sources != N)
    throw DimensionMismatch("surrogate_tvzg: auxiliary shape does not match the model");
  const double beta = state.hyper.beta;
  const double half_beta = 0.5 * beta;
  const auto& src = state.source;
  const auto& g = state.spatial.g;
  const Tensor3 chi = mixture_gain(state);
  const Tensor3 pw = projection_power(x, state);
  constexpr double kSimplexTol = 1e-9;

  double total = 0.0;
  for (std::size_t i = 0; i < I; ++i) {
    double acc = -2.0 * static_cast<double>(J) * log_abs_det(state.spatial.q[i]);
    for (std::size_t j = 0; j < J; ++j) {
      double xi_sum = 0.0;
      for (std::size_t m = 0; m < M; ++m) {
        const double xi = aux.xi(i, j, m);
        const double zeta = aux.zeta(i, j, m);
        if (!(xi >= 0.0)) throw InvalidAuxiliary("surrogate_tvzg: xi must be nonnegative");
        if (!(zeta > 0.0) || !std::isfinite(zeta))
          throw InvalidAuxiliary("surrogate_tvzg: zeta must be positive");
        xi_sum += xi;

        double eta_sum = 0.0, jensen = 0.0;
        const double p = pw(i, j, m);
        for (std::size_t k = 0; k < K; ++k)
          for (std::size_t n = 0; n < N; ++n) {
            const double eta = aux.eta_at(i, j, m, k, n);
            if (!(eta >= 0.0)) throw InvalidAuxiliary("surrogate_tvzg: eta must be nonnegative");
            eta_sum += eta;
            if (eta > 0.0 && p > 0.0) {
              const double w = src.t(i, k) * src.v(k, j) * src.z(k, n) * g(i, n, m);
              jensen += eta * std::pow(eta * p / w, half_beta);
            }
          }
        if (std::abs(eta_sum - 1.0) > kSimplexTol)
          throw InvalidAuxiliary("surrogate_tvzg: eta does not sum to one over (k, n)");

        if (p > 0.0) {
          if (xi == 0.0) return std::numeric_limits<double>::infinity();
          acc += std::pow(xi, 1.0 - half_beta) * jensen;
        }
        const double c = chi(i, j, m);
        acc += std::log(zeta) + (c - zeta) / zeta;
      }
      if (std::abs(xi_sum - 1.0) > kSimplexTol)
        throw InvalidAuxiliary("surrogate_tvzg: xi does not sum to one over channels");
    }
    total += acc;
  }
  return total;
}

void CostTrace::append(std::size_t iteration, double cost, double ms) {
  if (!records_.empty() && iteration <= records_.back().iteration)
    throw InvalidArgument("cost trace: iteration indices must increase");
  records_.push_back({iteration, cost, ms});
}

bool CostTrace::nonincreasing(double relative_slack) const {
  for (std::size_t k = 1; k < records_.size(); ++k) {
    const double prev = records_[k - 1].cost;
    if (records_[k].cost > prev + relative_slack * std::abs(prev)) return false;
  }
  return true;
}

void CostTrace::write_csv(std::ostream& os, bool with_timing) const {
  os << "iteration,cost,ms\n";
  char buf[96];
  for (const auto& r : records_) {
    std::snprintf(buf, sizeof(buf), "%zu,%.17g,%.3f\n", r.iteration, r.cost,
                  with_timing ? r.ms : 0.0);
    os << buf;
  }
}

void CostTrace::write_csv(const std::filesystem::path& path, bool with_timing) const {
  std::ofstream f(path);
  if (!f) throw IoFailure("cannot write " + path.string());
  write_csv(f, with_timing);
  if (!f) throw IoFailure("write failed for " + path.string());
}

}  // namespace sgmnmf
