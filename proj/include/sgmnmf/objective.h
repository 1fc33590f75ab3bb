// Copyright 2026 The sgmnmf Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

// Cost functions of joint-diagonalized multichannel NMF, the full-rank
// reference costs, and the majorizer used by the multiplicative updates.
// All costs omit the distribution's normalizing constant.

#ifndef SGMNMF_OBJECTIVE_H_
#define SGMNMF_OBJECTIVE_H_

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <vector>

#include "sgmnmf/model.h"
#include "sgmnmf/signal.h"

namespace sgmnmf {

/// |q_im^H x_ij|^2, shape I x J x M.
Tensor3 projection_power(const Spectrogram& x, const SeparationState& state);

/// Sum over bins of log|det Q_i|.
double sum_log_abs_det(const SeparationState& state);

/// Joint-diagonal generalized Gaussian cost with shape state.hyper.beta:
///   -2J sum_i log|det Q_i| + sum_ijm log chi_ijm
///     + sum_ij (sum_m |q_im^H x_ij|^2 / chi_ijm)^(beta/2).
/// Per-bin partial sums are added in increasing bin order.
double cost_ggd_jd(const Spectrogram& x, const SeparationState& state);

/// Joint-diagonal Gaussian cost:
///   -2J sum_i log|det Q_i| + sum_ijm (|q_im^H x_ij|^2 / chi_ijm + log chi_ijm).
double cost_gaussian_jd(const Spectrogram& x, const SeparationState& state);

/// Full-rank generalized Gaussian cost with X_ij = sum_n psd_ijn G_in:
///   sum_ij (x^H X_ij^-1 x)^(beta/2) + log det X_ij.
/// `scm` is indexed [i * N + n]. Reference implementation for tests.
double cost_ggd_fullrank(const Spectrogram& x, const std::vector<ComplexMatrix>& scm,
                         const Tensor3& psd, double beta);

/// Full-rank Gaussian cost sum_ij x^H X_ij^-1 x + log det X_ij.
double cost_gaussian_fullrank(const Spectrogram& x, const std::vector<ComplexMatrix>& scm,
                              const Tensor3& psd);

/// Auxiliary variables of the t/v/z/g majorizer.
///   xi   (I x J x M): Jensen weights over channels, sum_m xi = 1
///   eta  (I x J x M x K x N): Jensen weights over (k, n), sum_kn eta = 1
///   zeta (I x J x M): tangent points of the log term, > 0
struct SurrogateAux {
  std::size_t bins = 0, frames = 0, channels = 0, bases = 0, sources = 0;
  Tensor3 xi;
  Tensor3 zeta;
  std::vector<double> eta;

  SurrogateAux() = default;
  SurrogateAux(std::size_t i, std::size_t j, std::size_t m, std::size_t k, std::size_t n);

  double& eta_at(std::size_t i, std::size_t j, std::size_t m, std::size_t k, std::size_t n) {
    return eta[(((i * frames + j) * channels + m) * bases + k) * sources + n];
  }
  double eta_at(std::size_t i, std::size_t j, std::size_t m, std::size_t k, std::size_t n) const {
    return eta[(((i * frames + j) * channels + m) * bases + k) * sources + n];
  }
};

/// Closed-form auxiliary values at which the majorizer touches the cost.
/// Bins with an all-zero projection get uniform xi.
SurrogateAux equality_aux(const Spectrogram& x, const SeparationState& state);

/// Majorizer of cost_ggd_jd in (t, v, z, g), including the tangent-line
/// constants of the log term so that surrogate >= cost holds literally.
/// Throws InvalidAuxiliary when the simplex or positivity constraints fail
/// (simplex sums are checked to 1e-9).
double surrogate_tvzg(const Spectrogram& x, const SeparationState& state, const SurrogateAux& aux);

struct CostRecord {
  std::size_t iteration = 0;
  double cost = 0.0;
  double ms = 0.0;
};

/// Per-iteration cost history; iteration indices strictly increase.
class CostTrace {
 public:
  /// Throws InvalidArgument if the iteration index does not increase.
  void append(std::size_t iteration, double cost, double ms);

  const std::vector<CostRecord>& records() const { return records_; }
  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }

  /// True when every step satisfies cost[k] <= cost[k-1] + slack * |cost[k-1]|.
  bool nonincreasing(double relative_slack) const;

  /// CSV with header `iteration,cost,ms`; costs are written with 17
  /// significant digits. When `with_timing` is false the ms column is 0.
  void write_csv(std::ostream& os, bool with_timing = true) const;
  void write_csv(const std::filesystem::path& path, bool with_timing = true) const;

 private:
  std::vector<CostRecord> records_;
};

}  // namespace sgmnmf

#endif  // SGMNMF_OBJECTIVE_H_
