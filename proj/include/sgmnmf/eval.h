// Copyright 2026 The sgmnmf Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

// Scale-invariant SDR scoring with best-permutation alignment.

#ifndef SGMNMF_EVAL_H_
#define SGMNMF_EVAL_H_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "sgmnmf/signal.h"

namespace sgmnmf {

inline constexpr double kSdrCapDb = 100.0;
inline constexpr std::size_t kMaxPermutationSources = 6;

/// 10 log10(|a s|^2 / |a s - est|^2) with a = <est, s> / |s|^2, clamped to
/// [-100, 100] dB. Throws ZeroReference for an all-zero reference and
/// DimensionMismatch for unequal lengths.
double si_sdr(std::span<const double> estimate, std::span<const double> reference);

struct MetricsReport {
  std::string metric = "si_sdr";
  /// Indexed by reference; SDR of the estimate assigned to that reference.
  std::vector<double> per_source;
  std::vector<double> improvement;
  /// permutation[n] is the (0-based) estimate assigned to reference n.
  std::vector<std::size_t> permutation;
  double mean_improvement = 0.0;

  /// {metric, per_source, improvement, permutation (1-based), mean_improvement}
  std::string to_json() const;
};

/// Scores every estimate/reference pairing at `ref_channel`, picks the
/// permutation with the largest mean SDR (exhaustive, N <= 6) and reports
/// the improvement over scoring the mixture against the same reference.
MetricsReport sdr_improvement(const std::vector<Waveform>& estimates,
                              const std::vector<Waveform>& references, const Waveform& mixture,
                              std::size_t ref_channel = 0);

}  // namespace sgmnmf

#endif  // SGMNMF_EVAL_H_
