// Copyright 2026 The sgmnmf Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "sgmnmf/eval.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <json.hpp>

#include "sgmnmf/error.h"

namespace sgmnmf {

double si_sdr(std::span<const double> estimate, std::span<const double> reference) {
  if (estimate.size() != reference.size())
    throw DimensionMismatch("si_sdr: estimate and reference lengths differ");
  double ref_energy = 0.0, cross = 0.0;
  for (std::size_t n = 0; n < reference.size(); ++n) {
    ref_energy += reference[n] * reference[n];
    cross += estimate[n] * reference[n];
  }
  if (!(ref_energy > 0.0)) throw ZeroReference("si_sdr: reference is all zero");
  const double alpha = cross / ref_energy;
  double target = 0.0, residual = 0.0;
  for (std::size_t n = 0; n < reference.size(); ++n) {
    const double t = alpha * reference[n];
    const double e = t - estimate[n];
    target += t * t;
    residual += e * e;
  }
  if (target <= residual * 1e-10) return -kSdrCapDb;
  if (residual <= target * 1e-10) return kSdrCapDb;
  return 10.0 * std::log10(target / residual);
}

MetricsReport sdr_improvement(const std::vector<Waveform>& estimates,
                              const std::vector<Waveform>& references, const Waveform& mixture,
                              std::size_t ref_channel) {
  const std::size_t n = references.size();
  if (estimates.size() != n)
    throw DimensionMismatch("sdr_improvement: " + std::to_string(estimates.size()) +
                            " estimates for " + std::to_string(n) + " references");
  if (n == 0) throw DimensionMismatch("sdr_improvement: no sources");
  if (n > kMaxPermutationSources)
    throw TooManySources("sdr_improvement: permutation search supports at most 6 sources");
  auto channel = [&](const Waveform& w, const char* what) -> const std::vector<double>& {
    if (ref_channel >= w.num_channels())
      throw DimensionMismatch(std::string("sdr_improvement: ") + what + " lacks channel " +
                              std::to_string(ref_channel + 1));
    return w.channels[ref_channel];
  };

  // sdr[e * n + r]: estimate e scored against reference r.
  std::vector<double> sdr(n * n);
  for (std::size_t e = 0; e < n; ++e)
    for (std::size_t r = 0; r < n; ++r)
      sdr[e * n + r] = si_sdr(channel(estimates[e], "estimate"), channel(references[r], "reference"));

  std::vector<std::size_t> perm(n), best;
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  double best_score = -std::numeric_limits<double>::infinity();
  do {
    double score = 0.0;
    for (std::size_t r = 0; r < n; ++r) score += sdr[perm[r] * n + r];
    if (score > best_score) {
      best_score = score;
      best = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));

  MetricsReport report;
  report.permutation = best;
  const auto& mix = channel(mixture, "mixture");
  for (std::size_t r = 0; r < n; ++r) {
    const double est = sdr[best[r] * n + r];
    const double base = si_sdr(mix, channel(references[r], "reference"));
    report.per_source.push_back(est);
    report.improvement.push_back(est - base);
  }
  report.mean_improvement =
      std::accumulate(report.improvement.begin(), report.improvement.end(), 0.0) /
      static_cast<double>(n);
  return report;
}

std::string MetricsReport::to_json() const {
  std::vector<std::size_t> one_based;
  for (auto p : permutation) one_based.push_back(p + 1);
  nlohmann::json doc{{"metric", metric},
                     {"per_source", per_source},
                     {"improvement", improvement},
                     {"permutation", one_based},
                     {"mean_improvement", mean_improvement}};
  return doc.dump(2);
}

}  // namespace sgmnmf
