// Copyright 2026 The sgmnmf Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

// Synthetic scenes: sub-Gaussian dry sources, exponentially decaying room
// filters and convolutive mixtures with ground-truth source images.

#ifndef SGMNMF_HARNESS_H_
#define SGMNMF_HARNESS_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sgmnmf/signal.h"

namespace sgmnmf {

enum class SourceKind { kUniformIid, kAmTone };

std::string to_string(SourceKind k);
/// Throws ConfigError for anything other than "uniform_iid" / "am_tone".
SourceKind source_kind_from_string(const std::string& s);

/// Mono sub-Gaussian test signal.
///   uniform_iid: i.i.d. uniform on [-1, 1].
///   am_tone: a sinusoid with random frequency and phase whose amplitude
///            1 + 0.5 sin(2 pi f_am t + phase') varies slowly (f_am < 2 Hz).
/// Throws InvalidArgument for zero length.
Waveform gen_subgaussian_source(std::size_t length, SourceKind kind, std::uint64_t seed,
                                double sample_rate = 16000.0);

/// Sample excess kurtosis E[(x - mu)^4] / var^2 - 3.
double excess_kurtosis(std::span<const double> x);

struct RoomSpec {
  std::size_t n_sources = 2;
  std::size_t n_mics = 2;
  double rt60 = 0.3;
  /// direct_delay[n * n_mics + m] in samples. Empty: drawn from the seed
  /// uniformly in [0, 16).
  std::vector<std::size_t> direct_delay;
  std::size_t filter_length = 4800;
  /// Energy ratio of the direct path to the reverberant tail.
  double direct_to_reverberant_db = 0.0;
  double sample_rate = 16000.0;
  std::uint64_t seed = 0;

  void validate() const;
};

/// FIR filters indexed (source n, mic m).
struct RirSet {
  std::size_t n_sources = 0;
  std::size_t n_mics = 0;
  std::size_t length = 0;
  std::vector<double> taps;

  std::span<const double> filter(std::size_t n, std::size_t m) const {
    return {taps.data() + (n * n_mics + m) * length, length};
  }
  std::span<double> filter(std::size_t n, std::size_t m) {
    return {taps.data() + (n * n_mics + m) * length, length};
  }
};

/// Unit direct-path impulse at the pair's delay plus seeded white noise
/// shaped by exp(-3 ln(10) t / rt60), t measured from the direct path. The
/// tail energy is set by direct_to_reverberant_db; rt60 = 0 gives pure delays.
RirSet synth_rir(const RoomSpec& spec);

struct MixtureBundle {
  Waveform mixture;
  /// images[n] has n_mics channels.
  std::vector<Waveform> images;
  /// Dry sources after equal-power scaling.
  std::vector<Waveform> dries;
  RirSet rirs;
};

/// image_{n,m} = dry_n * rir_{n,m}, truncated to the dry length. Dries are
/// scaled so that every image has the same power at the first microphone;
/// mixture = sum_n image_n.
MixtureBundle mix(const std::vector<Waveform>& dries, const RirSet& rirs);

/// Linear convolution truncated to x.size() samples.
std::vector<double> convolve_truncated(std::span<const double> x, std::span<const double> h);

/// Everything `simulate` needs: room plus source description.
struct SceneSpec {
  RoomSpec room;
  std::size_t length = 30720;
  /// One kind per source; a single entry applies to all sources.
  std::vector<SourceKind> kinds{SourceKind::kAmTone};
  std::uint64_t seed = 0;

  /// JSON echo of every field (used for scene.json).
  std::string to_json() const;
  static SceneSpec from_json(const std::string& text);
};

/// Derives a seed from a base seed and a small tuple of indices.
std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> parts);

/// Sources use derive_seed(seed, {1, n}); the room uses room.seed.
MixtureBundle simulate(const SceneSpec& spec);

}  // namespace sgmnmf

#endif  // SGMNMF_HARNESS_H_
