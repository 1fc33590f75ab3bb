// Copyright 2026 The sgmnmf Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef SGMNMF_SEPARATE_H_
#define SGMNMF_SEPARATE_H_

#include <cstddef>
#include <filesystem>
#include <vector>

#include "sgmnmf/model.h"
#include "sgmnmf/signal.h"

namespace sgmnmf {

/// Per-source multichannel source-image estimates; the images sum to the
/// observation in every time-frequency bin.
struct SeparatedSources {
  std::vector<Spectrogram> images;

  std::size_t size() const { return images.size(); }
};

/// Multichannel Wiener filter evaluated in the diagonal domain:
///   s_ijn = Q_i^-1 D_ijn Q_i x_ij,  D_ijn = diag_m(psd_ijn g_inm / chi_ijm).
SeparatedSources wiener_separate(const SeparationState& state, const Spectrogram& x);

/// Inverse STFT of every image.
std::vector<Waveform> to_waveforms(const SeparatedSources& sources, const StftConfig& cfg,
                                   std::size_t length, double sample_rate);

/// Writes source_{n}.wav (1-based) into `dir`.
void write_sources(const std::filesystem::path& dir, const std::vector<Waveform>& sources);

}  // namespace sgmnmf

#endif  // SGMNMF_SEPARATE_H_
