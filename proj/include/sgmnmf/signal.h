// Copyright 2026 The sgmnmf Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

// Multichannel waveforms, STFT analysis/synthesis and RIFF/WAVE I/O.

#ifndef SGMNMF_SIGNAL_H_
#define SGMNMF_SIGNAL_H_

#include <complex>
#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

namespace sgmnmf {

using cdouble = std::complex<double>;

struct Waveform {
  double sample_rate = 16000.0;
  /// channels[m][n]; every channel has the same length.
  std::vector<std::vector<double>> channels;

  Waveform() = default;
  Waveform(double rate, std::size_t n_channels, std::size_t length);

  std::size_t num_channels() const { return channels.size(); }
  std::size_t length() const { return channels.empty() ? 0 : channels.front().size(); }

  /// Throws ShapeMismatch on ragged channels, InvalidArgument on rate <= 0.
  void validate() const;
};

/// Complex STFT tensor indexed (bin i, frame j, channel m), channel fastest.
struct Spectrogram {
  std::size_t bins = 0;
  std::size_t frames = 0;
  std::size_t channels = 0;
  std::vector<cdouble> data;

  Spectrogram() = default;
  Spectrogram(std::size_t i, std::size_t j, std::size_t m)
      : bins(i), frames(j), channels(m), data(i * j * m) {}

  cdouble& operator()(std::size_t i, std::size_t j, std::size_t m) {
    return data[(i * frames + j) * channels + m];
  }
  const cdouble& operator()(std::size_t i, std::size_t j, std::size_t m) const {
    return data[(i * frames + j) * channels + m];
  }

  /// The M-vector x_ij.
  std::span<const cdouble> vec(std::size_t i, std::size_t j) const {
    return {data.data() + (i * frames + j) * channels, channels};
  }
  std::span<cdouble> vec(std::size_t i, std::size_t j) {
    return {data.data() + (i * frames + j) * channels, channels};
  }
};

enum class WindowKind { kHamming };

struct StftConfig {
  std::size_t window_length = 1024;
  std::size_t hop = 256;
  WindowKind window = WindowKind::kHamming;

  std::size_t fft_length() const { return window_length; }
  std::size_t num_bins() const { return window_length / 2 + 1; }
  /// Leading zero padding so that the first sample sees full overlap.
  std::size_t pad() const { return window_length - hop; }
  std::size_t num_frames(std::size_t signal_length) const;

  void validate() const;

  /// Builds the config from durations in milliseconds at the given rate.
  static StftConfig from_ms(double window_ms, double hop_ms, double sample_rate);
};

/// Periodic Hamming window of the given length.
std::vector<double> hamming_window(std::size_t length);

/// One-sided STFT. Frame j starts at sample j * hop - pad(); samples outside
/// the signal are zero.
Spectrogram stft(const Waveform& w, const StftConfig& cfg);

/// Weighted overlap-add with the canonical dual window. Returns `length`
/// samples per channel.
Waveform istft(const Spectrogram& s, const StftConfig& cfg, std::size_t length,
               double sample_rate = 16000.0);

/// Reads PCM16 or IEEE float32 RIFF/WAVE.
Waveform read_wav(const std::filesystem::path& path);
/// Writes IEEE float32 RIFF/WAVE.
void write_wav(const std::filesystem::path& path, const Waveform& w);

}  // namespace sgmnmf

#endif  // SGMNMF_SIGNAL_H_
