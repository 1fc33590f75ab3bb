// Copyright 2026 The sgmnmf Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "sgmnmf/signal.h"

#include <fftw3.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <numbers>
#include <string>

#include "sgmnmf/error.h"

namespace sgmnmf {

Waveform::Waveform(double rate, std::size_t n_channels, std::size_t length)
    : sample_rate(rate), channels(n_channels, std::vector<double>(length, 0.0)) {}

void Waveform::validate() const {
  if (!(sample_rate > 0.0)) throw InvalidArgument("waveform: sample_rate must be positive");
  for (const auto& ch : channels)
    if (ch.size() != length()) throw ShapeMismatch("waveform: channels differ in length");
}

std::size_t StftConfig::num_frames(std::size_t signal_length) const {
  return (signal_length + pad() + hop - 1) / hop;
}

void StftConfig::validate() const {
  if (window_length < 2) throw InvalidArgument("stft: window_length must be at least 2");
  if (hop == 0 || hop > window_length)
    throw InvalidArgument("stft: hop must satisfy 0 < hop <= window_length");
}

StftConfig StftConfig::from_ms(double window_ms, double hop_ms, double sample_rate) {
  StftConfig cfg;
  cfg.window_length = static_cast<std::size_t>(std::lround(window_ms * 1e-3 * sample_rate));
  cfg.hop = static_cast<std::size_t>(std::lround(hop_ms * 1e-3 * sample_rate));
  cfg.validate();
  return cfg;
}

std::vector<double> hamming_window(std::size_t length) {
  std::vector<double> w(length);
  for (std::size_t n = 0; n < length; ++n)
    w[n] = 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * static_cast<double>(n) /
                                  static_cast<double>(length));
  return w;
}

namespace {

// FFTW plans are created and destroyed on the calling thread only.
class RealFft {
 public:
  explicit RealFft(std::size_t n)
      : n_(n),
        time_(fftw_alloc_real(n)),
        freq_(fftw_alloc_complex(n / 2 + 1)),
        forward_(fftw_plan_dft_r2c_1d(static_cast<int>(n), time_, freq_, FFTW_ESTIMATE)),
        backward_(fftw_plan_dft_c2r_1d(static_cast<int>(n), freq_, time_, FFTW_ESTIMATE)) {}
  ~RealFft() {
    fftw_destroy_plan(forward_);
    fftw_destroy_plan(backward_);
    fftw_free(time_);
    fftw_free(freq_);
  }
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  double* time() { return time_; }
  cdouble* freq() { return reinterpret_cast<cdouble*>(freq_); }
  void forward() { fftw_execute(forward_); }
  /// Unnormalized inverse; scales by n.
  void backward() { fftw_execute(backward_); }
  std::size_t size() const { return n_; }

 private:
  std::size_t n_;
  double* time_;
  fftw_complex* freq_;
  fftw_plan forward_;
  fftw_plan backward_;
};

}  // namespace

Spectrogram stft(const Waveform& w, const StftConfig& cfg) {
  cfg.validate();
  w.validate();
  const std::size_t len = w.length();
  if (w.num_channels() == 0 || len == 0) throw EmptyInput("stft: empty waveform");

  const std::size_t win = cfg.window_length;
  const std::size_t frames = cfg.num_frames(len);
  const std::size_t bins = cfg.num_bins();
  const auto window = hamming_window(win);
  const auto pad = static_cast<std::ptrdiff_t>(cfg.pad());

  Spectrogram out(bins, frames, w.num_channels());
  RealFft fft(win);
  for (std::size_t m = 0; m < w.num_channels(); ++m) {
    const auto& x = w.channels[m];
    for (std::size_t j = 0; j < frames; ++j) {
      const std::ptrdiff_t start = static_cast<std::ptrdiff_t>(j * cfg.hop) - pad;
      for (std::size_t n = 0; n < win; ++n) {
        const std::ptrdiff_t t = start + static_cast<std::ptrdiff_t>(n);
        fft.time()[n] = (t >= 0 && t < static_cast<std::ptrdiff_t>(len))
                            ? x[static_cast<std::size_t>(t)] * window[n]
                            : 0.0;
      }
      fft.forward();
      for (std::size_t i = 0; i < bins; ++i) out(i, j, m) = fft.freq()[i];
    }
  }
  return out;
}

Waveform istft(const Spectrogram& s, const StftConfig& cfg, std::size_t length,
               double sample_rate) {
  cfg.validate();
  if (s.bins != cfg.num_bins())
    throw ShapeMismatch("istft: spectrogram has " + std::to_string(s.bins) +
                        " bins, config expects " + std::to_string(cfg.num_bins()));
  if (s.frames != cfg.num_frames(length))
    throw ShapeMismatch("istft: frame count does not match requested length");

  const std::size_t win = cfg.window_length;
  const auto window = hamming_window(win);
  const auto pad = static_cast<std::ptrdiff_t>(cfg.pad());
  const auto len = static_cast<std::ptrdiff_t>(length);

  std::vector<double> norm(length, 0.0);
  for (std::size_t j = 0; j < s.frames; ++j) {
    const std::ptrdiff_t start = static_cast<std::ptrdiff_t>(j * cfg.hop) - pad;
    for (std::size_t n = 0; n < win; ++n) {
      const std::ptrdiff_t t = start + static_cast<std::ptrdiff_t>(n);
      if (t >= 0 && t < len) norm[static_cast<std::size_t>(t)] += window[n] * window[n];
    }
  }

  Waveform out(sample_rate, s.channels, length);
  RealFft fft(win);
  const double scale = 1.0 / static_cast<double>(win);
  for (std::size_t m = 0; m < s.channels; ++m) {
    auto& y = out.channels[m];
    for (std::size_t j = 0; j < s.frames; ++j) {
      for (std::size_t i = 0; i < s.bins; ++i) fft.freq()[i] = s(i, j, m);
      fft.backward();
      const std::ptrdiff_t start = static_cast<std::ptrdiff_t>(j * cfg.hop) - pad;
      for (std::size_t n = 0; n < win; ++n) {
        const std::ptrdiff_t t = start + static_cast<std::ptrdiff_t>(n);
        if (t >= 0 && t < len) y[static_cast<std::size_t>(t)] += fft.time()[n] * scale * window[n];
      }
    }
    for (std::size_t t = 0; t < length; ++t)
      if (norm[t] > 0.0) y[t] /= norm[t];
  }
  return out;
}

// ---------------------------------------------------------------------------
// RIFF/WAVE

namespace {

static_assert(std::endian::native == std::endian::little,
              "WAV I/O assumes a little-endian host");

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

template <class T>
T load(const std::vector<char>& buf, std::size_t pos) {
  T v;
  std::memcpy(&v, buf.data() + pos, sizeof(T));
  return v;
}

template <class T>
void store(std::string& out, T v) {
  char bytes[sizeof(T)];
  std::memcpy(bytes, &v, sizeof(T));
  out.append(bytes, sizeof(T));
}

}  // namespace

Waveform read_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoFailure("cannot open " + path.string());
  std::vector<char> buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const std::string where = path.string() + ": ";

  if (buf.size() < 12 || std::memcmp(buf.data(), "RIFF", 4) != 0 ||
      std::memcmp(buf.data() + 8, "WAVE", 4) != 0)
    throw CorruptHeader(where + "missing RIFF/WAVE header");

  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  bool have_fmt = false;
  std::size_t data_pos = 0, data_size = 0;
  bool have_data = false;

  std::size_t pos = 12;
  while (pos + 8 <= buf.size()) {
    const std::string id(buf.data() + pos, 4);
    const auto size = load<std::uint32_t>(buf, pos + 4);
    const std::size_t body = pos + 8;
    if (id == "fmt ") {
      if (size < 16 || body + size > buf.size()) throw CorruptHeader(where + "truncated fmt chunk");
      format = load<std::uint16_t>(buf, body);
      channels = load<std::uint16_t>(buf, body + 2);
      rate = load<std::uint32_t>(buf, body + 4);
      bits = load<std::uint16_t>(buf, body + 14);
      if (format == kFormatExtensible) {
        if (size < 40) throw CorruptHeader(where + "truncated extensible fmt chunk");
        format = load<std::uint16_t>(buf, body + 24);
      }
      have_fmt = true;
    } else if (id == "data") {
      data_pos = body;
      data_size = std::min<std::size_t>(size, buf.size() - body);
      if (data_size < size) throw CorruptHeader(where + "data chunk truncated");
      have_data = true;
      break;
    }
    pos = body + size + (size & 1u);
  }
  if (!have_fmt || !have_data) throw CorruptHeader(where + "missing fmt or data chunk");
  if (channels == 0 || rate == 0) throw CorruptHeader(where + "zero channels or sample rate");

  const bool pcm16 = format == kFormatPcm && bits == 16;
  const bool f32 = format == kFormatFloat && bits == 32;
  if (!pcm16 && !f32)
    throw UnsupportedFormat(where + "format " + std::to_string(format) + " with " +
                            std::to_string(bits) + " bits is not PCM16 or float32");

  const std::size_t bytes = bits / 8;
  const std::size_t frames = data_size / (bytes * channels);
  Waveform w(static_cast<double>(rate), channels, frames);
  for (std::size_t n = 0; n < frames; ++n)
    for (std::size_t m = 0; m < channels; ++m) {
      const std::size_t at = data_pos + (n * channels + m) * bytes;
      w.channels[m][n] = pcm16 ? load<std::int16_t>(buf, at) / 32768.0
                               : static_cast<double>(load<float>(buf, at));
    }
  return w;
}

void write_wav(const std::filesystem::path& path, const Waveform& w) {
  w.validate();
  const auto channels = static_cast<std::uint16_t>(w.num_channels());
  const auto rate = static_cast<std::uint32_t>(std::lround(w.sample_rate));
  const std::uint32_t data_size =
      static_cast<std::uint32_t>(w.length() * w.num_channels() * sizeof(float));

  std::string out;
  out.reserve(44 + data_size);
  out += "RIFF";
  store<std::uint32_t>(out, 36 + data_size);
  out += "WAVE";
  out += "fmt ";
  store<std::uint32_t>(out, 16);
  store<std::uint16_t>(out, kFormatFloat);
  store<std::uint16_t>(out, channels);
  store<std::uint32_t>(out, rate);
  store<std::uint32_t>(out, rate * channels * 4);
  store<std::uint16_t>(out, static_cast<std::uint16_t>(channels * 4));
  store<std::uint16_t>(out, 32);
  out += "data";
  store<std::uint32_t>(out, data_size);
  for (std::size_t n = 0; n < w.length(); ++n)
    for (std::size_t m = 0; m < w.num_channels(); ++m)
      store<float>(out, static_cast<float>(w.channels[m][n]));

  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoFailure("cannot write " + path.string());
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw IoFailure("write failed for " + path.string());
}

}  // namespace sgmnmf
