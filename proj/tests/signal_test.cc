// Copyright 2026 The sgmnmf Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <string>

#include "sgmnmf/error.h"
#include "sgmnmf/signal.h"

using namespace sgmnmf;

namespace {

Waveform white_noise(std::size_t channels, std::size_t length, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  Waveform w(16000.0, channels, length);
  for (auto& ch : w.channels)
    for (auto& v : ch) v = uni(rng);
  return w;
}

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("sgmnmf_signal_" + name);
}

void write_bytes(const std::filesystem::path& p, const std::string& bytes) {
  std::ofstream f(p, std::ios::binary);
  f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

template <class T>
void put(std::string& s, T v) {
  char b[sizeof(T)];
  std::memcpy(b, &v, sizeof(T));
  s.append(b, sizeof(T));
}

std::string wav_header(std::uint16_t format, std::uint16_t channels, std::uint16_t bits,
                       std::uint32_t data_bytes) {
  std::string s = "RIFF";
  put<std::uint32_t>(s, 36 + data_bytes);
  s += "WAVEfmt ";
  put<std::uint32_t>(s, 16);
  put<std::uint16_t>(s, format);
  put<std::uint16_t>(s, channels);
  put<std::uint32_t>(s, 16000);
  put<std::uint32_t>(s, 16000u * channels * bits / 8);
  put<std::uint16_t>(s, static_cast<std::uint16_t>(channels * bits / 8));
  put<std::uint16_t>(s, bits);
  s += "data";
  put<std::uint32_t>(s, data_bytes);
  return s;
}

}  // namespace

TEST_CASE("stft: bin count and frame layout") {
  const StftConfig cfg;  // 1024 / 256
  CHECK(cfg.num_bins() == 513);
  const Waveform w = white_noise(2, 16000, 1);
  const Spectrogram s = stft(w, cfg);
  CHECK(s.bins == 513);
  CHECK(s.channels == 2);
  CHECK(s.frames * cfg.hop >= w.length() + cfg.pad());
  CHECK(s.frames == cfg.num_frames(16000));

  const StftConfig from_ms = StftConfig::from_ms(64.0, 16.0, 16000.0);
  CHECK(from_ms.window_length == 1024);
  CHECK(from_ms.hop == 256);
}

TEST_CASE("stft: all-zero input gives an all-zero spectrogram") {
  const Waveform w(16000.0, 2, 4096);
  for (const auto& v : stft(w, StftConfig{}).data) CHECK(v == cdouble{});
}

TEST_CASE("stft: matches a direct DFT and concentrates a bin-centred sinusoid") {
  const StftConfig cfg;
  const std::size_t bin = 40;
  const std::size_t len = 8192;
  Waveform w(16000.0, 1, len);
  for (std::size_t n = 0; n < len; ++n)
    w.channels[0][n] = std::cos(2.0 * std::numbers::pi * bin * n / cfg.window_length + 0.3);
  const Spectrogram s = stft(w, cfg);
  const auto window = hamming_window(cfg.window_length);

  for (std::size_t j = 4; j + 4 < s.frames; ++j) {
    // Direct DFT of the windowed frame at a few bins.
    const std::ptrdiff_t start = static_cast<std::ptrdiff_t>(j * cfg.hop - cfg.pad());
    for (std::size_t i : {std::size_t{0}, bin - 1, bin, bin + 1, std::size_t{300}}) {
      cdouble acc{};
      for (std::size_t n = 0; n < cfg.window_length; ++n)
        acc += w.channels[0][static_cast<std::size_t>(start) + n] * window[n] *
               std::polar(1.0, -2.0 * std::numbers::pi * double(i * n) / cfg.window_length);
      CHECK(std::abs(acc - s(i, j, 0)) <= 1e-9 * (1.0 + std::abs(acc)));
    }
    double total = 0.0, near = 0.0;
    for (std::size_t i = 0; i < s.bins; ++i) {
      const double e = std::norm(s(i, j, 0));
      total += e;
      if (i + 1 >= bin && i <= bin + 1) near += e;
    }
    CHECK(near >= 0.9 * total);
  }
}

TEST_CASE("istft: perfect reconstruction of noise and a tone") {
  const StftConfig cfg;
  const Waveform noise = white_noise(2, 16000, 7);
  const Waveform back = istft(stft(noise, cfg), cfg, noise.length());
  double max_err = 0.0, e_in = 0.0, e_out = 0.0;
  for (std::size_t m = 0; m < 2; ++m)
    for (std::size_t n = 0; n < noise.length(); ++n) {
      max_err = std::max(max_err, std::abs(back.channels[m][n] - noise.channels[m][n]));
      e_in += noise.channels[m][n] * noise.channels[m][n];
      e_out += back.channels[m][n] * back.channels[m][n];
    }
  CHECK(max_err <= 1e-6);
  CHECK(std::abs(e_out - e_in) <= 1e-9 * e_in);

  Waveform tone(16000.0, 1, 16000);
  for (std::size_t n = 0; n < tone.length(); ++n)
    tone.channels[0][n] = std::sin(2.0 * std::numbers::pi * 440.0 * n / 16000.0);
  const Waveform tone_back = istft(stft(tone, cfg), cfg, tone.length());
  double num = 0.0, den = 0.0;
  for (std::size_t n = cfg.window_length; n + cfg.window_length < tone.length(); ++n) {
    const double d = tone_back.channels[0][n] - tone.channels[0][n];
    num += d * d;
    den += tone.channels[0][n] * tone.channels[0][n];
  }
  CHECK(std::sqrt(num / den) <= 1e-6);
}

TEST_CASE("istft: odd hop still reconstructs") {
  StftConfig cfg;
  cfg.window_length = 512;
  cfg.hop = 100;
  const Waveform w = white_noise(1, 3000, 9);
  const Waveform back = istft(stft(w, cfg), cfg, w.length());
  for (std::size_t n = 0; n < w.length(); ++n)
    CHECK(std::abs(back.channels[0][n] - w.channels[0][n]) <= 1e-9);
}

TEST_CASE("istft: zero spectrogram and shape errors") {
  const StftConfig cfg;
  const Spectrogram zero(cfg.num_bins(), cfg.num_frames(5000), 2);
  for (const auto& ch : istft(zero, cfg, 5000).channels)
    for (double v : ch) CHECK(v == 0.0);
  CHECK_THROWS_AS(istft(zero, cfg, 9000), ShapeMismatch);
  const Spectrogram wrong_bins(100, cfg.num_frames(5000), 2);
  CHECK_THROWS_AS(istft(wrong_bins, cfg, 5000), ShapeMismatch);
}

TEST_CASE("stft: linearity and error paths") {
  const StftConfig cfg;
  const Waveform a = white_noise(2, 5000, 21), b = white_noise(2, 5000, 22);
  Waveform combo(16000.0, 2, 5000);
  for (std::size_t m = 0; m < 2; ++m)
    for (std::size_t n = 0; n < 5000; ++n)
      combo.channels[m][n] = 0.7 * a.channels[m][n] - 1.3 * b.channels[m][n];
  const Spectrogram sa = stft(a, cfg), sb = stft(b, cfg), sc = stft(combo, cfg);
  for (std::size_t k = 0; k < sc.data.size(); ++k)
    CHECK(std::abs(sc.data[k] - (0.7 * sa.data[k] - 1.3 * sb.data[k])) <= 1e-10);

  CHECK_THROWS_AS(stft(Waveform(16000.0, 2, 0), cfg), EmptyInput);
  StftConfig bad;
  bad.hop = 2000;
  CHECK_THROWS_AS(stft(a, bad), InvalidArgument);
  Waveform ragged = a;
  ragged.channels[1].pop_back();
  CHECK_THROWS_AS(stft(ragged, cfg), ShapeMismatch);
}

TEST_CASE("wav: float32 round trip is bit-identical") {
  Waveform w = white_noise(2, 1234, 4);
  for (auto& ch : w.channels)
    for (auto& v : ch) v = static_cast<double>(static_cast<float>(v));
  const auto path = temp_path("roundtrip.wav");
  write_wav(path, w);
  const Waveform r = read_wav(path);
  CHECK(r.sample_rate == 16000.0);
  REQUIRE(r.num_channels() == 2);
  REQUIRE(r.length() == 1234);
  for (std::size_t m = 0; m < 2; ++m)
    CHECK(std::memcmp(r.channels[m].data(), w.channels[m].data(), 1234 * sizeof(double)) == 0);
  std::filesystem::remove(path);
}

TEST_CASE("wav: PCM16 scaling") {
  std::string bytes = wav_header(1, 1, 16, 6);
  put<std::int16_t>(bytes, -32768);
  put<std::int16_t>(bytes, 0);
  put<std::int16_t>(bytes, 16384);
  const auto path = temp_path("pcm16.wav");
  write_bytes(path, bytes);
  const Waveform w = read_wav(path);
  REQUIRE(w.length() == 3);
  CHECK(w.channels[0][0] == -1.0);
  CHECK(w.channels[0][1] == 0.0);
  CHECK(w.channels[0][2] == 0.5);
  std::filesystem::remove(path);
}

TEST_CASE("wav: error paths") {
  const auto path = temp_path("bad.wav");
  write_bytes(path, "RIFF\x10\0\0\0WAV");
  CHECK_THROWS_AS(read_wav(path), CorruptHeader);

  write_bytes(path, wav_header(1, 1, 16, 6).substr(0, 30));
  CHECK_THROWS_AS(read_wav(path), CorruptHeader);

  std::string pcm24 = wav_header(1, 1, 24, 3);
  pcm24 += std::string(3, '\0');
  write_bytes(path, pcm24);
  CHECK_THROWS_AS(read_wav(path), UnsupportedFormat);

  std::string short_data = wav_header(3, 1, 32, 400);
  short_data += std::string(8, '\0');
  write_bytes(path, short_data);
  CHECK_THROWS_AS(read_wav(path), CorruptHeader);

  std::filesystem::remove(path);
  CHECK_THROWS_AS(read_wav(temp_path("does_not_exist.wav")), IoFailure);
}
