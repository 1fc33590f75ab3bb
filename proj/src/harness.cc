// Copyright 2026 The sgmnmf Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "sgmnmf/harness.h"

#include <cmath>
#include <numbers>
#include <random>
#include <set>

#include <json.hpp>

#include "sgmnmf/error.h"

namespace sgmnmf {

std::string to_string(SourceKind k) {
  return k == SourceKind::kUniformIid ? "uniform_iid" : "am_tone";
}

SourceKind source_kind_from_string(const std::string& s) {
  if (s == "uniform_iid") return SourceKind::kUniformIid;
  if (s == "am_tone") return SourceKind::kAmTone;
  throw ConfigError("kinds: expected \"uniform_iid\" or \"am_tone\", got \"" + s + "\"");
}

std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> parts) {
  std::vector<std::uint32_t> words{static_cast<std::uint32_t>(base),
                                   static_cast<std::uint32_t>(base >> 32)};
  for (auto p : parts) {
    words.push_back(static_cast<std::uint32_t>(p));
    words.push_back(static_cast<std::uint32_t>(p >> 32));
  }
  std::seed_seq seq(words.begin(), words.end());
  std::uint32_t out[2];
  seq.generate(out, out + 2);
  return (static_cast<std::uint64_t>(out[1]) << 32) | out[0];
}

Waveform gen_subgaussian_source(std::size_t length, SourceKind kind, std::uint64_t seed,
                                double sample_rate) {
  if (length == 0) throw InvalidArgument("gen_subgaussian_source: length must be positive");
  std::mt19937_64 rng(seed);
  Waveform w(sample_rate, 1, length);
  auto& x = w.channels[0];
  if (kind == SourceKind::kUniformIid) {
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    for (auto& v : x) v = uni(rng);
    return w;
  }
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  std::uniform_real_distribution<double> carrier(200.0, 3000.0);
  std::uniform_real_distribution<double> am_rate(0.5, 2.0);
  const double f = carrier(rng), ph = phase(rng), f_am = am_rate(rng), ph_am = phase(rng);
  const double w0 = 2.0 * std::numbers::pi * f / sample_rate;
  const double w_am = 2.0 * std::numbers::pi * f_am / sample_rate;
  for (std::size_t n = 0; n < length; ++n) {
    const double t = static_cast<double>(n);
    x[n] = (1.0 + 0.5 * std::sin(w_am * t + ph_am)) * std::sin(w0 * t + ph);
  }
  return w;
}

double excess_kurtosis(std::span<const double> x) {
  if (x.empty()) throw InvalidArgument("excess_kurtosis: empty input");
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(x.size());
  double m2 = 0.0, m4 = 0.0;
  for (double v : x) {
    const double d = (v - mean) * (v - mean);
    m2 += d;
    m4 += d * d;
  }
  m2 /= static_cast<double>(x.size());
  m4 /= static_cast<double>(x.size());
  if (!(m2 > 0.0)) throw InvalidArgument("excess_kurtosis: zero variance");
  return m4 / (m2 * m2) - 3.0;
}

void RoomSpec::validate() const {
  if (n_sources == 0 || n_mics == 0) throw ConfigError("room: n_sources and n_mics must be positive");
  if (!(rt60 >= 0.0)) throw ConfigError("rt60: must be nonnegative");
  if (filter_length < 1) throw ConfigError("filter_length: must be at least 1");
  if (!(sample_rate > 0.0)) throw ConfigError("sample_rate: must be positive");
  if (!direct_delay.empty()) {
    if (direct_delay.size() != n_sources * n_mics)
      throw ConfigError("direct_delay: expected n_sources * n_mics entries");
    for (auto d : direct_delay)
      if (d >= filter_length) throw ConfigError("direct_delay: delay must be below filter_length");
  }
}

RirSet synth_rir(const RoomSpec& spec) {
  spec.validate();
  RirSet set;
  set.n_sources = spec.n_sources;
  set.n_mics = spec.n_mics;
  set.length = spec.filter_length;
  set.taps.assign(spec.n_sources * spec.n_mics * spec.filter_length, 0.0);

  std::vector<std::size_t> delays = spec.direct_delay;
  if (delays.empty()) {
    std::mt19937_64 rng(derive_seed(spec.seed, {0}));
    const std::size_t max_delay = std::min<std::size_t>(16, spec.filter_length);
    std::uniform_int_distribution<std::size_t> pick(0, max_delay - 1);
    for (std::size_t k = 0; k < spec.n_sources * spec.n_mics; ++k) delays.push_back(pick(rng));
  }

  const double tail_energy = std::pow(10.0, -spec.direct_to_reverberant_db / 10.0);
  const double decay = 3.0 * std::numbers::ln10 / (spec.rt60 * spec.sample_rate);
  for (std::size_t n = 0; n < spec.n_sources; ++n)
    for (std::size_t m = 0; m < spec.n_mics; ++m) {
      auto h = set.filter(n, m);
      const std::size_t d = delays[n * spec.n_mics + m];
      h[d] = 1.0;
      if (spec.rt60 == 0.0 || d + 1 >= h.size()) continue;
      std::mt19937_64 rng(derive_seed(spec.seed, {1, n, m}));
      std::normal_distribution<double> noise(0.0, 1.0);
      double energy = 0.0;
      for (std::size_t t = d + 1; t < h.size(); ++t) {
        h[t] = noise(rng) * std::exp(-decay * static_cast<double>(t - d));
        energy += h[t] * h[t];
      }
      if (energy > 0.0) {
        const double gain = std::sqrt(tail_energy / energy);
        for (std::size_t t = d + 1; t < h.size(); ++t) h[t] *= gain;
      }
    }
  return set;
}

std::vector<double> convolve_truncated(std::span<const double> x, std::span<const double> h) {
  std::vector<double> y(x.size(), 0.0);
  for (std::size_t tau = 0; tau < h.size() && tau < x.size(); ++tau) {
    const double c = h[tau];
    if (c == 0.0) continue;
    double* out = y.data() + tau;
    const std::size_t count = x.size() - tau;
    for (std::size_t t = 0; t < count; ++t) out[t] += c * x[t];
  }
  return y;
}

MixtureBundle mix(const std::vector<Waveform>& dries, const RirSet& rirs) {
  if (dries.size() != rirs.n_sources)
    throw DimensionMismatch("mix: " + std::to_string(dries.size()) + " dry sources for " +
                            std::to_string(rirs.n_sources) + " filter sets");
  if (dries.empty()) throw DimensionMismatch("mix: no sources");
  const std::size_t len = dries.front().length();
  const double rate = dries.front().sample_rate;
  for (const auto& d : dries) {
    d.validate();
    if (d.num_channels() != 1 || d.length() != len)
      throw DimensionMismatch("mix: dry sources must be mono and of equal length");
  }

  MixtureBundle out;
  out.rirs = rirs;
  std::vector<double> power;
  for (std::size_t n = 0; n < dries.size(); ++n) {
    Waveform img(rate, rirs.n_mics, len);
    for (std::size_t m = 0; m < rirs.n_mics; ++m)
      img.channels[m] = convolve_truncated(dries[n].channels[0], rirs.filter(n, m));
    double p = 0.0;
    for (double v : img.channels[0]) p += v * v;
    power.push_back(p / static_cast<double>(len));
    out.images.push_back(std::move(img));
  }
  const double target = power.front();
  if (!(target > 0.0)) throw InvalidArgument("mix: first source image is silent");
  for (std::size_t n = 0; n < dries.size(); ++n) {
    if (!(power[n] > 0.0)) throw InvalidArgument("mix: source image is silent");
    const double gain = std::sqrt(target / power[n]);
    Waveform dry = dries[n];
    for (auto& v : dry.channels[0]) v *= gain;
    for (auto& ch : out.images[n].channels)
      for (auto& v : ch) v *= gain;
    out.dries.push_back(std::move(dry));
  }
  out.mixture = Waveform(rate, rirs.n_mics, len);
  for (std::size_t m = 0; m < rirs.n_mics; ++m)
    for (std::size_t t = 0; t < len; ++t) {
      double s = 0.0;
      for (const auto& img : out.images) s += img.channels[m][t];
      out.mixture.channels[m][t] = s;
    }
  return out;
}

MixtureBundle simulate(const SceneSpec& spec) {
  spec.room.validate();
  if (spec.length == 0) throw ConfigError("length: must be positive");
  if (spec.kinds.size() != 1 && spec.kinds.size() != spec.room.n_sources)
    throw ConfigError("kinds: need one entry or one per source");
  std::vector<Waveform> dries;
  for (std::size_t n = 0; n < spec.room.n_sources; ++n) {
    const SourceKind kind = spec.kinds.size() == 1 ? spec.kinds[0] : spec.kinds[n];
    dries.push_back(gen_subgaussian_source(spec.length, kind, derive_seed(spec.seed, {1, n}),
                                           spec.room.sample_rate));
  }
  return mix(dries, synth_rir(spec.room));
}

namespace {

const std::set<std::string> kSceneKeys = {
    "n_sources", "n_mics",     "rt60",        "direct_delay", "filter_length",
    "direct_to_reverberant_db", "sample_rate", "room_seed",    "length",
    "kinds",     "seed",       "source_seeds"};

}  // namespace

std::string SceneSpec::to_json() const {
  std::vector<std::string> kind_names;
  for (auto k : kinds) kind_names.push_back(sgmnmf::to_string(k));
  std::vector<std::uint64_t> source_seeds;
  for (std::size_t n = 0; n < room.n_sources; ++n) source_seeds.push_back(derive_seed(seed, {1, n}));
  nlohmann::json doc{{"n_sources", room.n_sources},
                     {"n_mics", room.n_mics},
                     {"rt60", room.rt60},
                     {"direct_delay", room.direct_delay},
                     {"filter_length", room.filter_length},
                     {"direct_to_reverberant_db", room.direct_to_reverberant_db},
                     {"sample_rate", room.sample_rate},
                     {"room_seed", room.seed},
                     {"length", length},
                     {"kinds", kind_names},
                     {"seed", seed},
                     {"source_seeds", source_seeds}};
  return doc.dump(2);
}

SceneSpec SceneSpec::from_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("scene: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("scene: top level must be an object");
  for (const auto& [key, value] : doc.items())
    if (!kSceneKeys.contains(key)) throw ConfigError("scene." + key + ": unknown key");

  SceneSpec s;
  auto get = [&](const char* key, auto& out) {
    if (!doc.contains(key)) return;
    try {
      doc.at(key).get_to(out);
    } catch (const nlohmann::json::exception&) {
      throw ConfigError(std::string("scene.") + key + ": wrong type");
    }
  };
  get("n_sources", s.room.n_sources);
  get("n_mics", s.room.n_mics);
  get("rt60", s.room.rt60);
  get("direct_delay", s.room.direct_delay);
  get("filter_length", s.room.filter_length);
  get("direct_to_reverberant_db", s.room.direct_to_reverberant_db);
  get("sample_rate", s.room.sample_rate);
  get("room_seed", s.room.seed);
  get("length", s.length);
  get("seed", s.seed);
  if (doc.contains("kinds")) {
    std::vector<std::string> names;
    get("kinds", names);
    s.kinds.clear();
    for (const auto& n : names) s.kinds.push_back(source_kind_from_string(n));
  }
  s.room.validate();
  return s;
}

}  // namespace sgmnmf
