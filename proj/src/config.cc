// Copyright 2026 The sgmnmf Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "sgmnmf/config.h"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "sgmnmf/error.h"

namespace sgmnmf {

namespace {

using nlohmann::json;

json parse_object(const std::string& document, const std::string& what) {
  json doc;
  try {
    doc = json::parse(document);
  } catch (const json::exception& e) {
    throw ConfigError(what + ": malformed JSON: " + e.what());
  }
  if (!doc.is_object()) throw ConfigError(what + ": top level must be an object");
  return doc;
}

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& prefix) {
  for (const auto& [key, value] : obj.items())
    if (!allowed.contains(key)) throw ConfigError(prefix + key + ": unknown key");
}

template <class T>
void read_field(const json& obj, const char* key, const std::string& prefix, T& out) {
  if (!obj.contains(key)) return;
  try {
    obj.at(key).get_to(out);
  } catch (const json::exception&) {
    throw ConfigError(prefix + key + ": wrong type");
  }
}

// JSON numbers may arrive as floats; counts must be nonnegative integers.
void read_count(const json& obj, const char* key, const std::string& prefix, std::size_t& out) {
  if (!obj.contains(key)) return;
  const auto& v = obj.at(key);
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0))
    throw ConfigError(prefix + key + ": expected a nonnegative integer");
  out = v.get<std::size_t>();
}

}  // namespace

Hyperparams RunConfig::hyperparams() const {
  Hyperparams h;
  h.algorithm = algorithm;
  h.beta = beta;
  h.n_sources = n_sources;
  h.n_bases = n_bases;
  h.iterations = iterations;
  h.floor_eps = floor_eps;
  h.seed = seed;
  return h;
}

RunConfig parse_config(const std::string& document) {
  const json doc = parse_object(document, "config");
  reject_unknown(doc,
                 {"algorithm", "beta", "n_sources", "n_bases", "iterations", "seed", "stft",
                  "floor_eps", "paths", "trace", "trace_timing"},
                 "");
  RunConfig cfg;
  if (doc.contains("algorithm")) {
    std::string name;
    read_field(doc, "algorithm", "", name);
    cfg.algorithm = algorithm_from_string(name);
    if (cfg.algorithm == Algorithm::kGaussian) cfg.beta = 2.0;
  }
  read_field(doc, "beta", "", cfg.beta);
  read_count(doc, "n_sources", "", cfg.n_sources);
  read_count(doc, "n_bases", "", cfg.n_bases);
  read_count(doc, "iterations", "", cfg.iterations);
  read_field(doc, "seed", "", cfg.seed);
  read_field(doc, "floor_eps", "", cfg.floor_eps);
  read_field(doc, "trace", "", cfg.trace);
  read_field(doc, "trace_timing", "", cfg.trace_timing);

  if (doc.contains("stft")) {
    const auto& s = doc.at("stft");
    if (!s.is_object()) throw ConfigError("stft: expected an object");
    reject_unknown(s, {"window_ms", "hop_ms"}, "stft.");
    read_field(s, "window_ms", "stft.", cfg.window_ms);
    read_field(s, "hop_ms", "stft.", cfg.hop_ms);
  }
  if (!(cfg.window_ms > 0.0)) throw ConfigError("stft.window_ms: must be positive");
  if (!(cfg.hop_ms > 0.0) || cfg.hop_ms > cfg.window_ms)
    throw ConfigError("stft.hop_ms: must satisfy 0 < hop_ms <= window_ms");

  if (doc.contains("paths")) {
    const auto& p = doc.at("paths");
    if (!p.is_object()) throw ConfigError("paths: expected an object");
    reject_unknown(p, {"input", "output_dir"}, "paths.");
    std::string input, output;
    read_field(p, "input", "paths.", input);
    read_field(p, "output_dir", "paths.", output);
    if (!input.empty()) cfg.input = input;
    if (!output.empty()) cfg.output_dir = output;
  }

  cfg.hyperparams().validate();
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  try {
    return parse_config(read_text_file(path));
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

EvalConfig parse_eval_config(const std::string& document) {
  const json doc = parse_object(document, "eval config");
  reject_unknown(doc, {"estimates", "references", "mixture", "ref_channel", "output"}, "");
  EvalConfig cfg;
  std::vector<std::string> est, ref;
  std::string mixture, output;
  read_field(doc, "estimates", "", est);
  read_field(doc, "references", "", ref);
  read_field(doc, "mixture", "", mixture);
  read_field(doc, "output", "", output);
  std::size_t channel = 1;
  read_count(doc, "ref_channel", "", channel);
  if (channel == 0) throw ConfigError("ref_channel: channels are numbered from 1");
  if (est.empty()) throw ConfigError("estimates: at least one path is required");
  if (ref.size() != est.size()) throw ConfigError("references: need one per estimate");
  if (mixture.empty()) throw ConfigError("mixture: path is required");
  cfg.estimates.assign(est.begin(), est.end());
  cfg.references.assign(ref.begin(), ref.end());
  cfg.mixture = mixture;
  cfg.ref_channel = channel - 1;
  if (!output.empty()) cfg.output = output;
  return cfg;
}

EvalConfig load_eval_config(const std::filesystem::path& path) {
  try {
    return parse_eval_config(read_text_file(path));
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw IoFailure("cannot open " + path.string());
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace sgmnmf
