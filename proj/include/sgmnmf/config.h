// Copyright 2026 The sgmnmf Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

// JSON run configurations for the command-line workflows.

#ifndef SGMNMF_CONFIG_H_
#define SGMNMF_CONFIG_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "sgmnmf/model.h"

namespace sgmnmf {

struct RunConfig {
  Algorithm algorithm = Algorithm::kSubGaussian;
  double beta = 4.0;
  std::size_t n_sources = 2;
  std::size_t n_bases = 20;
  std::size_t iterations = 200;
  std::uint64_t seed = 0;
  double window_ms = 64.0;
  double hop_ms = 16.0;
  double floor_eps = 1e-12;
  std::filesystem::path input;
  std::filesystem::path output_dir = ".";
  bool trace = true;
  /// Wall-clock ms in trace.csv; off by default so traces are byte-stable.
  bool trace_timing = false;

  Hyperparams hyperparams() const;
};

/// Parses and validates a run configuration. Missing keys take defaults;
/// unknown keys and invalid values throw ConfigError naming the field path.
RunConfig parse_config(const std::string& document);
RunConfig load_config(const std::filesystem::path& path);

struct EvalConfig {
  std::vector<std::filesystem::path> estimates;
  std::vector<std::filesystem::path> references;
  std::filesystem::path mixture;
  /// 1-based in JSON, stored 0-based.
  std::size_t ref_channel = 0;
  std::filesystem::path output = "metrics.json";
};

EvalConfig parse_eval_config(const std::string& document);
EvalConfig load_eval_config(const std::filesystem::path& path);

/// Reads a whole text file; throws IoFailure naming the path.
std::string read_text_file(const std::filesystem::path& path);

}  // namespace sgmnmf

#endif  // SGMNMF_CONFIG_H_
