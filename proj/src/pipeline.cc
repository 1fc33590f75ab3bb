// Copyright 2026 The sgmnmf Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "sgmnmf/pipeline.h"

#include <fstream>
#include <string>

#include "sgmnmf/error.h"
#include "sgmnmf/model.h"
#include "sgmnmf/optimizer.h"
#include "sgmnmf/separate.h"
#include "sgmnmf/signal.h"

namespace sgmnmf {

namespace {

void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoFailure("cannot create directory " + dir.string() + ": " + ec.message());
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) throw IoFailure("cannot write " + path.string());
  f << text << '\n';
  if (!f) throw IoFailure("write failed for " + path.string());
}

}  // namespace

MixtureBundle cmd_simulate(const SceneSpec& spec, const std::filesystem::path& out) {
  MixtureBundle bundle = simulate(spec);
  ensure_dir(out);
  write_wav(out / "mixture.wav", bundle.mixture);
  for (std::size_t n = 0; n < bundle.images.size(); ++n) {
    const std::string idx = std::to_string(n + 1);
    write_wav(out / ("image_" + idx + ".wav"), bundle.images[n]);
    write_wav(out / ("dry_" + idx + ".wav"), bundle.dries[n]);
  }
  write_text(out / "scene.json", spec.to_json());
  return bundle;
}

CostTrace cmd_separate(const RunConfig& cfg) {
  if (cfg.input.empty()) throw ConfigError("paths.input: mixture path is required");
  const Waveform mixture = read_wav(cfg.input);
  if (mixture.num_channels() < 2)
    throw InvalidArgument(cfg.input.string() + ": need at least 2 channels, got " +
                          std::to_string(mixture.num_channels()));
  const StftConfig stft_cfg = StftConfig::from_ms(cfg.window_ms, cfg.hop_ms, mixture.sample_rate);
  const Spectrogram x = stft(mixture, stft_cfg);

  SeparationState state =
      initialize_state(x.bins, x.frames, x.channels, cfg.hyperparams());
  CostTrace trace = run(state, x);

  const SeparatedSources sources = wiener_separate(state, x);
  ensure_dir(cfg.output_dir);
  write_sources(cfg.output_dir,
                to_waveforms(sources, stft_cfg, mixture.length(), mixture.sample_rate));
  if (cfg.trace) trace.write_csv(cfg.output_dir / "trace.csv", cfg.trace_timing);
  save_checkpoint(cfg.output_dir / "state.json", state);
  return trace;
}

MetricsReport cmd_evaluate(const EvalConfig& cfg) {
  std::vector<Waveform> estimates, references;
  for (const auto& p : cfg.estimates) estimates.push_back(read_wav(p));
  for (const auto& p : cfg.references) references.push_back(read_wav(p));
  const Waveform mixture = read_wav(cfg.mixture);
  for (std::size_t n = 0; n < estimates.size(); ++n)
    if (estimates[n].length() != mixture.length() || references[n].length() != mixture.length())
      throw DimensionMismatch("evaluate: length of " + cfg.estimates[n].string() + " or " +
                              cfg.references[n].string() + " differs from the mixture");
  MetricsReport report = sdr_improvement(estimates, references, mixture, cfg.ref_channel);
  if (cfg.output.has_parent_path()) ensure_dir(cfg.output.parent_path());
  write_text(cfg.output, report.to_json());
  return report;
}

}  // namespace sgmnmf
