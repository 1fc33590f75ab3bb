// Copyright 2026 The sgmnmf Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

// The simulate / separate / evaluate workflows behind the command-line tool.
// Each throws an sgmnmf::Error naming the offending field or file.

#ifndef SGMNMF_PIPELINE_H_
#define SGMNMF_PIPELINE_H_

#include <filesystem>

#include "sgmnmf/config.h"
#include "sgmnmf/eval.h"
#include "sgmnmf/harness.h"
#include "sgmnmf/objective.h"

namespace sgmnmf {

/// Writes mixture.wav, image_{n}.wav, dry_{n}.wav and scene.json into `out`.
MixtureBundle cmd_simulate(const SceneSpec& spec, const std::filesystem::path& out);

/// stft -> run -> wiener_separate -> istft; writes source_{n}.wav,
/// trace.csv (when cfg.trace) and state.json into cfg.output_dir.
CostTrace cmd_separate(const RunConfig& cfg);

/// Scores the estimates and writes the metrics JSON to cfg.output.
MetricsReport cmd_evaluate(const EvalConfig& cfg);

}  // namespace sgmnmf

#endif  // SGMNMF_PIPELINE_H_
