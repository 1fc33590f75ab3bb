// Copyright 2026 The sgmnmf Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "sgmnmf/separate.h"

#include <string>

#include "sgmnmf/error.h"
#include "sgmnmf/parallel.h"

namespace sgmnmf {

SeparatedSources wiener_separate(const SeparationState& state, const Spectrogram& x) {
  state.validate();
  if (x.bins != state.bins() || x.frames != state.frames() || x.channels != state.channels())
    throw DimensionMismatch("wiener_separate: spectrogram shape does not match the model");
  const std::size_t I = state.bins(), J = state.frames(), M = state.channels(),
                    N = state.sources();
  const Tensor3 psd = compute_source_psd(state.source);
  const Tensor3 chi = mixture_gain(psd, state.spatial.g);
  const auto& g = state.spatial.g;

  SeparatedSources out;
  out.images.assign(N, Spectrogram(I, J, M));
  parallel_for(I, [&](std::size_t i) {
    const ComplexMatrix& q = state.spatial.q[i];
    const LuDecomposition lu(q);
    std::vector<cdouble> masked(M);
    for (std::size_t j = 0; j < J; ++j) {
      const auto y = multiply(q, x.vec(i, j));
      for (std::size_t n = 0; n < N; ++n) {
        for (std::size_t m = 0; m < M; ++m)
          masked[m] = y[m] * (psd(i, j, n) * g(i, n, m) / chi(i, j, m));
        const auto s = lu.solve(masked);
        auto dst = out.images[n].vec(i, j);
        for (std::size_t m = 0; m < M; ++m) dst[m] = s[m];
      }
    }
  });
  return out;
}

std::vector<Waveform> to_waveforms(const SeparatedSources& sources, const StftConfig& cfg,
                                   std::size_t length, double sample_rate) {
  std::vector<Waveform> out;
  out.reserve(sources.size());
  for (const auto& s : sources.images) out.push_back(istft(s, cfg, length, sample_rate));
  return out;
}

void write_sources(const std::filesystem::path& dir, const std::vector<Waveform>& sources) {
  for (std::size_t n = 0; n < sources.size(); ++n)
    write_wav(dir / ("source_" + std::to_string(n + 1) + ".wav"), sources[n]);
}

}  // namespace sgmnmf
