// Copyright 2026 The sgmnmf Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "sgmnmf/model.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "sgmnmf/error.h"

namespace sgmnmf {

void SourceModel::validate() const {
  if (t.cols != v.rows || t.cols != z.rows)
    throw DimensionMismatch("source model: T, V and Z disagree on the number of bases");
  if (t.data.size() != t.rows * t.cols || v.data.size() != v.rows * v.cols ||
      z.data.size() != z.rows * z.cols)
    throw DimensionMismatch("source model: storage does not match shape");
}

std::string to_string(Algorithm a) {
  return a == Algorithm::kGaussian ? "gaussian" : "subgaussian";
}

Algorithm algorithm_from_string(const std::string& s) {
  if (s == "subgaussian") return Algorithm::kSubGaussian;
  if (s == "gaussian") return Algorithm::kGaussian;
  throw ConfigError("algorithm: expected \"subgaussian\" or \"gaussian\", got \"" + s + "\"");
}

void Hyperparams::validate() const {
  if (algorithm == Algorithm::kSubGaussian && !(beta > 2.0 && beta <= 4.0))
    throw ConfigError("beta: subgaussian path requires 2 < beta <= 4, got " + std::to_string(beta));
  if (algorithm == Algorithm::kGaussian && beta != 2.0)
    throw ConfigError("beta: gaussian path requires beta = 2, got " + std::to_string(beta));
  if (n_sources == 0) throw ConfigError("n_sources: must be positive");
  if (n_bases == 0) throw ConfigError("n_bases: must be positive");
  if (!(floor_eps > 0.0)) throw ConfigError("floor_eps: must be positive");
}

void SeparationState::validate() const {
  source.validate();
  const std::size_t i = bins(), n = sources();
  if (spatial.g.d0 != i || spatial.g.d1 != n)
    throw DimensionMismatch("state: g must be I x N x M");
  if (spatial.q.size() != i) throw DimensionMismatch("state: need one Q per frequency bin");
  for (const auto& q : spatial.q)
    if (q.rows() != channels() || q.cols() != channels())
      throw DimensionMismatch("state: every Q_i must be M x M");
}

SeparationState initialize_state(std::size_t bins, std::size_t frames, std::size_t channels,
                                 const Hyperparams& hyper) {
  hyper.validate();
  SeparationState s;
  s.hyper = hyper;
  const std::size_t k = hyper.n_bases, n = hyper.n_sources;
  s.source.t = RealMatrix(bins, k);
  s.source.v = RealMatrix(k, frames);
  s.source.z = RealMatrix(k, n);

  std::mt19937_64 rng(hyper.seed);
  std::uniform_real_distribution<double> uni(0.1, 1.0);
  for (auto* m : {&s.source.t, &s.source.v, &s.source.z})
    for (auto& x : m->data) x = uni(rng);

  s.spatial.g = Tensor3(bins, n, channels, 1.0);
  s.spatial.q.assign(bins, ComplexMatrix::identity(channels));
  return s;
}

void apply_floor(SeparationState& state) {
  const double eps = state.hyper.floor_eps;
  for (auto* v : {&state.source.t.data, &state.source.v.data, &state.source.z.data,
                  &state.spatial.g.data})
    for (auto& x : *v) x = std::max(x, eps);
}

Tensor3 compute_source_psd(const SourceModel& s) {
  s.validate();
  const std::size_t I = s.bins(), J = s.frames(), K = s.bases(), N = s.sources();
  Tensor3 psd(I, J, N);
  std::vector<double> tz(K * N);
  for (std::size_t i = 0; i < I; ++i) {
    for (std::size_t k = 0; k < K; ++k)
      for (std::size_t n = 0; n < N; ++n) tz[k * N + n] = s.t(i, k) * s.z(k, n);
    for (std::size_t j = 0; j < J; ++j) {
      double* out = psd.slice(i, j);
      for (std::size_t k = 0; k < K; ++k) {
        const double vk = s.v(k, j);
        for (std::size_t n = 0; n < N; ++n) out[n] += tz[k * N + n] * vk;
      }
    }
  }
  return psd;
}

Tensor3 mixture_gain(const Tensor3& psd, const Tensor3& g) {
  if (psd.d0 != g.d0 || psd.d2 != g.d1)
    throw DimensionMismatch("mixture_gain: psd and g disagree on I or N");
  const std::size_t I = psd.d0, J = psd.d1, N = psd.d2, M = g.d2;
  Tensor3 chi(I, J, M);
  for (std::size_t i = 0; i < I; ++i)
    for (std::size_t j = 0; j < J; ++j) {
      const double* sig = psd.slice(i, j);
      double* out = chi.slice(i, j);
      for (std::size_t n = 0; n < N; ++n) {
        const double* gin = g.slice(i, n);
        for (std::size_t m = 0; m < M; ++m) out[m] += sig[n] * gin[m];
      }
    }
  return chi;
}

Tensor3 mixture_gain(const SeparationState& state) {
  state.validate();
  return mixture_gain(compute_source_psd(state.source), state.spatial.g);
}

std::vector<ComplexMatrix> full_rank_scm(const SeparationState& state) {
  state.validate();
  const std::size_t I = state.bins(), N = state.sources(), M = state.channels();
  std::vector<ComplexMatrix> out;
  out.reserve(I * N);
  std::vector<cdouble> diag(M);
  for (std::size_t i = 0; i < I; ++i) {
    const ComplexMatrix qinv = invert(state.spatial.q[i]);
    const ComplexMatrix qinv_h = qinv.adjoint();
    for (std::size_t n = 0; n < N; ++n) {
      for (std::size_t m = 0; m < M; ++m) diag[m] = state.spatial.g(i, n, m);
      out.push_back(qinv * ComplexMatrix::diagonal(diag) * qinv_h);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Checkpoints

namespace {

using nlohmann::json;

json real_array(const std::vector<std::size_t>& shape, const std::vector<double>& data) {
  return json{{"shape", shape}, {"data", data}};
}

std::vector<double> read_real(const json& j, const std::vector<std::size_t>& expect,
                              const std::string& name) {
  const auto shape = j.at("shape").get<std::vector<std::size_t>>();
  if (shape != expect) throw DimensionMismatch("checkpoint: unexpected shape for " + name);
  auto data = j.at("data").get<std::vector<double>>();
  std::size_t total = 1;
  for (auto d : shape) total *= d;
  if (data.size() != total) throw DimensionMismatch("checkpoint: wrong element count for " + name);
  return data;
}

}  // namespace

std::string checkpoint_to_json(const SeparationState& state) {
  state.validate();
  const std::size_t I = state.bins(), J = state.frames(), K = state.bases(),
                    N = state.sources(), M = state.channels();
  std::vector<double> q_re, q_im;
  q_re.reserve(I * M * M);
  q_im.reserve(I * M * M);
  for (const auto& q : state.spatial.q)
    for (const auto& v : q.data()) {
      q_re.push_back(v.real());
      q_im.push_back(v.imag());
    }
  const auto& h = state.hyper;
  json doc{
      {"format", "sgmnmf-state"},
      {"version", 1},
      {"hyper",
       {{"algorithm", to_string(h.algorithm)},
        {"beta", h.beta},
        {"n_sources", h.n_sources},
        {"n_bases", h.n_bases},
        {"iterations", h.iterations},
        {"floor_eps", h.floor_eps},
        {"seed", h.seed}}},
      {"T", real_array({I, K}, state.source.t.data)},
      {"V", real_array({K, J}, state.source.v.data)},
      {"Z", real_array({K, N}, state.source.z.data)},
      {"g", real_array({I, N, M}, state.spatial.g.data)},
      {"Q", {{"shape", {I, M, M}}, {"real", q_re}, {"imag", q_im}}},
  };
  return doc.dump();
}

SeparationState checkpoint_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("checkpoint: ") + e.what());
  }
  try {
    if (doc.at("format") != "sgmnmf-state") throw ConfigError("checkpoint: unknown format tag");
    SeparationState s;
    const auto& h = doc.at("hyper");
    s.hyper.algorithm = algorithm_from_string(h.at("algorithm").get<std::string>());
    s.hyper.beta = h.at("beta").get<double>();
    s.hyper.n_sources = h.at("n_sources").get<std::size_t>();
    s.hyper.n_bases = h.at("n_bases").get<std::size_t>();
    s.hyper.iterations = h.at("iterations").get<std::size_t>();
    s.hyper.floor_eps = h.at("floor_eps").get<double>();
    s.hyper.seed = h.at("seed").get<std::uint64_t>();

    const auto tshape = doc.at("T").at("shape").get<std::vector<std::size_t>>();
    const auto vshape = doc.at("V").at("shape").get<std::vector<std::size_t>>();
    const auto gshape = doc.at("g").at("shape").get<std::vector<std::size_t>>();
    if (tshape.size() != 2 || vshape.size() != 2 || gshape.size() != 3)
      throw DimensionMismatch("checkpoint: wrong tensor rank");
    const std::size_t I = tshape[0], K = tshape[1], J = vshape[1], N = gshape[1], M = gshape[2];

    s.source.t = RealMatrix(I, K);
    s.source.t.data = read_real(doc.at("T"), {I, K}, "T");
    s.source.v = RealMatrix(K, J);
    s.source.v.data = read_real(doc.at("V"), {K, J}, "V");
    s.source.z = RealMatrix(K, N);
    s.source.z.data = read_real(doc.at("Z"), {K, N}, "Z");
    s.spatial.g = Tensor3(I, N, M);
    s.spatial.g.data = read_real(doc.at("g"), {I, N, M}, "g");

    const auto& qj = doc.at("Q");
    if (qj.at("shape").get<std::vector<std::size_t>>() != std::vector<std::size_t>{I, M, M})
      throw DimensionMismatch("checkpoint: unexpected shape for Q");
    const auto re = qj.at("real").get<std::vector<double>>();
    const auto im = qj.at("imag").get<std::vector<double>>();
    if (re.size() != I * M * M || im.size() != I * M * M)
      throw DimensionMismatch("checkpoint: wrong element count for Q");
    s.spatial.q.reserve(I);
    for (std::size_t i = 0; i < I; ++i) {
      std::vector<cdouble> e(M * M);
      for (std::size_t k = 0; k < M * M; ++k) e[k] = {re[i * M * M + k], im[i * M * M + k]};
      s.spatial.q.emplace_back(M, M, std::move(e));
    }
    s.validate();
    return s;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("checkpoint: ") + e.what());
  }
}

void save_checkpoint(const std::filesystem::path& path, const SeparationState& state) {
  std::ofstream f(path);
  if (!f) throw IoFailure("cannot write " + path.string());
  f << checkpoint_to_json(state) << '\n';
  if (!f) throw IoFailure("write failed for " + path.string());
}

SeparationState load_checkpoint(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw IoFailure("cannot open " + path.string());
  std::stringstream ss;
  ss << f.rdbuf();
  return checkpoint_from_json(ss.str());
}

}  // namespace sgmnmf
