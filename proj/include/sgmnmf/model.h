// Copyright 2026 The sgmnmf Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

// Factorization state: NMF source factors (T, V, Z), diagonal spatial gains g
// and per-frequency joint diagonalizers Q.

#ifndef SGMNMF_MODEL_H_
#define SGMNMF_MODEL_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "sgmnmf/linalg.h"

namespace sgmnmf {

struct RealMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  RealMatrix() = default;
  RealMatrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}

  double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
};

/// Dense real 3-tensor, last index fastest.
struct Tensor3 {
  std::size_t d0 = 0, d1 = 0, d2 = 0;
  std::vector<double> data;

  Tensor3() = default;
  Tensor3(std::size_t a, std::size_t b, std::size_t c, double fill = 0.0)
      : d0(a), d1(b), d2(c), data(a * b * c, fill) {}

  double& operator()(std::size_t a, std::size_t b, std::size_t c) {
    return data[(a * d1 + b) * d2 + c];
  }
  double operator()(std::size_t a, std::size_t b, std::size_t c) const {
    return data[(a * d1 + b) * d2 + c];
  }
  const double* slice(std::size_t a, std::size_t b) const { return data.data() + (a * d1 + b) * d2; }
  double* slice(std::size_t a, std::size_t b) { return data.data() + (a * d1 + b) * d2; }
};

/// t: I x K, v: K x J, z: K x N.
struct SourceModel {
  RealMatrix t;
  RealMatrix v;
  RealMatrix z;

  std::size_t bins() const { return t.rows; }
  std::size_t bases() const { return t.cols; }
  std::size_t frames() const { return v.cols; }
  std::size_t sources() const { return z.cols; }

  /// Throws DimensionMismatch unless the three factors agree on K.
  void validate() const;
};

/// q[i] holds Q_i whose m-th row is q_im^H; g is I x N x M.
struct SpatialModel {
  std::vector<ComplexMatrix> q;
  Tensor3 g;
};

enum class Algorithm { kSubGaussian, kGaussian };

std::string to_string(Algorithm a);
/// Throws ConfigError for anything other than "subgaussian" / "gaussian".
Algorithm algorithm_from_string(const std::string& s);

struct Hyperparams {
  double beta = 4.0;
  std::size_t n_sources = 2;
  std::size_t n_bases = 20;
  std::size_t iterations = 200;
  double floor_eps = 1e-12;
  std::uint64_t seed = 0;
  Algorithm algorithm = Algorithm::kSubGaussian;

  /// The sub-Gaussian path needs 2 < beta <= 4; the Gaussian path needs beta == 2.
  void validate() const;
};

struct SeparationState {
  SourceModel source;
  SpatialModel spatial;
  Hyperparams hyper;

  std::size_t bins() const { return source.bins(); }
  std::size_t frames() const { return source.frames(); }
  std::size_t bases() const { return source.bases(); }
  std::size_t sources() const { return source.sources(); }
  std::size_t channels() const { return spatial.g.d2; }

  /// Checks mutual consistency of every factor's shape.
  void validate() const;
};

/// T, V, Z i.i.d. uniform on (0.1, 1.0) from the seeded generator; g = 1; Q_i = I.
SeparationState initialize_state(std::size_t bins, std::size_t frames, std::size_t channels,
                                 const Hyperparams& hyper);

/// Clamps every nonnegative parameter to at least hyper.floor_eps.
void apply_floor(SeparationState& state);

/// sigma_ijn = sum_k t_ik v_kj z_kn, shape I x J x N.
Tensor3 compute_source_psd(const SourceModel& s);

/// chi_ijm = sum_{k,n} t_ik v_kj z_kn g_inm, shape I x J x M.
Tensor3 mixture_gain(const SeparationState& state);
/// Same, reusing a precomputed source PSD.
Tensor3 mixture_gain(const Tensor3& psd, const Tensor3& g);

/// Full-rank spatial covariances G_in = Q_i^-1 diag(g_in) Q_i^-H, indexed
/// [i * N + n].
std::vector<ComplexMatrix> full_rank_scm(const SeparationState& state);

/// JSON checkpoint with explicit shapes for every array.
void save_checkpoint(const std::filesystem::path& path, const SeparationState& state);
SeparationState load_checkpoint(const std::filesystem::path& path);
std::string checkpoint_to_json(const SeparationState& state);
SeparationState checkpoint_from_json(const std::string& text);

}  // namespace sgmnmf

#endif  // SGMNMF_MODEL_H_
