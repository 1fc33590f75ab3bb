// Copyright 2026 The sgmnmf Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <doctest.h>

#include <cstring>
#include <filesystem>

#include "sgmnmf/error.h"
#include "sgmnmf/model.h"
#include "test_util.h"

using namespace sgmnmf;
using sgmnmf::testing::naive_chi;
using sgmnmf::testing::random_state;

namespace {

SourceModel ones(std::size_t I, std::size_t J, std::size_t K, std::size_t N) {
  return {RealMatrix(I, K, 1.0), RealMatrix(K, J, 1.0), RealMatrix(K, N, 1.0)};
}

}  // namespace

TEST_CASE("compute_source_psd: closed forms") {
  for (double v : compute_source_psd(ones(3, 4, 1, 2)).data) CHECK(v == 1.0);

  SourceModel zero_z = ones(3, 4, 2, 2);
  zero_z.z = RealMatrix(2, 2, 0.0);
  for (double v : compute_source_psd(zero_z).data) CHECK(v == 0.0);

  SourceModel s{RealMatrix(1, 2), RealMatrix(2, 1), RealMatrix(2, 2)};
  s.t.data = {1.0, 2.0};
  s.v.data = {3.0, 4.0};
  s.z.data = {1.0, 0.0, 0.0, 1.0};
  const Tensor3 psd = compute_source_psd(s);
  CHECK(psd(0, 0, 0) == 3.0);
  CHECK(psd(0, 0, 1) == 8.0);

  SourceModel bad = ones(2, 2, 2, 2);
  bad.v = RealMatrix(3, 2, 1.0);
  CHECK_THROWS_AS(compute_source_psd(bad), DimensionMismatch);
}

TEST_CASE("mixture_gain: closed forms and loop oracle") {
  Hyperparams h;
  h.n_bases = 1;
  h.n_sources = 1;
  SeparationState unit = initialize_state(2, 3, 2, h);
  unit.source.t = RealMatrix(2, 1, 1.0);
  unit.source.v = RealMatrix(1, 3, 1.0);
  unit.source.z = RealMatrix(1, 1, 1.0);
  for (double v : mixture_gain(unit).data) CHECK(v == 1.0);

  SeparationState zero_g = unit;
  for (auto& g : zero_g.spatial.g.data) g = 0.0;
  for (double v : mixture_gain(zero_g).data) CHECK(v == 0.0);
  apply_floor(zero_g);
  for (double v : mixture_gain(zero_g).data) CHECK(v > 0.0);

  const SeparationState s = random_state(5, 7, 3, 2, 2, 4.0, 17);
  const Tensor3 chi = mixture_gain(s);
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t j = 0; j < 7; ++j)
      for (std::size_t m = 0; m < 2; ++m)
        CHECK(std::abs(chi(i, j, m) - naive_chi(s, i, j, m)) <= 1e-12 * naive_chi(s, i, j, m));
}

TEST_CASE("psd and chi are degree-1 homogeneous in t") {
  const SeparationState s = random_state(4, 5, 3, 2, 3, 4.0, 3);
  SeparationState scaled = s;
  for (auto& t : scaled.source.t.data) t *= 2.5;
  const Tensor3 a = mixture_gain(s), b = mixture_gain(scaled);
  for (std::size_t k = 0; k < a.data.size(); ++k) CHECK(b.data[k] == doctest::Approx(2.5 * a.data[k]).epsilon(1e-13));
  const Tensor3 pa = compute_source_psd(s.source), pb = compute_source_psd(scaled.source);
  for (std::size_t k = 0; k < pa.data.size(); ++k) CHECK(pb.data[k] == doctest::Approx(2.5 * pa.data[k]).epsilon(1e-13));
}

TEST_CASE("full_rank_scm: identity diagonalizer and re-diagonalization") {
  Hyperparams h;
  h.n_sources = 2;
  h.n_bases = 2;
  SeparationState s = initialize_state(3, 2, 2, h);
  for (const auto& g : full_rank_scm(s)) {
    CHECK(g(0, 0) == cdouble(1.0));
    CHECK(g(1, 1) == cdouble(1.0));
    CHECK(g(0, 1) == cdouble(0.0));
  }
  s.spatial.g(0, 0, 0) = 2.0;
  s.spatial.g(0, 0, 1) = 3.0;
  const auto scm = full_rank_scm(s);
  CHECK(scm[0](0, 0) == cdouble(2.0));
  CHECK(scm[0](1, 1) == cdouble(3.0));

  const SeparationState r = random_state(4, 2, 2, 3, 2, 4.0, 8);
  const auto g = full_rank_scm(r);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t n = 0; n < 2; ++n) {
      const ComplexMatrix& gin = g[i * 2 + n];
      CHECK((gin - gin.adjoint()).frobenius_norm() <= 1e-10 * gin.frobenius_norm());
      const ComplexMatrix d = r.spatial.q[i] * gin * r.spatial.q[i].adjoint();
      ComplexMatrix expect(3, 3);
      for (std::size_t m = 0; m < 3; ++m) expect(m, m) = r.spatial.g(i, n, m);
      CHECK((d - expect).frobenius_norm() <= 1e-10 * expect.frobenius_norm());
    }

  SeparationState singular = r;
  singular.spatial.q[1] = ComplexMatrix(3, 3);
  CHECK_THROWS_AS(full_rank_scm(singular), SingularMatrix);
}

TEST_CASE("initialize_state: seeded, in range, identity spatial model") {
  Hyperparams h;
  h.seed = 42;
  const SeparationState a = initialize_state(6, 5, 2, h), b = initialize_state(6, 5, 2, h);
  CHECK(a.source.t.data == b.source.t.data);
  CHECK(a.source.v.data == b.source.v.data);
  for (const auto* m : {&a.source.t, &a.source.v, &a.source.z})
    for (double v : m->data) CHECK((v > 0.1 && v < 1.0));
  for (double g : a.spatial.g.data) CHECK(g == 1.0);
  for (const auto& q : a.spatial.q) CHECK(q.data() == ComplexMatrix::identity(2).data());
  h.seed = 43;
  CHECK(initialize_state(6, 5, 2, h).source.t.data != a.source.t.data);
}

TEST_CASE("Hyperparams validation") {
  Hyperparams h;
  h.beta = 4.0;
  CHECK_NOTHROW(h.validate());
  h.beta = 2.0;
  CHECK_THROWS_AS(h.validate(), ConfigError);
  h.beta = 4.5;
  CHECK_THROWS_AS(h.validate(), ConfigError);
  h.algorithm = Algorithm::kGaussian;
  CHECK_THROWS_AS(h.validate(), ConfigError);
  h.beta = 2.0;
  CHECK_NOTHROW(h.validate());
  CHECK_THROWS_AS(algorithm_from_string("laplace"), ConfigError);
}

TEST_CASE("checkpoint: JSON round trip is exact") {
  const SeparationState s = random_state(3, 4, 2, 2, 2, 3.5, 99);
  const auto path = std::filesystem::temp_directory_path() / "sgmnmf_state.json";
  save_checkpoint(path, s);
  const SeparationState r = load_checkpoint(path);
  CHECK(r.source.t.data == s.source.t.data);
  CHECK(r.source.v.data == s.source.v.data);
  CHECK(r.source.z.data == s.source.z.data);
  CHECK(r.spatial.g.data == s.spatial.g.data);
  for (std::size_t i = 0; i < 3; ++i) CHECK(r.spatial.q[i].data() == s.spatial.q[i].data());
  CHECK(r.hyper.beta == s.hyper.beta);
  CHECK(r.hyper.seed == s.hyper.seed);
  std::filesystem::remove(path);

  CHECK_THROWS_AS(checkpoint_from_json("{\"format\": \"other\"}"), ConfigError);
  CHECK_THROWS_AS(checkpoint_from_json("not json"), ConfigError);
}
