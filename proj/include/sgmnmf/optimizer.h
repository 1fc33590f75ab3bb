// Copyright 2026 The sgmnmf Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

// Majorization-minimization updates for joint-diagonalized multichannel NMF.
//
// Every sub-update is a closed-form minimizer of an auxiliary function that
// touches the cost at the current point, so the cost never increases. The
// auxiliary quantities (chi, phi, r) are therefore recomputed from the
// current state before each parameter family is touched.

#ifndef SGMNMF_OPTIMIZER_H_
#define SGMNMF_OPTIMIZER_H_

#include <cstddef>
#include <functional>
#include <vector>

#include "sgmnmf/model.h"
#include "sgmnmf/objective.h"
#include "sgmnmf/signal.h"

namespace sgmnmf {

// Multiplicative updates. With beta = 2 these are the Gaussian rules.
void update_t(SeparationState& state, const Spectrogram& x);
void update_v(SeparationState& state, const Spectrogram& x);
void update_z(SeparationState& state, const Spectrogram& x);
void update_g(SeparationState& state, const Spectrogram& x);

/// t, v, z, g in that order, each floored at hyper.floor_eps.
void update_tvzg(SeparationState& state, const Spectrogram& x);

/// One row of Q_i after a generalized (or standard) IP step, with the
/// intermediate quantities kept for inspection.
struct RowStep {
  /// New q_im (column vector; Q_i stores its conjugate as row m).
  std::vector<cdouble> q;
  /// Weights r_ijm at the pre-update point (sub-Gaussian step only; 0 for
  /// frames skipped because the observation projects to zero).
  std::vector<double> r;
  /// U_im of the step.
  ComplexMatrix u;
  /// B'_im of the sub-Gaussian step (empty for the Gaussian step).
  ComplexMatrix b_prime;
};

/// Generalized IP step for row m of Q_i. `chi_bin` is the J x M block of chi
/// for bin i. Throws SingularMatrix when Q_i B'_im cannot be inverted.
RowStep subgaussian_row_step(const ComplexMatrix& q_i, const Spectrogram& x, std::size_t bin,
                             const double* chi_bin, std::size_t row, double beta, double eps);

/// Standard IP step: U = (1/J) sum_j x x^H / chi_ijm, q = (Q U)^-1 e_m,
/// q <- q / sqrt(q^H U q).
RowStep gaussian_row_step(const ComplexMatrix& q_i, const Spectrogram& x, std::size_t bin,
                          const double* chi_bin, std::size_t row);

/// Updates row m of every Q_i, dispatching on hyper.algorithm. A bin whose
/// step throws SingularMatrix keeps its current row; returns how many did.
std::size_t update_q_row(SeparationState& state, const Spectrogram& x, std::size_t row);

/// Full sweep over the rows; returns the number of skipped (bin, row) steps.
std::size_t update_q_subgaussian(SeparationState& state, const Spectrogram& x);
std::size_t update_q_gaussian(SeparationState& state, const Spectrogram& x);

/// Rescales so that sum_{n,m} g_inm = N M for each bin (inverse factor moved
/// into t_i.) and sum_n z_kn = 1 for each basis (inverse factor moved into
/// v_k.). chi, and hence both joint-diagonal costs, are unchanged.
void normalize_and_rescale(SeparationState& state);

struct IterationReport {
  std::size_t iteration = 0;
  double cost_before = 0.0;
  double cost_after = 0.0;
  double ms_tvzg = 0.0;
  double ms_q = 0.0;
  double ms_total = 0.0;
  /// (bin, row) Q steps left unchanged because Q_i B' was singular.
  std::size_t q_rows_skipped = 0;
};

struct RunOptions {
  /// Called after every full iteration.
  std::function<void(const IterationReport&)> on_iteration;
};

/// Runs hyper.iterations rounds of [update_tvzg; Q sweep; normalize_and_rescale]
/// and records cost_ggd_jd after each one. Errors are rethrown with the
/// iteration number prepended.
CostTrace run(SeparationState& state, const Spectrogram& x, const RunOptions& options = {});

}  // namespace sgmnmf

#endif  // SGMNMF_OPTIMIZER_H_
