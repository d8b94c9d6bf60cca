#pragma once

#include "sprox/model.hpp"
#include "sprox/penalty.hpp"

namespace sprox {

/// Task-structure penalty map lifted to a J-row coefficient matrix. The dual
/// domain becomes a J-fold product of the base ball, so the smoothing gap
/// constant scales to d_mt = J * base.D.
struct MultiTaskMapInfo {
  PenaltyLinearMap base;  // over dim = K tasks
  double d_mt = 0.0;
};

MultiTaskMapInfo make_multitask_info(PenaltyLinearMap base, Index num_inputs);

/// Value, gradient and dual maximizer of the smoothed multi-task penalty
///   f_mu(B) = max_{A in Q} <C B', A> - (mu/2) ||A||_F^2.
/// Column j of A* is the projection of column j of C B' / mu, so row j of
/// the gradient (A*)' C depends only on row j of B.
struct MultiTaskPenaltyEval {
  double value = 0.0;
  Matrix gradient;  ///< J x K, (A*)' C
  Matrix alpha;     ///< rows x J
};

MultiTaskPenaltyEval smoothed_eval_mt(const MultiTaskMapInfo& info,
                                      const Matrix& B, double mu);

/// Multi-task smoothing proximal gradient solve of
///   min 0.5 ||Y - X B||_F^2 + Omega(B) + lambda ||B||_1.
/// Same iteration and stopping rule as spg_solve, applied entrywise to B,
/// with L = lambda_max(X'X) + norm(C)^2 / mu and epsilon resolved through
/// d_mt. With K = 1 the iterates coincide with the single-task solver's.
SolveResult spg_solve_mt(const MultiTaskProblem& problem,
                         const MultiTaskMapInfo& info,
                         const SolverConfig& config,
                         const std::optional<Matrix>& warm_start = std::nullopt);

namespace detail {
std::pair<double, double> penalty_pair_mt(const PenaltyLinearMap& base,
                                          const Matrix& B, double mu);
}

}  // namespace sprox
