#pragma once

#include "sprox/model.hpp"
#include "sprox/penalty.hpp"

namespace sprox {

/// Settings for the forward-backward (FOBOS-style) and plain subgradient
/// baselines. The step at iteration t (t >= 1) is step_c / sqrt(t).
struct BaselineConfig {
  double step_c = 0.0;  ///< 0 picks default_step_scale at solve time
  double lambda = 0.0;
  double gamma = 0.0;
  double tol = 1e-6;
  int max_iter = 20000;
  bool precompute_gram = false;
  bool record_trace = false;
};

/// Default learning-rate scale 0.1 / sqrt(N J K); pass k = 1 for
/// single-task problems.
double default_step_scale(Index n, Index j, Index k = 1);

/// A member of the subdifferential of the exact structured penalty at beta:
/// C' s with s the blockwise-normalized (Blocks) or entrywise-sign (Box)
/// image of C beta, both mapping zero to zero.
Vector penalty_subgradient(const PenaltyLinearMap& map, const Vector& beta);

/// Forward-backward splitting with the structured penalty folded into the
/// "loss": a subgradient step on g + Omega followed by the l1 proximal step
/// with threshold step * lambda. Reports the best iterate seen.
SolveResult fobos_solve(const RegressionProblem& problem,
                        const PenaltyLinearMap& map,
                        const BaselineConfig& config);

/// Plain subgradient descent on the full objective, including
/// lambda * sign(beta). No thresholding, so it never produces exact zeros.
/// Reports the best iterate seen.
SolveResult subgradient_solve(const RegressionProblem& problem,
                              const PenaltyLinearMap& map,
                              const BaselineConfig& config);

}  // namespace sprox
