#pragma once

#include "sprox/model.hpp"
#include "sprox/penalty.hpp"

namespace sprox {

/// Smoothing parameter from a target accuracy: mu = epsilon / (2 D).
/// D = 0 means there is no structured penalty to smooth; callers must then
/// set mu directly.
double mu_from_epsilon(double epsilon, double D);

/// Entrywise sign(v) * max(0, |v| - t), with sign(0) = 0 so shrunk
/// coordinates are exactly zero.
double soft_threshold(double v, double t);
Vector soft_threshold(const Vector& v, double t);

/// Largest eigenvalue of X'X via deterministic power iteration (relative
/// tolerance 1e-8), using the cached Gram matrix when present.
double loss_lipschitz(const RegressionProblem& problem);

/// Accelerated-momentum state of the smoothing solver at iteration t.
/// theta follows theta_t = 2 / (t + 2) from theta_0 = 1, and the step bound
/// is L = loss_lipschitz + norm(C)^2 / mu.
struct SolverState {
  int t = 0;
  Vector beta_prev;
  Vector beta;
  Vector w;
  double theta = 1.0;
  double L = 0.0;
  double mu = 0.0;
};

/// Smoothing proximal gradient solve of
///   min 0.5 ||y - X beta||^2 + Omega(beta) + lambda ||beta||_1
/// with Omega smoothed at mu and the l1 term handled exactly by
/// soft-thresholding. Stops when the relative change of the original
/// objective between consecutive iterates drops below tol, or at max_iter.
/// Starts from zero unless a warm start is supplied.
SolveResult spg_solve(const RegressionProblem& problem,
                      const PenaltyLinearMap& map, const SolverConfig& config,
                      const std::optional<Vector>& warm_start = std::nullopt);

/// Sequential solves warm-started from the previous solution; configs are
/// expected in decreasing regularization order.
std::vector<SolveResult> solve_path(const RegressionProblem& problem,
                                    const PenaltyLinearMap& map,
                                    const std::vector<SolverConfig>& configs);

}  // namespace sprox
