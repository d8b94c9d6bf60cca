#pragma once

#include <functional>
#include <utility>

#include "sprox/model.hpp"
#include "sprox/multitask.hpp"
#include "sprox/penalty.hpp"

namespace sprox {

/// Central finite differences (f(b + h e_j) - f(b - h e_j)) / (2 h).
Vector fd_gradient(const std::function<double(const Vector&)>& f,
                   const Vector& beta, double h);

struct ReferenceSolution {
  Vector beta;
  double objective = 0.0;
};

/// High-accuracy reference objective for tiny instances (J <= 100,
/// budget >= 1e5). Runs Polyak-style subgradient descent with a diminishing
/// optimality-gap target and iterate averaging for the full budget, then
/// polishes with 1e4 smoothing-solver iterations at mu = 1e-8, returning the
/// best point seen across both phases. Deterministic, and deliberately a
/// different method family / mu regime than the production solver.
ReferenceSolution reference_solve(const RegressionProblem& problem,
                                  const PenaltyLinearMap& map, double lambda,
                                  long budget);

/// Brute-force l1 proximal operator: argmin over a uniform grid on
/// [-|v|-t, |v|+t] of 0.5 (x - v)^2 + t |x|. resolution >= 1e5 points.
double prox_1d_grid(double v, double t, long resolution);

/// Single-task view of a multi-task instance for reference solves:
/// vec(B) is column-major, the design becomes blkdiag(X, ..., X), and the
/// task structure is replicated across the J coefficient rows.
RegressionProblem vectorize_problem(const MultiTaskProblem& problem);
GroupStructure vectorize_group_structure(const GroupStructure& tasks,
                                         Index num_inputs);
FusionGraph vectorize_fusion_graph(const FusionGraph& tasks, Index num_inputs);

}  // namespace sprox
