#pragma once

#include <Eigen/Dense>

#include <optional>
#include <vector>

namespace sprox {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

struct PenaltyLinearMap;

/// Single-task squared-error regression data: y ~ X beta, N samples by J
/// inputs. gram/xty optionally cache X'X and X'y so that solver iterations
/// become independent of the sample size.
struct RegressionProblem {
  Matrix X;
  Vector y;
  std::optional<Matrix> gram;
  std::optional<Vector> xty;

  Index n() const { return X.rows(); }
  Index j() const { return X.cols(); }
};

/// K regression tasks sharing one design matrix: Y ~ X B, B in R^{J x K}.
struct MultiTaskProblem {
  Matrix X;
  Matrix Y;

  Index n() const { return X.rows(); }
  Index j() const { return X.cols(); }
  Index k() const { return Y.cols(); }
};

/// Weighted, possibly overlapping index-set groups over dim coefficients
/// (inputs for single-task problems, tasks for multi-task ones).
/// Indices are 0-based in memory; all file formats use 1-based indices.
struct GroupStructure {
  struct Group {
    std::vector<int> members;  // ascending, each in [0, dim)
    double weight = 1.0;       // > 0
  };
  int dim = 0;
  std::vector<Group> groups;
};

/// Weighted signed edges over dim coefficients. The fusion strength of an
/// edge is |r|; sign(r) decides whether the endpoint coefficients are pulled
/// toward equal or opposite values.
struct FusionGraph {
  struct Edge {
    int m = 0;       // m < l, both in [0, dim)
    int l = 0;
    double r = 0.0;  // nonzero
  };
  int dim = 0;
  std::vector<Edge> edges;
};

void validate_structure(const GroupStructure& groups);
void validate_structure(const FusionGraph& graph);

/// Settings shared by the smoothing solver and its multi-task variant.
///
/// Exactly one of mu/epsilon may be set. epsilon is converted through
/// mu = epsilon / (2 D) with D taken from the penalty map; supplying both is
/// an error rather than a silent preference.
struct SolverConfig {
  double lambda = 0.0;
  /// Echoed into results for provenance; the penalty map carries the
  /// operative structured-sparsity scaling.
  double gamma = 0.0;
  std::optional<double> mu = 1e-4;
  std::optional<double> epsilon;
  double tol = 1e-6;  ///< relative change of the original objective
  int max_iter = 20000;
  bool precompute_gram = false;
  bool record_trace = false;
  bool record_iterates = false;  ///< testing aid: keep every iterate
  double lipschitz_scale = 1.0;  ///< testing knob: mis-scale the step bound
};

void validate_config(const SolverConfig& config);

struct TracePoint {
  double objective;           ///< f, the original objective
  double smoothed_objective;  ///< f with the structured penalty smoothed
};

/// Output of every solver in this library. coef is J x K with K = 1 for
/// single-task solves. objective is always the original (unsmoothed) f;
/// smoothed_objective keeps the surrogate actually iterated on, so
/// objective - smoothed_objective lies in [0, mu * D].
struct SolveResult {
  Matrix coef;
  double objective = 0.0;
  double smoothed_objective = 0.0;
  int iterations = 0;
  bool converged = false;
  std::optional<std::vector<TracePoint>> trace;
  std::optional<std::vector<Matrix>> iterates;
  double wall_seconds = 0.0;

  Vector beta() const { return coef.col(0); }
};

/// Checks shapes and finiteness; with precompute set, fills gram = X'X and
/// xty = X'y. Non-finite entries are reported with their 1-based (row, col).
RegressionProblem validate_problem(const Matrix& X, const Vector& y,
                                   bool precompute);
MultiTaskProblem validate_problem_mt(const Matrix& X, const Matrix& Y);

/// Original objective: 0.5 ||y - X beta||^2 + Omega(beta) + lambda ||beta||_1
/// with Omega evaluated exactly through the penalty map.
double eval_objective(const RegressionProblem& problem,
                      const PenaltyLinearMap& map, const Vector& beta,
                      double lambda);

/// Multi-task objective: 0.5 ||Y - X B||_F^2 + Omega(B) + lambda ||B||_1
/// where map describes the per-coefficient-row structure over tasks.
double eval_objective_mt(const MultiTaskProblem& problem,
                         const PenaltyLinearMap& map, const Matrix& B,
                         double lambda);

}  // namespace sprox
