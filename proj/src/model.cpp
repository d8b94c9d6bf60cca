#include "sprox/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "sprox/penalty.hpp"

namespace sprox {

namespace {

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

// Reports the first non-finite entry with 1-based indices.
void check_finite(const Matrix& m, const char* name) {
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (!std::isfinite(m(i, j))) {
        std::ostringstream os;
        os << name << " has a non-finite entry at (" << i + 1 << ", " << j + 1
           << ")";
        throw std::invalid_argument(os.str());
      }
    }
  }
}

}  // namespace

void validate_structure(const GroupStructure& groups) {
  require(groups.dim >= 1, "group structure: dim must be >= 1");
  for (std::size_t g = 0; g < groups.groups.size(); ++g) {
    const auto& grp = groups.groups[g];
    std::ostringstream where;
    where << "group " << g + 1;
    require(!grp.members.empty(), where.str() + " is empty");
    require(grp.weight > 0.0 && std::isfinite(grp.weight),
            where.str() + " has a non-positive weight");
    int prev = -1;
    for (int m : grp.members) {
      require(m >= 0 && m < groups.dim,
              where.str() + " has an out-of-range member index");
      require(m > prev, where.str() + " members must be strictly ascending");
      prev = m;
    }
  }
}

void validate_structure(const FusionGraph& graph) {
  require(graph.dim >= 1, "fusion graph: dim must be >= 1");
  std::vector<std::pair<int, int>> seen;
  for (std::size_t e = 0; e < graph.edges.size(); ++e) {
    const auto& edge = graph.edges[e];
    std::ostringstream where;
    where << "edge " << e + 1;
    require(edge.m >= 0 && edge.l >= 0 && edge.m < graph.dim &&
                edge.l < graph.dim,
            where.str() + " has an out-of-range endpoint");
    require(edge.m < edge.l, where.str() + " must satisfy m < l (no self-loops)");
    require(edge.r != 0.0 && std::isfinite(edge.r),
            where.str() + " must carry a nonzero finite weight");
    seen.emplace_back(edge.m, edge.l);
  }
  std::sort(seen.begin(), seen.end());
  require(std::adjacent_find(seen.begin(), seen.end()) == seen.end(),
          "fusion graph: duplicate edge");
}

void validate_config(const SolverConfig& config) {
  require(config.lambda >= 0.0 && std::isfinite(config.lambda),
          "config: lambda must be nonnegative");
  require(config.gamma >= 0.0 && std::isfinite(config.gamma),
          "config: gamma must be nonnegative");
  require(config.mu.has_value() || config.epsilon.has_value(),
          "config: one of mu/epsilon must be set");
  require(!(config.mu.has_value() && config.epsilon.has_value()),
          "config: mu and epsilon are mutually exclusive; set exactly one");
  if (config.mu) require(*config.mu > 0.0, "config: mu must be positive");
  if (config.epsilon)
    require(*config.epsilon > 0.0, "config: epsilon must be positive");
  require(config.tol > 0.0, "config: tol must be positive");
  require(config.max_iter >= 1, "config: max_iter must be >= 1");
  require(config.lipschitz_scale > 0.0,
          "config: lipschitz_scale must be positive");
}

RegressionProblem validate_problem(const Matrix& X, const Vector& y,
                                   bool precompute) {
  if (X.rows() != y.size()) {
    std::ostringstream os;
    os << "dimension mismatch: X has " << X.rows() << " rows but y has "
       << y.size() << " entries";
    throw std::invalid_argument(os.str());
  }
  require(X.rows() >= 1 && X.cols() >= 1, "X must be at least 1 x 1");
  check_finite(X, "X");
  check_finite(y, "y");

  RegressionProblem problem{X, y, std::nullopt, std::nullopt};
  if (precompute) {
    problem.gram = X.transpose() * X;
    problem.xty = X.transpose() * y;
  }
  return problem;
}

MultiTaskProblem validate_problem_mt(const Matrix& X, const Matrix& Y) {
  if (X.rows() != Y.rows()) {
    std::ostringstream os;
    os << "dimension mismatch: X has " << X.rows() << " rows but Y has "
       << Y.rows();
    throw std::invalid_argument(os.str());
  }
  require(X.rows() >= 1 && X.cols() >= 1, "X must be at least 1 x 1");
  require(Y.cols() >= 1, "Y must have at least one task");
  check_finite(X, "X");
  check_finite(Y, "Y");
  return MultiTaskProblem{X, Y};
}

double eval_objective(const RegressionProblem& problem,
                      const PenaltyLinearMap& map, const Vector& beta,
                      double lambda) {
  if (beta.size() != problem.j())
    throw std::invalid_argument("eval_objective: beta length != J");
  if (map.dim() != problem.j())
    throw std::invalid_argument("eval_objective: penalty map dim != J");
  const double fit = 0.5 * (problem.y - problem.X * beta).squaredNorm();
  return fit + exact_penalty(map, beta) + lambda * beta.lpNorm<1>();
}

double eval_objective_mt(const MultiTaskProblem& problem,
                         const PenaltyLinearMap& map, const Matrix& B,
                         double lambda) {
  if (B.rows() != problem.j() || B.cols() != problem.k())
    throw std::invalid_argument("eval_objective_mt: B must be J x K");
  if (map.dim() != problem.k())
    throw std::invalid_argument("eval_objective_mt: penalty map dim != K");
  const double fit = 0.5 * (problem.Y - problem.X * B).squaredNorm();
  return fit + exact_penalty_mt(map, B) + lambda * B.cwiseAbs().sum();
}

}  // namespace sprox
