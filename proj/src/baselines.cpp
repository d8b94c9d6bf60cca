#include "sprox/baselines.hpp"

#include <chrono>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "sprox/solver.hpp"

namespace sprox {

double default_step_scale(Index n, Index j, Index k) {
  if (n < 1 || j < 1 || k < 1)
    throw std::invalid_argument("default_step_scale: sizes must be >= 1");
  return 0.1 / std::sqrt(static_cast<double>(n) * static_cast<double>(j) *
                         static_cast<double>(k));
}

Vector penalty_subgradient(const PenaltyLinearMap& map, const Vector& beta) {
  if (beta.size() != map.dim())
    throw std::invalid_argument("penalty_subgradient: beta length != map dim");
  if (map.rows() == 0) return Vector::Zero(map.dim());

  const Vector cb = map.C * beta;
  Vector s(cb.size());
  if (map.ball.kind == DualBall::Kind::Box) {
    for (Index i = 0; i < cb.size(); ++i) {
      s[i] = cb[i] > 0.0 ? 1.0 : (cb[i] < 0.0 ? -1.0 : 0.0);
    }
  } else {
    Index offset = 0;
    for (int len : map.ball.block_lengths) {
      const double norm = cb.segment(offset, len).norm();
      if (norm > 0.0) {
        s.segment(offset, len) = cb.segment(offset, len) / norm;
      } else {
        s.segment(offset, len).setZero();
      }
      offset += len;
    }
  }
  return map.C.transpose() * s;
}

namespace {

struct LossOps {
  std::optional<Matrix> gram;
  std::optional<Vector> xty;
  const RegressionProblem* problem;
  double half_ysq;

  explicit LossOps(const RegressionProblem& p, bool precompute) : problem(&p) {
    if (precompute && !p.gram) {
      gram = p.X.transpose() * p.X;
      xty = p.X.transpose() * p.y;
    }
    half_ysq = 0.5 * p.y.squaredNorm();
  }

  const Matrix* G() const {
    if (gram) return &*gram;
    if (problem->gram) return &*problem->gram;
    return nullptr;
  }
  const Vector* q() const {
    if (xty) return &*xty;
    if (problem->xty) return &*problem->xty;
    return nullptr;
  }

  double value(const Vector& b) const {
    if (const Matrix* g = G())
      return 0.5 * b.dot(*g * b) - b.dot(*q()) + half_ysq;
    return 0.5 * (problem->y - problem->X * b).squaredNorm();
  }
  Vector grad(const Vector& b) const {
    if (const Matrix* g = G()) return *g * b - *q();
    return problem->X.transpose() * (problem->X * b - problem->y);
  }
};

void validate_baseline(const BaselineConfig& config) {
  if (!(config.step_c >= 0.0))
    throw std::invalid_argument("baseline config: step_c must be >= 0");
  if (!(config.lambda >= 0.0))
    throw std::invalid_argument("baseline config: lambda must be >= 0");
  if (!(config.tol > 0.0))
    throw std::invalid_argument("baseline config: tol must be positive");
  if (config.max_iter < 1)
    throw std::invalid_argument("baseline config: max_iter must be >= 1");
}

// Shared driver: step() maps (beta, eta) to the next iterate. Both baselines
// report the best iterate seen because neither is a descent method.
template <typename Step>
SolveResult run_baseline(const RegressionProblem& problem,
                         const PenaltyLinearMap& map,
                         const BaselineConfig& config, const char* name,
                         const Step& step) {
  validate_baseline(config);
  if (map.dim() != problem.j())
    throw std::invalid_argument(std::string(name) +
                                ": penalty map dim != J");

  const double c = config.step_c > 0.0
                       ? config.step_c
                       : default_step_scale(problem.n(), problem.j());
  LossOps loss(problem, config.precompute_gram);

  auto objective_at = [&](const Vector& b) -> double {
    return loss.value(b) + exact_penalty(map, b) +
           config.lambda * b.lpNorm<1>();
  };

  SolveResult result;
  result.trace.emplace();
  Vector beta = Vector::Zero(problem.j());
  double f_prev = objective_at(beta);
  Vector best_beta = beta;
  double best_f = f_prev;

  const auto started = std::chrono::steady_clock::now();
  for (int t = 1; t <= config.max_iter; ++t) {
    const double eta = c / std::sqrt(static_cast<double>(t));
    beta = step(beta, eta, loss);
    const double f_new = objective_at(beta);
    if (!std::isfinite(f_new)) {
      std::ostringstream os;
      os << name << ": non-finite objective at iteration " << t;
      throw std::runtime_error(os.str());
    }
    result.trace->push_back({f_new, f_new});
    ++result.iterations;
    if (f_new < best_f) {
      best_f = f_new;
      best_beta = beta;
    }
    if (std::abs(f_new - f_prev) <
        config.tol * std::max(std::abs(f_prev), 1e-12)) {
      result.converged = true;
      break;
    }
    f_prev = f_new;
  }
  const auto stopped = std::chrono::steady_clock::now();
  result.wall_seconds =
      std::chrono::duration<double>(stopped - started).count();

  result.coef = best_beta;
  result.objective = 0.5 * (problem.y - problem.X * best_beta).squaredNorm() +
                     exact_penalty(map, best_beta) +
                     config.lambda * best_beta.lpNorm<1>();
  result.smoothed_objective = result.objective;  // nothing is smoothed here
  if (!config.record_trace) result.trace.reset();
  return result;
}

}  // namespace

SolveResult fobos_solve(const RegressionProblem& problem,
                        const PenaltyLinearMap& map,
                        const BaselineConfig& config) {
  auto step = [&](const Vector& beta, double eta,
                  const LossOps& loss) -> Vector {
    const Vector g = loss.grad(beta) + penalty_subgradient(map, beta);
    return soft_threshold(Vector(beta - eta * g), eta * config.lambda);
  };
  return run_baseline(problem, map, config, "fobos_solve", step);
}

SolveResult subgradient_solve(const RegressionProblem& problem,
                              const PenaltyLinearMap& map,
                              const BaselineConfig& config) {
  auto step = [&](const Vector& beta, double eta,
                  const LossOps& loss) -> Vector {
    Vector g = loss.grad(beta) + penalty_subgradient(map, beta);
    for (Index i = 0; i < beta.size(); ++i) {
      g[i] += config.lambda *
              (beta[i] > 0.0 ? 1.0 : (beta[i] < 0.0 ? -1.0 : 0.0));
    }
    return beta - eta * g;
  };
  return run_baseline(problem, map, config, "subgradient_solve", step);
}

}  // namespace sprox
