#include "sprox/solver.hpp"

#include <chrono>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "sprox/power_iteration.hpp"

namespace sprox {

double mu_from_epsilon(double epsilon, double D) {
  if (!(epsilon > 0.0))
    throw std::invalid_argument("mu_from_epsilon: epsilon must be positive");
  if (!(D > 0.0))
    throw std::invalid_argument(
        "mu_from_epsilon: D = 0 means there is no structured penalty to "
        "smooth; set mu explicitly instead of epsilon");
  return epsilon / (2.0 * D);
}

double soft_threshold(double v, double t) {
  if (v > t) return v - t;
  if (v < -t) return v + t;
  return 0.0;
}

Vector soft_threshold(const Vector& v, double t) {
  if (!(t >= 0.0))
    throw std::invalid_argument("soft_threshold: t must be nonnegative");
  Vector out(v.size());
  for (Index i = 0; i < v.size(); ++i) out[i] = soft_threshold(v[i], t);
  return out;
}

double loss_lipschitz(const RegressionProblem& problem) {
  const Index j = problem.j();
  std::function<Vector(const Vector&)> apply;
  if (problem.gram) {
    const Matrix& G = *problem.gram;
    apply = [&G](const Vector& v) -> Vector { return G * v; };
  } else {
    const Matrix& X = problem.X;
    apply = [&X](const Vector& v) -> Vector {
      return X.transpose() * (X * v);
    };
  }
  return power_iteration_max_eigenvalue(apply, j, 1e-8);
}

namespace {

// One relative-change stopping test shared by all solvers in the library.
bool objective_converged(double f_prev, double f_new, double tol) {
  return std::abs(f_new - f_prev) < tol * std::max(std::abs(f_prev), 1e-12);
}

}  // namespace

SolveResult spg_solve(const RegressionProblem& problem,
                      const PenaltyLinearMap& map, const SolverConfig& config,
                      const std::optional<Vector>& warm_start) {
  validate_config(config);
  const Index J = problem.j();
  if (map.dim() != J)
    throw std::invalid_argument("spg_solve: penalty map dim != J");
  if (warm_start && warm_start->size() != J)
    throw std::invalid_argument("spg_solve: warm start length != J");

  const double mu =
      config.mu ? *config.mu : mu_from_epsilon(*config.epsilon, map.D);

  // Local Gram cache when the config asks for it and the problem does not
  // already carry one.
  const RegressionProblem* prob = &problem;
  RegressionProblem owned;
  if (config.precompute_gram && !problem.gram) {
    owned = problem;
    owned.gram = problem.X.transpose() * problem.X;
    owned.xty = problem.X.transpose() * problem.y;
    prob = &owned;
  }
  const bool use_gram = prob->gram.has_value();
  const Matrix* G = use_gram ? &*prob->gram : nullptr;
  const Vector* q = use_gram ? &*prob->xty : nullptr;
  const double half_ysq = 0.5 * prob->y.squaredNorm();

  double L = loss_lipschitz(*prob) + map.norm.value * map.norm.value / mu;
  L *= config.lipschitz_scale;
  if (!(L > 0.0)) L = 1.0;  // all-zero design with no penalty

  // Squared-error part of the objective, via the Gram cache when present.
  auto loss_at = [&](const Vector& b) -> double {
    if (use_gram) return 0.5 * b.dot(*G * b) - b.dot(*q) + half_ysq;
    return 0.5 * (prob->y - prob->X * b).squaredNorm();
  };
  auto loss_grad_at = [&](const Vector& b) -> Vector {
    if (use_gram) return *G * b - *q;
    return prob->X.transpose() * (prob->X * b - prob->y);
  };
  auto objective_pair = [&](const Vector& b) -> std::pair<double, double> {
    const auto [exact, smoothed] = detail::penalty_pair(map, b, mu);
    const double base = loss_at(b) + config.lambda * b.lpNorm<1>();
    return {base + exact, base + smoothed};
  };

  SolveResult result;
  result.trace.emplace();
  if (config.record_iterates) result.iterates.emplace();

  Vector beta = warm_start ? *warm_start : Vector::Zero(J);
  Vector w = beta;
  double theta = 1.0;
  double f_prev = objective_pair(beta).first;
  const double f_init = f_prev;

  const auto started = std::chrono::steady_clock::now();
  int t = 0;
  for (; t < config.max_iter; ++t) {
    const Vector grad = loss_grad_at(w) + smoothed_eval(map, w, mu).gradient;
    const Vector beta_next =
        soft_threshold(Vector(w - grad / L), config.lambda / L);
    const double theta_next = 2.0 / (t + 3);
    w = beta_next + ((1.0 - theta) / theta) * theta_next * (beta_next - beta);
    beta = beta_next;
    theta = theta_next;

    const auto [f_new, ftilde_new] = objective_pair(beta);
    if (!std::isfinite(f_new)) {
      std::ostringstream os;
      os << "spg_solve: non-finite objective at iteration " << t + 1;
      throw std::runtime_error(os.str());
    }
    if (f_new > 10.0 * f_init + 1e-9) {
      std::ostringstream os;
      os << "spg_solve: objective rose above ten times its initial value at "
            "iteration "
         << t + 1 << "; the step bound appears to be mis-scaled";
      throw std::runtime_error(os.str());
    }
    result.trace->push_back({f_new, ftilde_new});
    if (config.record_iterates) result.iterates->push_back(beta);
    ++result.iterations;
    if (objective_converged(f_prev, f_new, config.tol)) {
      result.converged = true;
      f_prev = f_new;
      break;
    }
    f_prev = f_new;
  }
  const auto stopped = std::chrono::steady_clock::now();
  result.wall_seconds =
      std::chrono::duration<double>(stopped - started).count();

  // Final objectives always come from the full X residual so that a Gram
  // round-off cannot leak into reported values.
  result.coef = beta;
  const auto [exact, smoothed] = detail::penalty_pair(map, beta, mu);
  const double base = 0.5 * (problem.y - problem.X * beta).squaredNorm() +
                      config.lambda * beta.lpNorm<1>();
  result.objective = base + exact;
  result.smoothed_objective = base + smoothed;
  if (!config.record_trace) result.trace.reset();
  return result;
}

std::vector<SolveResult> solve_path(const RegressionProblem& problem,
                                    const PenaltyLinearMap& map,
                                    const std::vector<SolverConfig>& configs) {
  std::vector<SolveResult> results;
  results.reserve(configs.size());
  std::optional<Vector> warm;
  for (const auto& config : configs) {
    results.push_back(spg_solve(problem, map, config, warm));
    warm = results.back().beta();
  }
  return results;
}

}  // namespace sprox
