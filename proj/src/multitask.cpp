#include "sprox/multitask.hpp"

#include <chrono>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "sprox/power_iteration.hpp"
#include "sprox/solver.hpp"

namespace sprox {

MultiTaskMapInfo make_multitask_info(PenaltyLinearMap base, Index num_inputs) {
  if (num_inputs < 1)
    throw std::invalid_argument("make_multitask_info: num_inputs must be >= 1");
  MultiTaskMapInfo info;
  info.d_mt = static_cast<double>(num_inputs) * base.D;
  info.base = std::move(base);
  return info;
}

namespace detail {

// Exact and smoothed penalty of B, row by row, in coefficient-row order.
// Each row of B is a length-K vector pushed through the base map; the work
// per row mirrors the single-task penalty_pair so that K = 1 reproduces the
// single-task arithmetic.
std::pair<double, double> penalty_pair_mt(const PenaltyLinearMap& base,
                                          const Matrix& B, double mu) {
  if (base.rows() == 0) return {0.0, 0.0};
  double exact = 0.0;
  double smoothed = 0.0;
  for (Index j = 0; j < B.rows(); ++j) {
    const Vector cb = base.C * B.row(j).transpose();
    if (base.ball.kind == DualBall::Kind::Box) {
      exact += cb.lpNorm<1>();
    } else {
      Index offset = 0;
      for (int len : base.ball.block_lengths) {
        exact += cb.segment(offset, len).norm();
        offset += len;
      }
    }
    const Vector alpha = project_dual(cb / mu, base.ball);
    smoothed += alpha.dot(cb) - 0.5 * mu * alpha.squaredNorm();
  }
  return {exact, smoothed};
}

}  // namespace detail

MultiTaskPenaltyEval smoothed_eval_mt(const MultiTaskMapInfo& info,
                                      const Matrix& B, double mu) {
  if (B.cols() != info.base.dim())
    throw std::invalid_argument("smoothed_eval_mt: B columns != base map dim");
  if (!(mu > 0.0))
    throw std::invalid_argument("smoothed_eval_mt: mu must be positive");

  const Index J = B.rows();
  MultiTaskPenaltyEval eval;
  eval.gradient = Matrix::Zero(J, B.cols());
  eval.alpha = Matrix::Zero(info.base.rows(), J);
  if (info.base.rows() == 0) return eval;

  for (Index j = 0; j < J; ++j) {
    const Vector cb = info.base.C * B.row(j).transpose();
    const Vector alpha = project_dual(cb / mu, info.base.ball);
    eval.value += alpha.dot(cb) - 0.5 * mu * alpha.squaredNorm();
    eval.gradient.row(j) = (info.base.C.transpose() * alpha).transpose();
    eval.alpha.col(j) = alpha;
  }
  return eval;
}

SolveResult spg_solve_mt(const MultiTaskProblem& problem,
                         const MultiTaskMapInfo& info,
                         const SolverConfig& config,
                         const std::optional<Matrix>& warm_start) {
  validate_config(config);
  const Index J = problem.j();
  const Index K = problem.k();
  if (info.base.dim() != K)
    throw std::invalid_argument("spg_solve_mt: base map dim != K");
  if (warm_start && (warm_start->rows() != J || warm_start->cols() != K))
    throw std::invalid_argument("spg_solve_mt: warm start must be J x K");

  const double mu =
      config.mu ? *config.mu : mu_from_epsilon(*config.epsilon, info.d_mt);

  const Matrix& X = problem.X;
  const Matrix& Y = problem.Y;
  std::optional<Matrix> gram;
  std::optional<Matrix> xty;
  if (config.precompute_gram) {
    gram = X.transpose() * X;
    xty = X.transpose() * Y;
  }

  double loss_l;
  if (gram) {
    const Matrix& G = *gram;
    loss_l = power_iteration_max_eigenvalue(
        [&G](const Vector& v) -> Vector { return G * v; }, J, 1e-8);
  } else {
    loss_l = power_iteration_max_eigenvalue(
        [&X](const Vector& v) -> Vector { return X.transpose() * (X * v); },
        J, 1e-8);
  }
  double L = loss_l + info.base.norm.value * info.base.norm.value / mu;
  L *= config.lipschitz_scale;
  if (!(L > 0.0)) L = 1.0;

  // Column-by-column loss terms so that a K = 1 solve runs the same
  // vector kernels as the single-task solver.
  auto loss_grad_at = [&](const Matrix& W) -> Matrix {
    Matrix grad(J, K);
    for (Index k = 0; k < K; ++k) {
      if (gram) {
        grad.col(k) = *gram * W.col(k) - xty->col(k);
      } else {
        grad.col(k) = X.transpose() * (X * W.col(k) - Y.col(k));
      }
    }
    return grad;
  };
  auto loss_at = [&](const Matrix& W) -> double {
    double total = 0.0;
    for (Index k = 0; k < K; ++k) {
      if (gram) {
        total += 0.5 * W.col(k).dot(*gram * W.col(k)) -
                 W.col(k).dot(xty->col(k)) + 0.5 * Y.col(k).squaredNorm();
      } else {
        total += 0.5 * (Y.col(k) - X * W.col(k)).squaredNorm();
      }
    }
    return total;
  };
  auto objective_pair = [&](const Matrix& B) -> std::pair<double, double> {
    const auto [exact, smoothed] = detail::penalty_pair_mt(info.base, B, mu);
    const double base = loss_at(B) + config.lambda * B.cwiseAbs().sum();
    return {base + exact, base + smoothed};
  };
  auto prox = [&](const Matrix& V, double t) -> Matrix {
    Matrix out(V.rows(), V.cols());
    for (Index c = 0; c < V.cols(); ++c) {
      for (Index r = 0; r < V.rows(); ++r) {
        out(r, c) = soft_threshold(V(r, c), t);
      }
    }
    return out;
  };

  SolveResult result;
  result.trace.emplace();
  if (config.record_iterates) result.iterates.emplace();

  Matrix B = warm_start ? *warm_start : Matrix::Zero(J, K);
  Matrix W = B;
  double theta = 1.0;
  double f_prev = objective_pair(B).first;
  const double f_init = f_prev;

  const auto started = std::chrono::steady_clock::now();
  for (int t = 0; t < config.max_iter; ++t) {
    Matrix grad = loss_grad_at(W);
    if (info.base.rows() != 0) {
      for (Index j = 0; j < J; ++j) {
        const Vector cb = info.base.C * W.row(j).transpose();
        const Vector alpha = project_dual(cb / mu, info.base.ball);
        grad.row(j) += (info.base.C.transpose() * alpha).transpose();
      }
    }
    const Matrix B_next = prox(W - grad / L, config.lambda / L);
    const double theta_next = 2.0 / (t + 3);
    W = B_next + ((1.0 - theta) / theta) * theta_next * (B_next - B);
    B = B_next;
    theta = theta_next;

    const auto [f_new, ftilde_new] = objective_pair(B);
    if (!std::isfinite(f_new)) {
      std::ostringstream os;
      os << "spg_solve_mt: non-finite objective at iteration " << t + 1;
      throw std::runtime_error(os.str());
    }
    if (f_new > 10.0 * f_init + 1e-9) {
      std::ostringstream os;
      os << "spg_solve_mt: objective rose above ten times its initial value "
            "at iteration "
         << t + 1 << "; the step bound appears to be mis-scaled";
      throw std::runtime_error(os.str());
    }
    result.trace->push_back({f_new, ftilde_new});
    if (config.record_iterates) result.iterates->push_back(B);
    ++result.iterations;
    if (std::abs(f_new - f_prev) <
        config.tol * std::max(std::abs(f_prev), 1e-12)) {
      result.converged = true;
      f_prev = f_new;
      break;
    }
    f_prev = f_new;
  }
  const auto stopped = std::chrono::steady_clock::now();
  result.wall_seconds =
      std::chrono::duration<double>(stopped - started).count();

  result.coef = B;
  const auto [exact, smoothed] = detail::penalty_pair_mt(info.base, B, mu);
  double base = config.lambda * B.cwiseAbs().sum();
  for (Index k = 0; k < K; ++k) {
    base += 0.5 * (Y.col(k) - X * B.col(k)).squaredNorm();
  }
  result.objective = base + exact;
  result.smoothed_objective = base + smoothed;
  if (!config.record_trace) result.trace.reset();
  return result;
}

}  // namespace sprox
