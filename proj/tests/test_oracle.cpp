#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "sprox/baselines.hpp"
#include "sprox/multitask.hpp"
#include "sprox/oracle.hpp"
#include "sprox/solver.hpp"

using namespace sprox;
using namespace testhelp;

TEST_SUITE("oracle") {

TEST_CASE("central differences are exact on quadratics and constants") {
  Vector beta(2);
  beta << 1.0, 2.0;
  const Vector grad = fd_gradient(
      [](const Vector& b) { return 0.5 * b.squaredNorm(); }, beta, 1e-5);
  CHECK(std::abs(grad[0] - 1.0) <= 1e-8);
  CHECK(std::abs(grad[1] - 2.0) <= 1e-8);

  const Vector flat = fd_gradient([](const Vector&) { return 42.0; }, beta,
                                  1e-5);
  CHECK(flat.norm() == 0.0);
}

TEST_CASE("finite differences confirm the smoothed penalty gradient") {
  StdRng rng(401);
  const PenaltyLinearMap map = build_group_map(six_input_groups(), 0.8);
  const Vector beta = random_vector(rng, 6);
  const double mu = 1e-2;
  const SmoothedPenaltyEval eval = smoothed_eval(map, beta, mu);
  const Vector fd = fd_gradient(
      [&](const Vector& b) { return smoothed_eval(map, b, mu).value; }, beta,
      1e-5);
  CHECK((fd - eval.gradient).norm() / std::max(1.0, eval.gradient.norm()) <=
        1e-5);
}

TEST_CASE("reference solve matches normal equations without regularization") {
  StdRng rng(411);
  const Matrix X = random_matrix(rng, 20, 5);
  const Vector y = random_vector(rng, 20);
  const RegressionProblem problem = validate_problem(X, y, false);
  const ReferenceSolution ref =
      reference_solve(problem, empty_map(5), 0.0, 100000);
  const double closed = loop_loss(X, y, normal_equations(X, y));
  CHECK(ref.objective == doctest::Approx(closed).epsilon(1e-6));
}

TEST_CASE("reference solve recovers the orthogonal-design lasso") {
  StdRng rng(421);
  const Matrix X = Matrix::Identity(6, 6);
  const Vector y = random_vector(rng, 6) * 2.0;
  const RegressionProblem problem = validate_problem(X, y, false);
  const double lambda = 0.7;
  const ReferenceSolution ref =
      reference_solve(problem, empty_map(6), lambda, 100000);
  double closed_objective = 0.0;
  for (Index j = 0; j < 6; ++j) {
    const double bj = soft_threshold(y[j], lambda);
    closed_objective += 0.5 * (y[j] - bj) * (y[j] - bj) + lambda * std::abs(bj);
    CHECK(std::abs(ref.beta[j] - bj) <= 1e-4);
  }
  CHECK(ref.objective == doctest::Approx(closed_objective).epsilon(1e-8));
}

TEST_CASE("the reference lower-bounds both production solvers") {
  const RegressionProblem problem = small_problem(431, 30, 10);
  FusionGraph graph;
  graph.dim = 10;
  for (int j = 0; j + 1 < 10; ++j) graph.edges.push_back({j, j + 1, 0.8});
  const double gamma = 0.5;
  const double lambda = 0.3;
  const PenaltyLinearMap map = build_fusion_map(graph, gamma);
  const ReferenceSolution ref = reference_solve(problem, map, lambda, 200000);

  SolverConfig config;
  config.lambda = lambda;
  config.gamma = gamma;
  config.mu = 1e-4;
  const SolveResult spg = spg_solve(problem, map, config);
  BaselineConfig baseline;
  baseline.lambda = lambda;
  baseline.gamma = gamma;
  baseline.max_iter = 5000;
  const SolveResult fobos = fobos_solve(problem, map, baseline);
  CHECK(ref.objective <= spg.objective + 1e-9);
  CHECK(ref.objective <= fobos.objective + 1e-9);
}

TEST_CASE("reference solve is deterministic") {
  const PenaltyLinearMap map = build_group_map(six_input_groups(), 0.6);
  const RegressionProblem six = small_problem(442, 25, 6);
  const ReferenceSolution a = reference_solve(six, map, 0.4, 100000);
  const ReferenceSolution b = reference_solve(six, map, 0.4, 100000);
  CHECK(a.objective == b.objective);
  CHECK((a.beta - b.beta).norm() == 0.0);
}

TEST_CASE("grid prox brackets the closed form") {
  const long resolution = 1000000;
  const double step = [](double v, double t) {
    return 2.0 * (std::abs(v) + t) / 1e6;
  }(2.0, 0.5);
  CHECK(std::abs(prox_1d_grid(2.0, 0.5, resolution) - 1.5) <= step);
  CHECK(std::abs(prox_1d_grid(0.3, 0.5, resolution)) <=
        2.0 * (0.3 + 0.5) / 1e6);
  CHECK(std::abs(prox_1d_grid(-1.2, 0.0, resolution) - (-1.2)) <=
        2.0 * 1.2 / 1e6);
}

TEST_CASE("vectorized problems preserve loss and penalty values") {
  StdRng rng(451);
  const Matrix X = random_matrix(rng, 12, 4);
  const Matrix Y = random_matrix(rng, 12, 3);
  const MultiTaskProblem problem = validate_problem_mt(X, Y);
  const Matrix B = random_matrix(rng, 4, 3);
  const RegressionProblem flat = vectorize_problem(problem);
  REQUIRE(flat.n() == 12 * 3);
  REQUIRE(flat.j() == 4 * 3);
  const Vector beta = Eigen::Map<const Vector>(B.data(), B.size());

  FusionGraph tasks;
  tasks.dim = 3;
  tasks.edges.push_back({0, 1, 0.9});
  tasks.edges.push_back({1, 2, -0.4});
  const double gamma = 0.7;
  const double lambda = 0.3;
  const FusionGraph flat_graph = vectorize_fusion_graph(tasks, 4);
  CHECK(flat_graph.dim == 12);
  CHECK(flat_graph.edges.size() == tasks.edges.size() * 4);
  const double mt = eval_objective_mt(
      problem, build_fusion_map(tasks, gamma), B, lambda);
  const double st = eval_objective(
      flat, build_fusion_map(flat_graph, gamma), beta, lambda);
  CHECK(mt == doctest::Approx(st).epsilon(1e-12));

  GroupStructure tasks_groups;
  tasks_groups.dim = 3;
  tasks_groups.groups.push_back({{0, 1}, 1.0});
  tasks_groups.groups.push_back({{1, 2}, 0.5});
  const GroupStructure flat_groups =
      vectorize_group_structure(tasks_groups, 4);
  CHECK(flat_groups.dim == 12);
  CHECK(flat_groups.groups.size() == tasks_groups.groups.size() * 4);
  const double mt_g = eval_objective_mt(
      problem, build_group_map(tasks_groups, gamma), B, lambda);
  const double st_g = eval_objective(
      flat, build_group_map(flat_groups, gamma), beta, lambda);
  CHECK(mt_g == doctest::Approx(st_g).epsilon(1e-12));
}

}  // TEST_SUITE
