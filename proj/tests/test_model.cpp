#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "helpers.hpp"
#include "sprox/model.hpp"
#include "sprox/penalty.hpp"

using namespace sprox;
using namespace testhelp;

TEST_SUITE("model") {

TEST_CASE("validate_problem precomputes gram and xty on the identity") {
  const Matrix X = Matrix::Identity(2, 2);
  Vector y(2);
  y << 1.0, 1.0;
  const RegressionProblem problem = validate_problem(X, y, true);
  REQUIRE(problem.gram.has_value());
  REQUIRE(problem.xty.has_value());
  CHECK((*problem.gram - Matrix::Identity(2, 2)).norm() == 0.0);
  CHECK((*problem.xty - y).norm() == 0.0);
  CHECK(problem.n() == 2);
  CHECK(problem.j() == 2);
}

TEST_CASE("validate_problem reports non-finite entries with 1-based indices") {
  Matrix X = Matrix::Ones(3, 2);
  X(1, 0) = std::nan("");
  const Vector y = Vector::Zero(3);
  CHECK_THROWS_WITH_AS(validate_problem(X, y, false),
                       doctest::Contains("(2, 1)"), std::invalid_argument);
}

TEST_CASE("validate_problem rejects shape mismatches") {
  const Matrix X = Matrix::Ones(3, 2);
  const Vector y = Vector::Zero(4);
  CHECK_THROWS_AS(validate_problem(X, y, false), std::invalid_argument);
}

TEST_CASE("precomputed gram matches an independent recomputation") {
  StdRng rng(11);
  const Matrix X = random_matrix(rng, 5, 3);
  const Vector y = random_vector(rng, 5);
  const RegressionProblem problem = validate_problem(X, y, true);
  Matrix gram = Matrix::Zero(3, 3);
  for (Index a = 0; a < 3; ++a)
    for (Index b = 0; b < 3; ++b)
      for (Index i = 0; i < 5; ++i) gram(a, b) += X(i, a) * X(i, b);
  CHECK((*problem.gram - gram).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("validate_problem_mt rejects row mismatches and empty tasks") {
  const Matrix X = Matrix::Ones(4, 2);
  CHECK_THROWS_AS(validate_problem_mt(X, Matrix::Ones(3, 2)),
                  std::invalid_argument);
  CHECK_THROWS_AS(validate_problem_mt(X, Matrix::Ones(4, 0)),
                  std::invalid_argument);
  const MultiTaskProblem ok = validate_problem_mt(X, Matrix::Ones(4, 3));
  CHECK(ok.k() == 3);
}

TEST_CASE("group structure validation rejects malformed groups") {
  GroupStructure groups;
  groups.dim = 3;
  groups.groups.push_back({{0, 2}, 1.0});
  CHECK_NOTHROW(validate_structure(groups));

  GroupStructure empty_member = groups;
  empty_member.groups.push_back({{}, 1.0});
  CHECK_THROWS_WITH_AS(validate_structure(empty_member),
                       doctest::Contains("empty"), std::invalid_argument);

  GroupStructure out_of_range = groups;
  out_of_range.groups.push_back({{3}, 1.0});
  CHECK_THROWS_WITH_AS(validate_structure(out_of_range),
                       doctest::Contains("out-of-range"),
                       std::invalid_argument);

  GroupStructure bad_weight = groups;
  bad_weight.groups.push_back({{1}, 0.0});
  CHECK_THROWS_WITH_AS(validate_structure(bad_weight),
                       doctest::Contains("weight"), std::invalid_argument);

  GroupStructure unsorted = groups;
  unsorted.groups.push_back({{2, 1}, 1.0});
  CHECK_THROWS_WITH_AS(validate_structure(unsorted),
                       doctest::Contains("ascending"), std::invalid_argument);
}

TEST_CASE("fusion graph validation rejects malformed edges") {
  FusionGraph graph;
  graph.dim = 4;
  graph.edges.push_back({0, 2, 0.5});
  CHECK_NOTHROW(validate_structure(graph));

  FusionGraph self_loop = graph;
  self_loop.edges.push_back({1, 1, 0.5});
  CHECK_THROWS_WITH_AS(validate_structure(self_loop),
                       doctest::Contains("m < l"), std::invalid_argument);

  FusionGraph zero_weight = graph;
  zero_weight.edges.push_back({1, 3, 0.0});
  CHECK_THROWS_WITH_AS(validate_structure(zero_weight),
                       doctest::Contains("nonzero"), std::invalid_argument);

  FusionGraph out_of_range = graph;
  out_of_range.edges.push_back({1, 4, 0.5});
  CHECK_THROWS_AS(validate_structure(out_of_range), std::invalid_argument);

  FusionGraph duplicate = graph;
  duplicate.edges.push_back({0, 2, -0.3});
  CHECK_THROWS_WITH_AS(validate_structure(duplicate),
                       doctest::Contains("duplicate"), std::invalid_argument);
}

TEST_CASE("config validation enforces the mu/epsilon contract") {
  SolverConfig config;
  config.lambda = 1.0;
  CHECK_NOTHROW(validate_config(config));

  SolverConfig both = config;
  both.epsilon = 0.1;
  CHECK_THROWS_WITH_AS(validate_config(both),
                       doctest::Contains("mutually exclusive"),
                       std::invalid_argument);

  SolverConfig neither = config;
  neither.mu.reset();
  CHECK_THROWS_AS(validate_config(neither), std::invalid_argument);

  SolverConfig negative_lambda = config;
  negative_lambda.lambda = -1.0;
  CHECK_THROWS_AS(validate_config(negative_lambda), std::invalid_argument);

  SolverConfig bad_tol = config;
  bad_tol.tol = 0.0;
  CHECK_THROWS_AS(validate_config(bad_tol), std::invalid_argument);
}

TEST_CASE("objective at zero is half the squared response norm") {
  StdRng rng(21);
  const Matrix X = random_matrix(rng, 6, 4);
  const Vector y = random_vector(rng, 6);
  const RegressionProblem problem = validate_problem(X, y, false);
  const double at_zero =
      eval_objective(problem, empty_map(4), Vector::Zero(4), 0.7);
  CHECK(at_zero == doctest::Approx(0.5 * y.squaredNorm()).epsilon(1e-14));
}

TEST_CASE("objective hand example: identity fit plus l1") {
  const Matrix X = Matrix::Identity(2, 2);
  const Vector y = Vector::Zero(2);
  Vector beta(2);
  beta << 1.0, -1.0;
  const RegressionProblem problem = validate_problem(X, y, false);
  CHECK(eval_objective(problem, empty_map(2), beta, 1.0) ==
        doctest::Approx(3.0).epsilon(1e-14));
}

TEST_CASE("objective matches a scalar-loop evaluator on random instances") {
  StdRng rng(31);
  const GroupStructure groups = six_input_groups();
  const FusionGraph graph = five_input_graph();
  for (int trial = 0; trial < 10; ++trial) {
    const double gamma = 0.2 + rng.uniform();
    const double lambda = 0.1 + rng.uniform();
    {
      const Matrix X = random_matrix(rng, 8, 6);
      const Vector y = random_vector(rng, 8);
      const Vector beta = random_vector(rng, 6);
      const RegressionProblem problem = validate_problem(X, y, false);
      const double lib =
          eval_objective(problem, build_group_map(groups, gamma), beta, lambda);
      const double loop = loop_loss(X, y, beta) +
                          loop_group_penalty(groups, gamma, beta) +
                          lambda * loop_l1(beta);
      CHECK(lib == doctest::Approx(loop).epsilon(1e-10));
    }
    {
      const Matrix X = random_matrix(rng, 7, 5);
      const Vector y = random_vector(rng, 7);
      const Vector beta = random_vector(rng, 5);
      const RegressionProblem problem = validate_problem(X, y, false);
      const double lib =
          eval_objective(problem, build_fusion_map(graph, gamma), beta, lambda);
      const double loop = loop_loss(X, y, beta) +
                          loop_fusion_penalty(graph, gamma, beta) +
                          lambda * loop_l1(beta);
      CHECK(lib == doctest::Approx(loop).epsilon(1e-10));
    }
  }
}

TEST_CASE("multi-task objective at zero and K=1 reduction") {
  StdRng rng(41);
  const Matrix X = random_matrix(rng, 6, 4);
  const Matrix Y = random_matrix(rng, 6, 3);
  const MultiTaskProblem problem = validate_problem_mt(X, Y);
  CHECK(eval_objective_mt(problem, empty_map(3), Matrix::Zero(4, 3), 0.4) ==
        doctest::Approx(0.5 * Y.squaredNorm()).epsilon(1e-14));

  const Matrix Y1 = Y.col(0);
  const MultiTaskProblem single = validate_problem_mt(X, Y1);
  const Matrix B = random_matrix(rng, 4, 1);
  const double mt = eval_objective_mt(single, empty_map(1), B, 0.4);
  const RegressionProblem as_vector = validate_problem(X, Y.col(0), false);
  const double st = eval_objective(as_vector, empty_map(4), B.col(0), 0.4);
  CHECK(mt == doctest::Approx(st).epsilon(1e-12));
}

TEST_CASE("multi-task objective matches a scalar-loop evaluator") {
  StdRng rng(51);
  FusionGraph tasks;
  tasks.dim = 3;
  tasks.edges.push_back({0, 1, 0.8});
  tasks.edges.push_back({1, 2, -0.6});
  const double gamma = 0.9;
  const double lambda = 0.3;
  const Matrix X = random_matrix(rng, 9, 5);
  const Matrix Y = random_matrix(rng, 9, 3);
  const Matrix B = random_matrix(rng, 5, 3);
  const MultiTaskProblem problem = validate_problem_mt(X, Y);
  const double lib =
      eval_objective_mt(problem, build_fusion_map(tasks, gamma), B, lambda);
  double loop = 0.0;
  for (Index c = 0; c < 3; ++c)
    loop += loop_loss(X, Y.col(c), B.col(c));
  for (Index r = 0; r < 5; ++r) {
    const Vector row = B.row(r).transpose();
    loop += loop_fusion_penalty(tasks, gamma, row) + lambda * loop_l1(row);
  }
  CHECK(lib == doctest::Approx(loop).epsilon(1e-10));
}

TEST_CASE("solve result exposes the first column as beta") {
  SolveResult result;
  result.coef = Matrix::Zero(3, 2);
  result.coef(1, 0) = 2.5;
  result.coef(1, 1) = -7.0;
  CHECK(result.beta()[1] == 2.5);
  CHECK(result.beta().size() == 3);
}

}  // TEST_SUITE
