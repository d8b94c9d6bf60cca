// Shared fixtures for the unit tests: tiny deterministic instances plus
// slow-but-straightforward re-implementations of the quantities under test
// (scalar-loop objectives, dense eigensolves, closed-form special cases).
// These are written independently of the library internals so the two sides
// can disagree.
#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "sprox/model.hpp"
#include "sprox/penalty.hpp"

namespace testhelp {

using sprox::FusionGraph;
using sprox::GroupStructure;
using sprox::Index;
using sprox::Matrix;
using sprox::RegressionProblem;
using sprox::Vector;

// Squared-error loss written as explicit scalar loops.
inline double loop_loss(const Matrix& X, const Vector& y, const Vector& beta) {
  double total = 0.0;
  for (Index i = 0; i < X.rows(); ++i) {
    double fit = 0.0;
    for (Index j = 0; j < X.cols(); ++j) fit += X(i, j) * beta[j];
    const double r = y[i] - fit;
    total += r * r;
  }
  return 0.5 * total;
}

inline double loop_l1(const Vector& beta) {
  double total = 0.0;
  for (Index j = 0; j < beta.size(); ++j) total += std::abs(beta[j]);
  return total;
}

// Overlapping-group penalty straight from the structure (no linear map).
inline double loop_group_penalty(const GroupStructure& groups, double gamma,
                                 const Vector& beta) {
  double total = 0.0;
  for (const auto& group : groups.groups) {
    double sq = 0.0;
    for (const int j : group.members) sq += beta[j] * beta[j];
    total += group.weight * std::sqrt(sq);
  }
  return gamma * total;
}

// Graph-guided fusion penalty straight from the edge list.
inline double loop_fusion_penalty(const FusionGraph& graph, double gamma,
                                  const Vector& beta) {
  double total = 0.0;
  for (const auto& edge : graph.edges) {
    const double sign = edge.r > 0 ? 1.0 : -1.0;
    total += std::abs(edge.r) * std::abs(beta[edge.m] - sign * beta[edge.l]);
  }
  return gamma * total;
}

// Largest eigenvalue of a symmetric matrix through Eigen's dense solver,
// independent of the library's power iteration.
inline double dense_max_eigenvalue(const Matrix& sym) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(sym);
  return solver.eigenvalues().maxCoeff();
}

// Ridge-free least squares via normal equations (for lambda = gamma = 0).
inline Vector normal_equations(const Matrix& X, const Vector& y) {
  return (X.transpose() * X).ldlt().solve(X.transpose() * y);
}

// Deterministic dense test matrices from the standard library generator;
// unrelated to the library's own RNG.
struct StdRng {
  std::mt19937_64 engine;
  explicit StdRng(std::uint64_t seed) : engine(seed) {}
  double normal() {
    std::normal_distribution<double> d(0.0, 1.0);
    return d(engine);
  }
  double uniform() {
    std::uniform_real_distribution<double> d(0.0, 1.0);
    return d(engine);
  }
};

inline Matrix random_matrix(StdRng& rng, Index rows, Index cols) {
  Matrix out(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) out(i, j) = rng.normal();
  }
  return out;
}

inline Vector random_vector(StdRng& rng, Index n) {
  Vector out(n);
  for (Index i = 0; i < n; ++i) out[i] = rng.normal();
  return out;
}

// A small fixed overlapping-group layout over 6 inputs.
inline GroupStructure six_input_groups() {
  GroupStructure groups;
  groups.dim = 6;
  groups.groups.push_back({{0, 1, 2}, 1.0});
  groups.groups.push_back({{2, 3, 4}, 0.5});
  groups.groups.push_back({{4, 5}, 2.0});
  return groups;
}

// A small fixed fusion graph over 5 inputs with mixed edge signs.
inline FusionGraph five_input_graph() {
  FusionGraph graph;
  graph.dim = 5;
  graph.edges.push_back({0, 1, 0.9});
  graph.edges.push_back({1, 2, -0.5});
  graph.edges.push_back({0, 3, 0.4});
  graph.edges.push_back({3, 4, 1.0});
  return graph;
}

inline RegressionProblem small_problem(std::uint64_t seed, Index n, Index j) {
  StdRng rng(seed);
  const Matrix X = random_matrix(rng, n, j);
  Vector beta = Vector::Zero(j);
  for (Index c = 0; c < j; c += 2) beta[c] = rng.normal();
  Vector y = X * beta;
  for (Index i = 0; i < n; ++i) y[i] += 0.3 * rng.normal();
  return sprox::validate_problem(X, y, false);
}

}  // namespace testhelp
