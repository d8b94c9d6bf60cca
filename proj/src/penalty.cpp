#include "sprox/penalty.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "sprox/power_iteration.hpp"

namespace sprox {

namespace {

void require(bool cond, const char* msg) {
  if (!cond) throw std::invalid_argument(msg);
}

// Largest column sum of squares of C; the exact squared spectral norm
// whenever C'C is diagonal (group maps: no two rows share a column within a
// block, and distinct blocks touch distinct rows... distinct groups may share
// columns, but every row has a single nonzero, so C'C is diagonal with
// entries sum_{g ni j} (gamma w_g)^2).
double max_column_squares(const SparseMap& C) {
  Vector colsq = Vector::Zero(C.cols());
  for (int r = 0; r < C.outerSize(); ++r) {
    for (SparseMap::InnerIterator it(C, r); it; ++it) {
      colsq[it.col()] += it.value() * it.value();
    }
  }
  return C.cols() > 0 ? colsq.maxCoeff() : 0.0;
}

}  // namespace

PenaltyLinearMap build_group_map(const GroupStructure& groups, double gamma) {
  validate_structure(groups);
  require(gamma >= 0.0 && std::isfinite(gamma),
          "group map: gamma must be nonnegative");

  Index rows = 0;
  for (const auto& g : groups.groups) rows += static_cast<Index>(g.members.size());

  SparseMap C(rows, groups.dim);
  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(static_cast<std::size_t>(rows));
  DualBall ball;
  ball.kind = DualBall::Kind::Blocks;
  ball.block_lengths.reserve(groups.groups.size());

  Index row = 0;
  for (const auto& g : groups.groups) {
    for (int member : g.members) {
      entries.emplace_back(static_cast<int>(row++), member, gamma * g.weight);
    }
    ball.block_lengths.push_back(static_cast<int>(g.members.size()));
  }
  C.setFromTriplets(entries.begin(), entries.end());
  C.makeCompressed();

  PenaltyLinearMap map;
  map.C = std::move(C);
  map.ball = std::move(ball);
  map.gamma = gamma;
  map.D = 0.5 * static_cast<double>(groups.groups.size());
  map.norm = {std::sqrt(max_column_squares(map.C)), NormTag::Exact};
  return map;
}

PenaltyLinearMap build_fusion_map(const FusionGraph& graph, double gamma) {
  validate_structure(graph);
  require(gamma >= 0.0 && std::isfinite(gamma),
          "fusion map: gamma must be nonnegative");

  const Index rows = static_cast<Index>(graph.edges.size());
  SparseMap C(rows, graph.dim);
  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(static_cast<std::size_t>(2 * rows));
  for (Index e = 0; e < rows; ++e) {
    const auto& edge = graph.edges[static_cast<std::size_t>(e)];
    const double tau = std::abs(edge.r);
    entries.emplace_back(static_cast<int>(e), edge.m, gamma * tau);
    entries.emplace_back(static_cast<int>(e), edge.l,
                         edge.r > 0.0 ? -gamma * tau : gamma * tau);
  }
  C.setFromTriplets(entries.begin(), entries.end());
  C.makeCompressed();

  PenaltyLinearMap map;
  map.C = std::move(C);
  map.ball.kind = DualBall::Kind::Box;
  map.gamma = gamma;
  map.D = 0.5 * static_cast<double>(rows);
  // 2 * gamma^2 * max weighted degree; equals twice the largest column sum of
  // squares because each edge deposits gamma^2 tau^2 in both endpoint columns.
  map.norm = {std::sqrt(2.0 * max_column_squares(map.C)), NormTag::UpperBound};
  return map;
}

PenaltyLinearMap empty_map(Index dim) {
  require(dim >= 1, "empty map: dim must be >= 1");
  PenaltyLinearMap map;
  map.C = SparseMap(0, dim);
  map.C.makeCompressed();
  map.ball.kind = DualBall::Kind::Box;
  map.gamma = 0.0;
  map.D = 0.0;
  map.norm = {0.0, NormTag::Exact};
  return map;
}

double spectral_norm(const PenaltyLinearMap& map, NormMode mode, double tol) {
  switch (mode) {
    case NormMode::Exact:
      require(map.ball.kind == DualBall::Kind::Blocks || map.rows() == 0,
              "spectral_norm: the exact closed form only covers group maps");
      return std::sqrt(max_column_squares(map.C));
    case NormMode::Bound:
      require(map.ball.kind == DualBall::Kind::Box,
              "spectral_norm: the degree bound only covers fusion maps");
      return std::sqrt(2.0 * max_column_squares(map.C));
    case NormMode::Power: {
      if (map.rows() == 0) return 0.0;
      const SparseMap& C = map.C;
      auto apply = [&C](const Vector& v) -> Vector {
        return C.transpose() * (C * v);
      };
      const double eig =
          power_iteration_max_eigenvalue(apply, map.dim(), tol);
      return std::sqrt(std::max(eig, 0.0));
    }
  }
  throw std::logic_error("spectral_norm: unreachable");
}

PenaltyLinearMap with_power_norm(const PenaltyLinearMap& map, double tol) {
  PenaltyLinearMap out = map;
  out.norm = {spectral_norm(map, NormMode::Power, tol), NormTag::Power};
  return out;
}

double exact_penalty(const PenaltyLinearMap& map, const Vector& beta) {
  if (beta.size() != map.dim())
    throw std::invalid_argument("exact_penalty: beta length != map dim");
  if (map.rows() == 0) return 0.0;
  const Vector cb = map.C * beta;
  if (map.ball.kind == DualBall::Kind::Box) return cb.lpNorm<1>();
  double total = 0.0;
  Index offset = 0;
  for (int len : map.ball.block_lengths) {
    total += cb.segment(offset, len).norm();
    offset += len;
  }
  return total;
}

double exact_penalty_mt(const PenaltyLinearMap& map, const Matrix& B) {
  if (B.cols() != map.dim())
    throw std::invalid_argument("exact_penalty_mt: B columns != map dim");
  double total = 0.0;
  for (Index j = 0; j < B.rows(); ++j) {
    total += exact_penalty(map, B.row(j).transpose());
  }
  return total;
}

Vector project_dual(const Vector& u, const DualBall& ball) {
  if (ball.kind == DualBall::Kind::Box) {
    return u.cwiseMax(-1.0).cwiseMin(1.0);
  }
  Vector out(u.size());
  Index offset = 0;
  for (int len : ball.block_lengths) {
    const double norm = u.segment(offset, len).norm();
    if (norm > 1.0) {
      out.segment(offset, len) = u.segment(offset, len) / norm;
    } else {
      out.segment(offset, len) = u.segment(offset, len);
    }
    offset += len;
  }
  if (offset != u.size())
    throw std::invalid_argument("project_dual: block lengths do not cover u");
  return out;
}

SmoothedPenaltyEval smoothed_eval(const PenaltyLinearMap& map,
                                  const Vector& beta, double mu) {
  if (beta.size() != map.dim())
    throw std::invalid_argument("smoothed_eval: beta length != map dim");
  if (!(mu > 0.0)) throw std::invalid_argument("smoothed_eval: mu must be positive");

  SmoothedPenaltyEval eval;
  if (map.rows() == 0) {
    eval.value = 0.0;
    eval.gradient = Vector::Zero(map.dim());
    eval.alpha = Vector(0);
    return eval;
  }
  const Vector cb = map.C * beta;
  eval.alpha = project_dual(cb / mu, map.ball);
  eval.value = eval.alpha.dot(cb) - 0.5 * mu * eval.alpha.squaredNorm();
  eval.gradient = map.C.transpose() * eval.alpha;
  return eval;
}

namespace detail {

std::pair<double, double> penalty_pair(const PenaltyLinearMap& map,
                                       const Vector& beta, double mu) {
  if (map.rows() == 0) return {0.0, 0.0};
  const Vector cb = map.C * beta;
  double exact = 0.0;
  if (map.ball.kind == DualBall::Kind::Box) {
    exact = cb.lpNorm<1>();
  } else {
    Index offset = 0;
    for (int len : map.ball.block_lengths) {
      exact += cb.segment(offset, len).norm();
      offset += len;
    }
  }
  const Vector alpha = project_dual(cb / mu, map.ball);
  const double smoothed = alpha.dot(cb) - 0.5 * mu * alpha.squaredNorm();
  return {exact, smoothed};
}

}  // namespace detail

}  // namespace sprox
