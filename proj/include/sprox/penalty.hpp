#pragma once

#include <Eigen/Sparse>

#include <utility>

#include "sprox/model.hpp"

namespace sprox {

using SparseMap = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// Dual feasible set of the penalty: either the l_inf box [-1, 1]^rows
/// (fusion penalties) or a product of unit l2 balls, one per group
/// (group penalties). block_lengths is empty for Box.
struct DualBall {
  enum class Kind { Box, Blocks };
  Kind kind = Kind::Blocks;
  std::vector<int> block_lengths;
};

enum class NormTag { Exact, UpperBound, Power };

struct NormInfo {
  double value = 0.0;
  NormTag tag = NormTag::Exact;
};

/// The linear map C with dual-ball structure that rewrites a structured
/// penalty as max_{alpha in Q} alpha' C beta.
///
/// Group penalties put one nonzero per row (gamma * w_g at the member's
/// column, rows grouped per block); fusion penalties put two (+-gamma*|r| at
/// the edge endpoints, one row per edge). D = max over Q of 0.5 ||alpha||^2:
/// half the number of blocks for Blocks, half the number of rows for Box.
/// Immutable after construction.
struct PenaltyLinearMap {
  SparseMap C;
  DualBall ball;
  double gamma = 0.0;
  double D = 0.0;
  NormInfo norm;

  Index rows() const { return C.rows(); }
  Index dim() const { return C.cols(); }
};

enum class NormMode { Exact, Bound, Power };

PenaltyLinearMap build_group_map(const GroupStructure& groups, double gamma);
PenaltyLinearMap build_fusion_map(const FusionGraph& graph, double gamma);

/// Zero-row map over dim coefficients: penalty identically 0, D = 0.
PenaltyLinearMap empty_map(Index dim);

/// Spectral norm of C. Exact applies the closed form for group maps (C'C is
/// diagonal); Bound applies the degree bound for fusion maps; Power runs a
/// deterministic power iteration on C'C to relative tolerance tol.
double spectral_norm(const PenaltyLinearMap& map, NormMode mode,
                     double tol = 1e-10);

/// Same map with its norm record replaced by the power-iteration value.
PenaltyLinearMap with_power_norm(const PenaltyLinearMap& map,
                                 double tol = 1e-10);

/// Exact penalty value: sum of block l2 norms of C beta (Blocks) or
/// ||C beta||_1 (Box).
double exact_penalty(const PenaltyLinearMap& map, const Vector& beta);

/// Multi-task exact penalty: the base penalty applied to each coefficient
/// row of B and summed.
double exact_penalty_mt(const PenaltyLinearMap& map, const Matrix& B);

/// Euclidean projection onto the dual ball: per-block rescale to unit norm
/// when the block norm exceeds 1 (ties left unchanged), entrywise clamp to
/// [-1, 1] for Box.
Vector project_dual(const Vector& u, const DualBall& ball);

/// Value, gradient and maximizing dual point of the smoothed penalty
///   f_mu(beta) = max_{alpha in Q} alpha' C beta - (mu/2) ||alpha||^2.
struct SmoothedPenaltyEval {
  double value = 0.0;
  Vector gradient;  ///< C' alpha*
  Vector alpha;     ///< alpha* = project_dual(C beta / mu)
};

SmoothedPenaltyEval smoothed_eval(const PenaltyLinearMap& map,
                                  const Vector& beta, double mu);

namespace detail {
/// exact penalty and smoothed value computed from one shared C*beta product;
/// keeps per-iteration traces internally consistent.
std::pair<double, double> penalty_pair(const PenaltyLinearMap& map,
                                       const Vector& beta, double mu);
}  // namespace detail

}  // namespace sprox
