#pragma once

#include <cstdint>
#include <random>
#include <variant>

#include "sprox/model.hpp"

namespace sprox {

/// Seeded generator used by every synthetic-data routine. Built on
/// std::mt19937_64 with explicit output mappings (53-bit uniforms,
/// Box-Muller normals, paired-Bernoulli binomials) so that a seed fully
/// determines every dataset on a given platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  /// Uniform double in [0, 1) from the top 53 bits.
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  /// Standard normal via Box-Muller (two uniforms per draw, no caching).
  double normal();

  /// Unbiased integer in [0, n) by rejection.
  std::uint64_t below(std::uint64_t n);

  /// Binomial(2, p) as two Bernoulli draws; models a biallelic genotype.
  int binomial2(double p) {
    return (uniform() < p ? 1 : 0) + (uniform() < p ? 1 : 0);
  }

 private:
  std::mt19937_64 eng_;
};

/// Chain of num_groups windows of group_size adjacent inputs overlapping by
/// `overlap`, so J = (group_size - overlap) * num_groups + overlap.
struct OverlapChainSpec {
  std::uint64_t seed = 0;
  Index n = 0;
  int num_groups = 0;
  int group_size = 100;
  int overlap = 10;
  double noise_sd = 1.0;
};

struct OverlapChainData {
  RegressionProblem problem;
  GroupStructure groups;
  Vector beta_true;
};

/// X iid standard normal, beta_j = (-1)^j exp(-(j - 1)/100) (1-based j),
/// y = X beta + noise.
OverlapChainData gen_overlap_chain(const OverlapChainSpec& spec);

/// Multi-task instance with block-correlated outputs: genotype-like X in
/// {0,1,2}, per block of tasks a seeded subset of inputs gets coefficient b
/// for every task in the block, plus cross_block inputs shared across two
/// blocks.
struct MultiTaskBlocksSpec {
  std::uint64_t seed = 0;
  Index n = 100;
  int j = 30;
  int k = 10;
  std::vector<int> blocks{3, 3, 4};  // sizes; must sum to k
  double b = 0.8;
  double noise_sd = 1.0;
  int relevant_per_block = 3;
  int cross_block = 2;
};

struct MultiTaskBlocksData {
  MultiTaskProblem problem;
  Matrix b_true;
};

MultiTaskBlocksData gen_multitask_blocks(const MultiTaskBlocksSpec& spec);

using GenSpec = std::variant<OverlapChainSpec, MultiTaskBlocksSpec>;

/// Pairwise Pearson correlation graph over the columns of Y: an edge
/// (m, l, r_ml) whenever |r_ml| > rho. Constant columns are an error.
FusionGraph correlation_graph_threshold(const Matrix& Y, double rho);

/// Same, but keeps exactly the target_edges pairs of largest |r| (ties
/// broken by pair order). Edges are listed in pair order m < l.
FusionGraph correlation_graph_target_edges(const Matrix& Y, int target_edges);

}  // namespace sprox
