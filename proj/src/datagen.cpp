#include "sprox/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace sprox {

double Rng::normal() {
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();  // log(0) guard; probability 2^-53
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * 3.14159265358979323846 * u2);
}

std::uint64_t Rng::below(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("Rng::below: n must be positive");
  const std::uint64_t threshold = (-n) % n;  // 2^64 mod n
  for (;;) {
    const std::uint64_t r = eng_();
    if (r >= threshold) return r % n;
  }
}

namespace {

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

}  // namespace

OverlapChainData gen_overlap_chain(const OverlapChainSpec& spec) {
  require(spec.n >= 1, "overlap chain: n must be >= 1");
  require(spec.num_groups >= 1, "overlap chain: num_groups must be >= 1");
  require(spec.group_size >= 1, "overlap chain: group_size must be >= 1");
  require(spec.overlap >= 0 && spec.overlap < spec.group_size,
          "overlap chain: need 0 <= overlap < group_size");
  require(spec.noise_sd > 0.0, "overlap chain: noise_sd must be positive");

  const Index J = static_cast<Index>(spec.group_size - spec.overlap) *
                      spec.num_groups +
                  spec.overlap;
  Rng rng(spec.seed);

  // Draw order is fixed: X row-major, then the noise vector.
  Matrix X(spec.n, J);
  for (Index i = 0; i < spec.n; ++i) {
    for (Index j = 0; j < J; ++j) X(i, j) = rng.normal();
  }

  Vector beta(J);
  for (Index j = 0; j < J; ++j) {
    // 1-based formula: beta_j = (-1)^j exp(-(j - 1)/100)
    const double sign = (j % 2 == 0) ? -1.0 : 1.0;
    beta[j] = sign * std::exp(-static_cast<double>(j) / 100.0);
  }

  Vector y = X * beta;
  for (Index i = 0; i < spec.n; ++i) y[i] += spec.noise_sd * rng.normal();

  GroupStructure groups;
  groups.dim = static_cast<int>(J);
  const int stride = spec.group_size - spec.overlap;
  for (int g = 0; g < spec.num_groups; ++g) {
    GroupStructure::Group grp;
    grp.weight = 1.0;
    grp.members.resize(spec.group_size);
    std::iota(grp.members.begin(), grp.members.end(), g * stride);
    groups.groups.push_back(std::move(grp));
  }
  validate_structure(groups);

  OverlapChainData data;
  data.problem = validate_problem(X, y, false);
  data.groups = std::move(groups);
  data.beta_true = std::move(beta);
  return data;
}

MultiTaskBlocksData gen_multitask_blocks(const MultiTaskBlocksSpec& spec) {
  require(spec.n >= 1, "multitask blocks: n must be >= 1");
  require(spec.j >= 1, "multitask blocks: j must be >= 1");
  require(spec.k >= 1, "multitask blocks: k must be >= 1");
  require(!spec.blocks.empty(), "multitask blocks: block list is empty");
  int total = 0;
  for (int b : spec.blocks) {
    require(b >= 1, "multitask blocks: block sizes must be >= 1");
    total += b;
  }
  require(total == spec.k, "multitask blocks: block sizes must sum to k");
  require(spec.noise_sd > 0.0, "multitask blocks: noise_sd must be positive");
  require(spec.relevant_per_block >= 0 && spec.cross_block >= 0,
          "multitask blocks: relevant counts must be >= 0");
  const int num_blocks = static_cast<int>(spec.blocks.size());
  const int needed =
      spec.relevant_per_block * num_blocks + spec.cross_block;
  require(needed <= spec.j,
          "multitask blocks: not enough inputs for the requested "
          "relevant/cross counts");
  if (spec.cross_block > 0)
    require(num_blocks >= 2,
            "multitask blocks: cross-block inputs need at least two blocks");

  Rng rng(spec.seed);

  // Draw order: per-column minor-allele frequencies, then genotypes
  // row-major, then the relevant-input selection, then the noise matrix.
  std::vector<double> maf(spec.j);
  for (int j = 0; j < spec.j; ++j) maf[j] = 0.05 + 0.45 * rng.uniform();

  Matrix X(spec.n, spec.j);
  for (Index i = 0; i < spec.n; ++i) {
    for (int j = 0; j < spec.j; ++j) {
      X(i, j) = static_cast<double>(rng.binomial2(maf[j]));
    }
  }

  // Partial Fisher-Yates: the first `needed` entries are a seeded subset of
  // distinct inputs, blocks first, cross-block inputs last.
  std::vector<int> order(spec.j);
  std::iota(order.begin(), order.end(), 0);
  for (int i = 0; i < needed; ++i) {
    const int pick =
        i + static_cast<int>(rng.below(static_cast<std::uint64_t>(spec.j - i)));
    std::swap(order[i], order[pick]);
  }

  std::vector<int> block_start(spec.blocks.size());
  int offset = 0;
  for (std::size_t b = 0; b < spec.blocks.size(); ++b) {
    block_start[b] = offset;
    offset += spec.blocks[b];
  }

  Matrix B = Matrix::Zero(spec.j, spec.k);
  auto fill_block = [&](int input, int block) {
    for (int t = 0; t < spec.blocks[static_cast<std::size_t>(block)]; ++t) {
      B(input, block_start[static_cast<std::size_t>(block)] + t) = spec.b;
    }
  };
  int next = 0;
  for (int b = 0; b < num_blocks; ++b) {
    for (int i = 0; i < spec.relevant_per_block; ++i) {
      fill_block(order[static_cast<std::size_t>(next++)], b);
    }
  }
  for (int c = 0; c < spec.cross_block; ++c) {
    const int input = order[static_cast<std::size_t>(next++)];
    const int b1 = static_cast<int>(rng.below(static_cast<std::uint64_t>(num_blocks)));
    int b2 = static_cast<int>(rng.below(static_cast<std::uint64_t>(num_blocks - 1)));
    if (b2 >= b1) ++b2;
    fill_block(input, b1);
    fill_block(input, b2);
  }

  Matrix Y = X * B;
  for (Index i = 0; i < spec.n; ++i) {
    for (int k = 0; k < spec.k; ++k) Y(i, k) += spec.noise_sd * rng.normal();
  }

  MultiTaskBlocksData data;
  data.problem = validate_problem_mt(X, Y);
  data.b_true = std::move(B);
  return data;
}

namespace {

struct PairCorrelation {
  int m;
  int l;
  double r;
};

std::vector<PairCorrelation> column_correlations(const Matrix& Y) {
  const Index N = Y.rows();
  const Index K = Y.cols();
  if (K < 2)
    throw std::invalid_argument(
        "correlation graph: need at least two columns");
  if (N < 2)
    throw std::invalid_argument("correlation graph: need at least two rows");

  Matrix centered = Y.rowwise() - Y.colwise().mean();
  Vector scale(K);
  for (Index k = 0; k < K; ++k) {
    scale[k] = centered.col(k).norm();
    if (scale[k] == 0.0) {
      std::ostringstream os;
      os << "correlation graph: column " << k + 1
         << " is constant; correlation undefined";
      throw std::invalid_argument(os.str());
    }
  }

  std::vector<PairCorrelation> pairs;
  pairs.reserve(static_cast<std::size_t>(K * (K - 1) / 2));
  for (Index m = 0; m < K; ++m) {
    for (Index l = m + 1; l < K; ++l) {
      const double r =
          centered.col(m).dot(centered.col(l)) / (scale[m] * scale[l]);
      pairs.push_back({static_cast<int>(m), static_cast<int>(l), r});
    }
  }
  return pairs;
}

}  // namespace

FusionGraph correlation_graph_threshold(const Matrix& Y, double rho) {
  FusionGraph graph;
  graph.dim = static_cast<int>(Y.cols());
  for (const auto& p : column_correlations(Y)) {
    if (std::abs(p.r) > rho) graph.edges.push_back({p.m, p.l, p.r});
  }
  validate_structure(graph);
  return graph;
}

FusionGraph correlation_graph_target_edges(const Matrix& Y, int target_edges) {
  auto pairs = column_correlations(Y);
  if (target_edges < 0 ||
      static_cast<std::size_t>(target_edges) > pairs.size()) {
    std::ostringstream os;
    os << "correlation graph: target_edges must lie in [0, " << pairs.size()
       << "]";
    throw std::invalid_argument(os.str());
  }
  // Keep the target_edges largest |r|; stable sort preserves pair order
  // among ties.
  std::stable_sort(pairs.begin(), pairs.end(),
                   [](const PairCorrelation& a, const PairCorrelation& b) {
                     return std::abs(a.r) > std::abs(b.r);
                   });
  pairs.resize(static_cast<std::size_t>(target_edges));
  std::sort(pairs.begin(), pairs.end(),
            [](const PairCorrelation& a, const PairCorrelation& b) {
              return std::pair(a.m, a.l) < std::pair(b.m, b.l);
            });

  FusionGraph graph;
  graph.dim = static_cast<int>(Y.cols());
  for (const auto& p : pairs) graph.edges.push_back({p.m, p.l, p.r});
  validate_structure(graph);
  return graph;
}

}  // namespace sprox
