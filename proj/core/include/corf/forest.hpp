#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "corf/dataset.hpp"
#include "corf/random.hpp"
#include "corf/weights.hpp"

namespace corf {

struct ForestParams {
  std::size_t ntree = 5000;
  /// Candidates per node; unset means ceil(sqrt(P)).
  std::optional<std::size_t> mtry;
  /// Nodes whose (bootstrap-weighted) size is at most this are leaves.
  std::size_t min_node_size = 2;
  std::uint64_t seed = 1;
  /// Unset means uniform candidate sampling.
  std::optional<SamplingWeights> sampling_weights;
  /// Worker threads; 0 picks the hardware concurrency. Never affects results.
  std::size_t threads = 0;
};

struct TreeNode {
  std::int32_t variable = -1;  // -1 marks a leaf
  double threshold = 0.0;      // x <= threshold goes left
  std::int32_t left = -1;
  std::int32_t right = -1;
  std::uint32_t count0 = 0;  // bootstrap-weighted class counts at the node
  std::uint32_t count1 = 0;

  bool is_leaf() const { return variable < 0; }
};

struct Tree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root
  std::vector<std::uint32_t> inbag_counts;

  /// Leaf reached by `row`; `value(j)` returns the row's value of variable j.
  template <typename ValueOf>
  const TreeNode& leaf_for(ValueOf&& value) const {
    std::size_t k = 0;
    while (!nodes[k].is_leaf()) {
      const auto& node = nodes[k];
      k = static_cast<std::size_t>(value(static_cast<std::size_t>(node.variable)) <= node.threshold
                                       ? node.left
                                       : node.right);
    }
    return nodes[k];
  }

  /// Class-1 vote of a leaf: 1, 0, or 0.5 on an exact count tie.
  static double vote(const TreeNode& leaf) {
    if (leaf.count1 > leaf.count0) return 1.0;
    if (leaf.count1 < leaf.count0) return 0.0;
    return 0.5;
  }

  std::size_t internal_node_count() const;
};

/// Fitted ensemble. Immutable after construction; safe for concurrent reads.
class Forest {
 public:
  Forest() = default;
  /// Assembles a forest from grown (or deserialized) trees and recomputes
  /// the split counts. `params.mtry` must already be resolved.
  Forest(std::vector<Tree> trees, ForestParams params, std::size_t n_variables);

  const std::vector<Tree>& trees() const { return trees_; }
  const ForestParams& params() const { return params_; }
  std::size_t n_variables() const { return n_variables_; }
  std::size_t mtry() const { return *params_.mtry; }
  /// V_j: how many internal nodes split on variable j.
  const std::vector<std::uint64_t>& split_counts() const { return split_counts_; }
  /// K = sum of split_counts.
  std::uint64_t total_splits() const { return total_splits_; }

 private:
  std::vector<Tree> trees_;
  ForestParams params_;
  std::size_t n_variables_ = 0;
  std::vector<std::uint64_t> split_counts_;
  std::uint64_t total_splits_ = 0;
};

/// Draws up to `mtry` distinct indices by sequential weighted sampling
/// without replacement. Indices with zero weight are never drawn; if fewer
/// than `mtry` have positive weight, all of them are returned. The result is
/// sorted ascending.
std::vector<std::size_t> sample_candidates(const SamplingWeights& weights, std::size_t mtry, Rng& rng);

/// Grows params.ntree unpruned Gini trees on bootstrap samples. Tree t uses
/// its own generator seeded by derive_seed(params.seed, t), so the result is
/// identical for any thread count. Throws InputError on a single-class
/// response.
Forest fit_forest(const PrimaryDataset& data, const ForestParams& params);

/// Per-row fraction of trees voting class 1.
std::vector<double> predict_forest(const Forest& forest, const Eigen::MatrixXd& X);

struct OobPrediction {
  /// Class-1 vote fraction over trees where the sample was out-of-bag;
  /// nullopt if it never was.
  std::vector<std::optional<double>> vote_fraction;
  /// Number of trees for which each sample was out-of-bag.
  std::vector<std::uint32_t> coverage;

  /// Mean over samples of coverage / ntree.
  double mean_oob_fraction(std::size_t ntree) const;
  /// Indices of samples with a defined vote fraction.
  std::vector<std::size_t> defined() const;
};

OobPrediction oob_probabilities(const Forest& forest, const PrimaryDataset& data);

/// ceil(sqrt(p)), at least 1.
std::size_t default_mtry(std::size_t p);

}  // namespace corf
