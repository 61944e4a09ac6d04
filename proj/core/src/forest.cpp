#include "corf/forest.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "corf/error.hpp"
#include "corf/log.hpp"
#include "corf/split.hpp"
#include "parallel.hpp"

namespace corf {

std::size_t default_mtry(std::size_t p) {
  auto m = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(p))));
  while (m * m < p) ++m;  // guard against sqrt rounding down
  while (m > 1 && (m - 1) * (m - 1) >= p) --m;
  return std::max<std::size_t>(m, 1);
}

std::size_t Tree::internal_node_count() const {
  return static_cast<std::size_t>(
      std::count_if(nodes.begin(), nodes.end(), [](const TreeNode& n) { return !n.is_leaf(); }));
}

Forest::Forest(std::vector<Tree> trees, ForestParams params, std::size_t n_variables)
    : trees_(std::move(trees)),
      params_(std::move(params)),
      n_variables_(n_variables),
      split_counts_(n_variables, 0) {
  CORF_REQUIRE(params_.mtry.has_value(), "forest parameters must carry a resolved mtry");
  for (const auto& tree : trees_) {
    for (const auto& node : tree.nodes) {
      if (node.is_leaf()) continue;
      CORF_REQUIRE(static_cast<std::size_t>(node.variable) < n_variables_, "tree node variable out of range");
      CORF_REQUIRE(node.left > 0 && node.right > 0 &&
                       static_cast<std::size_t>(std::max(node.left, node.right)) < tree.nodes.size(),
                   "tree node child out of range");
      ++split_counts_[static_cast<std::size_t>(node.variable)];
    }
  }
  total_splits_ = std::accumulate(split_counts_.begin(), split_counts_.end(), std::uint64_t{0});
}

namespace {

// Draws candidates from a fixed distribution. Rejection against the full
// distribution is exactly sequential sampling with renormalization; once the
// already-drawn mass gets large, the remaining draws switch to an explicit
// renormalized scan so rejection cannot stall.
class CandidateSampler {
 public:
  CandidateSampler(const SamplingWeights* weights, std::size_t p) : p_(p) {
    if (weights == nullptr || weights->is_uniform()) return;
    weighted_ = true;
    for (std::size_t j = 0; j < p; ++j) {
      if ((*weights)[j] > 0.0) {
        support_.push_back(j);
        mass_.push_back((*weights)[j]);
      }
    }
    cumulative_.resize(mass_.size());
    std::partial_sum(mass_.begin(), mass_.end(), cumulative_.begin());
  }

  std::size_t support() const { return weighted_ ? support_.size() : p_; }

  // Candidates in random order, so split ties between variables are broken
  // at random. `stamp` has one slot per variable; slots equal to `epoch` are
  // taken.
  void draw(std::size_t mtry, Rng& rng, std::vector<std::uint32_t>& stamp, std::uint32_t epoch,
            std::vector<std::size_t>& out) const {
    out.clear();
    if (support() <= mtry) {
      if (weighted_) {
        out = support_;
      } else {
        out.resize(p_);
        std::iota(out.begin(), out.end(), std::size_t{0});
      }
      for (std::size_t k = out.size(); k > 1; --k) std::swap(out[k - 1], out[rng.below(k)]);
      return;
    }
    if (weighted_) {
      draw_weighted(mtry, rng, stamp, epoch, out);
    } else {
      draw_uniform(mtry, rng, stamp, epoch, out);
    }
  }

 private:
  void draw_uniform(std::size_t mtry, Rng& rng, std::vector<std::uint32_t>& stamp, std::uint32_t epoch,
                    std::vector<std::size_t>& out) const {
    if (2 * mtry > p_) {
      // Dense case: partial Fisher-Yates over the full index range.
      std::vector<std::size_t> pool(p_);
      std::iota(pool.begin(), pool.end(), std::size_t{0});
      for (std::size_t k = 0; k < mtry; ++k) {
        std::swap(pool[k], pool[k + rng.below(p_ - k)]);
        out.push_back(pool[k]);
      }
      return;
    }
    while (out.size() < mtry) {
      const std::size_t j = rng.below(p_);
      if (stamp[j] == epoch) continue;
      stamp[j] = epoch;
      out.push_back(j);
    }
  }

  void draw_weighted(std::size_t mtry, Rng& rng, std::vector<std::uint32_t>& stamp, std::uint32_t epoch,
                     std::vector<std::size_t>& out) const {
    const double total = cumulative_.back();
    double taken = 0.0;
    while (out.size() < mtry && taken < 0.5 * total) {
      const double u = rng.uniform() * total;
      auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
      if (it == cumulative_.end()) --it;
      const auto k = static_cast<std::size_t>(it - cumulative_.begin());
      const std::size_t j = support_[k];
      if (stamp[j] == epoch) continue;
      stamp[j] = epoch;
      out.push_back(j);
      taken += mass_[k];
    }
    if (out.size() == mtry) return;
    // Explicit renormalized draws over what is left.
    std::vector<std::size_t> rest;
    std::vector<double> rest_mass;
    for (std::size_t k = 0; k < support_.size(); ++k) {
      if (stamp[support_[k]] != epoch) {
        rest.push_back(k);
        rest_mass.push_back(mass_[k]);
      }
    }
    while (out.size() < mtry) {
      double remaining = 0.0;
      for (double m : rest_mass) remaining += m;
      double u = rng.uniform() * remaining;
      std::size_t pick = rest.size() - 1;
      for (std::size_t r = 0; r < rest.size(); ++r) {
        if (u < rest_mass[r]) {
          pick = r;
          break;
        }
        u -= rest_mass[r];
      }
      const std::size_t j = support_[rest[pick]];
      stamp[j] = epoch;
      out.push_back(j);
      rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(pick));
      rest_mass.erase(rest_mass.begin() + static_cast<std::ptrdiff_t>(pick));
    }
  }

  std::size_t p_;
  bool weighted_ = false;
  std::vector<std::size_t> support_;
  std::vector<double> mass_;
  std::vector<double> cumulative_;
};

// Per-variable dense ranks and the sorted distinct values behind them.
struct Presorted {
  std::size_t n = 0;
  std::vector<std::uint32_t> rank;           // rank[j * n + i]
  std::vector<std::vector<double>> values;  // values[j][r]

  explicit Presorted(const Eigen::MatrixXd& X) : n(static_cast<std::size_t>(X.rows())) {
    const auto p = static_cast<std::size_t>(X.cols());
    rank.resize(n * p);
    values.resize(p);
    std::vector<std::size_t> order(n);
    for (std::size_t j = 0; j < p; ++j) {
      const double* col = X.col(static_cast<Eigen::Index>(j)).data();
      std::iota(order.begin(), order.end(), std::size_t{0});
      std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return col[a] < col[b]; });
      auto& v = values[j];
      for (std::size_t k = 0; k < n; ++k) {
        const double x = col[order[k]];
        if (v.empty() || x != v.back()) v.push_back(x);
        rank[j * n + order[k]] = static_cast<std::uint32_t>(v.size() - 1);
      }
    }
  }
};

struct Workspace {
  std::vector<std::uint32_t> stamp;
  std::uint32_t epoch = 0;
  std::vector<std::uint64_t> keys;
  std::vector<std::size_t> candidates;
};

struct GrowContext {
  const PrimaryDataset& data;
  const Presorted& sorted;
  const CandidateSampler& sampler;
  std::size_t mtry;
  std::size_t min_node_size;
};

Tree grow_tree(const GrowContext& ctx, Rng& rng, Workspace& ws) {
  const std::size_t n = ctx.data.n();
  Tree tree;
  tree.inbag_counts.assign(n, 0);
  for (std::size_t k = 0; k < n; ++k) ++tree.inbag_counts[rng.below(n)];

  std::vector<std::uint32_t> samples;
  for (std::size_t i = 0; i < n; ++i) {
    if (tree.inbag_counts[i] > 0) samples.push_back(static_cast<std::uint32_t>(i));
  }

  struct Pending {
    std::size_t node;
    std::size_t begin;
    std::size_t end;
  };
  std::vector<Pending> stack;
  tree.nodes.emplace_back();
  stack.push_back({0, 0, samples.size()});

  const auto& y = ctx.data.y;
  while (!stack.empty()) {
    const Pending job = stack.back();
    stack.pop_back();

    ClassCounts counts;
    for (std::size_t s = job.begin; s < job.end; ++s) {
      const auto i = samples[s];
      (y[i] ? counts.ones : counts.zeros) += tree.inbag_counts[i];
    }
    tree.nodes[job.node].count0 = static_cast<std::uint32_t>(counts.zeros);
    tree.nodes[job.node].count1 = static_cast<std::uint32_t>(counts.ones);
    if (counts.total() <= ctx.min_node_size || counts.zeros == 0 || counts.ones == 0) continue;

    if (++ws.epoch == 0) {
      std::fill(ws.stamp.begin(), ws.stamp.end(), 0U);
      ws.epoch = 1;
    }
    ctx.sampler.draw(ctx.mtry, rng, ws.stamp, ws.epoch, ws.candidates);

    detail::SplitScan scan(counts);
    std::size_t best_var = 0;
    std::uint32_t best_lo = 0;
    std::uint32_t best_hi = 0;
    const std::size_t m = job.end - job.begin;
    for (const std::size_t j : ws.candidates) {
      const std::uint32_t* rank = ctx.sorted.rank.data() + j * n;
      ws.keys.resize(m);
      for (std::size_t s = 0; s < m; ++s) {
        const auto i = samples[job.begin + s];
        ws.keys[s] = (std::uint64_t{rank[i]} << 32) | (std::uint64_t{y[i]} << 31) | tree.inbag_counts[i];
      }
      std::sort(ws.keys.begin(), ws.keys.end());
      if ((ws.keys.front() >> 32) == (ws.keys.back() >> 32)) continue;  // constant within node
      scan.restart();
      std::size_t s = 0;
      while (s < m) {
        const auto r = static_cast<std::uint32_t>(ws.keys[s] >> 32);
        std::uint64_t zeros = 0;
        std::uint64_t ones = 0;
        for (; s < m && static_cast<std::uint32_t>(ws.keys[s] >> 32) == r; ++s) {
          const std::uint64_t w = ws.keys[s] & 0x7fffffffULL;
          ((ws.keys[s] >> 31) & 1U ? ones : zeros) += w;
        }
        scan.add(zeros, ones);
        if (s < m && scan.offer()) {
          best_var = j;
          best_lo = r;
          best_hi = static_cast<std::uint32_t>(ws.keys[s] >> 32);
        }
      }
    }
    if (!scan.found()) continue;

    const auto& vals = ctx.sorted.values[best_var];
    const double threshold = detail::midpoint(vals[best_lo], vals[best_hi]);
    const double* col = ctx.data.X.col(static_cast<Eigen::Index>(best_var)).data();
    auto first = samples.begin() + static_cast<std::ptrdiff_t>(job.begin);
    auto last = samples.begin() + static_cast<std::ptrdiff_t>(job.end);
    auto mid = std::stable_partition(first, last, [&](std::uint32_t i) { return col[i] <= threshold; });
    const auto split_at = static_cast<std::size_t>(mid - samples.begin());

    const auto left = static_cast<std::int32_t>(tree.nodes.size());
    tree.nodes.emplace_back();
    tree.nodes.emplace_back();
    auto& node = tree.nodes[job.node];
    node.variable = static_cast<std::int32_t>(best_var);
    node.threshold = threshold;
    node.left = left;
    node.right = left + 1;
    stack.push_back({static_cast<std::size_t>(left + 1), split_at, job.end});
    stack.push_back({static_cast<std::size_t>(left), job.begin, split_at});
  }
  return tree;
}

}  // namespace

std::vector<std::size_t> sample_candidates(const SamplingWeights& weights, std::size_t mtry, Rng& rng) {
  CORF_REQUIRE(mtry >= 1, "mtry must be at least 1");
  CORF_REQUIRE(weights.support_size() > 0, "sampling weights are all zero");
  CandidateSampler sampler(&weights, weights.size());
  std::vector<std::uint32_t> stamp(weights.size(), 0);
  std::vector<std::size_t> out;
  sampler.draw(mtry, rng, stamp, 1, out);
  std::sort(out.begin(), out.end());
  return out;
}

Forest fit_forest(const PrimaryDataset& data, const ForestParams& params) {
  data.validate();
  CORF_REQUIRE(params.ntree >= 1, "ntree must be at least 1");
  CORF_REQUIRE(params.min_node_size >= 1, "min_node_size must be at least 1");
  const std::size_t p = data.p();
  const std::size_t n = data.n();
  CORF_REQUIRE(n < (std::size_t{1} << 31), "too many samples");

  const auto ones = static_cast<std::size_t>(std::count(data.y.begin(), data.y.end(), std::uint8_t{1}));
  if (ones == 0 || ones == n) throw InputError("single-class response: both classes are needed to grow a forest");

  ForestParams resolved = params;
  std::size_t mtry = params.mtry.value_or(default_mtry(p));
  CORF_REQUIRE(mtry >= 1, "mtry must be at least 1");
  if (mtry > p) {
    warn("mtry " + std::to_string(mtry) + " exceeds the variable count; clamped to " + std::to_string(p));
    mtry = p;
  }
  resolved.mtry = mtry;
  if (resolved.sampling_weights) {
    CORF_REQUIRE(resolved.sampling_weights->size() == p, "sampling weight length does not match variable count");
    CORF_REQUIRE(resolved.sampling_weights->support_size() > 0, "sampling weights are all zero");
  }

  const Presorted sorted(data.X);
  const CandidateSampler sampler(resolved.sampling_weights ? &*resolved.sampling_weights : nullptr, p);
  const GrowContext ctx{data, sorted, sampler, mtry, params.min_node_size};

  const std::size_t workers = detail::resolve_threads(params.threads);
  std::vector<Workspace> scratch(workers);
  for (auto& ws : scratch) ws.stamp.assign(p, 0);

  std::vector<Tree> trees(params.ntree);
  detail::parallel_for(params.ntree, workers, [&](std::size_t t, std::size_t worker) {
    Rng rng(derive_seed(params.seed, t));
    trees[t] = grow_tree(ctx, rng, scratch[worker]);
  });
  return Forest(std::move(trees), std::move(resolved), p);
}

std::vector<double> predict_forest(const Forest& forest, const Eigen::MatrixXd& X) {
  CORF_REQUIRE(static_cast<std::size_t>(X.cols()) == forest.n_variables(),
               "prediction matrix has " + std::to_string(X.cols()) + " columns, forest expects " +
                   std::to_string(forest.n_variables()));
  CORF_REQUIRE(!forest.trees().empty(), "forest has no trees");
  const auto rows = static_cast<std::size_t>(X.rows());
  std::vector<double> out(rows, 0.0);
  detail::parallel_for(rows, forest.params().threads, [&](std::size_t i, std::size_t) {
    const auto r = static_cast<Eigen::Index>(i);
    auto value = [&](std::size_t j) { return X(r, static_cast<Eigen::Index>(j)); };
    double votes = 0.0;
    for (const auto& tree : forest.trees()) votes += Tree::vote(tree.leaf_for(value));
    out[i] = votes / static_cast<double>(forest.trees().size());
  });
  return out;
}

double OobPrediction::mean_oob_fraction(std::size_t ntree) const {
  if (coverage.empty() || ntree == 0) return 0.0;
  double total = 0.0;
  for (auto c : coverage) total += static_cast<double>(c) / static_cast<double>(ntree);
  return total / static_cast<double>(coverage.size());
}

std::vector<std::size_t> OobPrediction::defined() const {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < vote_fraction.size(); ++i) {
    if (vote_fraction[i]) idx.push_back(i);
  }
  return idx;
}

OobPrediction oob_probabilities(const Forest& forest, const PrimaryDataset& data) {
  CORF_REQUIRE(data.p() == forest.n_variables(), "dataset variable count does not match the forest");
  const std::size_t n = data.n();
  for (const auto& tree : forest.trees()) {
    CORF_REQUIRE(tree.inbag_counts.size() == n, "dataset is not the training set of this forest");
  }
  OobPrediction out;
  out.vote_fraction.assign(n, std::nullopt);
  out.coverage.assign(n, 0);
  detail::parallel_for(n, forest.params().threads, [&](std::size_t i, std::size_t) {
    const auto r = static_cast<Eigen::Index>(i);
    auto value = [&](std::size_t j) { return data.X(r, static_cast<Eigen::Index>(j)); };
    double votes = 0.0;
    std::uint32_t covered = 0;
    for (const auto& tree : forest.trees()) {
      if (tree.inbag_counts[i] != 0) continue;
      votes += Tree::vote(tree.leaf_for(value));
      ++covered;
    }
    out.coverage[i] = covered;
    if (covered > 0) out.vote_fraction[i] = votes / covered;
  });
  return out;
}

}  // namespace corf
