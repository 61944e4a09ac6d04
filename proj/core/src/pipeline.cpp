#include "corf/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "corf/error.hpp"
#include "corf/log.hpp"
#include "corf/metrics.hpp"
#include "corf/random.hpp"

namespace corf {
namespace {

// Stream ids for seeds derived from PipelineParams::forest.seed.
constexpr std::uint64_t kBaseStream = 1;
constexpr std::uint64_t kCorfStream = 2;
constexpr std::uint64_t kFoldAssignStream = 3;
constexpr std::uint64_t kFoldPipelineStream = 1000;

SamplingWeights threshold_and_normalize(std::vector<double> raw, double gamma, bool* fallback) {
  CORF_REQUIRE(std::isfinite(gamma) && gamma >= 0.0, "gamma must be finite and nonnegative");
  const double cut = gamma / static_cast<double>(raw.size());
  double total = 0.0;
  for (auto& w : raw) {
    // Values within rounding of the cut count as removed.
    w = w - cut > 1e-10 * cut ? w - cut : 0.0;
    total += w;
  }
  if (fallback) *fallback = false;
  if (total <= 0.0) {
    warn("thresholding removed every variable (gamma " + std::to_string(gamma) + "); using uniform weights");
    if (fallback) *fallback = true;
    return SamplingWeights::uniform(raw.size());
  }
  return SamplingWeights::from_unnormalized(raw);
}

struct Stage1 {
  Forest base;
  OobPrediction base_oob;
  Performance base_perf;
  std::optional<CoDataFit> fit;
  std::optional<GroupSummary> groups;
  std::string failure;  // non-empty when the co-data step failed
};

Stage1 fit_base_and_codata(const PrimaryDataset& data, const CoDataSource& codata, const PipelineParams& params) {
  Stage1 st;
  ForestParams base_params = params.forest;
  base_params.sampling_weights.reset();
  base_params.seed = derive_seed(params.forest.seed, kBaseStream);
  st.base = fit_forest(data, base_params);
  st.base_oob = oob_probabilities(st.base, data);
  st.base_perf = evaluate_oob(st.base_oob, data.y);

  if (const auto* design = std::get_if<CoDataDesign>(&codata)) {
    CORF_REQUIRE(design->p() == data.p(), "co-data row count does not match the variable count");
    try {
      st.fit = fit_codata_model(st.base.split_counts(), st.base.total_splits(), *design, params.codata);
    } catch (const ContractError&) {
      throw;
    } catch (const Error& e) {
      st.failure = e.what();
      warn(std::string("co-data fit failed, continuing with the base forest: ") + e.what());
    }
  } else {
    const auto& grouping = std::get<GroupingCoData>(codata);
    grouping.validate();
    CORF_REQUIRE(grouping.group_of.size() == data.p(), "grouping length does not match the variable count");
    GroupSummary summary{grouping.group_names, grouping.group_sizes(), {}};
    std::vector<double> mass(grouping.groups(), 0.0);
    for (std::size_t j = 0; j < grouping.group_of.size(); ++j) {
      mass[grouping.group_of[j]] += static_cast<double>(st.base.split_counts()[j]);
    }
    for (std::size_t g = 0; g < mass.size(); ++g) {
      summary.p_sel.push_back(mass[g] / static_cast<double>(st.base.total_splits()) /
                              static_cast<double>(summary.sizes[g]));
    }
    st.groups = std::move(summary);
  }
  return st;
}

SamplingWeights weights_for(const Stage1& st, const CoDataSource& codata, double gamma, bool* fallback) {
  if (st.fit) return model_weights(st.fit->p_hat, gamma, fallback);
  return group_weights(st.base.split_counts(), st.base.total_splits(), std::get<GroupingCoData>(codata), gamma,
                       fallback);
}

CorfResult assemble(Stage1&& st) {
  CorfResult r;
  r.base_forest = std::move(st.base);
  r.base_oob = std::move(st.base_oob);
  r.base = st.base_perf;
  r.codata_fit = std::move(st.fit);
  r.group_summary = std::move(st.groups);
  return r;
}

CorfResult degraded_result(Stage1&& st) {
  const std::string reason = st.failure;
  CorfResult r = assemble(std::move(st));
  r.degraded = true;
  r.degraded_reason = reason;
  r.weights = SamplingWeights::uniform(r.base_forest.n_variables());
  r.corf_forest = r.base_forest;
  r.corf_oob = r.base_oob;
  r.corf = r.base;
  return r;
}

struct Refit {
  Forest forest;
  OobPrediction oob;
  Performance perf;
};

Refit refit(const PrimaryDataset& data, const PipelineParams& params, const SamplingWeights& weights) {
  ForestParams fp = params.forest;
  fp.sampling_weights = weights;
  fp.seed = derive_seed(params.forest.seed, kCorfStream);
  Refit out;
  out.forest = fit_forest(data, fp);
  out.oob = oob_probabilities(out.forest, data);
  out.perf = evaluate_oob(out.oob, data.y);
  return out;
}

}  // namespace

std::string_view to_string(OobCriterion c) {
  switch (c) {
    case OobCriterion::brier:
      return "brier";
    case OobCriterion::error_rate:
      return "error";
    case OobCriterion::auc:
      break;
  }
  return "auc";
}

OobCriterion parse_criterion(std::string_view text) {
  if (text == "auc") return OobCriterion::auc;
  if (text == "brier") return OobCriterion::brier;
  if (text == "error" || text == "error_rate") return OobCriterion::error_rate;
  throw InputError("unknown criterion '" + std::string(text) + "' (expected auc, brier or error)");
}

SamplingWeights group_weights(std::span<const std::uint64_t> split_counts, std::uint64_t total_splits,
                              const GroupingCoData& grouping, double gamma, bool* fallback) {
  grouping.validate();
  CORF_REQUIRE(total_splits > 0, "group weights need a forest with at least one split");
  CORF_REQUIRE(split_counts.size() == grouping.group_of.size(), "split counts and grouping differ in length");
  const auto sizes = grouping.group_sizes();
  std::vector<double> mass(grouping.groups(), 0.0);
  for (std::size_t j = 0; j < split_counts.size(); ++j) {
    mass[grouping.group_of[j]] += static_cast<double>(split_counts[j]);
  }
  std::vector<double> raw(split_counts.size());
  for (std::size_t j = 0; j < raw.size(); ++j) {
    const auto g = grouping.group_of[j];
    raw[j] = mass[g] / static_cast<double>(total_splits) / static_cast<double>(sizes[g]);
  }
  return threshold_and_normalize(std::move(raw), gamma, fallback);
}

SamplingWeights model_weights(std::span<const double> p_hat, double gamma, bool* fallback) {
  CORF_REQUIRE(!p_hat.empty(), "no fitted probabilities");
  for (double p : p_hat) CORF_REQUIRE(std::isfinite(p) && p >= 0.0 && p <= 1.0, "fitted probabilities must be finite, in [0, 1]");
  return threshold_and_normalize({p_hat.begin(), p_hat.end()}, gamma, fallback);
}

Performance evaluate_oob(const OobPrediction& oob, std::span<const std::uint8_t> labels) {
  CORF_REQUIRE(oob.vote_fraction.size() == labels.size(), "oob predictions and labels differ in length");
  std::vector<double> scores;
  std::vector<std::uint8_t> y;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (!oob.vote_fraction[i]) continue;
    scores.push_back(*oob.vote_fraction[i]);
    y.push_back(labels[i]);
  }
  Performance perf;
  perf.scored = scores.size();
  if (scores.empty()) {
    perf.auc = perf.brier = perf.error_rate = std::numeric_limits<double>::quiet_NaN();
    return perf;
  }
  const auto ones = static_cast<std::size_t>(std::count(y.begin(), y.end(), std::uint8_t{1}));
  const bool both = ones > 0 && ones < y.size();
  perf.auc = both ? auc(scores, y) : std::numeric_limits<double>::quiet_NaN();
  perf.brier = brier_score(scores, y);
  perf.error_rate = error_rate(scores, y);
  return perf;
}

double criterion_score(const Performance& perf, OobCriterion criterion) {
  switch (criterion) {
    case OobCriterion::brier:
      return -perf.brier;
    case OobCriterion::error_rate:
      return -perf.error_rate;
    case OobCriterion::auc:
      break;
  }
  return perf.auc;
}

CorfResult run_corf(const PrimaryDataset& data, const CoDataSource& codata, const PipelineParams& params) {
  Stage1 st = fit_base_and_codata(data, codata, params);
  if (!st.failure.empty()) {
    CorfResult r = degraded_result(std::move(st));
    r.chosen_gamma = params.gamma;
    return r;
  }
  bool fallback = false;
  SamplingWeights weights = weights_for(st, codata, params.gamma, &fallback);
  CorfResult r = assemble(std::move(st));
  Refit fit = refit(data, params, weights);
  r.weights = std::move(weights);
  r.uniform_fallback = fallback;
  r.corf_forest = std::move(fit.forest);
  r.corf_oob = std::move(fit.oob);
  r.corf = fit.perf;
  r.chosen_gamma = params.gamma;
  return r;
}

CorfResult tune_gamma(const PrimaryDataset& data, const CoDataSource& codata, const PipelineParams& params) {
  CORF_REQUIRE(params.gamma_grid && !params.gamma_grid->empty(), "gamma tuning needs a nonempty grid");
  for (double g : *params.gamma_grid) CORF_REQUIRE(std::isfinite(g) && g >= 0.0, "gamma grid values must be nonnegative");

  Stage1 st = fit_base_and_codata(data, codata, params);
  if (!st.failure.empty()) {
    CorfResult r = degraded_result(std::move(st));
    r.chosen_gamma = params.gamma_grid->front();
    return r;
  }

  std::vector<GammaScore> scores;
  std::optional<Refit> best;
  SamplingWeights best_weights = SamplingWeights::uniform(data.p());
  bool best_fallback = false;
  double best_gamma = 0.0;
  double best_score = -std::numeric_limits<double>::infinity();
  for (double gamma : *params.gamma_grid) {
    bool fallback = false;
    SamplingWeights w = weights_for(st, codata, gamma, &fallback);
    Refit fit = refit(data, params, w);
    const double score = criterion_score(fit.perf, params.criterion);
    scores.push_back({gamma, score, fit.perf});
    const bool better = !best || score > best_score || (score == best_score && gamma > best_gamma) ||
                        (std::isnan(best_score) && !std::isnan(score));
    if (better) {
      best_score = score;
      best_gamma = gamma;
      best_weights = std::move(w);
      best_fallback = fallback;
      best = std::move(fit);
    }
  }

  CorfResult r = assemble(std::move(st));
  r.weights = std::move(best_weights);
  r.uniform_fallback = best_fallback;
  r.corf_forest = std::move(best->forest);
  r.corf_oob = std::move(best->oob);
  r.corf = best->perf;
  r.chosen_gamma = best_gamma;
  r.gamma_scores = std::move(scores);
  return r;
}

std::vector<std::size_t> stratified_folds(std::span<const std::uint8_t> y, std::size_t folds, std::uint64_t seed) {
  const std::size_t n = y.size();
  CORF_REQUIRE(folds >= 2 && folds <= n, "fold count must lie in [2, n]");
  std::vector<std::size_t> fold_of(n, 0);
  Rng rng(seed);
  if (folds == n) {
    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;
    for (std::size_t i = n - 1; i > 0; --i) std::swap(perm[i], perm[rng.below(i + 1)]);
    for (std::size_t i = 0; i < n; ++i) fold_of[perm[i]] = i;
    return fold_of;
  }
  std::vector<std::size_t> by_class[2];
  for (std::size_t i = 0; i < n; ++i) by_class[y[i] ? 1 : 0].push_back(i);
  for (auto& members : by_class) {
    if (members.size() < folds) {
      throw InputError("impossible stratification: a class has " + std::to_string(members.size()) +
                       " samples for " + std::to_string(folds) + " folds");
    }
  }
  std::size_t position = 0;
  for (auto& members : by_class) {
    for (std::size_t i = members.size() - 1; i > 0; --i) std::swap(members[i], members[rng.below(i + 1)]);
    for (auto idx : members) fold_of[idx] = position++ % folds;
  }
  return fold_of;
}

CvResult cross_validate(const PrimaryDataset& data, const CoDataSource& codata, const PipelineParams& params,
                        std::size_t folds) {
  data.validate();
  const std::size_t n = data.n();
  CvResult cv;
  cv.leave_one_out = (folds == n);
  cv.fold_of = stratified_folds(data.y, folds, derive_seed(params.forest.seed, kFoldAssignStream));
  cv.base_scores.assign(n, 0.0);
  cv.corf_scores.assign(n, 0.0);

  for (std::size_t f = 0; f < folds; ++f) {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
    for (std::size_t i = 0; i < n; ++i) (cv.fold_of[i] == f ? test : train).push_back(i);
    const PrimaryDataset training = data.subset(train);

    PipelineParams fold_params = params;
    fold_params.forest.seed = derive_seed(params.forest.seed, kFoldPipelineStream + f);
    const CorfResult result = params.gamma_grid ? tune_gamma(training, codata, fold_params)
                                                : run_corf(training, codata, fold_params);

    // Held-out rows are predicted from their features alone.
    Eigen::MatrixXd features(static_cast<Eigen::Index>(test.size()), data.X.cols());
    for (std::size_t r = 0; r < test.size(); ++r) {
      features.row(static_cast<Eigen::Index>(r)) = data.X.row(static_cast<Eigen::Index>(test[r]));
    }
    const auto base_pred = predict_forest(result.base_forest, features);
    const auto corf_pred = predict_forest(result.corf_forest, features);
    for (std::size_t r = 0; r < test.size(); ++r) {
      cv.base_scores[test[r]] = base_pred[r];
      cv.corf_scores[test[r]] = corf_pred[r];
    }

    FoldMetrics fm;
    fm.fold = f;
    fm.size = test.size();
    fm.chosen_gamma = result.chosen_gamma;
    std::vector<std::uint8_t> labels;
    for (auto i : test) labels.push_back(data.y[i]);
    const auto ones = std::count(labels.begin(), labels.end(), std::uint8_t{1});
    if (ones > 0 && static_cast<std::size_t>(ones) < labels.size()) {
      fm.base = Performance{auc(base_pred, labels), brier_score(base_pred, labels), error_rate(base_pred, labels),
                            labels.size()};
      fm.corf = Performance{auc(corf_pred, labels), brier_score(corf_pred, labels), error_rate(corf_pred, labels),
                            labels.size()};
    }
    cv.folds.push_back(fm);
  }

  cv.base = Performance{auc(cv.base_scores, data.y), brier_score(cv.base_scores, data.y),
                        error_rate(cv.base_scores, data.y), n};
  cv.corf = Performance{auc(cv.corf_scores, data.y), brier_score(cv.corf_scores, data.y),
                        error_rate(cv.corf_scores, data.y), n};
  return cv;
}

}  // namespace corf
