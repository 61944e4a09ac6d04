#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "corf/codata.hpp"
#include "corf/codata_model.hpp"
#include "corf/dataset.hpp"
#include "corf/forest.hpp"
#include "corf/weights.hpp"

namespace corf {

enum class OobCriterion { auc, brier, error_rate };

std::string_view to_string(OobCriterion c);
OobCriterion parse_criterion(std::string_view text);

struct PipelineParams {
  double gamma = 1.0;
  /// When set, gamma is tuned over these values by out-of-bag performance.
  std::optional<std::vector<double>> gamma_grid;
  ForestParams forest;
  std::size_t cv_folds = 10;
  OobCriterion criterion = OobCriterion::auc;
  CoDataFitOptions codata;
};

/// Either a general co-data design (model-based weights) or an a priori
/// grouping (group-specific weights).
using CoDataSource = std::variant<CoDataDesign, GroupingCoData>;

struct Performance {
  double auc = 0.0;
  double brier = 0.0;
  double error_rate = 0.0;
  std::size_t scored = 0;  // samples with a defined prediction
};

/// Per-group selection summary of the grouped mode.
struct GroupSummary {
  std::vector<std::string> names;
  std::vector<std::size_t> sizes;
  std::vector<double> p_sel;  // share of splits in the group divided by its size
};

struct GammaScore {
  double gamma = 0.0;
  double score = 0.0;  // criterion value, larger is better for auc
  Performance oob;
};

struct CorfResult {
  Forest base_forest;
  OobPrediction base_oob;
  std::optional<CoDataFit> codata_fit;
  std::optional<GroupSummary> group_summary;
  SamplingWeights weights = SamplingWeights::uniform(1);
  Forest corf_forest;
  OobPrediction corf_oob;
  Performance base;
  Performance corf;
  double chosen_gamma = 1.0;
  std::vector<GammaScore> gamma_scores;
  /// Set when the co-data step failed and the base forest stands in.
  bool degraded = false;
  std::string degraded_reason;
  /// Weight thresholding removed every variable and uniform weights were used.
  bool uniform_fallback = false;
};

/// Group-specific weights: p_sel_g = (sum of V_j over g / K) / |g|,
/// w_g = max(p_sel_g - gamma / P, 0) for every member, normalized over
/// variables. All-zero weights fall back to uniform with a warning
/// (`fallback`, if given, is set accordingly).
SamplingWeights group_weights(std::span<const std::uint64_t> split_counts, std::uint64_t total_splits,
                              const GroupingCoData& grouping, double gamma, bool* fallback = nullptr);

/// Model-based weights w_j = max(p_hat_j - gamma / P, 0), normalized, with the
/// same uniform fallback.
SamplingWeights model_weights(std::span<const double> p_hat, double gamma, bool* fallback = nullptr);

/// Out-of-bag AUC, Brier score and error rate over samples with defined votes.
Performance evaluate_oob(const OobPrediction& oob, std::span<const std::uint8_t> labels);

/// Larger-is-better score of a performance under a criterion.
double criterion_score(const Performance& perf, OobCriterion criterion);

/// Base forest, co-data fit, thresholded weights for params.gamma, and the
/// refit. Both forests use params.forest with seeds derived from its seed.
CorfResult run_corf(const PrimaryDataset& data, const CoDataSource& codata, const PipelineParams& params);

/// As run_corf, but refits one forest per value of params.gamma_grid and
/// keeps the one with the best out-of-bag criterion (ties go to the larger
/// gamma). Every grid score is recorded.
CorfResult tune_gamma(const PrimaryDataset& data, const CoDataSource& codata, const PipelineParams& params);

struct FoldMetrics {
  std::size_t fold = 0;
  std::size_t size = 0;
  std::optional<Performance> base;  // unset when the fold holds one class
  std::optional<Performance> corf;
  double chosen_gamma = 1.0;
};

struct CvResult {
  std::vector<std::size_t> fold_of;  // test fold per sample
  std::vector<double> base_scores;   // pooled held-out predictions
  std::vector<double> corf_scores;
  std::vector<FoldMetrics> folds;
  Performance base;
  Performance corf;
  bool leave_one_out = false;
};

/// Stratified fold labels for y, seeded. Throws InputError if a class has
/// fewer members than folds (unless folds == n, which gives leave-one-out).
std::vector<std::size_t> stratified_folds(std::span<const std::uint8_t> y, std::size_t folds, std::uint64_t seed);

/// Runs the whole pipeline (including gamma tuning when a grid is given) on
/// each training split and predicts the held-out rows from their features
/// only. Metrics are reported per fold and on the pooled predictions.
CvResult cross_validate(const PrimaryDataset& data, const CoDataSource& codata, const PipelineParams& params,
                        std::size_t folds);

}  // namespace corf
