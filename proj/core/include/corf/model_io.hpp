#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "corf/codata_model.hpp"
#include "corf/dataset.hpp"
#include "corf/error.hpp"
#include "corf/forest.hpp"
#include "corf/pipeline.hpp"
#include "corf/preprocess.hpp"
#include "corf/weights.hpp"

namespace corf {

/// Everything needed to predict with, and report on, a fitted model.
struct ModelArtifact {
  static constexpr std::uint32_t format_version = 1;

  /// The final forest (the co-data forest, or the base forest when the
  /// co-data step failed).
  Forest forest;
  std::optional<CoDataFit> codata_fit;
  SamplingWeights weights = SamplingWeights::uniform(1);

  std::vector<std::string> variable_ids;
  Preprocessing preprocessing;
  std::uint64_t seed = 1;
  double gamma = 1.0;
  bool degraded = false;
  std::string degraded_reason;
  std::map<std::string, double> metrics;

  // Training summaries kept for reports.
  std::vector<std::uint64_t> base_split_counts;
  std::vector<std::string> sample_ids;
  Labels labels;
  std::vector<std::optional<double>> base_oob;
  std::vector<std::optional<double>> corf_oob;
};

/// Packs a pipeline result and its training data.
ModelArtifact make_artifact(const CorfResult& result, const PrimaryDataset& data, const Preprocessing& preprocessing);

/// Flat metric summary of a pipeline result.
std::map<std::string, double> summary_metrics(const CorfResult& result);

enum class ModelFormatProblem { not_corf, unsupported_version, truncated, corrupt };

class ModelFormatError : public IoError {
 public:
  ModelFormatError(ModelFormatProblem problem, const std::string& what) : IoError(what), problem_(problem) {}
  ModelFormatProblem problem() const noexcept { return problem_; }

 private:
  ModelFormatProblem problem_;
};

/// Container: "CORF", u32 version, u32 header length, JSON header, u64 body
/// length, CBOR body, u32 CRC-32 of all preceding bytes. Integers are
/// little-endian.
std::vector<std::uint8_t> serialize_model(const ModelArtifact& model);
ModelArtifact deserialize_model(const std::vector<std::uint8_t>& bytes);

void save_model(const ModelArtifact& model, const std::filesystem::path& path);
ModelArtifact load_model(const std::filesystem::path& path);

/// Predictions for `data`, whose columns are matched to the model's
/// variables by id and transformed with the stored preprocessing. A missing
/// variable is an error unless `allow_subset`, in which case its column is
/// set to 0 after preprocessing (the training mean when standardized) and a
/// warning is issued.
std::vector<double> predict_model(const ModelArtifact& model, const PrimaryDataset& data, bool allow_subset = false);

}  // namespace corf
