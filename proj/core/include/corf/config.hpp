#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "corf/pipeline.hpp"

namespace corf {

/// Settings of one CLI run, from a JSON file and/or flags. Every field is
/// optional so flags can override a partial file.
struct RunConfig {
  std::optional<std::filesystem::path> primary;
  std::optional<std::filesystem::path> labels;
  std::optional<std::filesystem::path> codata;
  std::optional<std::filesystem::path> schema;
  std::optional<std::filesystem::path> out;
  std::optional<std::filesystem::path> model;

  std::optional<std::size_t> ntree;
  std::optional<std::size_t> mtry;
  std::optional<std::size_t> min_node_size;
  std::optional<double> gamma;
  std::optional<std::vector<double>> gamma_grid;
  std::optional<std::size_t> folds;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> threads;
  std::optional<OobCriterion> criterion;
  std::optional<bool> anscombe;
  std::optional<bool> standardize;
  std::optional<bool> allow_subset;

  /// Fields set in `other` replace ours.
  void merge(const RunConfig& other);
  /// Throws InputError if a referenced input file does not exist.
  void check_inputs() const;
  /// Pipeline parameters with defaults for unset fields.
  PipelineParams pipeline_params() const;
};

/// Parses a JSON object whose keys are the RunConfig field names. Unknown
/// keys and wrongly typed values are rejected with InputError.
RunConfig load_run_config(const std::filesystem::path& path);
RunConfig parse_run_config(const std::string& json_text, const std::string& origin = "config");

/// Splits "0.5,1,2" into numbers. Throws InputError on a malformed entry.
std::vector<double> parse_number_list(const std::string& text);

}  // namespace corf
