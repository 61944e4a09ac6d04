#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "corf/codata.hpp"
#include "corf/dataset.hpp"

namespace corf {

/// Primary matrix CSV (header: corner cell then variable ids; rows: sample id
/// then values) plus a labels CSV of "sample_id,label" rows with an optional
/// header. Rows are matched to labels by sample id. Bad cells are reported
/// as (row, column), both 1-based over the data block.
PrimaryDataset load_primary(const std::filesystem::path& matrix_path, const std::filesystem::path& labels_path);

/// Matrix only; labels are left empty (prediction input).
PrimaryDataset load_features(const std::filesystem::path& matrix_path);

struct ColumnSpec {
  std::string name;
  ColumnKind kind = ColumnKind::continuous;
  Monotonicity monotonicity = Monotonicity::none;
  /// Level order for nominal columns; the first is the reference. Empty
  /// means the sorted distinct values.
  std::vector<std::string> levels;
};

/// Declares the co-data columns. JSON:
///   {"columns": [{"name": .., "kind": "nominal"|"continuous",
///                 "monotonicity": "increasing"|"decreasing"|"none",
///                 "levels": [..]}, ..],
///    "grouping": "<nominal column>"}
/// Unknown keys are rejected.
struct CoDataSchema {
  std::vector<ColumnSpec> columns;
  /// When set, run in grouped mode on this nominal column.
  std::optional<std::string> grouping;

  void validate() const;
};

CoDataSchema load_schema(const std::filesystem::path& path);
void save_schema(const CoDataSchema& schema, const std::filesystem::path& path);

/// Co-data CSV keyed by variable id (first column), aligned to
/// `variable_ids`. Every primary variable must be present; extra rows are
/// ignored.
CoDataDesign load_codata(const std::filesystem::path& matrix_path, const CoDataSchema& schema,
                         const std::vector<std::string>& variable_ids);

void write_primary(const PrimaryDataset& data, const std::filesystem::path& matrix_path,
                   const std::filesystem::path& labels_path);
void write_codata(const CoDataDesign& design, const std::filesystem::path& path);

/// CRC-32 of a file's bytes, for run manifests.
std::uint32_t file_crc32(const std::filesystem::path& path);

}  // namespace corf
