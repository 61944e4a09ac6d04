#pragma once

#include <filesystem>

#include "corf/dataset.hpp"
#include "corf/model_io.hpp"
#include "corf/pipeline.hpp"

namespace corf {

/// Number of grid points per continuous co-data column in codata_curves.csv.
inline constexpr std::size_t kCurveGridSize = 200;

/// Writes plot-ready tables into `dir` (created if needed):
///   roc_base.csv, roc_corf.csv   threshold,tpr,fpr from out-of-bag votes
///   codata_curves.csv            column,x,effect,p_hat; a grid over each
///                                continuous column and one row per level of
///                                each nominal column, other columns held at
///                                their reference (first level, median)
///   weights.csv                  variable_id,p_hat,w_tilde,V
///   metrics.json                 flat key-value summary
void emit_report(const ModelArtifact& model, const std::filesystem::path& dir);
void emit_report(const CorfResult& result, const PrimaryDataset& data, const std::filesystem::path& dir);

}  // namespace corf
