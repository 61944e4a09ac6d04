#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <string>
#include <vector>

#include "corf/dataset.hpp"

namespace corf {

/// Elementwise sqrt(x + 3/8). Throws InputError on a negative entry.
Eigen::MatrixXd anscombe_transform(const Eigen::MatrixXd& x);

/// Column centering and scaling fitted on a training matrix.
struct Standardization {
  std::vector<std::size_t> kept;     // input columns that survive, ascending
  std::vector<std::size_t> dropped;  // constant input columns
  std::vector<double> mean;          // per kept column
  std::vector<double> sd;            // sample (n-1) standard deviation

  /// Applies the stored parameters to a matrix with the training columns.
  Eigen::MatrixXd apply(const Eigen::MatrixXd& x) const;
};

struct StandardizedMatrix {
  Eigen::MatrixXd x;
  Standardization params;
};

/// (x - mean) / sd per column. Constant columns are dropped with a warning.
/// Throws InputError for fewer than two rows.
StandardizedMatrix standardize_columns(const Eigen::MatrixXd& x);

/// Transformations applied to a primary matrix, keyed by variable id so they
/// can be replayed on a validation matrix.
struct Preprocessing {
  bool anscombe = false;
  bool standardize = false;
  std::vector<std::string> variable_ids;  // ids after dropping
  std::vector<double> mean;
  std::vector<double> sd;

  /// Transforms `data` in place: columns are taken by id in variable_ids
  /// order, then Anscombe and centering/scaling are applied.
  void apply(PrimaryDataset& data) const;
};

/// Fits the requested steps on `data` and transforms it in place.
Preprocessing fit_preprocessing(PrimaryDataset& data, bool anscombe, bool standardize);

/// Columns of `data` reordered (and restricted) to `ids`.
PrimaryDataset select_variables(const PrimaryDataset& data, const std::vector<std::string>& ids);

}  // namespace corf
