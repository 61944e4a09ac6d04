#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace corf {

using Labels = std::vector<std::uint8_t>;

/// n samples by P variables with binary labels. X is column-major so a
/// variable's values are contiguous.
struct PrimaryDataset {
  Eigen::MatrixXd X;
  Labels y;
  std::vector<std::string> variable_ids;
  std::vector<std::string> sample_ids;

  std::size_t n() const { return static_cast<std::size_t>(X.rows()); }
  std::size_t p() const { return static_cast<std::size_t>(X.cols()); }

  /// Throws InputError on any violated invariant (shape, labels, finiteness,
  /// duplicate ids).
  void validate() const;

  /// Rows `rows` (in that order) as a new dataset.
  PrimaryDataset subset(const std::vector<std::size_t>& rows) const;
};

/// Build a dataset with generated ids ("v0".., "s0"..) and validate it.
PrimaryDataset make_dataset(Eigen::MatrixXd X, Labels y);

}  // namespace corf
