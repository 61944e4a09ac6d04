#include "corf/dataset.hpp"

#include <cmath>
#include <unordered_set>

#include "corf/error.hpp"

namespace corf {

void PrimaryDataset::validate() const {
  if (X.rows() < 2) throw InputError("primary data needs at least 2 samples");
  if (X.cols() < 1) throw InputError("primary data needs at least 1 variable");
  if (y.size() != n()) throw InputError("label count does not match sample count");
  if (variable_ids.size() != p()) throw InputError("variable id count does not match column count");
  if (sample_ids.size() != n()) throw InputError("sample id count does not match row count");
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (y[i] > 1) throw InputError("label of sample " + sample_ids[i] + " is not 0/1");
  }
  for (Eigen::Index j = 0; j < X.cols(); ++j) {
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
      if (!std::isfinite(X(i, j))) {
        throw InputError("non-finite value at (" + std::to_string(i) + "," + std::to_string(j) + ")");
      }
    }
  }
  std::unordered_set<std::string> seen;
  for (const auto& id : variable_ids) {
    if (!seen.insert(id).second) throw InputError("duplicate variable id: " + id);
  }
  seen.clear();
  for (const auto& id : sample_ids) {
    if (!seen.insert(id).second) throw InputError("duplicate sample id: " + id);
  }
}

PrimaryDataset PrimaryDataset::subset(const std::vector<std::size_t>& rows) const {
  PrimaryDataset out;
  out.X.resize(static_cast<Eigen::Index>(rows.size()), X.cols());
  out.y.reserve(rows.size());
  out.sample_ids.reserve(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    CORF_REQUIRE(rows[r] < n(), "subset row out of range");
    out.X.row(static_cast<Eigen::Index>(r)) = X.row(static_cast<Eigen::Index>(rows[r]));
    out.y.push_back(y[rows[r]]);
    out.sample_ids.push_back(sample_ids[rows[r]]);
  }
  out.variable_ids = variable_ids;
  return out;
}

PrimaryDataset make_dataset(Eigen::MatrixXd X, Labels y) {
  PrimaryDataset d;
  d.X = std::move(X);
  d.y = std::move(y);
  d.variable_ids.reserve(d.p());
  for (std::size_t j = 0; j < d.p(); ++j) d.variable_ids.push_back("v" + std::to_string(j));
  d.sample_ids.reserve(d.n());
  for (std::size_t i = 0; i < d.n(); ++i) d.sample_ids.push_back("s" + std::to_string(i));
  d.validate();
  return d;
}

}  // namespace corf
