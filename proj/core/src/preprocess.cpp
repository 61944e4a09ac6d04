#include "corf/preprocess.hpp"

#include <cmath>
#include <unordered_map>

#include "corf/error.hpp"
#include "corf/log.hpp"

namespace corf {

Eigen::MatrixXd anscombe_transform(const Eigen::MatrixXd& x) {
  Eigen::MatrixXd out(x.rows(), x.cols());
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      const double v = x(i, j);
      if (!(v >= 0.0)) {
        throw InputError("Anscombe transform needs nonnegative data; found " + std::to_string(v) + " at (" +
                         std::to_string(i) + "," + std::to_string(j) + ")");
      }
      out(i, j) = std::sqrt(v + 0.375);
    }
  }
  return out;
}

Eigen::MatrixXd Standardization::apply(const Eigen::MatrixXd& x) const {
  CORF_REQUIRE(static_cast<std::size_t>(x.cols()) == kept.size() + dropped.size(),
               "matrix has a different column count than the training matrix");
  Eigen::MatrixXd out(x.rows(), static_cast<Eigen::Index>(kept.size()));
  for (std::size_t k = 0; k < kept.size(); ++k) {
    const auto c = static_cast<Eigen::Index>(k);
    out.col(c) = (x.col(static_cast<Eigen::Index>(kept[k])).array() - mean[k]) / sd[k];
  }
  return out;
}

StandardizedMatrix standardize_columns(const Eigen::MatrixXd& x) {
  if (x.rows() < 2) throw InputError("standardization needs at least two rows");
  StandardizedMatrix result;
  auto& s = result.params;
  const double n = static_cast<double>(x.rows());
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    const double mean = x.col(j).mean();
    const double ss = (x.col(j).array() - mean).square().sum();
    const double sd = std::sqrt(ss / (n - 1.0));
    if (!(sd > 0.0)) {
      s.dropped.push_back(static_cast<std::size_t>(j));
      continue;
    }
    s.kept.push_back(static_cast<std::size_t>(j));
    s.mean.push_back(mean);
    s.sd.push_back(sd);
  }
  if (!s.dropped.empty()) warn("dropped " + std::to_string(s.dropped.size()) + " constant column(s)");
  result.x = s.apply(x);
  return result;
}

PrimaryDataset select_variables(const PrimaryDataset& data, const std::vector<std::string>& ids) {
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t j = 0; j < data.p(); ++j) index.emplace(data.variable_ids[j], j);
  PrimaryDataset out;
  out.y = data.y;
  out.sample_ids = data.sample_ids;
  out.variable_ids = ids;
  out.X.resize(data.X.rows(), static_cast<Eigen::Index>(ids.size()));
  for (std::size_t k = 0; k < ids.size(); ++k) {
    auto it = index.find(ids[k]);
    if (it == index.end()) throw InputError("variable id " + ids[k] + " is missing");
    out.X.col(static_cast<Eigen::Index>(k)) = data.X.col(static_cast<Eigen::Index>(it->second));
  }
  return out;
}

void Preprocessing::apply(PrimaryDataset& data) const {
  data = select_variables(data, variable_ids);
  if (anscombe) data.X = anscombe_transform(data.X);
  if (standardize) {
    for (std::size_t k = 0; k < variable_ids.size(); ++k) {
      auto col = data.X.col(static_cast<Eigen::Index>(k));
      col = (col.array() - mean[k]) / sd[k];
    }
  }
}

Preprocessing fit_preprocessing(PrimaryDataset& data, bool anscombe, bool standardize) {
  Preprocessing pre;
  pre.anscombe = anscombe;
  pre.standardize = standardize;
  if (anscombe) data.X = anscombe_transform(data.X);
  if (standardize) {
    auto st = standardize_columns(data.X);
    data.X = std::move(st.x);
    std::vector<std::string> ids;
    ids.reserve(st.params.kept.size());
    for (auto j : st.params.kept) ids.push_back(data.variable_ids[j]);
    for (auto j : st.params.dropped) warn("dropped constant variable " + data.variable_ids[j]);
    data.variable_ids = std::move(ids);
    pre.mean = std::move(st.params.mean);
    pre.sd = std::move(st.params.sd);
  }
  pre.variable_ids = data.variable_ids;
  return pre;
}

}  // namespace corf
