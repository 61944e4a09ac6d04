#include "corf/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "corf/error.hpp"
#include "corf/random.hpp"

namespace corf {

SyntheticData generate_synthetic(const SyntheticSpec& spec) {
  if (spec.n < 2 || spec.p < 1) throw InputError("synthetic data needs n >= 2 and P >= 1");
  if (spec.n_informative > spec.p) throw InputError("n_informative exceeds P");
  if (!(spec.codata_quality >= 0.0 && spec.codata_quality <= 1.0)) {
    throw InputError("codata_quality must lie in [0, 1]");
  }
  if (!std::isfinite(spec.effect_size)) throw InputError("effect_size must be finite");
  if (!(spec.informative_correlation >= 0.0 && spec.informative_correlation < 1.0)) {
    throw InputError("informative_correlation must lie in [0, 1)");
  }

  SyntheticData out;
  Rng truth_rng(derive_seed(spec.seed, 1));
  std::vector<std::size_t> order(spec.p);
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t k = 0; k < spec.n_informative; ++k) {
    std::swap(order[k], order[k + truth_rng.below(spec.p - k)]);
  }
  out.informative.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(spec.n_informative));
  std::sort(out.informative.begin(), out.informative.end());

  const auto n = static_cast<Eigen::Index>(spec.n);
  const auto p = static_cast<Eigen::Index>(spec.p);
  Eigen::MatrixXd X(n, p);
  Rng x_rng(derive_seed(spec.seed, 2));
  for (Eigen::Index j = 0; j < p; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) X(i, j) = x_rng.normal();
  }
  const double rho = spec.informative_correlation;
  if (rho > 0.0) {
    Rng z_rng(derive_seed(spec.seed, 5));
    for (Eigen::Index i = 0; i < n; ++i) {
      const double z = z_rng.normal();
      for (auto j : out.informative) {
        auto& x = X(i, static_cast<Eigen::Index>(j));
        x = std::sqrt(rho) * z + std::sqrt(1.0 - rho) * x;
      }
    }
  }

  Labels y(spec.n);
  Rng y_rng(derive_seed(spec.seed, 3));
  const double k = static_cast<double>(spec.n_informative);
  const double scale = spec.n_informative > 0 ? spec.effect_size / std::sqrt(k * (1.0 + (k - 1.0) * rho)) : 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    double eta = 0.0;
    for (auto j : out.informative) eta += X(i, static_cast<Eigen::Index>(j));
    const double prob = 1.0 / (1.0 + std::exp(-scale * eta));
    y[static_cast<std::size_t>(i)] = y_rng.bernoulli(prob) ? 1 : 0;
  }

  std::vector<bool> truth(spec.p, false);
  for (auto j : out.informative) truth[j] = true;
  Rng c_rng(derive_seed(spec.seed, 4));
  std::vector<std::size_t> flag(spec.p);
  std::vector<double> score(spec.p);
  for (std::size_t j = 0; j < spec.p; ++j) {
    const bool agree = c_rng.bernoulli(spec.codata_quality);
    flag[j] = (truth[j] == agree) ? 1 : 0;
    score[j] = static_cast<double>(flag[j]) + c_rng.normal() * (1.0 - spec.codata_quality);
  }

  out.data.X = std::move(X);
  out.data.y = std::move(y);
  for (std::size_t j = 0; j < spec.p; ++j) out.data.variable_ids.push_back("v" + std::to_string(j));
  for (std::size_t i = 0; i < spec.n; ++i) out.data.sample_ids.push_back("s" + std::to_string(i));

  out.codata.variable_ids = out.data.variable_ids;
  out.codata.columns.push_back(CoDataColumn::nominal("flag", {"0", "1"}, std::move(flag)));
  out.codata.columns.push_back(CoDataColumn::continuous("score", std::move(score), Monotonicity::increasing));
  return out;
}

}  // namespace corf
