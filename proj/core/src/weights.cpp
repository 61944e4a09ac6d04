#include "corf/weights.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "corf/error.hpp"

namespace corf {

SamplingWeights SamplingWeights::uniform(std::size_t p) {
  CORF_REQUIRE(p > 0, "sampling weights need at least one variable");
  return SamplingWeights(std::vector<double>(p, 1.0 / static_cast<double>(p)));
}

SamplingWeights SamplingWeights::from_unnormalized(std::span<const double> raw) {
  CORF_REQUIRE(!raw.empty(), "sampling weights need at least one variable");
  double total = 0.0;
  for (double v : raw) {
    CORF_REQUIRE(std::isfinite(v) && v >= 0.0, "sampling weights must be finite and nonnegative");
    total += v;
  }
  CORF_REQUIRE(total > 0.0, "sampling weights are all zero");
  std::vector<double> w(raw.begin(), raw.end());
  for (auto& v : w) v /= total;
  return SamplingWeights(std::move(w));
}

SamplingWeights SamplingWeights::from_normalized(std::vector<double> w) {
  CORF_REQUIRE(!w.empty(), "sampling weights need at least one variable");
  double total = 0.0;
  for (double v : w) {
    CORF_REQUIRE(std::isfinite(v) && v >= 0.0, "sampling weights must be finite and nonnegative");
    total += v;
  }
  CORF_REQUIRE(std::abs(total - 1.0) <= 1e-12, "sampling weights do not sum to one");
  return SamplingWeights(std::move(w));
}

std::size_t SamplingWeights::support_size() const {
  return static_cast<std::size_t>(std::count_if(w_.begin(), w_.end(), [](double v) { return v > 0.0; }));
}

bool SamplingWeights::is_uniform() const {
  return std::all_of(w_.begin(), w_.end(), [&](double v) { return v == w_.front(); });
}

}  // namespace corf
