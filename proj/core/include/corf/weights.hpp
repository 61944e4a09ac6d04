#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace corf {

/// Candidate-variable sampling distribution: nonnegative, sums to one.
class SamplingWeights {
 public:
  static SamplingWeights uniform(std::size_t p);

  /// Normalizes `raw` (nonnegative, finite, positive sum) to a distribution.
  static SamplingWeights from_unnormalized(std::span<const double> raw);

  /// Accepts an already-normalized vector; verifies the sum within 1e-12.
  static SamplingWeights from_normalized(std::vector<double> w);

  std::size_t size() const { return w_.size(); }
  double operator[](std::size_t j) const { return w_[j]; }
  const std::vector<double>& values() const { return w_; }
  std::size_t support_size() const;
  bool is_uniform() const;

 private:
  explicit SamplingWeights(std::vector<double> w) : w_(std::move(w)) {}
  std::vector<double> w_;
};

}  // namespace corf
