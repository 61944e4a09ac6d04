#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "corf/codata.hpp"
#include "corf/dataset.hpp"

namespace corf {

struct SyntheticSpec {
  std::size_t n = 150;
  std::size_t p = 2000;
  std::size_t n_informative = 100;
  /// Standard deviation of the logit of P(y = 1), which is proportional to
  /// the sum of the informative variables.
  double effect_size = 1.5;
  /// Pairwise correlation among informative variables (a shared latent
  /// factor); every column stays marginally standard normal.
  double informative_correlation = 0.1;
  /// Probability that the co-data flag agrees with the truth; 0.5 makes the
  /// flag independent of it.
  double codata_quality = 0.9;
  std::uint64_t seed = 1;
};

struct SyntheticData {
  PrimaryDataset data;
  /// Columns "flag" (nominal, levels "0" and "1") and "score" (continuous,
  /// increasing).
  CoDataDesign codata;
  std::vector<std::size_t> informative;  // ascending
};

/// X is standard normal, y ~ Bernoulli(logistic(eta)) with eta the scaled sum
/// of the informative columns (sd effect_size). flag marks informative
/// variables and is flipped with probability 1 - codata_quality; score =
/// flag + N(0, 1) * (1 - codata_quality). Deterministic per seed.
SyntheticData generate_synthetic(const SyntheticSpec& spec);

}  // namespace corf
