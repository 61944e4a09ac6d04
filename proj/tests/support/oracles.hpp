#pragma once

// Slow, direct reimplementations used to cross-check the library.

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace corf::oracle {

struct BruteSplit {
  double threshold = 0.0;
  double decrease = 0.0;
};

/// Tries every midpoint between consecutive distinct values, computing Gini
/// decreases in exact rational arithmetic. Ties go to the smallest threshold.
std::optional<BruteSplit> best_split(std::span<const double> x, std::span<const std::uint8_t> y);

/// Cox-de Boor recursion for basis function i of the given degree, with
/// 0/0 = 0 and the last nonzero interval closed on the right.
double cox_de_boor(const std::vector<double>& knots, int degree, std::size_t i, double x);

/// Pair-counting AUC.
double auc(std::span<const double> scores, std::span<const std::uint8_t> labels);

/// Pair-counting Kendall tau-b.
double kendall_tau(std::span<const double> x, std::span<const double> y);

/// Binomial pseudo-log-likelihood sum_j V_j eta_j - K log(1 + exp(eta_j)).
double pseudo_loglik(std::span<const std::uint64_t> V, std::uint64_t K, std::span<const double> eta);

/// Maximizes the pseudo-log-likelihood of logit(p_j) = a + b x_j by
/// repeatedly refined grid search. Returns {a, b}.
std::pair<double, double> grid_fit_linear(std::span<const std::uint64_t> V, std::uint64_t K,
                                          std::span<const double> x);

/// Probability that each index is among the first `m` draws of sequential
/// weighted sampling without replacement, by enumerating draw sequences.
std::vector<double> inclusion_probabilities(const std::vector<double>& w, std::size_t m);

/// Upper tail probability of a chi-square statistic.
double chi_square_pvalue(double statistic, double dof);

}  // namespace corf::oracle
