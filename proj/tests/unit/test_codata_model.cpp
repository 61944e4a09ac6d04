#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "corf/codata_model.hpp"
#include "corf/error.hpp"
#include "corf/log.hpp"
#include "corf/random.hpp"
#include "oracles.hpp"

namespace corf {
namespace {

std::vector<std::string> ids(std::size_t p) {
  std::vector<std::string> out;
  for (std::size_t j = 0; j < p; ++j) out.push_back("v" + std::to_string(j));
  return out;
}

// K categorical draws with probabilities proportional to exp(eta).
std::vector<std::uint64_t> draw_counts(const std::vector<double>& eta, std::uint64_t K, std::uint64_t seed) {
  std::vector<double> cum(eta.size());
  double total = 0.0;
  for (std::size_t j = 0; j < eta.size(); ++j) cum[j] = total += std::exp(eta[j]);
  std::vector<std::uint64_t> V(eta.size(), 0);
  Rng rng(seed);
  for (std::uint64_t k = 0; k < K; ++k) {
    const double u = rng.uniform() * total;
    auto it = std::upper_bound(cum.begin(), cum.end(), u);
    if (it == cum.end()) --it;
    ++V[static_cast<std::size_t>(it - cum.begin())];
  }
  return V;
}

std::uint64_t sum(const std::vector<std::uint64_t>& V) { return std::accumulate(V.begin(), V.end(), std::uint64_t{0}); }

struct SmoothProblem {
  CoDataDesign design;
  std::vector<std::uint64_t> V;
  std::uint64_t K = 0;
};

SmoothProblem smooth_problem(std::size_t p, Monotonicity direction, std::uint64_t seed) {
  Rng rng(seed);
  SmoothProblem pr;
  pr.design.variable_ids = ids(p);
  std::vector<double> x(p), eta(p);
  const double sign = direction == Monotonicity::increasing ? 1.0 : -1.0;
  for (std::size_t j = 0; j < p; ++j) {
    x[j] = rng.uniform() * 4.0 - 1.0;
    eta[j] = sign * 1.5 * std::tanh(2.0 * x[j]);
  }
  pr.design.columns.push_back(CoDataColumn::continuous("score", x, direction));
  pr.V = draw_counts(eta, 20 * p, seed + 1);
  pr.K = sum(pr.V);
  return pr;
}

TEST(SigmaReparam, Examples) {
  const auto inc = sigma_reparam(std::vector<double>{0.5, std::log(1.0), std::log(2.0)}, Monotonicity::increasing);
  EXPECT_NEAR(inc[0], 0.5, 1e-15);
  EXPECT_NEAR(inc[1], 1.5, 1e-15);
  EXPECT_NEAR(inc[2], 3.5, 1e-15);
  const auto dec = sigma_reparam(std::vector<double>{0.0, 0.0, 0.0}, Monotonicity::decreasing);
  EXPECT_EQ(dec, (std::vector<double>{0.0, -1.0, -2.0}));
}

TEST(SigmaReparam, RandomIncreasingIsMonotone) {
  Rng rng(1);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> t(10);
    for (auto& v : t) v = 40.0 * rng.normal();
    const auto theta = sigma_reparam(t, Monotonicity::increasing);
    for (std::size_t l = 1; l < theta.size(); ++l) ASSERT_GE(theta[l] - theta[l - 1], 0.0);
    for (double v : theta) ASSERT_TRUE(std::isfinite(v));
  }
}

TEST(SigmaReparam, NoDirectionRejected) {
  EXPECT_THROW(sigma_reparam(std::vector<double>{0.0}, Monotonicity::none), ContractError);
}

TEST(FitCoData, InterceptOnlyIsUniform) {
  const std::vector<std::uint64_t> V{5, 0, 12, 3, 9};
  const auto fit = fit_codata_model(V, sum(V), empty_design(5));
  for (double p : fit.p_hat) EXPECT_NEAR(p, 0.2, 1e-12);
}

TEST(FitCoData, SaturatedTwoGroupFit) {
  const std::size_t p = 12;
  std::vector<std::size_t> group(p);
  for (std::size_t j = 0; j < p; ++j) group[j] = j < 4 ? 0 : 1;
  CoDataDesign design{ids(p), {CoDataColumn::nominal("grp", {"A", "B"}, group)}};
  const std::vector<std::uint64_t> V{9, 4, 7, 0, 1, 2, 0, 3, 1, 1, 2, 0};
  const auto K = sum(V);
  const auto fit = fit_codata_model(V, K, design);
  double mass[2] = {0.0, 0.0};
  for (std::size_t j = 0; j < p; ++j) mass[group[j]] += static_cast<double>(V[j]);
  for (std::size_t j = 0; j < p; ++j) {
    const double size = group[j] == 0 ? 4.0 : 8.0;
    EXPECT_NEAR(fit.p_hat[j], mass[group[j]] / static_cast<double>(K) / size, 1e-9) << j;
  }
}

TEST(FitCoData, LinearColumnMatchesGridSearch) {
  const std::size_t p = 50;
  Rng rng(3);
  std::vector<double> x(p), eta(p);
  for (std::size_t j = 0; j < p; ++j) {
    x[j] = rng.normal();
    eta[j] = 0.7 * x[j];
  }
  const auto V = draw_counts(eta, 2000, 4);
  const auto K = sum(V);
  CoDataDesign design{ids(p), {CoDataColumn::continuous("x", x)}};
  const auto fit = fit_codata_model(V, K, design);
  ASSERT_EQ(fit.linear.size(), 1u);
  const auto [a, b] = oracle::grid_fit_linear(V, K, x);
  EXPECT_NEAR(fit.alpha0, a, 1e-3);
  EXPECT_NEAR(fit.linear[0].coefficient, b, 1e-3);
}

TEST(FitCoData, ProbabilitiesSumToOne) {
  for (auto dir : {Monotonicity::increasing, Monotonicity::decreasing}) {
    const auto pr = smooth_problem(300, dir, 5);
    const auto fit = fit_codata_model(pr.V, pr.K, pr.design);
    double total = 0.0;
    for (double p : fit.p_hat) {
      EXPECT_GT(p, 0.0);
      EXPECT_LT(p, 1.0);
      total += p;
    }
    EXPECT_NEAR(total, 1.0, 1e-6);
  }
}

TEST(FitCoData, SmoothIsMonotoneOnGrid) {
  for (auto dir : {Monotonicity::increasing, Monotonicity::decreasing}) {
    const auto pr = smooth_problem(300, dir, 6);
    const auto fit = fit_codata_model(pr.V, pr.K, pr.design);
    ASSERT_EQ(fit.smooths.size(), 1u);
    const auto& sm = fit.smooths[0];
    const double lo = sm.spline.lower(), hi = sm.spline.upper();
    double prev = sm.value(lo);
    for (int k = 1; k < 200; ++k) {
      const double v = sm.value(lo + (hi - lo) * k / 199.0);
      if (dir == Monotonicity::increasing) {
        ASSERT_GE(v - prev, -1e-10);
      } else {
        ASSERT_LE(v - prev, 1e-10);
      }
      prev = v;
    }
    EXPECT_GT(std::abs(sm.value(hi) - sm.value(lo)), 0.5);
  }
}

TEST(FitCoData, ChoosesGridArgmin) {
  const auto pr = smooth_problem(200, Monotonicity::increasing, 7);
  const auto fit = fit_codata_model(pr.V, pr.K, pr.design);
  ASSERT_EQ(fit.lambda_trials.size(), CoDataFitOptions{}.lambda_grid.size());
  double best = INFINITY;
  double best_lambda = -1.0;
  for (const auto& t : fit.lambda_trials) {
    if (t.criterion < best) {
      best = t.criterion;
      best_lambda = t.lambdas[0];
    }
  }
  EXPECT_EQ(fit.smooths[0].lambda, best_lambda);
  EXPECT_DOUBLE_EQ(fit.criterion, best);
}

TEST(FitCoData, HeavyPenaltyFlattensDifferences) {
  const auto pr = smooth_problem(200, Monotonicity::increasing, 8);
  auto roughness = [&](double lambda) {
    CoDataFitOptions opt;
    opt.fixed_lambdas = std::vector<double>{lambda};
    const auto fit = fit_codata_model(pr.V, pr.K, pr.design, opt);
    const auto& t = fit.smooths[0].theta_tilde;
    double r = 0.0;
    for (std::size_t l = 3; l < t.size(); ++l) r += std::pow(t[l] - 2.0 * t[l - 1] + t[l - 2], 2);
    const auto theta = fit.smooths[0].theta();
    for (std::size_t l = 1; l < theta.size(); ++l) EXPECT_GE(theta[l], theta[l - 1]);
    return r;
  };
  const double light = roughness(1e-2);
  const double heavy = roughness(1e6);
  EXPECT_LE(heavy, light);
  EXPECT_LT(heavy, 1e-4);
}

TEST(FitCoData, PermutedVariablesPermuteEstimates) {
  const auto pr = smooth_problem(150, Monotonicity::increasing, 9);
  CoDataDesign nominal_too = pr.design;
  std::vector<std::size_t> lvl(150);
  for (std::size_t j = 0; j < 150; ++j) lvl[j] = j % 3;
  nominal_too.columns.push_back(CoDataColumn::nominal("kind", {"a", "b", "c"}, lvl));
  const auto fit = fit_codata_model(pr.V, pr.K, nominal_too);

  std::vector<std::size_t> perm(150);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  Rng rng(10);
  for (std::size_t i = 149; i > 0; --i) std::swap(perm[i], perm[rng.below(i + 1)]);
  CoDataDesign shuffled;
  std::vector<std::uint64_t> V(150);
  for (std::size_t k = 0; k < 150; ++k) {
    shuffled.variable_ids.push_back(nominal_too.variable_ids[perm[k]]);
    V[k] = pr.V[perm[k]];
  }
  for (const auto& c : nominal_too.columns) {
    CoDataColumn d = c;
    for (std::size_t k = 0; k < 150; ++k) d.values[k] = c.values[perm[k]];
    shuffled.columns.push_back(d);
  }
  const auto refit = fit_codata_model(V, pr.K, shuffled);
  for (std::size_t k = 0; k < 150; ++k) EXPECT_NEAR(refit.p_hat[k], fit.p_hat[perm[k]], 1e-8);
}

TEST(FitCoData, GradientMatchesCentralDifferences) {
  auto pr = smooth_problem(120, Monotonicity::increasing, 11);
  std::vector<std::size_t> lvl(120);
  for (std::size_t j = 0; j < 120; ++j) lvl[j] = j % 2;
  pr.design.columns.push_back(CoDataColumn::nominal("flag", {"0", "1"}, lvl));
  PenalizedPseudoLikelihood f(pr.V, pr.K, pr.design);
  f.set_lambdas({10.0});
  Rng rng(12);
  for (int point = 0; point < 10; ++point) {
    Eigen::VectorXd x = f.initial_point();
    for (Eigen::Index k = 0; k < x.size(); ++k) x(k) += rng.normal();
    const Eigen::VectorXd g = f.gradient(x);
    for (Eigen::Index k = 0; k < x.size(); ++k) {
      const double h = 1e-5 * std::max(1.0, std::abs(x(k)));
      Eigen::VectorXd up = x, down = x;
      up(k) += h;
      down(k) -= h;
      const double numeric = (f.value(up) - f.value(down)) / (2.0 * h);
      const double scale = std::max(std::abs(g(k)), 1.0);
      EXPECT_LE(std::abs(numeric - g(k)) / scale, 1e-5) << "point " << point << " coordinate " << k;
    }
  }
}

TEST(FitCoData, ValueMatchesPseudoLikelihoodOracle) {
  const auto pr = smooth_problem(80, Monotonicity::increasing, 13);
  PenalizedPseudoLikelihood f(pr.V, pr.K, pr.design);
  f.set_lambdas({0.0});
  Eigen::VectorXd x = f.initial_point();
  const Eigen::VectorXd eta = f.linear_predictor(x);
  const std::vector<double> e(eta.data(), eta.data() + eta.size());
  EXPECT_NEAR(f.value(x), oracle::pseudo_loglik(pr.V, pr.K, e), 1e-8 * std::abs(f.value(x)));
}

TEST(FitCoData, EmptyForestIsAnError) {
  const std::vector<std::uint64_t> V(4, 0);
  try {
    fit_codata_model(V, 0, empty_design(4));
    FAIL() << "expected an error";
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("empty forest"), std::string::npos);
  }
}

TEST(FitCoData, CollinearNominalColumnDropped) {
  const std::size_t p = 20;
  std::vector<std::size_t> lvl(p);
  for (std::size_t j = 0; j < p; ++j) lvl[j] = j % 2;
  CoDataDesign design{ids(p),
                      {CoDataColumn::nominal("a", {"x", "y"}, lvl), CoDataColumn::nominal("b", {"x", "y"}, lvl)}};
  std::vector<std::uint64_t> V(p);
  for (std::size_t j = 0; j < p; ++j) V[j] = 1 + 3 * (j % 2) + j % 3;
  WarningCapture warnings;
  const auto fit = fit_codata_model(V, sum(V), design);
  EXPECT_TRUE(warnings.contains("collinear"));
  EXPECT_EQ(fit.linear.size(), 1u);
  EXPECT_EQ(fit.dropped_terms.size(), 1u);
}

TEST(PredictPj, TrainingDesignIsBitIdentical) {
  const auto pr = smooth_problem(100, Monotonicity::decreasing, 14);
  const auto fit = fit_codata_model(pr.V, pr.K, pr.design);
  EXPECT_EQ(predict_pj(fit, pr.design), fit.p_hat);
}

TEST(PredictPj, InterceptOnlyOnAnyDesign) {
  const std::vector<std::uint64_t> V{3, 1, 4, 1, 5, 9, 2, 6};
  const auto fit = fit_codata_model(V, sum(V), empty_design(8));
  for (double p : predict_pj(fit, empty_design(3))) EXPECT_NEAR(p, 1.0 / 8.0, 1e-12);
}

TEST(PredictPj, IncreasingSmoothOrdersPredictions) {
  const auto pr = smooth_problem(200, Monotonicity::increasing, 15);
  const auto fit = fit_codata_model(pr.V, pr.K, pr.design);
  std::vector<double> grid(300);
  for (std::size_t k = 0; k < grid.size(); ++k) grid[k] = -3.0 + 8.0 * static_cast<double>(k) / 299.0;
  CoDataDesign probe{ids(grid.size()), {CoDataColumn::continuous("score", grid, Monotonicity::increasing)}};
  const auto p = predict_pj(fit, probe);
  for (std::size_t k = 1; k < p.size(); ++k) EXPECT_GE(p[k], p[k - 1]);
  EXPECT_EQ(p.front(), p[10]);  // below the training range: clamped
}

TEST(PredictPj, SchemaMismatch) {
  const auto pr = smooth_problem(60, Monotonicity::increasing, 16);
  const auto fit = fit_codata_model(pr.V, pr.K, pr.design);
  CoDataDesign other{ids(60), {CoDataColumn::continuous("other", pr.design.columns[0].values, Monotonicity::increasing)}};
  EXPECT_THROW(predict_pj(fit, other), ContractError);
}

}  // namespace
}  // namespace corf
