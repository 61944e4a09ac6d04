#include "oracles.hpp"

#include <algorithm>
#include <boost/math/distributions/chi_squared.hpp>
#include <boost/rational.hpp>
#include <cmath>
#include <functional>

namespace corf::oracle {

using Rational = boost::rational<std::int64_t>;

namespace {

Rational gini(std::int64_t c0, std::int64_t c1) {
  const std::int64_t m = c0 + c1;
  return Rational(2 * c0 * c1, m * m);
}

}  // namespace

std::optional<BruteSplit> best_split(std::span<const double> x, std::span<const std::uint8_t> y) {
  const auto n = static_cast<std::int64_t>(x.size());
  std::vector<double> values(x.begin(), x.end());
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  std::int64_t ones = 0;
  for (auto v : y) ones += v;
  const Rational parent = gini(n - ones, ones);

  std::optional<BruteSplit> best;
  Rational best_decrease(0);
  for (std::size_t k = 0; k + 1 < values.size(); ++k) {
    const double t = (values[k] + values[k + 1]) / 2.0;
    std::int64_t l0 = 0, l1 = 0, r0 = 0, r1 = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (x[i] <= values[k]) {
        (y[i] ? l1 : l0)++;
      } else {
        (y[i] ? r1 : r0)++;
      }
    }
    const Rational children = Rational(l0 + l1, n) * gini(l0, l1) + Rational(r0 + r1, n) * gini(r0, r1);
    const Rational decrease = parent - children;
    if (decrease > best_decrease) {
      best_decrease = decrease;
      best = BruteSplit{t, boost::rational_cast<double>(decrease)};
    }
  }
  return best;
}

double cox_de_boor(const std::vector<double>& knots, int degree, std::size_t i, double x) {
  if (degree == 0) {
    const double lo = knots[i];
    const double hi = knots[i + 1];
    if (lo <= x && x < hi) return 1.0;
    // Close the last nonempty interval on the right.
    if (x == knots.back() && hi == knots.back() && lo < hi) return 1.0;
    return 0.0;
  }
  double out = 0.0;
  const double d1 = knots[i + static_cast<std::size_t>(degree)] - knots[i];
  if (d1 > 0.0) out += (x - knots[i]) / d1 * cox_de_boor(knots, degree - 1, i, x);
  const double d2 = knots[i + static_cast<std::size_t>(degree) + 1] - knots[i + 1];
  if (d2 > 0.0) {
    out += (knots[i + static_cast<std::size_t>(degree) + 1] - x) / d2 * cox_de_boor(knots, degree - 1, i + 1, x);
  }
  return out;
}

double auc(std::span<const double> scores, std::span<const std::uint8_t> labels) {
  double hits = 0.0;
  double pairs = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!labels[i]) continue;
    for (std::size_t j = 0; j < scores.size(); ++j) {
      if (labels[j]) continue;
      pairs += 1.0;
      if (scores[i] > scores[j]) {
        hits += 1.0;
      } else if (scores[i] == scores[j]) {
        hits += 0.5;
      }
    }
  }
  return hits / pairs;
}

double kendall_tau(std::span<const double> x, std::span<const double> y) {
  std::int64_t concordant = 0, discordant = 0, ties_x = 0, ties_y = 0;
  const std::size_t n = x.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool tx = x[i] == x[j];
      const bool ty = y[i] == y[j];
      if (tx) ++ties_x;
      if (ty) ++ties_y;
      if (tx || ty) continue;
      if ((x[i] < x[j]) == (y[i] < y[j])) {
        ++concordant;
      } else {
        ++discordant;
      }
    }
  }
  const auto n0 = static_cast<std::int64_t>(n * (n - 1) / 2);
  return static_cast<double>(concordant - discordant) /
         std::sqrt(static_cast<double>(n0 - ties_x) * static_cast<double>(n0 - ties_y));
}

double pseudo_loglik(std::span<const std::uint64_t> V, std::uint64_t K, std::span<const double> eta) {
  double ll = 0.0;
  for (std::size_t j = 0; j < V.size(); ++j) {
    const double e = eta[j];
    const double softplus = e > 0 ? e + std::log1p(std::exp(-e)) : std::log1p(std::exp(e));
    ll += static_cast<double>(V[j]) * e - static_cast<double>(K) * softplus;
  }
  return ll;
}

std::pair<double, double> grid_fit_linear(std::span<const std::uint64_t> V, std::uint64_t K,
                                          std::span<const double> x) {
  std::vector<double> eta(V.size());
  auto objective = [&](double a, double b) {
    for (std::size_t j = 0; j < V.size(); ++j) eta[j] = a + b * x[j];
    return pseudo_loglik(V, K, eta);
  };
  double ca = -5.0, cb = 0.0, half = 5.0;
  constexpr int kSteps = 60;
  for (int round = 0; round < 12; ++round) {
    double best = -INFINITY, ba = ca, bb = cb;
    for (int i = -kSteps; i <= kSteps; ++i) {
      for (int k = -kSteps; k <= kSteps; ++k) {
        const double a = ca + half * i / kSteps;
        const double b = cb + half * k / kSteps;
        const double v = objective(a, b);
        if (v > best) {
          best = v;
          ba = a;
          bb = b;
        }
      }
    }
    ca = ba;
    cb = bb;
    half *= 0.2;
  }
  return {ca, cb};
}

std::vector<double> inclusion_probabilities(const std::vector<double>& w, std::size_t m) {
  std::vector<double> out(w.size(), 0.0);
  std::vector<bool> taken(w.size(), false);
  std::function<void(std::size_t, double, double)> visit = [&](std::size_t depth, double prob, double left) {
    if (depth == m) return;
    for (std::size_t j = 0; j < w.size(); ++j) {
      if (taken[j] || w[j] <= 0.0) continue;
      const double p = prob * w[j] / left;
      out[j] += p;
      taken[j] = true;
      visit(depth + 1, p, left - w[j]);
      taken[j] = false;
    }
  };
  double total = 0.0;
  for (double v : w) total += v;
  visit(0, 1.0, total);
  return out;
}

double chi_square_pvalue(double statistic, double dof) {
  return boost::math::cdf(boost::math::complement(boost::math::chi_squared(dof), statistic));
}

}  // namespace corf::oracle
