#include "corf/bspline.hpp"

#include <algorithm>
#include <cmath>

#include "corf/error.hpp"
#include "corf/log.hpp"

namespace corf {

BSpline::BSpline(int degree, double lower, double upper, std::vector<double> interior) : degree_(degree) {
  CORF_REQUIRE(degree >= 0, "spline degree must be nonnegative");
  CORF_REQUIRE(std::isfinite(lower) && std::isfinite(upper) && lower < upper, "spline range must be a proper interval");
  for (std::size_t k = 0; k < interior.size(); ++k) {
    CORF_REQUIRE(interior[k] > lower && interior[k] < upper, "interior knot outside the spline range");
    CORF_REQUIRE(k == 0 || interior[k] > interior[k - 1], "interior knots must be strictly increasing");
  }
  const auto rep = static_cast<std::size_t>(degree) + 1;
  knots_.assign(rep, lower);
  knots_.insert(knots_.end(), interior.begin(), interior.end());
  knots_.insert(knots_.end(), rep, upper);
}

std::vector<double> BSpline::interior_knots() const {
  const auto rep = static_cast<std::ptrdiff_t>(degree_) + 1;
  return {knots_.begin() + rep, knots_.end() - rep};
}

// Nonzero basis functions via the triangular Cox-de Boor scheme.
void BSpline::evaluate(double x, std::span<double> out) const {
  const std::size_t q = size();
  CORF_REQUIRE(out.size() == q, "basis output has the wrong length");
  std::fill(out.begin(), out.end(), 0.0);
  const auto p = static_cast<std::size_t>(degree_);
  x = std::clamp(x, lower(), upper());

  // Span index s with knots[s] <= x < knots[s+1], s in [p, q-1]; the right
  // boundary belongs to the last nondegenerate span.
  std::size_t s = q - 1;
  if (x < upper()) {
    auto it = std::upper_bound(knots_.begin() + static_cast<std::ptrdiff_t>(p),
                               knots_.begin() + static_cast<std::ptrdiff_t>(q), x);
    s = static_cast<std::size_t>(it - knots_.begin()) - 1;
  }

  std::vector<double> N(p + 1, 0.0);
  std::vector<double> left(p + 1, 0.0);
  std::vector<double> right(p + 1, 0.0);
  N[0] = 1.0;
  for (std::size_t j = 1; j <= p; ++j) {
    left[j] = x - knots_[s + 1 - j];
    right[j] = knots_[s + j] - x;
    double saved = 0.0;
    for (std::size_t r = 0; r < j; ++r) {
      const double temp = N[r] / (right[r + 1] + left[j - r]);
      N[r] = saved + right[r + 1] * temp;
      saved = left[j - r] * temp;
    }
    N[j] = saved;
  }
  for (std::size_t r = 0; r <= p; ++r) out[s - p + r] = N[r];
}

Eigen::MatrixXd BSpline::basis_matrix(std::span<const double> x) const {
  const std::size_t q = size();
  Eigen::MatrixXd B(static_cast<Eigen::Index>(x.size()), static_cast<Eigen::Index>(q));
  std::vector<double> row(q);
  for (std::size_t i = 0; i < x.size(); ++i) {
    evaluate(x[i], row);
    for (std::size_t l = 0; l < q; ++l) B(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(l)) = row[l];
  }
  return B;
}

namespace {

// Hyndman-Fan type 7 quantile of sorted data.
double quantile_sorted(const std::vector<double>& v, double prob) {
  const double h = (static_cast<double>(v.size()) - 1.0) * prob;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

}  // namespace

SplineBasis build_bspline_basis(std::span<const double> x, std::size_t q, int degree) {
  CORF_REQUIRE(degree >= 0, "spline degree must be nonnegative");
  const auto d = static_cast<std::size_t>(degree);
  CORF_REQUIRE(q >= d + 2, "basis size must be at least degree + 2");
  CORF_REQUIRE(!x.empty(), "cannot build a basis on no data");
  std::vector<double> sorted(x.begin(), x.end());
  for (double v : sorted) {
    if (!std::isfinite(v)) throw InputError("continuous co-data contains a non-finite value");
  }
  std::sort(sorted.begin(), sorted.end());
  const double lo = sorted.front();
  const double hi = sorted.back();
  if (!(lo < hi)) throw InputError("degenerate continuous co-data: the column is constant");

  const std::size_t wanted = q - d - 1;
  std::vector<double> interior;
  for (std::size_t k = 1; k <= wanted; ++k) {
    const double t = quantile_sorted(sorted, static_cast<double>(k) / static_cast<double>(wanted + 1));
    if (t > lo && t < hi && (interior.empty() || t > interior.back())) interior.push_back(t);
  }
  if (interior.empty()) interior.push_back(lo + (hi - lo) / 2.0);
  if (interior.size() < wanted) {
    warn("too few distinct quantiles for " + std::to_string(q) + " basis functions; using " +
         std::to_string(interior.size() + d + 1));
  }
  SplineBasis basis{BSpline(degree, lo, hi, std::move(interior)), {}};
  basis.B = basis.spline.basis_matrix(x);
  return basis;
}

}  // namespace corf
