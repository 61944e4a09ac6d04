#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <span>
#include <vector>

namespace corf {

/// B-spline basis of a given degree on a clamped knot vector (boundary knots
/// repeated degree+1 times). Evaluation outside [lower, upper] clamps x to
/// the nearest boundary.
class BSpline {
 public:
  BSpline() = default;
  /// `interior` must be strictly increasing and strictly inside (lower, upper).
  BSpline(int degree, double lower, double upper, std::vector<double> interior);

  int degree() const { return degree_; }
  /// Number of basis functions q.
  std::size_t size() const { return knots_.size() - static_cast<std::size_t>(degree_) - 1; }
  const std::vector<double>& knots() const { return knots_; }
  double lower() const { return knots_.front(); }
  double upper() const { return knots_.back(); }
  std::vector<double> interior_knots() const;

  /// Writes all q basis values at x into `out` (size q).
  void evaluate(double x, std::span<double> out) const;
  Eigen::MatrixXd basis_matrix(std::span<const double> x) const;

 private:
  int degree_ = 3;
  std::vector<double> knots_;
};

/// Knots plus the basis evaluated at the training values.
struct SplineBasis {
  BSpline spline;
  Eigen::MatrixXd B;  // x.size() by q
};

/// Basis with q functions and interior knots at equally spaced quantiles of
/// x. Tied quantiles are merged, which lowers q (with a warning). Throws
/// InputError("degenerate continuous co-data") for constant x.
SplineBasis build_bspline_basis(std::span<const double> x, std::size_t q = 10, int degree = 3);

}  // namespace corf
