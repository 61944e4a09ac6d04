#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "corf/bspline.hpp"
#include "corf/codata.hpp"

namespace corf {

struct CoDataFitOptions {
  std::size_t basis_size = 10;
  int degree = 3;
  /// Candidate smoothing weights, searched per smooth term.
  std::vector<double> lambda_grid{1e-2, 1e-1, 1e0, 1e1, 1e2, 1e3, 1e4};
  /// Skips the search and uses these weights (one per smooth term).
  std::optional<std::vector<double>> fixed_lambdas;
  std::size_t max_iterations = 200;
  /// Convergence when the Newton decrement falls below tolerance * (1 + |objective|).
  double tolerance = 1e-12;
  /// Coordinate sweeps of the smoothing search when there are several smooths.
  std::size_t max_sweeps = 3;
};

/// Training-time description of one co-data column.
struct ColumnSchema {
  std::string name;
  ColumnKind kind = ColumnKind::continuous;
  std::vector<std::string> levels;
  Monotonicity monotonicity = Monotonicity::none;
  // Continuous columns only: training range and median (reference value).
  double min = 0.0;
  double max = 0.0;
  double median = 0.0;
};

/// Dummy (nominal level vs. reference) or linear continuous coefficient.
struct LinearTerm {
  std::size_t column = 0;
  std::size_t level = 0;  // nominal level index; unused for continuous
  double coefficient = 0.0;
};

/// Monotone spline term f(x) = sum_l theta_l B_l(x), theta = sigma_reparam(theta_tilde).
struct SmoothTerm {
  std::size_t column = 0;
  Monotonicity direction = Monotonicity::increasing;
  BSpline spline;
  /// theta_tilde[0] is fixed at 0; the intercept carries the level.
  std::vector<double> theta_tilde;
  double lambda = 0.0;
  double edf = 0.0;

  std::vector<double> theta() const;
  double value(double x) const;
};

struct LambdaTrial {
  std::vector<double> lambdas;
  double deviance = 0.0;
  double edf = 0.0;
  double criterion = 0.0;
};

struct CoDataFit {
  std::vector<ColumnSchema> schema;
  double alpha0 = 0.0;
  std::vector<LinearTerm> linear;
  std::vector<SmoothTerm> smooths;
  /// Pearson dispersion; reported only, never used for the weights.
  double tau = 1.0;
  std::vector<double> p_hat;
  std::uint64_t total_splits = 0;

  std::size_t iterations = 0;
  double gradient_norm = 0.0;
  double edf = 0.0;
  double deviance = 0.0;
  /// deviance / reference_dispersion + 2 edf
  double criterion = 0.0;
  double reference_dispersion = 1.0;
  std::vector<LambdaTrial> lambda_trials;
  std::vector<std::string> dropped_terms;

  /// "column" or "column=level" for a linear term.
  std::string term_label(const LinearTerm& term) const;
};

/// Cumulative exponential map: theta_1 = t_1, theta_l = theta_{l-1} +/- exp(t_l).
/// Exponent arguments are clamped to [-30, 30].
std::vector<double> sigma_reparam(std::span<const double> theta_tilde, Monotonicity direction);

/// Binomial pseudo-log-likelihood of the split counts V (denominator K)
/// under a logit link, minus the second-difference penalty of every smooth.
/// Parameters are laid out as [alpha0, linear coefficients, then for each
/// smooth the q-1 free entries theta_tilde[1..q-1]].
class PenalizedPseudoLikelihood {
 public:
  PenalizedPseudoLikelihood(std::span<const std::uint64_t> V, std::uint64_t K, const CoDataDesign& design,
                            const CoDataFitOptions& options = {});

  std::size_t dimension() const { return dim_; }
  std::size_t smooth_count() const { return smooths_.size(); }
  std::size_t p() const { return static_cast<std::size_t>(V_.size()); }
  void set_lambdas(std::vector<double> lambdas);
  const std::vector<double>& lambdas() const { return lambdas_; }

  /// Intercept at the logit of the mean proportion, linear terms zero and
  /// smooths nearly flat.
  Eigen::VectorXd initial_point() const;

  Eigen::VectorXd linear_predictor(const Eigen::VectorXd& params) const;
  double value(const Eigen::VectorXd& params) const;
  Eigen::VectorXd gradient(const Eigen::VectorXd& params) const;
  /// d eta / d params, P by dimension().
  Eigen::MatrixXd jacobian(const Eigen::VectorXd& params) const;
  /// Penalty Hessian of value() (negated): 2 * lambda * D2'D2 blocks.
  Eigen::MatrixXd penalty_matrix() const;

  /// Binomial deviance and Pearson statistic at params.
  double deviance(const Eigen::VectorXd& params) const;
  double pearson(const Eigen::VectorXd& params) const;

  const std::vector<ColumnSchema>& schema() const { return schema_; }
  const std::vector<LinearTerm>& linear_terms() const { return linear_terms_; }
  const std::vector<std::string>& dropped_terms() const { return dropped_; }
  std::uint64_t total_splits() const { return K_; }

  struct Smooth {
    std::size_t column = 0;
    Monotonicity direction = Monotonicity::increasing;
    BSpline spline;
    Eigen::MatrixXd tail;     // tail(j, m) = sum_{l > m} B_l(x_j), P by q-1
    Eigen::MatrixXd penalty;  // D2'D2, (q-1) by (q-1)
    std::size_t offset = 0;   // first parameter index
  };
  const std::vector<Smooth>& smooths() const { return smooths_; }

 private:
  Eigen::VectorXd V_;
  std::uint64_t K_ = 0;
  Eigen::MatrixXd linear_;  // P by (1 + linear terms), first column all ones
  std::vector<LinearTerm> linear_terms_;
  std::vector<Smooth> smooths_;
  std::vector<double> lambdas_;
  std::vector<ColumnSchema> schema_;
  std::vector<std::string> dropped_;
  std::size_t dim_ = 0;
};

/// Fits logit(p_j) = alpha0 + linear terms + monotone smooths to the split
/// counts by penalized Fisher scoring, choosing each smooth's weight from the
/// grid by a quasi-AIC. Throws InputError for K == 0 and ConvergenceError
/// when the scoring iterations do not converge.
CoDataFit fit_codata_model(std::span<const std::uint64_t> V, std::uint64_t K, const CoDataDesign& design,
                           const CoDataFitOptions& options = {});

/// Fitted probabilities for a design with the training schema. On the
/// training design this reproduces fit.p_hat exactly.
std::vector<double> predict_pj(const CoDataFit& fit, const CoDataDesign& design);

}  // namespace corf
