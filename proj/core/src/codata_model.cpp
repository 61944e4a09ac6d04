#include "corf/codata_model.hpp"

#include <Eigen/Cholesky>
#include <Eigen/QR>
#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "corf/error.hpp"
#include "corf/log.hpp"

namespace corf {
namespace {

constexpr double kExpClamp = 30.0;
// Starting smooths are nearly flat.
constexpr double kInitialLogIncrement = -4.0;

double clamped_exp(double t) { return std::exp(std::clamp(t, -kExpClamp, kExpClamp)); }

double clamped_exp_derivative(double t) {
  return (t > -kExpClamp && t < kExpClamp) ? std::exp(t) : 0.0;
}

double logistic(double eta) { return 1.0 / (1.0 + std::exp(-eta)); }

double softplus(double eta) { return eta > 0.0 ? eta + std::log1p(std::exp(-eta)) : std::log1p(std::exp(eta)); }

double direction_sign(Monotonicity m) { return m == Monotonicity::decreasing ? -1.0 : 1.0; }

double median_of(std::vector<double> v) {
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  if (v.size() % 2 == 1) return *mid;
  const double upper = *mid;
  const double lower = *std::max_element(v.begin(), mid);
  return lower + (upper - lower) / 2.0;
}

// Second-order difference penalty D2'D2 on a vector of length m.
Eigen::MatrixXd second_difference_penalty(std::size_t m) {
  const auto n = static_cast<Eigen::Index>(m);
  if (m < 3) return Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(n - 2, n);
  for (Eigen::Index r = 0; r < n - 2; ++r) {
    D(r, r) = 1.0;
    D(r, r + 1) = -2.0;
    D(r, r + 2) = 1.0;
  }
  return D.transpose() * D;
}

}  // namespace

std::vector<double> sigma_reparam(std::span<const double> theta_tilde, Monotonicity direction) {
  CORF_REQUIRE(direction != Monotonicity::none, "sigma_reparam needs a monotone direction");
  std::vector<double> theta(theta_tilde.size());
  const double sign = direction_sign(direction);
  for (std::size_t l = 0; l < theta_tilde.size(); ++l) {
    CORF_REQUIRE(std::isfinite(theta_tilde[l]), "sigma_reparam: non-finite parameter");
    theta[l] = (l == 0) ? theta_tilde[0] : theta[l - 1] + sign * clamped_exp(theta_tilde[l]);
  }
  return theta;
}

std::vector<double> SmoothTerm::theta() const { return sigma_reparam(theta_tilde, direction); }

double SmoothTerm::value(double x) const {
  std::vector<double> b(spline.size());
  spline.evaluate(x, b);
  const auto th = theta();
  double f = 0.0;
  for (std::size_t l = 0; l < b.size(); ++l) f += th[l] * b[l];
  return f;
}

std::string CoDataFit::term_label(const LinearTerm& term) const {
  const auto& col = schema.at(term.column);
  if (col.kind == ColumnKind::nominal) return col.name + "=" + col.levels.at(term.level);
  return col.name;
}

PenalizedPseudoLikelihood::PenalizedPseudoLikelihood(std::span<const std::uint64_t> V, std::uint64_t K,
                                                     const CoDataDesign& design, const CoDataFitOptions& options)
    : K_(K) {
  design.validate();
  CORF_REQUIRE(V.size() == design.p(), "split-count length does not match the co-data row count");
  if (K == 0) throw InputError("empty forest: no splits to model");
  std::uint64_t total = 0;
  for (auto v : V) total += v;
  CORF_REQUIRE(total == K, "split counts do not sum to the total split count");
  if (K < V.size()) warn("fewer splits than variables; the co-data fit will be unreliable");

  const auto P = static_cast<Eigen::Index>(V.size());
  V_.resize(P);
  for (Eigen::Index j = 0; j < P; ++j) V_(j) = static_cast<double>(V[static_cast<std::size_t>(j)]);

  // Schema for every column, whether or not it ends up in the model.
  for (const auto& c : design.columns) {
    ColumnSchema s{c.name, c.kind, c.levels, c.monotonicity};
    if (c.kind == ColumnKind::continuous && !c.values.empty()) {
      s.min = *std::min_element(c.values.begin(), c.values.end());
      s.max = *std::max_element(c.values.begin(), c.values.end());
      s.median = median_of(c.values);
    }
    schema_.push_back(std::move(s));
  }

  // Linear block: intercept, nominal dummies, linear continuous columns.
  // A column in the span of those already kept is dropped.
  std::vector<Eigen::VectorXd> kept{Eigen::VectorXd::Ones(P)};
  auto try_add = [&](Eigen::VectorXd column, LinearTerm term, const std::string& label) {
    Eigen::MatrixXd M(P, static_cast<Eigen::Index>(kept.size()));
    for (std::size_t k = 0; k < kept.size(); ++k) M.col(static_cast<Eigen::Index>(k)) = kept[k];
    const Eigen::VectorXd coef = M.colPivHouseholderQr().solve(column);
    const double resid = (column - M * coef).norm();
    if (resid <= 1e-9 * std::max(1.0, column.norm())) {
      warn("co-data term " + label + " is collinear with earlier terms; dropped");
      dropped_.push_back(label);
      return;
    }
    kept.push_back(std::move(column));
    linear_terms_.push_back(term);
  };
  for (std::size_t c = 0; c < design.columns.size(); ++c) {
    const auto& col = design.columns[c];
    if (col.kind == ColumnKind::nominal) {
      for (std::size_t level = 1; level < col.levels.size(); ++level) {
        Eigen::VectorXd dummy(P);
        for (Eigen::Index j = 0; j < P; ++j) {
          dummy(j) = col.level_index(static_cast<std::size_t>(j)) == level ? 1.0 : 0.0;
        }
        try_add(std::move(dummy), LinearTerm{c, level, 0.0}, col.name + "=" + col.levels[level]);
      }
    } else if (col.monotonicity == Monotonicity::none) {
      try_add(Eigen::Map<const Eigen::VectorXd>(col.values.data(), P), LinearTerm{c, 0, 0.0}, col.name);
    }
  }
  linear_.resize(P, static_cast<Eigen::Index>(kept.size()));
  for (std::size_t k = 0; k < kept.size(); ++k) linear_.col(static_cast<Eigen::Index>(k)) = kept[k];
  dim_ = kept.size();

  for (std::size_t c = 0; c < design.columns.size(); ++c) {
    const auto& col = design.columns[c];
    if (col.kind != ColumnKind::continuous || col.monotonicity == Monotonicity::none) continue;
    SplineBasis basis;
    try {
      basis = build_bspline_basis(col.values, options.basis_size, options.degree);
    } catch (const InputError& e) {
      warn("co-data column " + col.name + " dropped: " + e.what());
      dropped_.push_back(col.name);
      continue;
    }
    Smooth s;
    s.column = c;
    s.direction = col.monotonicity;
    s.spline = basis.spline;
    const auto q = static_cast<Eigen::Index>(s.spline.size());
    s.tail.resize(P, q - 1);
    for (Eigen::Index j = 0; j < P; ++j) {
      double acc = 0.0;
      for (Eigen::Index l = q - 1; l >= 1; --l) {
        acc += basis.B(j, l);
        s.tail(j, l - 1) = acc;
      }
    }
    s.penalty = second_difference_penalty(static_cast<std::size_t>(q - 1));
    s.offset = dim_;
    dim_ += static_cast<std::size_t>(q - 1);
    smooths_.push_back(std::move(s));
  }
  lambdas_.assign(smooths_.size(), 1.0);
}

void PenalizedPseudoLikelihood::set_lambdas(std::vector<double> lambdas) {
  CORF_REQUIRE(lambdas.size() == smooths_.size(), "one smoothing weight per smooth term is required");
  for (double l : lambdas) CORF_REQUIRE(std::isfinite(l) && l >= 0.0, "smoothing weights must be nonnegative");
  lambdas_ = std::move(lambdas);
}

Eigen::VectorXd PenalizedPseudoLikelihood::initial_point() const {
  Eigen::VectorXd x = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim_));
  const double mean_prop = V_.sum() / static_cast<double>(K_) / static_cast<double>(V_.size());
  x(0) = std::log(mean_prop / (1.0 - mean_prop));
  for (const auto& s : smooths_) {
    x.segment(static_cast<Eigen::Index>(s.offset), s.tail.cols()).setConstant(kInitialLogIncrement);
  }
  return x;
}

Eigen::VectorXd PenalizedPseudoLikelihood::linear_predictor(const Eigen::VectorXd& params) const {
  CORF_REQUIRE(static_cast<std::size_t>(params.size()) == dim_, "parameter vector has the wrong length");
  Eigen::VectorXd eta = linear_ * params.head(linear_.cols());
  for (const auto& s : smooths_) {
    const Eigen::Index m = s.tail.cols();
    Eigen::VectorXd inc(m);
    for (Eigen::Index k = 0; k < m; ++k) inc(k) = clamped_exp(params(static_cast<Eigen::Index>(s.offset) + k));
    eta.noalias() += direction_sign(s.direction) * (s.tail * inc);
  }
  return eta;
}

double PenalizedPseudoLikelihood::value(const Eigen::VectorXd& params) const {
  const Eigen::VectorXd eta = linear_predictor(params);
  const double K = static_cast<double>(K_);
  double ll = 0.0;
  for (Eigen::Index j = 0; j < eta.size(); ++j) ll += V_(j) * eta(j) - K * softplus(eta(j));
  for (std::size_t s = 0; s < smooths_.size(); ++s) {
    const auto& sm = smooths_[s];
    const auto beta = params.segment(static_cast<Eigen::Index>(sm.offset), sm.tail.cols());
    // Summing squared differences directly avoids the cancellation in
    // beta' S beta when beta is close to linear.
    double rough = 0.0;
    for (Eigen::Index k = 2; k < beta.size(); ++k) {
      const double d2 = beta(k) - 2.0 * beta(k - 1) + beta(k - 2);
      rough += d2 * d2;
    }
    ll -= lambdas_[s] * rough;
  }
  return ll;
}

Eigen::MatrixXd PenalizedPseudoLikelihood::jacobian(const Eigen::VectorXd& params) const {
  const Eigen::Index P = V_.size();
  Eigen::MatrixXd J(P, static_cast<Eigen::Index>(dim_));
  J.leftCols(linear_.cols()) = linear_;
  for (const auto& s : smooths_) {
    const double sign = direction_sign(s.direction);
    for (Eigen::Index k = 0; k < s.tail.cols(); ++k) {
      const auto idx = static_cast<Eigen::Index>(s.offset) + k;
      J.col(idx) = (sign * clamped_exp_derivative(params(idx))) * s.tail.col(k);
    }
  }
  return J;
}

Eigen::VectorXd PenalizedPseudoLikelihood::gradient(const Eigen::VectorXd& params) const {
  const Eigen::VectorXd eta = linear_predictor(params);
  const double K = static_cast<double>(K_);
  Eigen::VectorXd resid(eta.size());
  for (Eigen::Index j = 0; j < eta.size(); ++j) resid(j) = V_(j) - K * logistic(eta(j));
  Eigen::VectorXd g = jacobian(params).transpose() * resid;
  for (std::size_t s = 0; s < smooths_.size(); ++s) {
    const auto& sm = smooths_[s];
    const auto off = static_cast<Eigen::Index>(sm.offset);
    g.segment(off, sm.tail.cols()) -= 2.0 * lambdas_[s] * (sm.penalty * params.segment(off, sm.tail.cols()));
  }
  return g;
}

Eigen::MatrixXd PenalizedPseudoLikelihood::penalty_matrix() const {
  const auto d = static_cast<Eigen::Index>(dim_);
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(d, d);
  for (std::size_t s = 0; s < smooths_.size(); ++s) {
    const auto& sm = smooths_[s];
    const auto off = static_cast<Eigen::Index>(sm.offset);
    S.block(off, off, sm.tail.cols(), sm.tail.cols()) = 2.0 * lambdas_[s] * sm.penalty;
  }
  return S;
}

double PenalizedPseudoLikelihood::deviance(const Eigen::VectorXd& params) const {
  const Eigen::VectorXd eta = linear_predictor(params);
  const double K = static_cast<double>(K_);
  double dev = 0.0;
  for (Eigen::Index j = 0; j < eta.size(); ++j) {
    const double p = logistic(eta(j));
    const double v = V_(j);
    if (v > 0.0) dev += v * std::log(v / (K * p));
    if (K - v > 0.0) dev += (K - v) * std::log((K - v) / (K * (1.0 - p)));
  }
  return 2.0 * dev;
}

double PenalizedPseudoLikelihood::pearson(const Eigen::VectorXd& params) const {
  const Eigen::VectorXd eta = linear_predictor(params);
  const double K = static_cast<double>(K_);
  double x2 = 0.0;
  for (Eigen::Index j = 0; j < eta.size(); ++j) {
    const double p = logistic(eta(j));
    const double var = K * p * (1.0 - p);
    if (var > 0.0) x2 += (V_(j) - K * p) * (V_(j) - K * p) / var;
  }
  return x2;
}

namespace {

struct Solution {
  Eigen::VectorXd params;
  std::size_t iterations = 0;
  double gradient_norm = 0.0;
  double objective = 0.0;
  double edf = 0.0;
  std::vector<double> smooth_edf;
  double deviance = 0.0;
  double pearson = 0.0;
};

// Fisher information of the unpenalized pseudo-likelihood.
Eigen::MatrixXd fisher(const PenalizedPseudoLikelihood& model, const Eigen::VectorXd& params) {
  const Eigen::VectorXd eta = model.linear_predictor(params);
  const double K = static_cast<double>(model.total_splits());
  const Eigen::MatrixXd J = model.jacobian(params);
  Eigen::VectorXd w(eta.size());
  for (Eigen::Index j = 0; j < eta.size(); ++j) {
    const double p = logistic(eta(j));
    w(j) = K * p * (1.0 - p);
  }
  return J.transpose() * w.asDiagonal() * J;
}

// Projected Fisher scoring. Smooth parameters live in the box where the
// exponential is not clamped; coordinates held at a bound by the gradient are
// frozen for the step, and steps are capped so flat directions (a smooth
// heading to a constant) cannot explode.
Solution solve(const PenalizedPseudoLikelihood& model, const CoDataFitOptions& options) {
  constexpr double kMaxStep = 5.0;
  constexpr double kActiveBand = 1e-3;  // distance from a bound that counts as on it
  Eigen::VectorXd x = model.initial_point();
  const auto dim = static_cast<Eigen::Index>(model.dimension());
  std::vector<bool> boxed(static_cast<std::size_t>(dim), false);
  for (const auto& sm : model.smooths()) {
    for (Eigen::Index k = 0; k < sm.tail.cols(); ++k) boxed[sm.offset + static_cast<std::size_t>(k)] = true;
  }
  auto project = [&](Eigen::VectorXd& v) {
    for (Eigen::Index i = 0; i < dim; ++i) {
      if (boxed[static_cast<std::size_t>(i)]) v(i) = std::clamp(v(i), -kExpClamp, kExpClamp);
    }
  };

  const Eigen::MatrixXd S = model.penalty_matrix();
  double obj = model.value(x);
  bool converged = false;
  std::size_t iter = 0;
  Eigen::VectorXd g;
  for (; iter < options.max_iterations; ++iter) {
    g = model.gradient(x);
    // Exact negative Hessian: eta is linear in exp(theta_tilde), so the
    // curvature Fisher scoring drops is the diagonal of the unpenalized score.
    Eigen::MatrixXd H = fisher(model, x) + S;
    const Eigen::VectorXd score = g + S * x;
    Eigen::MatrixXd newton = H;
    for (Eigen::Index i = 0; i < dim; ++i) {
      if (boxed[static_cast<std::size_t>(i)] && std::abs(x(i)) < kExpClamp) newton(i, i) -= score(i);
    }
    if (Eigen::LLT<Eigen::MatrixXd>(newton).info() == Eigen::Success) H = std::move(newton);
    for (Eigen::Index i = 0; i < dim; ++i) {
      if (!boxed[static_cast<std::size_t>(i)]) continue;
      const bool at_lower = x(i) <= -kExpClamp + kActiveBand && g(i) <= 0.0;
      const bool at_upper = x(i) >= kExpClamp - kActiveBand && g(i) >= 0.0;
      if (at_lower || at_upper) {
        H.row(i).setZero();
        H.col(i).setZero();
        H(i, i) = 1.0;
        g(i) = 0.0;
      }
    }
    const double ridge = 1e-14 * std::max(1.0, H.diagonal().maxCoeff());
    Eigen::VectorXd step = (H + ridge * Eigen::MatrixXd::Identity(dim, dim)).ldlt().solve(g);
    double decrement = g.dot(step);
    if (!(decrement >= 0.0) || !step.allFinite()) {
      // Not an ascent direction; fall back to a diagonally scaled gradient.
      step = g.cwiseQuotient(H.diagonal().cwiseMax(1e-12));
      decrement = g.dot(step);
    }
    const double scale = 1.0 + std::abs(obj);
    if (decrement <= options.tolerance * scale) {
      converged = true;
      break;
    }
    const double largest = step.lpNorm<Eigen::Infinity>();
    if (largest > kMaxStep) step *= kMaxStep / largest;

    bool accepted = false;
    const double previous = obj;
    for (double t = 1.0; t > 1e-12; t *= 0.5) {
      Eigen::VectorXd candidate = x + t * step;
      project(candidate);
      const double v = model.value(candidate);
      const bool near_optimum = decrement <= 1e-8 * scale && v >= obj - 1e-12 * scale;
      if (v > obj || near_optimum) {
        x = candidate;
        obj = v;
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      // No representable improvement left along the step.
      converged = decrement <= 1e-6 * scale;
      break;
    }
    if (obj - previous <= 1e-15 * scale && decrement <= 1e-8 * scale) {
      // Gains are at the resolution of the objective.
      converged = true;
      ++iter;
      break;
    }
  }
  if (!converged) {
    g = model.gradient(x);
    std::ostringstream msg;
    msg << "co-data model did not converge after " << iter << " iterations (gradient norm "
        << g.lpNorm<Eigen::Infinity>() << ", objective " << obj << ")";
    throw ConvergenceError(msg.str());
  }

  // The intercept score equation is what makes the fitted probabilities sum
  // to one; finish it off with a few one-dimensional Newton steps.
  const double K = static_cast<double>(model.total_splits());
  for (int k = 0; k < 50; ++k) {
    const Eigen::VectorXd eta = model.linear_predictor(x);
    double score = 0.0;
    double info = 0.0;
    for (Eigen::Index j = 0; j < eta.size(); ++j) {
      const double p = logistic(eta(j));
      score -= K * p;
      info += K * p * (1.0 - p);
    }
    score += K;  // sum of V_j
    if (std::abs(score) <= 1e-12 * K || info <= 0.0) break;
    x(0) += score / info;
  }

  Solution sol;
  sol.params = x;
  sol.iterations = iter;
  sol.objective = model.value(x);
  sol.gradient_norm = model.gradient(x).lpNorm<Eigen::Infinity>();
  const Eigen::MatrixXd F = fisher(model, x);
  Eigen::MatrixXd FS = F + S;
  FS.diagonal().array() += 1e-10 * std::max(1.0, FS.diagonal().maxCoeff());
  const Eigen::MatrixXd influence = FS.ldlt().solve(F);
  sol.edf = influence.trace();
  for (const auto& sm : model.smooths()) {
    sol.smooth_edf.push_back(
        influence.diagonal().segment(static_cast<Eigen::Index>(sm.offset), sm.tail.cols()).sum());
  }
  sol.deviance = model.deviance(x);
  sol.pearson = model.pearson(x);
  return sol;
}

double dispersion(const Solution& sol, std::size_t p) {
  const double resid_df = std::max(1.0, static_cast<double>(p) - sol.edf);
  const double phi = sol.pearson / resid_df;
  return (std::isfinite(phi) && phi > 0.0) ? phi : 1.0;
}

}  // namespace

CoDataFit fit_codata_model(std::span<const std::uint64_t> V, std::uint64_t K, const CoDataDesign& design,
                           const CoDataFitOptions& options) {
  PenalizedPseudoLikelihood model(V, K, design, options);
  const std::size_t S = model.smooth_count();
  CORF_REQUIRE(!options.lambda_grid.empty(), "smoothing grid is empty");

  std::map<std::vector<double>, Solution> cache;
  auto fit_at = [&](const std::vector<double>& lambdas) -> const Solution& {
    auto it = cache.find(lambdas);
    if (it != cache.end()) return it->second;
    model.set_lambdas(lambdas);
    return cache.emplace(lambdas, solve(model, options)).first->second;
  };

  CoDataFit fit;
  std::vector<double> chosen;
  if (S == 0) {
    fit_at({});
  } else if (options.fixed_lambdas) {
    CORF_REQUIRE(options.fixed_lambdas->size() == S, "one fixed smoothing weight per smooth term is required");
    chosen = *options.fixed_lambdas;
    fit_at(chosen);
  } else {
    const auto& grid = options.lambda_grid;
    const double lightest = *std::min_element(grid.begin(), grid.end());
    fit.reference_dispersion = dispersion(fit_at(std::vector<double>(S, lightest)), V.size());
    auto criterion = [&](const std::vector<double>& lambdas) {
      const Solution& sol = fit_at(lambdas);
      const double value = sol.deviance / fit.reference_dispersion + 2.0 * sol.edf;
      fit.lambda_trials.push_back({lambdas, sol.deviance, sol.edf, value});
      return value;
    };
    // Coordinate search over the grid; with one smooth this is the exact
    // grid argmin. Moves are strict improvements only.
    chosen.assign(S, S == 1 ? grid.front() : grid[grid.size() / 2]);
    double best = criterion(chosen);
    for (std::size_t sweep = 0; sweep < options.max_sweeps; ++sweep) {
      bool moved = false;
      for (std::size_t s = 0; s < S; ++s) {
        for (double lam : grid) {
          if (lam == chosen[s]) continue;
          auto trial = chosen;
          trial[s] = lam;
          const double value = criterion(trial);
          if (value < best) {
            best = value;
            chosen = std::move(trial);
            moved = true;
          }
        }
      }
      if (!moved || S == 1) break;
    }
  }

  const Solution& sol = fit_at(chosen);
  model.set_lambdas(chosen);
  fit.schema = model.schema();
  fit.alpha0 = sol.params(0);
  fit.linear = model.linear_terms();
  for (std::size_t k = 0; k < fit.linear.size(); ++k) fit.linear[k].coefficient = sol.params(static_cast<Eigen::Index>(k) + 1);
  for (std::size_t s = 0; s < S; ++s) {
    const auto& sm = model.smooths()[s];
    SmoothTerm term;
    term.column = sm.column;
    term.direction = sm.direction;
    term.spline = sm.spline;
    term.theta_tilde.assign(1, 0.0);
    for (Eigen::Index k = 0; k < sm.tail.cols(); ++k) {
      term.theta_tilde.push_back(sol.params(static_cast<Eigen::Index>(sm.offset) + k));
    }
    term.lambda = chosen[s];
    term.edf = sol.smooth_edf[s];
    fit.smooths.push_back(std::move(term));
  }
  fit.total_splits = K;
  fit.iterations = sol.iterations;
  fit.gradient_norm = sol.gradient_norm;
  fit.edf = sol.edf;
  fit.deviance = sol.deviance;
  fit.tau = dispersion(sol, V.size());
  fit.criterion = sol.deviance / fit.reference_dispersion + 2.0 * sol.edf;
  fit.dropped_terms = model.dropped_terms();
  fit.p_hat = predict_pj(fit, design);

  double total = 0.0;
  for (double p : fit.p_hat) total += p;
  if (std::abs(total - 1.0) > 1e-6) {
    throw ConvergenceError("co-data fit probabilities sum to " + std::to_string(total) + " instead of 1");
  }
  return fit;
}

std::vector<double> predict_pj(const CoDataFit& fit, const CoDataDesign& design) {
  design.validate();
  CORF_REQUIRE(design.columns.size() == fit.schema.size(), "co-data schema mismatch: column count differs");
  // Map each column's level indices onto the training levels by name.
  std::vector<std::vector<std::size_t>> level_map(fit.schema.size());
  for (std::size_t c = 0; c < fit.schema.size(); ++c) {
    const auto& want = fit.schema[c];
    const auto& have = design.columns[c];
    CORF_REQUIRE(have.name == want.name && have.kind == want.kind,
                 "co-data schema mismatch at column " + std::to_string(c) + " (" + have.name + ")");
    if (want.kind != ColumnKind::nominal) continue;
    for (const auto& level : have.levels) {
      auto it = std::find(want.levels.begin(), want.levels.end(), level);
      CORF_REQUIRE(it != want.levels.end(), "co-data column " + have.name + " has unknown level " + level);
      level_map[c].push_back(static_cast<std::size_t>(it - want.levels.begin()));
    }
  }

  const std::size_t P = design.p();
  std::vector<double> eta(P, fit.alpha0);
  for (const auto& term : fit.linear) {
    const auto& col = design.columns[term.column];
    for (std::size_t j = 0; j < P; ++j) {
      if (col.kind == ColumnKind::nominal) {
        if (level_map[term.column][col.level_index(j)] == term.level) eta[j] += term.coefficient;
      } else {
        eta[j] += term.coefficient * col.values[j];
      }
    }
  }
  for (const auto& sm : fit.smooths) {
    const auto& col = design.columns[sm.column];
    const auto theta = sm.theta();
    std::vector<double> b(sm.spline.size());
    for (std::size_t j = 0; j < P; ++j) {
      sm.spline.evaluate(col.values[j], b);
      double f = 0.0;
      for (std::size_t l = 0; l < b.size(); ++l) f += theta[l] * b[l];
      eta[j] += f;
    }
  }
  std::vector<double> p(P);
  for (std::size_t j = 0; j < P; ++j) p[j] = logistic(eta[j]);
  return p;
}

}  // namespace corf
