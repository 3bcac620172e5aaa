#include <algorithm>
#include <cmath>

#include "patscape/error.hpp"
#include "patscape/gravity.hpp"
#include "patscape/normal.hpp"

namespace patscape {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr double kMaxEta = 700.0;
constexpr int kMaxHalvings = 30;
constexpr int kPolishSteps = 5;

VectorXd fitted_means(const MatrixXd& x, const VectorXd& beta) {
  return (x * beta).array().min(kMaxEta).exp().matrix();
}

double poisson_deviance(const VectorXd& y, const VectorXd& mu) {
  double d = 0.0;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    const double yi = y[i];
    d += (yi > 0.0 ? yi * std::log(yi / mu[i]) : 0.0) - (yi - mu[i]);
  }
  return 2.0 * d;
}

MatrixXd weighted_cross(const MatrixXd& x, const VectorXd& w) {
  MatrixXd xw = x.array().colwise() * w.array();
  return x.transpose() * xw;
}

VectorXd solve_spd(const MatrixXd& a, const VectorXd& b) {
  Eigen::LDLT<MatrixXd> ldlt(a);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
    MatrixXd ridge = a;
    ridge.diagonal().array() += 1e-8 * std::max(1.0, a.diagonal().maxCoeff());
    ldlt.compute(ridge);
  }
  return ldlt.solve(b);
}

MatrixXd inverse_spd(const MatrixXd& a) {
  const auto p = a.rows();
  MatrixXd inv = Eigen::LDLT<MatrixXd>(a).solve(MatrixXd::Identity(p, p));
  return 0.5 * (inv + inv.transpose());
}

MatrixXd select_columns(const MatrixXd& x, const std::vector<std::size_t>& cols) {
  MatrixXd out(x.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t k = 0; k < cols.size(); ++k) out.col(static_cast<Eigen::Index>(k)) = x.col(static_cast<Eigen::Index>(cols[k]));
  return out;
}

bool is_binary(const Eigen::Ref<const VectorXd>& v) {
  return (v.array() == 0.0 || v.array() == 1.0).all();
}

}  // namespace

std::optional<std::size_t> FitResult::index(const std::string& name) const {
  auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) return std::nullopt;
  return static_cast<std::size_t>(it - names.begin());
}

double FitResult::coefficient(const std::string& name) const {
  auto k = index(name);
  if (!k) throw DataError("no coefficient named " + name);
  return coefficients[static_cast<Eigen::Index>(*k)];
}

double FitResult::standard_error(const std::string& name) const {
  auto k = index(name);
  if (!k) throw DataError("no coefficient named " + name);
  return se[static_cast<Eigen::Index>(*k)];
}

std::vector<std::size_t> dependent_columns(const MatrixXd& x, double tol) {
  // Incremental Cholesky of X'X in column order; a column whose residual
  // squared norm (relative to its own) falls below tol depends on earlier ones.
  const MatrixXd gram = x.transpose() * x;
  const auto p = static_cast<std::size_t>(gram.rows());
  std::vector<std::size_t> kept;
  std::vector<std::size_t> dependent;
  MatrixXd l = MatrixXd::Zero(gram.rows(), gram.cols());
  for (std::size_t k = 0; k < p; ++k) {
    const auto kk = static_cast<Eigen::Index>(k);
    const double norm2 = gram(kk, kk);
    if (norm2 <= 0.0) {
      dependent.push_back(k);
      continue;
    }
    const auto m = static_cast<Eigen::Index>(kept.size());
    VectorXd row(m);
    for (Eigen::Index a = 0; a < m; ++a) {
      double s = gram(static_cast<Eigen::Index>(kept[static_cast<std::size_t>(a)]), kk);
      for (Eigen::Index b = 0; b < a; ++b) s -= l(a, b) * row[b];
      row[a] = s / l(a, a);
    }
    const double resid = norm2 - row.squaredNorm();
    if (resid <= tol * norm2) {
      dependent.push_back(k);
      continue;
    }
    l.row(m).head(m) = row.transpose();
    l(m, m) = std::sqrt(resid);
    kept.push_back(k);
  }
  return dependent;
}

FitResult ppml_fit(const DesignMatrix& design, const PpmlOptions& options) {
  const VectorXd& y = design.y;
  if (design.rows() == 0) throw DataError("PPML on an empty design");
  if ((y.array() < 0.0).any()) throw DataError("PPML response must be non-negative");
  if (!(y.array() > 0.0).any()) throw EstimationError("PPML response is all zero");

  FitResult fit;
  fit.n_obs = design.rows();
  fit.warnings = design.warnings;

  // Indicator columns whose rows all have y = 0 push their coefficient to -inf.
  std::vector<std::size_t> candidates;
  for (std::size_t k = 0; k < design.cols(); ++k) {
    const auto col = design.x.col(static_cast<Eigen::Index>(k));
    if (design.names[k] != "const" && is_binary(col) && (col.array() * y.array()).sum() == 0.0) {
      fit.pruned.push_back(design.names[k]);
      fit.warnings.push_back("dropped " + design.names[k] + ": only zero flows where it is 1");
      continue;
    }
    candidates.push_back(k);
  }
  const MatrixXd x0 = select_columns(design.x, candidates);
  const auto dependent = dependent_columns(x0);
  for (std::size_t j = 0, d = 0; j < candidates.size(); ++j) {
    if (d < dependent.size() && dependent[d] == j) {
      ++d;
      fit.pruned.push_back(design.names[candidates[j]]);
      fit.warnings.push_back("dropped collinear column " + design.names[candidates[j]]);
      continue;
    }
    fit.columns.push_back(candidates[j]);
    fit.names.push_back(design.names[candidates[j]]);
  }
  if (fit.columns.empty()) throw EstimationError("no estimable columns left in the design");

  const MatrixXd x = select_columns(design.x, fit.columns);
  const auto p = x.cols();
  VectorXd beta = VectorXd::Zero(p);
  if (auto c = fit.index("const")) beta[static_cast<Eigen::Index>(*c)] = std::log(y.mean() + design.offset);

  VectorXd mu = fitted_means(x, beta);
  double dev = poisson_deviance(y, mu);
  int polish = -1;  // >= 0 once the deviance criterion has fired
  for (int iter = 1; iter <= options.max_iter; ++iter) {
    const VectorXd eta = x * beta;
    const VectorXd z = eta.array() + (y - mu).array() / mu.array();
    VectorXd next = solve_spd(weighted_cross(x, mu), x.transpose() * (mu.array() * z.array()).matrix());

    VectorXd next_mu = fitted_means(x, next);
    double next_dev = poisson_deviance(y, next_mu);
    for (int h = 0; h < kMaxHalvings && !(next_dev <= dev * (1.0 + 1e-12) + 1e-12); ++h) {
      next = 0.5 * (beta + next);
      next_mu = fitted_means(x, next);
      next_dev = poisson_deviance(y, next_mu);
    }
    if (!std::isfinite(next_dev)) throw EstimationError("PPML deviance is not finite", fit.trace);

    const double step = (next - beta).cwiseAbs().maxCoeff();
    const double rel = std::fabs(dev - next_dev) / (std::fabs(next_dev) + 0.1);
    beta = std::move(next);
    mu = std::move(next_mu);
    dev = next_dev;
    fit.trace.push_back(dev);
    fit.iterations = iter;

    // Converged on the coefficient step, or on the deviance change followed by a
    // few Newton polish steps so the score equations hold tightly.
    if (step < options.tol) {
      fit.converged = true;
      break;
    }
    if (polish < 0 && rel < options.tol) polish = 0;
    if (polish >= 0 && ++polish > kPolishSteps) {
      fit.converged = true;
      break;
    }
  }
  if (!fit.converged) {
    throw EstimationError("PPML did not converge in " + std::to_string(options.max_iter) + " iterations",
                          fit.trace);
  }

  fit.coefficients = beta;
  fit.deviance = dev;
  fit.covariance = inverse_spd(weighted_cross(x, mu));
  fit.se = fit.covariance.diagonal().cwiseMax(0.0).cwiseSqrt();
  fit.covariance_kind = CovarianceKind::model;
  return fit;
}

FitResult clustered_se(FitResult fit, const DesignMatrix& design) {
  if (!fit.converged) throw EstimationError("clustered standard errors need a converged fit");
  if (design.cluster.size() != design.rows()) throw DataError("design has no cluster labels");
  const std::size_t groups = design.cluster_labels.size();
  if (groups <= 1) throw EstimationError("cluster-robust covariance needs more than one cluster");

  const MatrixXd x = select_columns(design.x, fit.columns);
  const auto p = x.cols();
  if (groups <= static_cast<std::size_t>(p))
    fit.warnings.push_back("few clusters: " + std::to_string(groups) + " clusters for " + std::to_string(p) +
                           " coefficients");

  const VectorXd mu = fitted_means(x, fit.coefficients);
  const VectorXd resid = design.y - mu;

  // Per-cluster score sums, reduced in ascending cluster id.
  MatrixXd scores = MatrixXd::Zero(static_cast<Eigen::Index>(groups), p);
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    scores.row(design.cluster[static_cast<std::size_t>(i)]) += resid[i] * x.row(i);
  const MatrixXd meat = scores.transpose() * scores;

  const MatrixXd bread = inverse_spd(weighted_cross(x, mu));
  const double g = static_cast<double>(groups);
  MatrixXd cov = (g / (g - 1.0)) * (bread * meat * bread);
  fit.covariance = 0.5 * (cov + cov.transpose());
  fit.se = fit.covariance.diagonal().cwiseMax(0.0).cwiseSqrt();
  fit.covariance_kind = CovarianceKind::clustered;
  fit.clusters = groups;
  return fit;
}

std::optional<double> pseudo_r2(const FitResult& fit, const DesignMatrix& design) {
  if (!fit.converged) throw EstimationError("pseudo R-squared needs a converged fit");
  const MatrixXd x = select_columns(design.x, fit.columns);
  const VectorXd mu = fitted_means(x, fit.coefficients);
  const VectorXd& y = design.y;
  const double my = y.mean();
  const double mm = mu.mean();
  const double syy = (y.array() - my).square().sum();
  const double smm = (mu.array() - mm).square().sum();
  if (syy <= 0.0 || smm <= 0.0) return std::nullopt;
  const double sym = ((y.array() - my) * (mu.array() - mm)).sum();
  return sym * sym / (syy * smm);
}

double marginal_effect(double coefficient) { return std::expm1(coefficient); }

std::string significance_stars(double estimate, double se) {
  if (!(se > 0.0) || !std::isfinite(estimate)) return "";
  const double p = normal::two_sided_p(estimate / se);
  if (p < 0.01) return "***";
  if (p < 0.05) return "**";
  if (p < 0.1) return "*";
  return "";
}

FitResult fit_gravity(const DesignMatrix& design, const PpmlOptions& options) {
  FitResult fit = clustered_se(ppml_fit(design, options), design);
  fit.pseudo_r2 = pseudo_r2(fit, design);
  return fit;
}

}  // namespace patscape
