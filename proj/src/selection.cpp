#include "patscape/selection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "patscape/error.hpp"
#include "patscape/normal.hpp"

namespace patscape {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr double kSeparationScale = 30.0;

double probit_loglik(const VectorXd& y, const VectorXd& eta) {
  double ll = 0.0;
  for (Eigen::Index i = 0; i < y.size(); ++i) ll += normal::log_cdf(y[i] > 0.5 ? eta[i] : -eta[i]);
  return ll;
}

// Complete separation by one regressor, or an indicator whose 1-rows all share one outcome.
void check_separation(const MatrixXd& x, const VectorXd& y, const std::vector<std::string>& names) {
  for (Eigen::Index k = 0; k < x.cols(); ++k) {
    const auto& name = names[static_cast<std::size_t>(k)];
    if (name == "const") continue;
    double min1 = std::numeric_limits<double>::infinity(), max1 = -min1;
    double min0 = min1, max0 = -min1;
    bool binary = true;
    double ones_y1 = 0.0, ones_y0 = 0.0;
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      const double v = x(i, k);
      binary = binary && (v == 0.0 || v == 1.0);
      if (y[i] > 0.5) {
        min1 = std::min(min1, v);
        max1 = std::max(max1, v);
        ones_y1 += v == 1.0;
      } else {
        min0 = std::min(min0, v);
        max0 = std::max(max0, v);
        ones_y0 += v == 1.0;
      }
    }
    if (max0 < min1 || max1 < min0)
      throw EstimationError("perfect separation: column " + name + " predicts the outcome exactly");
    if (binary && (ones_y1 == 0.0 || ones_y0 == 0.0))
      throw EstimationError("quasi-complete separation: every row with " + name + " = 1 has the same outcome");
  }
}

}  // namespace

double inverse_mills(double z) { return normal::inverse_mills(z); }

double SelectionFit::coefficient(const std::string& name) const {
  auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) throw DataError("no first-stage coefficient named " + name);
  return gamma[it - names.begin()];
}

double SelectionFit::standard_error(const std::string& name) const {
  auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) throw DataError("no first-stage coefficient named " + name);
  return se[it - names.begin()];
}

DesignMatrix selection_design(std::span<const DyadObservation> panel, double offset, ClusterOrientation orientation) {
  if (panel.empty()) throw DataError("empty panel");
  DesignBuilder b(panel, offset, orientation);
  b.log("ln_distance", [](const DyadObservation& o) { return o.distance_km; })
      .level("common_language", [](const DyadObservation& o) { return double(o.common_language); })
      .level("common_religion", [](const DyadObservation& o) { return o.common_religion; })
      .level("colonial", [](const DyadObservation& o) { return double(o.colonial); })
      .level("contiguous", [](const DyadObservation& o) { return double(o.contiguous); })
      .level("rta", [](const DyadObservation& o) { return double(o.rta); })
      .intercept()
      .fixed_effects("year_", [](const DyadObservation& o) { return std::to_string(o.year); })
      .fixed_effects("origin_", [](const DyadObservation& o) { return o.origin; })
      .fixed_effects("dest_", [](const DyadObservation& o) { return o.dest; })
      .response([](const DyadObservation& o) { return o.citations > 0.0 ? 1.0 : 0.0; });
  return b.build();
}

SelectionFit probit_fit(const DesignMatrix& design, const ProbitOptions& options) {
  const VectorXd& y = design.y;
  if (design.rows() == 0) throw DataError("probit on an empty design");
  if (!(y.array() == 0.0 || y.array() == 1.0).all()) throw DataError("probit response must be 0/1");
  const double share = y.mean();
  if (share == 0.0 || share == 1.0) throw EstimationError("probit response has a single class");

  SelectionFit fit;
  fit.warnings = design.warnings;
  std::vector<std::size_t> cols;
  const auto dependent = dependent_columns(design.x);
  for (std::size_t k = 0, d = 0; k < design.cols(); ++k) {
    if (d < dependent.size() && dependent[d] == k) {
      ++d;
      fit.pruned.push_back(design.names[k]);
      fit.warnings.push_back("dropped collinear column " + design.names[k]);
      continue;
    }
    cols.push_back(k);
    fit.names.push_back(design.names[k]);
  }
  MatrixXd x(design.x.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t k = 0; k < cols.size(); ++k) x.col(static_cast<Eigen::Index>(k)) = design.x.col(static_cast<Eigen::Index>(cols[k]));
  check_separation(x, y, fit.names);

  const auto p = x.cols();
  VectorXd sd(p);
  for (Eigen::Index k = 0; k < p; ++k) {
    const double m = x.col(k).mean();
    sd[k] = std::sqrt((x.col(k).array() - m).square().mean());
  }

  VectorXd gamma = VectorXd::Zero(p);
  auto intercept = std::find(fit.names.begin(), fit.names.end(), "const");
  if (intercept != fit.names.end()) gamma[intercept - fit.names.begin()] = normal::quantile(share);

  VectorXd eta = x * gamma;
  double ll = probit_loglik(y, eta);
  std::vector<double> trace;
  MatrixXd info;
  for (int iter = 1; iter <= options.max_iter; ++iter) {
    VectorXd g(y.size()), w(y.size());
    for (Eigen::Index i = 0; i < y.size(); ++i) {
      if (y[i] > 0.5) {
        const double l = normal::inverse_mills(eta[i]);
        g[i] = l;
        w[i] = l * (l + eta[i]);
      } else {
        const double l = normal::inverse_mills(-eta[i]);
        g[i] = -l;
        w[i] = l * (l - eta[i]);
      }
    }
    MatrixXd xw = x.array().colwise() * w.array();
    info = x.transpose() * xw;
    const VectorXd score = x.transpose() * g;
    Eigen::LDLT<MatrixXd> ldlt(info);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
      MatrixXd ridge = info;
      ridge.diagonal().array() += 1e-8;
      ldlt.compute(ridge);
    }
    VectorXd step = ldlt.solve(score);

    VectorXd next = gamma + step;
    VectorXd next_eta = x * next;
    double next_ll = probit_loglik(y, next_eta);
    for (int h = 0; h < 30 && !(next_ll >= ll - 1e-12 * std::fabs(ll)); ++h) {
      step *= 0.5;
      next = gamma + step;
      next_eta = x * next;
      next_ll = probit_loglik(y, next_eta);
    }
    gamma = std::move(next);
    eta = std::move(next_eta);
    ll = next_ll;
    trace.push_back(ll);
    fit.iterations = iter;

    // Diverging coefficients with a still-improving likelihood signal separation.
    Eigen::Index worst = -1;
    double worst_scale = kSeparationScale;
    for (Eigen::Index k = 0; k < p; ++k) {
      if (fit.names[static_cast<std::size_t>(k)] == "const") continue;
      const double scale = std::fabs(gamma[k]) * sd[k];
      if (scale > worst_scale) {
        worst_scale = scale;
        worst = k;
      }
    }
    if (worst >= 0)
      throw EstimationError("perfect separation: coefficient of " + fit.names[static_cast<std::size_t>(worst)] +
                                " diverges",
                            trace);

    if (step.cwiseAbs().maxCoeff() < options.tol) {
      fit.converged = true;
      break;
    }
  }
  if (!fit.converged)
    throw EstimationError("probit did not converge in " + std::to_string(options.max_iter) + " iterations", trace);

  // Information at the final estimate.
  VectorXd w(y.size());
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    const double l = normal::inverse_mills(y[i] > 0.5 ? eta[i] : -eta[i]);
    w[i] = y[i] > 0.5 ? l * (l + eta[i]) : l * (l - eta[i]);
  }
  MatrixXd xw = x.array().colwise() * w.array();
  info = x.transpose() * xw;
  MatrixXd cov = Eigen::LDLT<MatrixXd>(info).solve(MatrixXd::Identity(p, p));
  fit.covariance = 0.5 * (cov + cov.transpose());
  fit.se = fit.covariance.diagonal().cwiseMax(0.0).cwiseSqrt();
  fit.gamma = gamma;
  fit.log_likelihood = ll;
  fit.linear_predictor.assign(eta.data(), eta.data() + eta.size());
  fit.imr.reserve(fit.linear_predictor.size());
  for (double e : fit.linear_predictor) fit.imr.push_back(normal::inverse_mills(e));
  for (std::size_t i = 0; i < design.row_keys.size(); ++i) fit.imr_by_key[design.row_keys[i]] = fit.imr[i];
  return fit;
}

FitResult heckman_second_stage(std::span<const DyadObservation> positive, const SelectionFit& selection,
                               const DesignOptions& options, const PpmlOptions& ppml) {
  if (!selection.converged) throw EstimationError("selection equation did not converge");
  if (positive.empty()) throw DataError("empty positive-flow subset");
  std::vector<double> imr;
  imr.reserve(positive.size());
  for (const auto& o : positive) {
    const std::string key = o.origin + "|" + o.dest + "|" + std::to_string(o.year);
    if (!(o.citations > 0.0)) throw DataError("second stage requires positive flows; row " + key + " has none");
    auto it = selection.imr_by_key.find(key);
    if (it == selection.imr_by_key.end()) throw DataError("no inverse Mills ratio for row " + key);
    imr.push_back(it->second);
  }
  const DesignMatrix design = transform_covariates(positive, options, {{kImrColumn, std::move(imr)}});
  if (!design.column(kImrColumn))
    throw EstimationError("inverse Mills ratio column is constant; first-stage probabilities are all equal");
  FitResult fit = fit_gravity(design, ppml);
  if (!fit.index(kImrColumn))
    throw EstimationError("inverse Mills ratio column is collinear with the outcome regressors");
  return fit;
}

HeckmanResult heckman_two_step(std::span<const DyadObservation> panel, const DesignOptions& options,
                               const ProbitOptions& probit, const PpmlOptions& ppml) {
  HeckmanResult out;
  out.first_stage = probit_fit(selection_design(panel, options.offset, options.cluster), probit);
  std::vector<DyadObservation> positive;
  for (const auto& o : panel)
    if (o.citations > 0.0) positive.push_back(o);
  out.positive_rows = positive.size();
  out.corrected = heckman_second_stage(positive, out.first_stage, options, ppml);
  out.plain = fit_gravity(transform_covariates(positive, options), ppml);
  return out;
}

}  // namespace patscape
