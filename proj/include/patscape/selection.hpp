#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "patscape/gravity.hpp"

namespace patscape {

struct SelectionFit {
  std::vector<std::string> names;
  Eigen::VectorXd gamma;
  Eigen::MatrixXd covariance;  // inverse observed information
  Eigen::VectorXd se;
  bool converged = false;
  int iterations = 0;
  double log_likelihood = 0.0;
  std::vector<std::string> pruned;
  std::vector<std::string> warnings;
  // Per design row: linear predictor and inverse Mills ratio.
  std::vector<double> linear_predictor;
  std::vector<double> imr;
  std::map<std::string, double> imr_by_key;  // row key origin|dest|year -> IMR

  double coefficient(const std::string& name) const;
  double standard_error(const std::string& name) const;
};

struct ProbitOptions {
  int max_iter = 100;
  double tol = 1e-8;
};

// Link-formation regressors: distance, language, religion, colonial ties,
// contiguity and trade agreements, plus time, origin and destination effects.
// Response is 1{citations > 0}.
DesignMatrix selection_design(std::span<const DyadObservation> panel, double offset = 1e-4,
                              ClusterOrientation orientation = ClusterOrientation::ordered);

// Newton-Raphson on the probit log-likelihood; design.y must be 0/1 with both
// classes present. Throws EstimationError on (quasi-)separation.
SelectionFit probit_fit(const DesignMatrix& design, const ProbitOptions& options = {});

double inverse_mills(double z);

// IMR-augmented PPML on rows with positive citations. Each row's IMR is looked
// up from `selection` by its origin|dest|year key.
FitResult heckman_second_stage(std::span<const DyadObservation> positive, const SelectionFit& selection,
                               const DesignOptions& options = {}, const PpmlOptions& ppml = {});

struct HeckmanResult {
  SelectionFit first_stage;
  FitResult corrected;  // with the IMR regressor
  FitResult plain;      // same positive subset, no IMR
  std::size_t positive_rows = 0;
};

HeckmanResult heckman_two_step(std::span<const DyadObservation> panel, const DesignOptions& options = {},
                               const ProbitOptions& probit = {}, const PpmlOptions& ppml = {});

inline constexpr const char* kImrColumn = "imr";

}  // namespace patscape
