#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "patscape/corpus.hpp"

namespace patscape {

// ---- inputs ----------------------------------------------------------------

struct BilateralRow {
  std::string origin;
  std::string dest;
  int year = 0;
  double distance_km = 0.0;
  int common_language = 0;
  int common_legal = 0;
  double common_religion = 0.0;
  int colonial = 0;
  int contiguous = 0;
  int rta = 0;
  int eu_pair = 0;
};

struct MacroRow {
  std::string country;
  int year = 0;
  double gdp = 0.0;
  double gdp_pc = 0.0;
  double rd_share = 0.0;
  std::optional<double> ai_patent_stock;  // blank: derived from the corpus
};

inline const std::vector<std::string> kBilateralHeader = {
    "origin", "dest", "year", "distance_km", "common_language", "common_legal",
    "common_religion", "colonial", "contiguous", "rta", "eu_pair"};
inline const std::vector<std::string> kMacroHeader = {"country", "year", "gdp", "gdp_pc", "rd_share", "ai_patent_stock"};

std::vector<BilateralRow> read_bilateral(const std::filesystem::path& path);
std::vector<MacroRow> read_macro(const std::filesystem::path& path);

// ---- panel -----------------------------------------------------------------

struct DyadObservation {
  std::string origin;
  std::string dest;
  int year = 0;
  double citations = 0.0;
  double distance_km = 0.0;
  int common_language = 0;
  int common_legal = 0;
  int colonial = 0;
  int contiguous = 0;
  int rta = 0;
  int eu_i = 0;
  int eu_j = 0;
  int eu_ij = 0;
  double common_religion = 0.0;
  double gdp_i = 0.0;
  double gdp_j = 0.0;
  double gdp_pc_i = 0.0;
  double gdp_pc_j = 0.0;
  double rd_share_i = 0.0;
  double rd_share_j = 0.0;
  double ai_patents_i = 0.0;
  double ai_patents_j = 0.0;
  double proximity = 0.0;
};

enum class StockMode { cumulative, annual };

struct PanelOptions {
  StockMode stock = StockMode::cumulative;  // corpus-derived AI patent stocks
  bool yearly_proximity = false;            // portfolios of patents granted up to each year
  std::size_t class_level = 4;
};

struct Panel {
  std::vector<DyadObservation> rows;  // sorted by (origin, dest, year)
  std::size_t dropped_rows = 0;       // bilateral rows without macro covariates
  double dropped_citations = 0.0;     // dated citation mass with no panel row
  std::size_t undated_citations = 0;
  std::vector<std::string> warnings;
};

Panel build_panel(const LinkedCorpus& corpus, const std::vector<BilateralRow>& bilateral,
                  const std::vector<MacroRow>& macro, const PanelOptions& options = {});
Panel build_panel(const LinkedCorpus& corpus, const std::filesystem::path& bilateral_path,
                  const std::filesystem::path& macro_path, const PanelOptions& options = {});

// ---- design ----------------------------------------------------------------

enum class ClusterOrientation { ordered, unordered };

struct DesignMatrix {
  Eigen::VectorXd y;
  Eigen::MatrixXd x;
  std::vector<std::string> names;
  std::vector<int> cluster;                 // per row, index into cluster_labels
  std::vector<std::string> cluster_labels;  // ascending
  std::vector<std::string> row_keys;        // origin|dest|year
  double offset = 1e-4;
  std::vector<std::string> warnings;

  std::size_t rows() const { return static_cast<std::size_t>(x.rows()); }
  std::size_t cols() const { return static_cast<std::size_t>(x.cols()); }
  std::optional<std::size_t> column(const std::string& name) const;
};

// Assembles named columns over panel rows. Columns are added in call order;
// fixed-effect blocks drop their alphabetically first category. Constant
// columns other than the intercept are pruned at build() with a warning.
class DesignBuilder {
 public:
  using Getter = std::function<double(const DyadObservation&)>;
  using KeyGetter = std::function<std::string(const DyadObservation&)>;

  DesignBuilder(std::span<const DyadObservation> rows, double offset, ClusterOrientation orientation);

  DesignBuilder& intercept();
  DesignBuilder& level(std::string name, Getter get);
  // ln(value + offset); negative values are rejected with row and column named.
  DesignBuilder& log(std::string name, Getter get);
  DesignBuilder& values(std::string name, std::vector<double> column);
  DesignBuilder& fixed_effects(const std::string& prefix, KeyGetter key);
  DesignBuilder& response(Getter get);

  DesignMatrix build() const;

 private:
  std::span<const DyadObservation> rows_;
  double offset_;
  ClusterOrientation orientation_;
  std::vector<std::pair<std::string, std::vector<double>>> columns_;
  std::vector<double> y_;
};

struct DesignOptions {
  int specification = 1;  // 1..4, the column layouts of the gravity table
  double offset = 1e-4;
  ClusterOrientation cluster = ClusterOrientation::ordered;
};

// Regressor names of a specification, in table order (no intercept or dummies).
std::vector<std::string> specification_regressors(int specification);
bool specification_has_country_effects(int specification);

// Extra columns (name, per-row values) are placed after the specification's regressors.
DesignMatrix transform_covariates(std::span<const DyadObservation> panel, const DesignOptions& options = {},
                                  const std::vector<std::pair<std::string, std::vector<double>>>& extra = {});

// ---- estimation --------------------------------------------------------------

struct PpmlOptions {
  int max_iter = 100;
  double tol = 1e-8;
};

enum class CovarianceKind { model, clustered };

struct FitResult {
  std::vector<std::string> names;  // kept columns
  std::vector<std::size_t> columns;  // their indices in the design
  Eigen::VectorXd coefficients;
  Eigen::MatrixXd covariance;
  Eigen::VectorXd se;
  CovarianceKind covariance_kind = CovarianceKind::model;
  std::size_t clusters = 0;
  std::optional<double> pseudo_r2;
  int iterations = 0;
  bool converged = false;
  double deviance = 0.0;
  std::vector<double> trace;  // deviance after each iteration
  std::vector<std::string> pruned;
  std::vector<std::string> warnings;
  std::size_t n_obs = 0;

  std::optional<std::size_t> index(const std::string& name) const;
  double coefficient(const std::string& name) const;
  double standard_error(const std::string& name) const;
};

// Columns that are linearly dependent on earlier columns (in column order).
std::vector<std::size_t> dependent_columns(const Eigen::MatrixXd& x, double tol = 1e-9);

FitResult ppml_fit(const DesignMatrix& design, const PpmlOptions& options = {});

// Replaces the covariance with the cluster-robust sandwich, scaled by G/(G-1).
FitResult clustered_se(FitResult fit, const DesignMatrix& design);

// Squared correlation of y with the fitted means; nullopt when either is constant.
std::optional<double> pseudo_r2(const FitResult& fit, const DesignMatrix& design);

// Proportional change in the expected count from a unit change: e^b - 1.
double marginal_effect(double coefficient);

// "***" p<0.01, "**" p<0.05, "*" p<0.1, two-sided normal.
std::string significance_stars(double estimate, double se);

// ppml_fit + clustered_se + pseudo_r2.
FitResult fit_gravity(const DesignMatrix& design, const PpmlOptions& options = {});

}  // namespace patscape
