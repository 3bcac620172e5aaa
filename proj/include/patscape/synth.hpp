#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "patscape/corpus.hpp"
#include "patscape/gravity.hpp"

namespace patscape::synth {

using Coefficients = std::map<std::string, double>;

struct TruthRecord {
  std::uint64_t seed = 0;
  Coefficients beta_true;
  std::optional<Coefficients> gamma_true;
  std::optional<double> delta_true;
  int countries = 0;
  int years = 0;
  int firms = 0;
  int patents = 0;
  int classes = 0;
  nlohmann::json planted = nlohmann::json::object();
};

nlohmann::json to_json(const TruthRecord& truth);
TruthRecord truth_from_json(const nlohmann::json& j);

// ---- dyad panels -----------------------------------------------------------

struct Selection {
  Coefficients gamma;  // link equation: const plus bilateral regressors
  double delta = 0.0;  // loading of the link shock in the outcome
  double country_effect_sd = 0.5;  // origin and destination link propensities
};

struct PanelSpec {
  std::uint64_t seed = 42;
  int n_countries = 20;
  int n_years = 5;
  int first_year = 2015;
  Coefficients beta;  // names as in the gravity design; "const" is the intercept
  std::optional<Selection> selection;
  double year_effect_sd = 0.2;
  int families_per_country = 8;
  bool with_citations = true;  // false: skip the corpus citation rows
};

Coefficients default_beta();
Coefficients default_gamma();
// Intercept-heavy defaults that keep zero-truncation negligible for two-step checks.
PanelSpec heckman_spec(std::uint64_t seed, double delta = 0.0);

struct SyntheticPanel {
  std::vector<BilateralRow> bilateral;
  std::vector<MacroRow> macro;        // ai_patent_stock always filled
  std::vector<DyadObservation> rows;  // sorted by (origin, dest, year)
  std::vector<int> linked;            // per row: link gate outcome (1 without selection)
  // Corpus carrying the flows: one applicant per country, cited families with
  // classes, one citing family per citation.
  std::vector<PatentRecord> patents;
  std::vector<ApplicantRecord> applicants;
  std::vector<CitationRecord> citations;
  std::map<std::string, double> totals;
  TruthRecord truth;
};

// Covariates are drawn as follows: ln gdp ~ N(26, 1.5) growing 2%/year, ln gdp_pc
// ~ N(10, 0.7), R&D share ~ U(0.5, 4), AI stock cumulative lognormal flows,
// distance ~ U(100, 15000) km, flags Bernoulli, religion U(0,1)^2, proximity
// from random class portfolios. Citations ~ Poisson(exp(x'beta + mu_t)), with
// log covariates taken as ln(v + 1e-4).
SyntheticPanel gen_panel(const PanelSpec& spec);

// ---- corpora ---------------------------------------------------------------

struct CorpusSpec {
  std::uint64_t seed = 42;
  int n_firms = 40;
  int n_patents = 400;
  int n_classes = 8;
  double uncited_share = 0.3;
};

// Firms are spread round-robin over up to ten countries; patents pick a firm
// uniformly, 1-3 classes, publication dates in 2010-2018 and grants 12-36
// months later. Planted: an IS/MT pair with class shares (0.5, 0.3, 0.2) and
// (0.2, 0.3, 0.5), a single-firm sector "99", and an exact share of families
// never cited, every other family first cited within 59 months.
struct SyntheticCorpus {
  std::vector<PatentRecord> patents;
  std::vector<ApplicantRecord> applicants;
  std::vector<CitationRecord> citations;
  std::map<std::string, double> totals;  // country -> all-technology patent count
  TruthRecord truth;
};

SyntheticCorpus gen_corpus(const CorpusSpec& spec);

inline constexpr const char* kWindowEnd = "2023-12";

// ---- writers ---------------------------------------------------------------

void write_patents(const std::filesystem::path& path, const std::vector<PatentRecord>& rows);
void write_applicants(const std::filesystem::path& path, const std::vector<ApplicantRecord>& rows);
void write_citations(const std::filesystem::path& path, const std::vector<CitationRecord>& rows);
void write_bilateral(const std::filesystem::path& path, const std::vector<BilateralRow>& rows);
void write_macro(const std::filesystem::path& path, const std::vector<MacroRow>& rows);
void write_totals(const std::filesystem::path& path, const std::map<std::string, double>& totals);
void write_truth(const std::filesystem::path& path, const TruthRecord& truth);

// Writes patents.csv, applicants.csv, citations.csv, totals.csv and truth.json
// (plus bilateral.csv and macro.csv for panels). Returns the paths written.
std::vector<std::filesystem::path> write_dataset(const std::filesystem::path& dir, const SyntheticCorpus& corpus);
std::vector<std::filesystem::path> write_dataset(const std::filesystem::path& dir, const SyntheticPanel& panel);

}  // namespace patscape::synth
