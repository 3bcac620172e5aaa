#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "patscape/corpus.hpp"

namespace patscape {

enum class HolderKind { country, parent_country, firm };

// Distribution of one holder's AI patents over truncated technology classes.
struct PortfolioVector {
  std::string holder;
  std::map<std::string, double> shares;  // every share > 0, sum 1

  std::size_t support_size() const { return shares.size(); }
};

// One patent's classes and the weight its holder carries on it.
struct WeightedClasses {
  const std::vector<std::string>* classes = nullptr;
  double weight = 1.0;
};

// Each patent splits its weight equally across its distinct truncated classes.
PortfolioVector portfolio_from_classes(const std::string& holder, const std::vector<WeightedClasses>& patents,
                                       std::size_t class_level = 4);

PortfolioVector portfolio_vector(const LinkedCorpus& corpus, const std::string& holder,
                                 HolderKind kind = HolderKind::country, std::size_t class_level = 4);

// Sum over the union of supports of min(a_k, b_k).
double min_complement_proximity(const PortfolioVector& a, const PortfolioVector& b);

struct ProximityMatrix {
  std::vector<std::string> holders;
  std::vector<std::vector<double>> values;
};

ProximityMatrix proximity_matrix(const LinkedCorpus& corpus, const std::vector<std::string>& holders,
                                 HolderKind kind = HolderKind::country, std::size_t class_level = 4);

// --- revealed comparative advantage -------------------------------------

struct CountryPatentCounts {
  std::string holder;
  double ai_count = 0.0;
  double total_count = 0.0;
};

double rca(const CountryPatentCounts& counts, const CountryPatentCounts& world);

struct RcaRow {
  std::string country;
  double ai_count = 0.0;
  double total_count = 0.0;
  double share = 0.0;  // ai_count / total_count
  double rca = 0.0;
};

struct RcaOptions {
  // World aggregates. Unset (negative): AI = every corpus patent, linked or not;
  // total = sum of the totals table over real countries.
  double world_ai = -1.0;
  double world_total = -1.0;
  // Collapse countries each under this share of world AI patents into "ROW"; 0 disables.
  double rest_of_world_threshold = 0.0;
};

struct RcaTable {
  std::vector<RcaRow> rows;  // ai_count desc, then code
  CountryPatentCounts world;
  std::vector<std::string> missing_totals;  // countries with AI patents but no total
};

// Reads country,total_count rows. Duplicate or unrecognized codes and negative counts are errors.
std::map<std::string, double> read_totals(const std::filesystem::path& path);

// `totals`: country -> all-field patent count. Adds an "EU" row when the corpus has members.
RcaTable rca_table(const LinkedCorpus& corpus, const std::map<std::string, double>& totals,
                   const RcaOptions& options = {});

// --- concentration --------------------------------------------------------

struct SectorConcentration {
  std::string sector;
  double total = 0.0;
  std::map<std::string, double> per_firm;
  int q = 5;
  double cr = 0.0;
};

SectorConcentration concentration_ratio(const std::map<std::string, double>& per_firm, int q = 5);

// One entry per NACE sector with at least one patent, sorted by sector code.
std::vector<SectorConcentration> sector_concentration(const LinkedCorpus& corpus, int q = 5);

// --- citation flows -------------------------------------------------------

enum class Grouping { applicant, parent };

struct CitationMatrix {
  std::vector<std::string> axis;
  std::vector<std::vector<double>> counts;  // [citing][cited]
  Grouping grouping = Grouping::applicant;

  double row_sum(std::size_t i) const;
  double total() const;
  std::size_t index_of(const std::string& code) const;
};

CitationMatrix citation_matrix(const LinkedCorpus& corpus, const std::vector<std::string>& axis,
                               Grouping grouping = Grouping::applicant);

// Countries that appear on either end of a citation, with EU members folded into "EU".
std::vector<std::string> default_citation_axis(const LinkedCorpus& corpus, Grouping grouping = Grouping::applicant);

double foreign_citation_share(const CitationMatrix& matrix, const std::string& country);

}  // namespace patscape
