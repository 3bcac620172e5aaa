#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "patscape/dates.hpp"

namespace patscape {

// How a patent with several applicants is split across countries.
enum class Attribution {
  fractional,       // each distinct applicant carries an equal share
  first_applicant,  // the first listed applicant carries everything
};

// Country (or sector) code -> attributed weight. Weights of one patent sum to
// at most 1; the remainder is unattributed (unlinked applicant or blank code).
using WeightMap = std::map<std::string, double>;

struct PatentRecord {
  std::string patent_id;
  std::string family_id;
  std::string authority;
  Date grant_date;
  Date earliest_pub_date;
  std::vector<std::string> cpc_classes;  // normalized, sorted, unique
  std::string applicant_id;
  std::size_t row = 0;  // data row number in the source file (1-based)
};

struct ApplicantRecord {
  std::string applicant_id;
  std::string name;
  std::string country;
  std::string nace;
  std::optional<int> incorporation_year;
  std::string parent_id;
  std::string parent_country;
  std::size_t row = 0;
};

// One row of citations.csv.
struct CitationRecord {
  std::string citing_family;
  std::string cited_family;
  std::string citing_applicant_id;
  std::optional<Date> citation_date;
  std::size_t row = 0;
};

struct RowDiagnostic {
  std::string file;
  std::size_t row = 0;
  std::string message;
};

struct MissingShare {
  std::size_t missing = 0;
  std::size_t total = 0;
  double share() const { return total ? static_cast<double>(missing) / static_cast<double>(total) : 0.0; }
};

// Patent after linking: all rows sharing a patent_id merged.
struct Patent {
  std::string patent_id;
  std::string family_id;
  Date grant_date;
  Date earliest_pub_date;
  std::vector<std::string> cpc_classes;
  std::vector<std::string> applicant_ids;  // file order, unique
  bool linked = false;                     // at least one applicant resolved
  WeightMap country;
  WeightMap parent_country;
  WeightMap sector;
  WeightMap firm;
};

// Family-level view: union of classes and applicants over member patents.
struct Family {
  std::string family_id;
  std::vector<std::string> cpc_classes;
  std::vector<std::string> applicant_ids;
  Date earliest_pub_date;
  Date grant_date;  // earliest grant among members
  WeightMap country;
  WeightMap parent_country;
  std::size_t patent_count = 0;
};

// Deduplicated family-to-family citation with both ends annotated.
struct CitationEdge {
  std::string citing_family;
  std::string cited_family;
  WeightMap citing_country;
  WeightMap cited_country;
  WeightMap citing_parent_country;
  WeightMap cited_parent_country;
  std::optional<Date> citation_date;  // earliest dated duplicate
};

struct LoadOptions {
  Attribution attribution = Attribution::fractional;
  int current_year = 0;  // 0: taken from the system clock
};

struct LinkedCorpus {
  std::vector<PatentRecord> patent_rows;
  std::vector<ApplicantRecord> applicants;
  std::vector<CitationRecord> citation_rows;
  std::vector<RowDiagnostic> diagnostics;       // load-time, in file then row order
  std::vector<RowDiagnostic> link_diagnostics;  // rebuilt by every link_records call
  // Applicant fields plus "applicant" (patents without any resolvable applicant).
  std::map<std::string, MissingShare> missing_report;
  Attribution attribution = Attribution::fractional;
  std::set<std::string> eu_members;  // empty until aggregate_eu

  bool linked = false;
  std::vector<Patent> patents;   // sorted by patent_id
  std::vector<Family> families;  // sorted by family_id
  std::vector<CitationEdge> citations;  // sorted by (citing, cited)
  std::size_t dropped_citations = 0;    // rows whose cited family is not in the corpus

  const Family* find_family(const std::string& family_id) const;
};

LinkedCorpus load_corpus(const std::filesystem::path& patents_path,
                         const std::filesystem::path& applicants_path,
                         const std::filesystem::path& citations_path, const LoadOptions& options = {});

// Pure: re-derives every annotation from the raw tables, so linking twice is a no-op.
LinkedCorpus link_records(LinkedCorpus corpus);

// Registers `members` for the "EU" pseudo-country; member records are untouched.
LinkedCorpus aggregate_eu(LinkedCorpus corpus, const std::set<std::string>& members);

// Weight of `holder` in `weights`; "EU" sums the configured members.
double holder_weight(const WeightMap& weights, const std::string& holder, const std::set<std::string>& eu_members);

struct CountryCounts {
  std::map<std::string, double> per_country;  // includes "EU" when members are configured
  double unattributed = 0.0;
  std::size_t total = 0;
};

CountryCounts country_patent_counts(const LinkedCorpus& corpus, bool parent_view = false);

// Normalizes one technology-class code; empty when unusable.
std::string normalize_class(std::string_view raw);

inline const std::vector<std::string> kPatentHeader = {"patent_id", "family_id", "authority", "grant_date",
                                                       "earliest_pub_date", "cpc_classes", "applicant_id"};
inline const std::vector<std::string> kApplicantHeader = {
    "applicant_id", "name", "country", "nace", "incorporation_year", "parent_id", "parent_country"};
inline const std::vector<std::string> kCitationHeader = {"citing_family", "cited_family", "citing_applicant_id",
                                                         "citation_date"};

}  // namespace patscape
