#include "patscape/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <chrono>
#include <future>
#include <unordered_map>

#include "patscape/countries.hpp"
#include "patscape/csv.hpp"
#include "patscape/error.hpp"

namespace patscape {
namespace {

constexpr std::size_t kMaxReportedDiagnostics = 20;

std::string upper(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t");
  return std::string(s.substr(b, e - b + 1));
}

int system_year() {
  const auto today = std::chrono::year_month_day{std::chrono::floor<std::chrono::days>(std::chrono::system_clock::now())};
  return static_cast<int>(today.year());
}

template <typename Record>
struct Parsed {
  std::vector<Record> records;
  std::vector<RowDiagnostic> diagnostics;
  std::size_t failed = 0;
  std::size_t total = 0;
};

[[noreturn]] void abort_with(const std::string& file, std::size_t failed, std::size_t total,
                             const std::vector<RowDiagnostic>& diagnostics) {
  std::string msg = file + ": " + std::to_string(failed) + " of " + std::to_string(total) +
                    " rows failed validation (more than half)";
  std::size_t shown = 0;
  for (const auto& d : diagnostics) {
    if (shown++ == kMaxReportedDiagnostics) break;
    msg += "\n  row " + std::to_string(d.row) + ": " + d.message;
  }
  throw DataError(msg);
}

template <typename Record>
void check_failure_rate(const std::string& file, const Parsed<Record>& parsed) {
  if (parsed.failed * 2 > parsed.total) abort_with(file, parsed.failed, parsed.total, parsed.diagnostics);
}

Parsed<PatentRecord> parse_patents(const std::filesystem::path& path) {
  const std::string file = path.filename().string();
  auto table = csv::read_file(path);
  csv::require_header(table, kPatentHeader, file);
  if (table.rows.empty()) throw DataError(file + ": no patent rows");

  Parsed<PatentRecord> out;
  out.total = table.rows.size();
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& r = table.rows[i];
    const std::size_t row = i + 1;
    auto fail = [&](const std::string& why) {
      out.diagnostics.push_back({file, row, why});
      ++out.failed;
    };
    if (r.size() != kPatentHeader.size()) {
      fail("expected 7 fields, got " + std::to_string(r.size()));
      continue;
    }
    PatentRecord rec;
    rec.row = row;
    rec.patent_id = trim(r[0]);
    rec.family_id = trim(r[1]);
    rec.authority = upper(trim(r[2]));
    rec.applicant_id = trim(r[6]);
    if (rec.patent_id.empty()) { fail("empty patent_id"); continue; }
    if (rec.family_id.empty()) { fail("empty family_id"); continue; }
    if (!countries::is_recognized(rec.authority)) { fail("unknown authority '" + rec.authority + "'"); continue; }
    auto grant = parse_date(trim(r[3]));
    auto pub = parse_date(trim(r[4]));
    if (!grant) { fail("unparseable grant_date '" + r[3] + "'"); continue; }
    if (!pub) { fail("unparseable earliest_pub_date '" + r[4] + "'"); continue; }
    rec.grant_date = *grant;
    rec.earliest_pub_date = *pub;

    std::string_view classes = r[5];
    while (!classes.empty()) {
      auto bar = classes.find('|');
      auto code = normalize_class(classes.substr(0, bar));
      if (!code.empty()) rec.cpc_classes.push_back(std::move(code));
      classes = bar == std::string_view::npos ? std::string_view{} : classes.substr(bar + 1);
    }
    std::sort(rec.cpc_classes.begin(), rec.cpc_classes.end());
    rec.cpc_classes.erase(std::unique(rec.cpc_classes.begin(), rec.cpc_classes.end()), rec.cpc_classes.end());
    if (rec.cpc_classes.empty()) out.diagnostics.push_back({file, row, "no usable technology class (flagged)"});
    out.records.push_back(std::move(rec));
  }
  return out;
}

Parsed<ApplicantRecord> parse_applicants(const std::filesystem::path& path, int current_year) {
  const std::string file = path.filename().string();
  auto table = csv::read_file(path);
  csv::require_header(table, kApplicantHeader, file);

  Parsed<ApplicantRecord> out;
  out.total = table.rows.size();
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& r = table.rows[i];
    const std::size_t row = i + 1;
    auto fail = [&](const std::string& why) {
      out.diagnostics.push_back({file, row, why});
      ++out.failed;
    };
    if (r.size() != kApplicantHeader.size()) {
      fail("expected 7 fields, got " + std::to_string(r.size()));
      continue;
    }
    ApplicantRecord rec;
    rec.row = row;
    rec.applicant_id = trim(r[0]);
    rec.name = trim(r[1]);
    rec.country = upper(trim(r[2]));
    rec.nace = trim(r[3]);
    rec.parent_id = trim(r[5]);
    rec.parent_country = upper(trim(r[6]));
    if (rec.applicant_id.empty()) { fail("empty applicant_id"); continue; }
    if (!rec.country.empty() && !countries::is_recognized(rec.country)) {
      fail("unrecognized country '" + rec.country + "'");
      continue;
    }
    if (!rec.parent_country.empty() && !countries::is_recognized(rec.parent_country)) {
      fail("unrecognized parent_country '" + rec.parent_country + "'");
      continue;
    }
    if (!rec.nace.empty() && (rec.nace.size() != 2 || !std::isdigit(static_cast<unsigned char>(rec.nace[0])) ||
                              !std::isdigit(static_cast<unsigned char>(rec.nace[1])))) {
      fail("nace must be a 2-digit code, got '" + rec.nace + "'");
      continue;
    }
    const std::string year = trim(r[4]);
    if (!year.empty()) {
      int y = 0;
      auto [ptr, ec] = std::from_chars(year.data(), year.data() + year.size(), y);
      if (ec != std::errc{} || ptr != year.data() + year.size()) {
        fail("unparseable incorporation_year '" + year + "'");
        continue;
      }
      if (y < 1500 || y > current_year) {
        fail("incorporation_year " + year + " outside [1500, " + std::to_string(current_year) + "]");
        continue;
      }
      rec.incorporation_year = y;
    }
    out.records.push_back(std::move(rec));
  }
  return out;
}

Parsed<CitationRecord> parse_citations(const std::filesystem::path& path) {
  const std::string file = path.filename().string();
  auto table = csv::read_file(path);
  csv::require_header(table, kCitationHeader, file);

  Parsed<CitationRecord> out;
  out.total = table.rows.size();
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& r = table.rows[i];
    const std::size_t row = i + 1;
    auto fail = [&](const std::string& why) {
      out.diagnostics.push_back({file, row, why});
      ++out.failed;
    };
    if (r.size() != kCitationHeader.size()) {
      fail("expected 4 fields, got " + std::to_string(r.size()));
      continue;
    }
    CitationRecord rec;
    rec.row = row;
    rec.citing_family = trim(r[0]);
    rec.cited_family = trim(r[1]);
    rec.citing_applicant_id = trim(r[2]);
    if (rec.citing_family.empty() || rec.cited_family.empty()) { fail("empty family id"); continue; }
    const std::string date = trim(r[3]);
    if (!date.empty()) {
      rec.citation_date = parse_date(date);
      if (!rec.citation_date) { fail("unparseable citation_date '" + date + "'"); continue; }
    }
    out.records.push_back(std::move(rec));
  }
  return out;
}

void compute_missing_report(LinkedCorpus& corpus) {
  auto& report = corpus.missing_report;
  report.clear();
  const std::size_t n = corpus.applicants.size();
  const char* fields[] = {"name", "country", "nace", "incorporation_year", "parent_id", "parent_country"};
  for (const char* f : fields) report[f] = MissingShare{0, n};
  for (const auto& a : corpus.applicants) {
    report["name"].missing += a.name.empty();
    report["country"].missing += a.country.empty();
    report["nace"].missing += a.nace.empty();
    report["incorporation_year"].missing += !a.incorporation_year.has_value();
    report["parent_id"].missing += a.parent_id.empty();
    report["parent_country"].missing += a.parent_country.empty();
  }

  std::set<std::string> known;
  for (const auto& a : corpus.applicants) known.insert(a.applicant_id);
  std::map<std::string, bool> resolved;  // patent_id -> any applicant resolves
  for (const auto& p : corpus.patent_rows) {
    bool& r = resolved[p.patent_id];
    r = r || known.count(p.applicant_id) > 0;
  }
  MissingShare applicant{0, resolved.size()};
  for (const auto& [id, ok] : resolved) applicant.missing += !ok;
  report["applicant"] = applicant;
}

struct Attributed {
  WeightMap country;
  WeightMap parent_country;
  WeightMap sector;
  WeightMap firm;
  bool linked = false;
};

using ApplicantIndex = std::unordered_map<std::string, const ApplicantRecord*>;

std::string parent_country_of(const ApplicantRecord& a) {
  if (!a.parent_country.empty()) return a.parent_country;
  if (a.parent_id.empty()) return a.country;  // independent firm is its own parent
  return {};
}

Attributed attribute(const std::vector<std::string>& applicant_ids, const ApplicantIndex& index,
                     Attribution mode) {
  Attributed out;
  if (applicant_ids.empty()) return out;
  const std::size_t m = mode == Attribution::first_applicant ? 1 : applicant_ids.size();
  const double w = 1.0 / static_cast<double>(m);
  for (std::size_t k = 0; k < m; ++k) {
    auto it = index.find(applicant_ids[k]);
    if (it == index.end()) continue;
    const ApplicantRecord& a = *it->second;
    out.linked = true;
    out.firm[a.applicant_id] += w;
    if (!a.country.empty()) out.country[a.country] += w;
    if (auto pc = parent_country_of(a); !pc.empty()) out.parent_country[pc] += w;
    if (!a.nace.empty()) out.sector[a.nace] += w;
  }
  return out;
}

void push_unique(std::vector<std::string>& v, const std::string& s) {
  if (!s.empty() && std::find(v.begin(), v.end(), s) == v.end()) v.push_back(s);
}

}  // namespace

std::string normalize_class(std::string_view raw) {
  std::string code;
  for (char c : raw) {
    if (std::isspace(static_cast<unsigned char>(c))) continue;
    code.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  }
  if (code.size() < 4) return {};
  for (std::size_t i = 0; i < 4; ++i)
    if (!std::isalnum(static_cast<unsigned char>(code[i]))) return {};
  for (char c : code)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '/') return {};
  return code;
}

const Family* LinkedCorpus::find_family(const std::string& family_id) const {
  auto it = std::lower_bound(families.begin(), families.end(), family_id,
                             [](const Family& f, const std::string& id) { return f.family_id < id; });
  return it != families.end() && it->family_id == family_id ? &*it : nullptr;
}

LinkedCorpus load_corpus(const std::filesystem::path& patents_path, const std::filesystem::path& applicants_path,
                         const std::filesystem::path& citations_path, const LoadOptions& options) {
  const int year = options.current_year ? options.current_year : system_year();

  // Files are independent; diagnostics are merged afterwards in a fixed order.
  auto patents = std::async(std::launch::async, parse_patents, patents_path);
  auto applicants = std::async(std::launch::async, parse_applicants, applicants_path, year);
  auto citations = std::async(std::launch::async, parse_citations, citations_path);
  auto p = patents.get();
  auto a = applicants.get();
  auto c = citations.get();

  check_failure_rate(patents_path.filename().string(), p);
  check_failure_rate(applicants_path.filename().string(), a);
  check_failure_rate(citations_path.filename().string(), c);
  if (p.records.empty()) throw DataError("no patent rows");

  LinkedCorpus corpus;
  corpus.attribution = options.attribution;
  corpus.patent_rows = std::move(p.records);
  corpus.applicants = std::move(a.records);
  corpus.citation_rows = std::move(c.records);
  for (auto* d : {&p.diagnostics, &a.diagnostics, &c.diagnostics})
    corpus.diagnostics.insert(corpus.diagnostics.end(), d->begin(), d->end());
  compute_missing_report(corpus);
  return corpus;
}

LinkedCorpus link_records(LinkedCorpus corpus) {
  corpus.link_diagnostics.clear();
  compute_missing_report(corpus);

  // Applicant table, rejecting ids that disagree on country.
  ApplicantIndex index;
  std::set<std::string> conflicts;
  for (const auto& a : corpus.applicants) {
    auto [it, inserted] = index.emplace(a.applicant_id, &a);
    if (!inserted && it->second->country != a.country) conflicts.insert(a.applicant_id);
  }
  if (!conflicts.empty()) {
    std::string ids;
    for (const auto& id : conflicts) ids += (ids.empty() ? "" : ", ") + id;
    throw DataError("duplicate applicant_id with conflicting countries: " + ids);
  }

  // Patents: merge rows sharing a patent_id, keeping first-seen applicant order.
  std::map<std::string, Patent> patents;
  for (const auto& row : corpus.patent_rows) {
    auto [it, inserted] = patents.try_emplace(row.patent_id);
    Patent& p = it->second;
    if (inserted) {
      p.patent_id = row.patent_id;
      p.family_id = row.family_id;
      p.grant_date = row.grant_date;
      p.earliest_pub_date = row.earliest_pub_date;
    } else if (p.family_id != row.family_id) {
      corpus.link_diagnostics.push_back({"patents", row.row,
                                         "patent " + row.patent_id + " listed under families " + p.family_id +
                                             " and " + row.family_id + "; keeping the first"});
    }
    for (const auto& c : row.cpc_classes) push_unique(p.cpc_classes, c);
    push_unique(p.applicant_ids, row.applicant_id);
  }

  // Families follow patent file order so "first applicant" is stable.
  std::map<std::string, Family> families;
  for (const auto& row : corpus.patent_rows) {
    Family& f = families[patents.at(row.patent_id).family_id];
    if (f.family_id.empty()) {
      f.family_id = patents.at(row.patent_id).family_id;
      f.earliest_pub_date = row.earliest_pub_date;
      f.grant_date = row.grant_date;
    }
    f.earliest_pub_date = std::min(f.earliest_pub_date, row.earliest_pub_date);
    f.grant_date = std::min(f.grant_date, row.grant_date);
    for (const auto& c : row.cpc_classes) push_unique(f.cpc_classes, c);
    push_unique(f.applicant_ids, row.applicant_id);
  }

  corpus.patents.clear();
  for (auto& [id, p] : patents) {
    std::sort(p.cpc_classes.begin(), p.cpc_classes.end());
    auto attr = attribute(p.applicant_ids, index, corpus.attribution);
    p.linked = attr.linked;
    p.country = std::move(attr.country);
    p.parent_country = std::move(attr.parent_country);
    p.sector = std::move(attr.sector);
    p.firm = std::move(attr.firm);
    ++families[p.family_id].patent_count;
    corpus.patents.push_back(std::move(p));
  }

  corpus.families.clear();
  for (auto& [id, f] : families) {
    std::sort(f.cpc_classes.begin(), f.cpc_classes.end());
    auto attr = attribute(f.applicant_ids, index, corpus.attribution);
    f.country = std::move(attr.country);
    f.parent_country = std::move(attr.parent_country);
    corpus.families.push_back(f);
  }

  // Citations: family-to-family pairs, deduplicated.
  struct PairAccum {
    std::vector<std::string> citing_applicants;
    std::optional<Date> date;
  };
  std::map<std::pair<std::string, std::string>, PairAccum> pairs;
  corpus.dropped_citations = 0;
  for (const auto& row : corpus.citation_rows) {
    if (!families.count(row.cited_family)) {
      ++corpus.dropped_citations;
      corpus.link_diagnostics.push_back(
          {"citations", row.row, "cited family " + row.cited_family + " is not in the corpus"});
      continue;
    }
    auto& acc = pairs[{row.citing_family, row.cited_family}];
    push_unique(acc.citing_applicants, row.citing_applicant_id);
    if (row.citation_date && (!acc.date || *row.citation_date < *acc.date)) acc.date = row.citation_date;
  }

  corpus.citations.clear();
  for (auto& [key, acc] : pairs) {
    CitationEdge e;
    e.citing_family = key.first;
    e.cited_family = key.second;
    e.citation_date = acc.date;
    const Family& cited = families.at(key.second);
    e.cited_country = cited.country;
    e.cited_parent_country = cited.parent_country;
    if (!acc.citing_applicants.empty()) {
      auto attr = attribute(acc.citing_applicants, index, corpus.attribution);
      e.citing_country = std::move(attr.country);
      e.citing_parent_country = std::move(attr.parent_country);
    } else if (auto it = families.find(key.first); it != families.end()) {
      e.citing_country = it->second.country;
      e.citing_parent_country = it->second.parent_country;
    }
    corpus.citations.push_back(std::move(e));
  }

  corpus.linked = true;
  return corpus;
}

LinkedCorpus aggregate_eu(LinkedCorpus corpus, const std::set<std::string>& members) {
  if (members.empty()) throw DataError("EU member set is empty");
  for (const auto& m : members)
    if (!countries::is_iso(m)) throw DataError("EU member code not in registry: " + m);
  corpus.eu_members = members;
  return corpus;
}

double holder_weight(const WeightMap& weights, const std::string& holder, const std::set<std::string>& eu_members) {
  if (holder == countries::kEu && !eu_members.empty()) {
    double w = 0.0;
    for (const auto& [code, v] : weights)
      if (eu_members.count(code)) w += v;
    return w;
  }
  auto it = weights.find(holder);
  return it == weights.end() ? 0.0 : it->second;
}

CountryCounts country_patent_counts(const LinkedCorpus& corpus, bool parent_view) {
  if (!corpus.linked) throw DataError("corpus must be linked before counting");
  CountryCounts out;
  out.total = corpus.patents.size();
  double eu = 0.0;
  for (const auto& p : corpus.patents) {
    const WeightMap& w = parent_view ? p.parent_country : p.country;
    double attributed = 0.0;
    for (const auto& [code, v] : w) {
      out.per_country[code] += v;
      attributed += v;
      if (corpus.eu_members.count(code)) eu += v;
    }
    out.unattributed += 1.0 - attributed;
  }
  if (!corpus.eu_members.empty()) out.per_country[std::string(countries::kEu)] = eu;
  return out;
}

}  // namespace patscape
