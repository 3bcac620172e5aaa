#include "patscape/indices.hpp"

#include <algorithm>
#include <charconv>
#include <unordered_map>

#include "patscape/countries.hpp"
#include "patscape/csv.hpp"
#include "patscape/error.hpp"

namespace patscape {
namespace {

const WeightMap& holder_weights(const Patent& p, HolderKind kind) {
  switch (kind) {
    case HolderKind::parent_country: return p.parent_country;
    case HolderKind::firm: return p.firm;
    case HolderKind::country: break;
  }
  return p.country;
}

void require_linked(const LinkedCorpus& corpus) {
  if (!corpus.linked) throw DataError("corpus must be linked first");
}

}  // namespace

PortfolioVector portfolio_from_classes(const std::string& holder, const std::vector<WeightedClasses>& patents,
                                       std::size_t class_level) {
  if (class_level == 0) throw DataError("class level must be positive");
  PortfolioVector out;
  out.holder = holder;
  std::vector<std::string> truncated;
  for (const auto& p : patents) {
    if (p.weight <= 0.0 || !p.classes) continue;
    truncated.clear();
    for (const auto& c : *p.classes) {
      std::string t = c.substr(0, class_level);
      if (std::find(truncated.begin(), truncated.end(), t) == truncated.end()) truncated.push_back(std::move(t));
    }
    if (truncated.empty()) continue;
    const double part = p.weight / static_cast<double>(truncated.size());
    for (auto& t : truncated) out.shares[t] += part;
  }
  double total = 0.0;
  for (const auto& [k, v] : out.shares) total += v;
  if (total <= 0.0) throw DataError("empty portfolio for holder " + holder);
  for (auto& [k, v] : out.shares) v /= total;
  return out;
}

PortfolioVector portfolio_vector(const LinkedCorpus& corpus, const std::string& holder, HolderKind kind,
                                 std::size_t class_level) {
  require_linked(corpus);
  std::vector<WeightedClasses> held;
  for (const auto& p : corpus.patents) {
    const double w = kind == HolderKind::firm ? holder_weight(p.firm, holder, {})
                                              : holder_weight(holder_weights(p, kind), holder, corpus.eu_members);
    if (w > 0.0) held.push_back({&p.cpc_classes, w});
  }
  return portfolio_from_classes(holder, held, class_level);
}

double min_complement_proximity(const PortfolioVector& a, const PortfolioVector& b) {
  // Merge walk in key order; keys present on one side only contribute min = 0.
  double sum = 0.0;
  auto ia = a.shares.begin();
  auto ib = b.shares.begin();
  while (ia != a.shares.end() && ib != b.shares.end()) {
    if (ia->first < ib->first) {
      ++ia;
    } else if (ib->first < ia->first) {
      ++ib;
    } else {
      sum += std::min(ia->second, ib->second);
      ++ia;
      ++ib;
    }
  }
  return std::clamp(sum, 0.0, 1.0);
}

ProximityMatrix proximity_matrix(const LinkedCorpus& corpus, const std::vector<std::string>& holders,
                                 HolderKind kind, std::size_t class_level) {
  ProximityMatrix out;
  out.holders = holders;
  std::vector<PortfolioVector> vectors;
  vectors.reserve(holders.size());
  for (const auto& h : holders) vectors.push_back(portfolio_vector(corpus, h, kind, class_level));
  out.values.assign(holders.size(), std::vector<double>(holders.size(), 0.0));
  for (std::size_t i = 0; i < holders.size(); ++i)
    for (std::size_t j = i; j < holders.size(); ++j)
      out.values[i][j] = out.values[j][i] = min_complement_proximity(vectors[i], vectors[j]);
  return out;
}

double rca(const CountryPatentCounts& counts, const CountryPatentCounts& world) {
  if (counts.total_count <= 0.0) throw DataError("RCA: total_count of " + counts.holder + " is zero");
  if (world.total_count <= 0.0) throw DataError("RCA: world total_count is zero");
  if (world.ai_count <= 0.0) throw DataError("RCA: world ai_count is zero");
  if (counts.ai_count < 0.0) throw DataError("RCA: negative ai_count for " + counts.holder);
  return (counts.ai_count / counts.total_count) / (world.ai_count / world.total_count);
}

RcaTable rca_table(const LinkedCorpus& corpus, const std::map<std::string, double>& totals,
                   const RcaOptions& options) {
  const auto counts = country_patent_counts(corpus);
  RcaTable table;
  table.world.holder = "World";
  if (options.world_ai >= 0.0) {
    table.world.ai_count = options.world_ai;
  } else {
    table.world.ai_count = static_cast<double>(counts.total);
  }
  if (options.world_total >= 0.0) {
    table.world.total_count = options.world_total;
  } else {
    for (const auto& [code, n] : totals)
      if (code != countries::kEu) table.world.total_count += n;
  }

  std::vector<CountryPatentCounts> holders;
  for (const auto& [code, ai] : counts.per_country) {
    if (code == countries::kEu) continue;
    auto it = totals.find(code);
    if (it == totals.end()) {
      table.missing_totals.push_back(code);
      continue;
    }
    holders.push_back({code, ai, it->second});
  }

  if (options.rest_of_world_threshold > 0.0) {
    CountryPatentCounts row{"ROW", 0.0, 0.0};
    std::vector<CountryPatentCounts> kept;
    for (auto& h : holders) {
      if (h.ai_count / table.world.ai_count < options.rest_of_world_threshold) {
        row.ai_count += h.ai_count;
        row.total_count += h.total_count;
      } else {
        kept.push_back(h);
      }
    }
    if (row.total_count > 0.0) kept.push_back(row);
    holders = std::move(kept);
  }

  if (!corpus.eu_members.empty()) {
    CountryPatentCounts eu{std::string(countries::kEu), counts.per_country.at(std::string(countries::kEu)), 0.0};
    for (const auto& m : corpus.eu_members)
      if (auto it = totals.find(m); it != totals.end()) eu.total_count += it->second;
    if (eu.total_count > 0.0) holders.push_back(eu);
  }

  for (const auto& h : holders) {
    table.rows.push_back({h.holder, h.ai_count, h.total_count, h.ai_count / h.total_count, rca(h, table.world)});
  }
  std::sort(table.rows.begin(), table.rows.end(), [](const RcaRow& a, const RcaRow& b) {
    if (a.ai_count != b.ai_count) return a.ai_count > b.ai_count;
    return a.country < b.country;
  });
  return table;
}

SectorConcentration concentration_ratio(const std::map<std::string, double>& per_firm, int q) {
  if (per_firm.empty()) throw DataError("concentration ratio of an empty sector");
  if (q < 1) throw DataError("concentration ratio needs q >= 1");
  SectorConcentration out;
  out.per_firm = per_firm;
  out.q = q;

  std::vector<std::pair<std::string, double>> ranked(per_firm.begin(), per_firm.end());
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  for (const auto& [firm, n] : ranked) out.total += n;
  if (out.total <= 0.0) throw DataError("concentration ratio of a sector without patents");

  if (static_cast<std::size_t>(q) >= ranked.size()) {
    out.cr = 1.0;
    return out;
  }
  double top = 0.0;
  for (int i = 0; i < q; ++i) top += ranked[static_cast<std::size_t>(i)].second;
  out.cr = std::clamp(top / out.total, 0.0, 1.0);
  return out;
}

std::vector<SectorConcentration> sector_concentration(const LinkedCorpus& corpus, int q) {
  require_linked(corpus);
  std::unordered_map<std::string, std::string> nace;
  for (const auto& a : corpus.applicants)
    if (!a.nace.empty()) nace.emplace(a.applicant_id, a.nace);

  std::map<std::string, std::map<std::string, double>> sectors;
  for (const auto& p : corpus.patents) {
    for (const auto& [firm, w] : p.firm) {
      auto it = nace.find(firm);
      if (it != nace.end()) sectors[it->second][firm] += w;
    }
  }
  std::vector<SectorConcentration> out;
  for (const auto& [sector, firms] : sectors) {
    auto sc = concentration_ratio(firms, q);
    sc.sector = sector;
    out.push_back(std::move(sc));
  }
  return out;
}

double CitationMatrix::row_sum(std::size_t i) const {
  double s = 0.0;
  for (double v : counts.at(i)) s += v;
  return s;
}

double CitationMatrix::total() const {
  double s = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) s += row_sum(i);
  return s;
}

std::size_t CitationMatrix::index_of(const std::string& code) const {
  auto it = std::find(axis.begin(), axis.end(), code);
  if (it == axis.end()) throw DataError("country " + code + " is not on the matrix axis");
  return static_cast<std::size_t>(it - axis.begin());
}

CitationMatrix citation_matrix(const LinkedCorpus& corpus, const std::vector<std::string>& axis,
                               Grouping grouping) {
  require_linked(corpus);
  std::set<std::string> seen;
  bool has_eu = false;
  for (const auto& code : axis) {
    if (!seen.insert(code).second) throw DataError("duplicate axis code: " + code);
    if (code == countries::kEu) {
      if (corpus.eu_members.empty()) throw DataError("axis uses EU but no EU members are configured");
      has_eu = true;
    } else if (!countries::is_recognized(code)) {
      throw DataError("unknown axis code: " + code);
    }
  }
  if (has_eu) {
    for (const auto& code : axis)
      if (corpus.eu_members.count(code))
        throw DataError("axis lists both EU and its member " + code + "; citations would be counted twice");
  }

  CitationMatrix m;
  m.axis = axis;
  m.grouping = grouping;
  m.counts.assign(axis.size(), std::vector<double>(axis.size(), 0.0));
  std::vector<double> from(axis.size());
  std::vector<double> to(axis.size());
  for (const auto& e : corpus.citations) {
    const WeightMap& citing = grouping == Grouping::parent ? e.citing_parent_country : e.citing_country;
    const WeightMap& cited = grouping == Grouping::parent ? e.cited_parent_country : e.cited_country;
    for (std::size_t i = 0; i < axis.size(); ++i) {
      from[i] = holder_weight(citing, axis[i], corpus.eu_members);
      to[i] = holder_weight(cited, axis[i], corpus.eu_members);
    }
    for (std::size_t i = 0; i < axis.size(); ++i) {
      if (from[i] == 0.0) continue;
      for (std::size_t j = 0; j < axis.size(); ++j)
        if (to[j] != 0.0) m.counts[i][j] += from[i] * to[j];
    }
  }
  return m;
}

std::vector<std::string> default_citation_axis(const LinkedCorpus& corpus, Grouping grouping) {
  require_linked(corpus);
  std::set<std::string> codes;
  auto add = [&](const WeightMap& w) {
    for (const auto& [code, v] : w) {
      if (v <= 0.0) continue;
      codes.insert(corpus.eu_members.count(code) ? std::string(countries::kEu) : code);
    }
  };
  for (const auto& e : corpus.citations) {
    add(grouping == Grouping::parent ? e.citing_parent_country : e.citing_country);
    add(grouping == Grouping::parent ? e.cited_parent_country : e.cited_country);
  }
  return {codes.begin(), codes.end()};
}

double foreign_citation_share(const CitationMatrix& matrix, const std::string& country) {
  const std::size_t i = matrix.index_of(country);
  const double row = matrix.row_sum(i);
  if (row <= 0.0) throw DataError("no citations made by " + country);
  return 1.0 - matrix.counts[i][i] / row;
}

std::map<std::string, double> read_totals(const std::filesystem::path& path) {
  const std::string file = path.filename().string();
  const auto table = csv::read_file(path);
  csv::require_header(table, {"country", "total_count"}, file);
  std::map<std::string, double> totals;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& r = table.rows[i];
    const std::string at = file + " row " + std::to_string(i + 1);
    if (r.size() != 2) throw DataError(at + ": expected 2 fields");
    if (!countries::is_recognized(r[0])) throw DataError(at + ": unknown country code '" + r[0] + "'");
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(r[1].data(), r[1].data() + r[1].size(), v);
    if (r[1].empty() || ec != std::errc{} || ptr != r[1].data() + r[1].size() || v < 0.0)
      throw DataError(at + ": total_count must be a non-negative number");
    if (!totals.emplace(r[0], v).second) throw DataError(at + ": duplicate country " + r[0]);
  }
  return totals;
}

}  // namespace patscape
