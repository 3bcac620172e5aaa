#include <algorithm>
#include <charconv>
#include <map>
#include <set>
#include <tuple>

#include "patscape/countries.hpp"
#include "patscape/csv.hpp"
#include "patscape/error.hpp"
#include "patscape/gravity.hpp"
#include "patscape/indices.hpp"

namespace patscape {
namespace {

double parse_double(const std::string& s, const std::string& what) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) throw DataError(what + ": not a number '" + s + "'");
  return v;
}

int parse_int(const std::string& s, const std::string& what) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) throw DataError(what + ": not an integer '" + s + "'");
  return v;
}

int parse_flag(const std::string& s, const std::string& what) {
  const int v = parse_int(s, what);
  if (v != 0 && v != 1) throw DataError(what + ": flag must be 0 or 1, got " + s);
  return v;
}

using CountryYear = std::pair<std::string, int>;

}  // namespace

std::vector<BilateralRow> read_bilateral(const std::filesystem::path& path) {
  const std::string file = path.filename().string();
  auto table = csv::read_file(path);
  csv::require_header(table, kBilateralHeader, file);
  std::vector<BilateralRow> out;
  out.reserve(table.rows.size());
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& r = table.rows[i];
    const std::string at = file + " row " + std::to_string(i + 1);
    if (r.size() != kBilateralHeader.size()) throw DataError(at + ": expected 11 fields");
    BilateralRow b;
    b.origin = r[0];
    b.dest = r[1];
    b.year = parse_int(r[2], at + " year");
    b.distance_km = parse_double(r[3], at + " distance_km");
    b.common_language = parse_flag(r[4], at + " common_language");
    b.common_legal = parse_flag(r[5], at + " common_legal");
    b.common_religion = parse_double(r[6], at + " common_religion");
    b.colonial = parse_flag(r[7], at + " colonial");
    b.contiguous = parse_flag(r[8], at + " contiguous");
    b.rta = parse_flag(r[9], at + " rta");
    b.eu_pair = parse_flag(r[10], at + " eu_pair");
    if (b.common_religion < 0.0 || b.common_religion > 1.0) throw DataError(at + ": common_religion outside [0,1]");
    out.push_back(std::move(b));
  }
  return out;
}

std::vector<MacroRow> read_macro(const std::filesystem::path& path) {
  const std::string file = path.filename().string();
  auto table = csv::read_file(path);
  csv::require_header(table, kMacroHeader, file);
  std::vector<MacroRow> out;
  out.reserve(table.rows.size());
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& r = table.rows[i];
    const std::string at = file + " row " + std::to_string(i + 1);
    if (r.size() != kMacroHeader.size()) throw DataError(at + ": expected 6 fields");
    MacroRow m;
    m.country = r[0];
    m.year = parse_int(r[1], at + " year");
    m.gdp = parse_double(r[2], at + " gdp");
    m.gdp_pc = parse_double(r[3], at + " gdp_pc");
    m.rd_share = parse_double(r[4], at + " rd_share");
    if (!r[5].empty()) m.ai_patent_stock = parse_double(r[5], at + " ai_patent_stock");
    out.push_back(std::move(m));
  }
  return out;
}

Panel build_panel(const LinkedCorpus& corpus, const std::vector<BilateralRow>& bilateral,
                  const std::vector<MacroRow>& macro, const PanelOptions& options) {
  if (!corpus.linked) throw DataError("corpus must be linked before building the panel");

  std::set<std::string> unknown;
  for (const auto& b : bilateral) {
    if (!countries::is_recognized(b.origin)) unknown.insert(b.origin);
    if (!countries::is_recognized(b.dest)) unknown.insert(b.dest);
  }
  for (const auto& m : macro)
    if (!countries::is_recognized(m.country)) unknown.insert(m.country);
  if (!unknown.empty()) {
    std::string codes;
    for (const auto& c : unknown) codes += (codes.empty() ? "" : ", ") + c;
    throw DataError("covariate files use country codes outside the registry: " + codes);
  }

  std::map<CountryYear, const MacroRow*> macro_index;
  for (const auto& m : macro) {
    if (!macro_index.emplace(CountryYear{m.country, m.year}, &m).second)
      throw DataError("duplicate macro row for " + m.country + " " + std::to_string(m.year));
  }

  // Dated family-level citation mass per directed country pair and year.
  std::map<std::tuple<std::string, std::string, int>, double> flows;
  Panel panel;
  for (const auto& e : corpus.citations) {
    if (!e.citation_date) {
      ++panel.undated_citations;
      continue;
    }
    for (const auto& [ci, wi] : e.citing_country)
      for (const auto& [cj, wj] : e.cited_country)
        if (ci != cj) flows[{ci, cj, e.citation_date->year}] += wi * wj;
  }

  // Country-year AI patent counts by grant year, for stocks and yearly portfolios.
  std::map<CountryYear, double> granted;
  for (const auto& p : corpus.patents)
    for (const auto& [c, w] : p.country) granted[{c, p.grant_date.year}] += w;
  auto corpus_stock = [&](const std::string& country, int year) {
    double s = 0.0;
    for (auto it = granted.lower_bound({country, 0}); it != granted.end() && it->first.first == country; ++it) {
      if (options.stock == StockMode::cumulative ? it->first.second <= year : it->first.second == year) s += it->second;
    }
    return s;
  };

  std::map<CountryYear, std::optional<PortfolioVector>> portfolios;
  auto portfolio = [&](const std::string& country, int year) -> const std::optional<PortfolioVector>& {
    const CountryYear key{country, options.yearly_proximity ? year : 0};
    auto it = portfolios.find(key);
    if (it != portfolios.end()) return it->second;
    std::vector<WeightedClasses> held;
    for (const auto& p : corpus.patents) {
      if (options.yearly_proximity && p.grant_date.year > year) continue;
      auto w = p.country.find(country);
      if (w != p.country.end() && w->second > 0.0) held.push_back({&p.cpc_classes, w->second});
    }
    std::optional<PortfolioVector> v;
    bool has_classes = false;
    for (const auto& h : held) has_classes = has_classes || !h.classes->empty();
    if (has_classes) v = portfolio_from_classes(country, held, options.class_level);
    else panel.warnings.push_back("no AI portfolio for " + country + "; proximity set to 0");
    return portfolios.emplace(key, std::move(v)).first->second;
  };

  const auto& eu = corpus.eu_members.empty() ? countries::eu27() : corpus.eu_members;
  std::set<std::tuple<std::string, std::string, int>> used;
  for (const auto& b : bilateral) {
    if (b.origin == b.dest) continue;
    const auto key = std::make_tuple(b.origin, b.dest, b.year);
    if (!used.insert(key).second)
      throw DataError("duplicate bilateral row " + b.origin + "->" + b.dest + " " + std::to_string(b.year));
    auto mi = macro_index.find({b.origin, b.year});
    auto mj = macro_index.find({b.dest, b.year});
    if (mi == macro_index.end() || mj == macro_index.end()) {
      ++panel.dropped_rows;
      continue;
    }
    DyadObservation o;
    o.origin = b.origin;
    o.dest = b.dest;
    o.year = b.year;
    if (auto f = flows.find(key); f != flows.end()) {
      o.citations = f->second;
      flows.erase(f);
    }
    o.distance_km = b.distance_km;
    o.common_language = b.common_language;
    o.common_legal = b.common_legal;
    o.common_religion = b.common_religion;
    o.colonial = b.colonial;
    o.contiguous = b.contiguous;
    o.rta = b.rta;
    o.eu_i = eu.count(b.origin) ? 1 : 0;
    o.eu_j = eu.count(b.dest) ? 1 : 0;
    o.eu_ij = b.eu_pair;
    o.gdp_i = mi->second->gdp;
    o.gdp_j = mj->second->gdp;
    o.gdp_pc_i = mi->second->gdp_pc;
    o.gdp_pc_j = mj->second->gdp_pc;
    o.rd_share_i = mi->second->rd_share;
    o.rd_share_j = mj->second->rd_share;
    o.ai_patents_i = mi->second->ai_patent_stock.value_or(corpus_stock(b.origin, b.year));
    o.ai_patents_j = mj->second->ai_patent_stock.value_or(corpus_stock(b.dest, b.year));
    const auto& pi = portfolio(b.origin, b.year);
    const auto& pj = portfolio(b.dest, b.year);
    o.proximity = pi && pj ? min_complement_proximity(*pi, *pj) : 0.0;
    panel.rows.push_back(std::move(o));
  }
  for (const auto& [key, mass] : flows) panel.dropped_citations += mass;

  std::sort(panel.rows.begin(), panel.rows.end(), [](const DyadObservation& a, const DyadObservation& b) {
    return std::tie(a.origin, a.dest, a.year) < std::tie(b.origin, b.dest, b.year);
  });
  return panel;
}

Panel build_panel(const LinkedCorpus& corpus, const std::filesystem::path& bilateral_path,
                  const std::filesystem::path& macro_path, const PanelOptions& options) {
  return build_panel(corpus, read_bilateral(bilateral_path), read_macro(macro_path), options);
}

}  // namespace patscape
