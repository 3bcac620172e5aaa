#include "patscape/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <tuple>

#include "patscape/countries.hpp"
#include "patscape/csv.hpp"
#include "patscape/error.hpp"
#include "patscape/rng.hpp"

namespace patscape::synth {
namespace {

constexpr std::array<const char*, 40> kCountryPool = {
    "US", "CN", "JP", "KR", "DE", "FR", "GB", "IT", "NL", "SE", "CH", "IL", "ES", "AU",
    "FI", "BE", "AT", "DK", "SG", "NO", "IE", "PL", "BR", "RU", "CA", "IN", "TW", "MX",
    "PT", "CZ", "HU", "GR", "NZ", "ZA", "TR", "AR", "CL", "MY", "TH", "ID"};

constexpr std::array<const char*, 10> kClassPool = {"G06N", "G06F", "H04L", "G06K", "G06T",
                                                    "G10L", "B25J", "A61B", "G05B", "G08G"};

constexpr std::array<const char*, 6> kAuthorities = {"EP", "US", "CN", "JP", "KR", "WO"};

constexpr double kLogOffset = 1e-4;

std::string exact(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string pad(const char* prefix, long n, int width) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%s%0*ld", prefix, width, n);
  return buf;
}

Date month_date(Month m, int day = 15) { return Date{m.year(), m.month(), day}; }

// Regressor value as it enters the linear index; independent of the design builder.
double covariate(const std::string& name, const DyadObservation& o) {
  auto lg = [](double v) { return std::log(v + kLogOffset); };
  if (name == "const") return 1.0;
  if (name == "ln_distance") return lg(o.distance_km);
  if (name == "common_language") return o.common_language;
  if (name == "common_legal") return o.common_legal;
  if (name == "common_religion") return o.common_religion;
  if (name == "colonial") return o.colonial;
  if (name == "contiguous") return o.contiguous;
  if (name == "rta") return o.rta;
  if (name == "ln_gdp_i") return lg(o.gdp_i);
  if (name == "ln_gdp_j") return lg(o.gdp_j);
  if (name == "ln_gdp_pc_i") return lg(o.gdp_pc_i);
  if (name == "ln_gdp_pc_j") return lg(o.gdp_pc_j);
  if (name == "rd_share_i") return o.rd_share_i;
  if (name == "rd_share_j") return o.rd_share_j;
  if (name == "ln_ai_patents_i") return lg(o.ai_patents_i);
  if (name == "ln_ai_patents_j") return lg(o.ai_patents_j);
  if (name == "proximity") return o.proximity;
  if (name == "eu_i") return o.eu_i;
  if (name == "eu_j") return o.eu_j;
  if (name == "eu_ij") return o.eu_ij;
  throw DataError("unknown synthetic regressor " + name);
}

double index(const Coefficients& coef, const DyadObservation& o) {
  double eta = 0.0;
  for (const auto& [name, b] : coef) eta += b * covariate(name, o);
  return eta;
}

nlohmann::json coefficients_json(const Coefficients& c) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [k, v] : c) j[k] = v;
  return j;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  return out;
}

struct CountryDraw {
  double ln_gdp = 0.0, ln_gdp_pc = 0.0, rd = 0.0;
  std::vector<double> stock;  // per year
  std::vector<std::string> classes;  // one per family
};

}  // namespace

nlohmann::json to_json(const TruthRecord& t) {
  nlohmann::json j;
  j["seed"] = t.seed;
  j["beta_true"] = coefficients_json(t.beta_true);
  j["gamma_true"] = t.gamma_true ? coefficients_json(*t.gamma_true) : nlohmann::json(nullptr);
  j["delta_true"] = t.delta_true ? nlohmann::json(*t.delta_true) : nlohmann::json(nullptr);
  j["panel"] = {{"countries", t.countries}, {"years", t.years}};
  j["corpus"] = {{"firms", t.firms}, {"patents", t.patents}, {"classes", t.classes}};
  j["planted"] = t.planted;
  return j;
}

TruthRecord truth_from_json(const nlohmann::json& j) {
  TruthRecord t;
  t.seed = j.at("seed").get<std::uint64_t>();
  t.beta_true = j.at("beta_true").get<Coefficients>();
  if (!j.at("gamma_true").is_null()) t.gamma_true = j.at("gamma_true").get<Coefficients>();
  if (!j.at("delta_true").is_null()) t.delta_true = j.at("delta_true").get<double>();
  t.countries = j.at("panel").at("countries").get<int>();
  t.years = j.at("panel").at("years").get<int>();
  t.firms = j.at("corpus").at("firms").get<int>();
  t.patents = j.at("corpus").at("patents").get<int>();
  t.classes = j.at("corpus").at("classes").get<int>();
  t.planted = j.at("planted");
  return t;
}

Coefficients default_beta() {
  return {{"const", 0.5},           {"ln_distance", -0.6},    {"common_language", 0.5}, {"common_religion", 0.4},
          {"rta", 0.2},             {"ln_ai_patents_i", 0.7}, {"ln_ai_patents_j", 0.6}};
}

Coefficients default_gamma() {
  return {{"const", 2.6},     {"ln_distance", -0.3}, {"common_language", 0.6}, {"common_religion", 0.5},
          {"colonial", 0.4},  {"contiguous", 0.5},   {"rta", 0.3}};
}

PanelSpec heckman_spec(std::uint64_t seed, double delta) {
  PanelSpec spec;
  spec.seed = seed;
  spec.beta = default_beta();
  spec.beta["const"] = 3.5;
  spec.selection = Selection{default_gamma(), delta};
  return spec;
}

SyntheticPanel gen_panel(const PanelSpec& spec) {
  if (spec.n_countries < 3) throw DataError("gen_panel needs at least 3 countries");
  if (spec.n_years < 2) throw DataError("gen_panel needs at least 2 years");
  if (spec.n_countries > static_cast<int>(kCountryPool.size()))
    throw DataError("gen_panel supports at most " + std::to_string(kCountryPool.size()) + " countries");
  if (spec.families_per_country < 1) throw DataError("gen_panel needs at least one family per country");
  const Coefficients beta = spec.beta.empty() ? default_beta() : spec.beta;
  for (const auto& [name, b] : beta) covariate(name, DyadObservation{});
  if (spec.selection)
    for (const auto& [name, g] : spec.selection->gamma) covariate(name, DyadObservation{});

  const Rng root(spec.seed);
  const auto n = static_cast<std::size_t>(spec.n_countries);
  const auto years = static_cast<std::size_t>(spec.n_years);
  std::vector<std::string> codes(kCountryPool.begin(), kCountryPool.begin() + spec.n_countries);
  const auto& eu = countries::eu27();

  // Country-level draws.
  Rng crng = root.split("country");
  std::vector<CountryDraw> draws(n);
  for (auto& d : draws) {
    d.ln_gdp = crng.normal(26.0, 1.5);
    d.ln_gdp_pc = crng.normal(10.0, 0.7);
    d.rd = crng.uniform(0.5, 4.0);
    const double base = crng.lognormal(5.0, 1.0);
    double stock = base;
    for (std::size_t t = 0; t < years; ++t) {
      if (t) stock += crng.lognormal(std::log(0.2 * base), 0.3);
      d.stock.push_back(stock);
    }
    std::vector<double> weight;
    for (std::size_t k = 0; k < 6; ++k) weight.push_back(crng.uniform(0.1, 1.0));
    double total = 0.0;
    for (double w : weight) total += w;
    for (int f = 0; f < spec.families_per_country; ++f) {
      double u = crng.uniform() * total;
      std::size_t k = 0;
      while (k + 1 < weight.size() && u >= weight[k]) u -= weight[k++];
      d.classes.emplace_back(kClassPool[k]);
    }
  }
  auto shares = [&](std::size_t c) {
    std::map<std::string, double> s;
    for (const auto& cls : draws[c].classes) s[cls] += 1.0;
    for (auto& [cls, v] : s) v /= static_cast<double>(spec.families_per_country);
    return s;
  };
  std::vector<std::vector<double>> proximity(n, std::vector<double>(n, 0.0));
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) {
      const auto sa = shares(a), sb = shares(b);
      double s = 0.0;
      for (const auto& [cls, v] : sa)
        if (auto it = sb.find(cls); it != sb.end()) s += std::min(v, it->second);
      proximity[a][b] = s;
    }

  // Symmetric dyad attributes, drawn over unordered pairs in pool order.
  struct Pair {
    double distance, religion;
    int language, legal, colonial, contiguous, rta;
  };
  Rng drng = root.split("dyad");
  std::vector<std::vector<Pair>> pair(n, std::vector<Pair>(n));
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b) {
      Pair p;
      p.distance = drng.uniform(100.0, 15000.0);
      p.language = drng.bernoulli(0.15);
      p.legal = drng.bernoulli(0.3);
      const double r = drng.uniform();
      p.religion = r * r;
      p.colonial = drng.bernoulli(0.1);
      p.contiguous = drng.bernoulli(0.1);
      p.rta = drng.bernoulli(0.3);
      pair[a][b] = pair[b][a] = p;
    }

  Rng yrng = root.split("year");
  std::vector<double> year_effect(years, 0.0);
  for (std::size_t t = 1; t < years; ++t) year_effect[t] = yrng.normal(0.0, spec.year_effect_sd);

  SyntheticPanel out;
  for (std::size_t c = 0; c < n; ++c)
    for (std::size_t t = 0; t < years; ++t) {
      MacroRow m;
      m.country = codes[c];
      m.year = spec.first_year + static_cast<int>(t);
      m.gdp = std::exp(draws[c].ln_gdp + 0.02 * static_cast<double>(t));
      m.gdp_pc = std::exp(draws[c].ln_gdp_pc + 0.015 * static_cast<double>(t));
      m.rd_share = draws[c].rd;
      m.ai_patent_stock = draws[c].stock[t];
      out.macro.push_back(m);
    }

  // Origin and destination shifts of the link equation.
  std::vector<double> link_origin(n, 0.0), link_dest(n, 0.0);
  if (spec.selection) {
    Rng lrng = root.split("link");
    for (std::size_t c = 0; c < n; ++c) {
      link_origin[c] = lrng.normal(0.0, spec.selection->country_effect_sd);
      link_dest[c] = lrng.normal(0.0, spec.selection->country_effect_sd);
    }
  }

  Rng frng = root.split("flow");
  std::size_t links = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const Pair& p = pair[i][j];
      for (std::size_t t = 0; t < years; ++t) {
        const int year = spec.first_year + static_cast<int>(t);
        BilateralRow b;
        b.origin = codes[i];
        b.dest = codes[j];
        b.year = year;
        b.distance_km = p.distance;
        b.common_language = p.language;
        b.common_legal = p.legal;
        b.common_religion = p.religion;
        b.colonial = p.colonial;
        b.contiguous = p.contiguous;
        b.rta = p.rta;
        b.eu_pair = eu.count(codes[i]) && eu.count(codes[j]);
        out.bilateral.push_back(b);

        const MacroRow& mi = out.macro[i * years + t];
        const MacroRow& mj = out.macro[j * years + t];
        DyadObservation o;
        o.origin = b.origin;
        o.dest = b.dest;
        o.year = year;
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
        o.gdp_i = mi.gdp;
        o.gdp_j = mj.gdp;
        o.gdp_pc_i = mi.gdp_pc;
        o.gdp_pc_j = mj.gdp_pc;
        o.rd_share_i = mi.rd_share;
        o.rd_share_j = mj.rd_share;
        o.ai_patents_i = *mi.ai_patent_stock;
        o.ai_patents_j = *mj.ai_patent_stock;
        o.proximity = proximity[i][j];

        double eta = index(beta, o) + year_effect[t];
        bool link = true;
        if (spec.selection) {
          const double u = frng.normal();
          link = index(spec.selection->gamma, o) + link_origin[i] + link_dest[j] + u > 0.0;
          eta += spec.selection->delta * u;
        }
        o.citations = link ? static_cast<double>(frng.poisson(std::exp(eta))) : 0.0;
        links += link;
        out.linked.push_back(link);
        out.rows.push_back(std::move(o));
      }
    }

  // Corpus that reproduces the flows through citation records.
  for (std::size_t c = 0; c < n; ++c) {
    ApplicantRecord a;
    a.applicant_id = "A_" + codes[c];
    a.name = "Synthetic applicant " + codes[c];
    a.country = codes[c];
    a.nace = "62";
    a.incorporation_year = 2000;
    out.applicants.push_back(a);
    for (int f = 0; f < spec.families_per_country; ++f) {
      PatentRecord p;
      p.patent_id = "P_" + codes[c] + "_" + std::to_string(f);
      p.family_id = "F_" + codes[c] + "_" + std::to_string(f);
      p.authority = "EP";
      p.earliest_pub_date = Date{spec.first_year - 2, 6, 1};
      p.grant_date = Date{spec.first_year - 1, 3, 1};
      p.cpc_classes = {draws[c].classes[static_cast<std::size_t>(f)]};
      p.applicant_id = a.applicant_id;
      out.patents.push_back(std::move(p));
    }
    out.totals[codes[c]] = static_cast<double>(spec.families_per_country) * crng.uniform_int(5, 50);
  }
  Rng citer = root.split("cite");
  long serial = 0;
  for (const auto& o : out.rows) {
    if (!spec.with_citations) break;
    const auto count = static_cast<long>(o.citations);
    for (long k = 0; k < count; ++k) {
      CitationRecord r;
      r.citing_family = pad("X", ++serial, 8);
      r.cited_family = "F_" + o.dest + "_" + std::to_string(citer.uniform_int(0, spec.families_per_country - 1));
      r.citing_applicant_id = "A_" + o.origin;
      r.citation_date = Date{o.year, 6, 15};
      out.citations.push_back(std::move(r));
    }
  }

  auto& t = out.truth;
  t.seed = spec.seed;
  t.beta_true = beta;
  if (spec.selection) {
    t.gamma_true = spec.selection->gamma;
    t.delta_true = spec.selection->delta;
  }
  t.countries = spec.n_countries;
  t.years = spec.n_years;
  nlohmann::json ye = nlohmann::json::object();
  for (std::size_t k = 0; k < years; ++k) ye[std::to_string(spec.first_year + static_cast<int>(k))] = year_effect[k];
  nlohmann::json le = nlohmann::json::object();
  if (spec.selection)
    for (std::size_t c = 0; c < n; ++c) le[codes[c]] = {link_origin[c], link_dest[c]};
  t.planted = {{"year_effects", ye},
               {"link_country_effects", le},
               {"rows", out.rows.size()},
               {"link_share", static_cast<double>(links) / static_cast<double>(out.rows.size())},
               {"first_year", spec.first_year},
               {"families_per_country", spec.families_per_country}};

  std::sort(out.rows.begin(), out.rows.end(), [](const DyadObservation& a, const DyadObservation& b) {
    return std::tie(a.origin, a.dest, a.year) < std::tie(b.origin, b.dest, b.year);
  });
  // linked follows generation order; re-sort it alongside via the row keys.
  {
    std::map<std::tuple<std::string, std::string, int>, int> gate;
    for (std::size_t k = 0; k < out.bilateral.size(); ++k)
      gate[{out.bilateral[k].origin, out.bilateral[k].dest, out.bilateral[k].year}] = out.linked[k];
    for (std::size_t k = 0; k < out.rows.size(); ++k)
      out.linked[k] = gate[{out.rows[k].origin, out.rows[k].dest, out.rows[k].year}];
  }
  return out;
}

SyntheticCorpus gen_corpus(const CorpusSpec& spec) {
  if (spec.n_firms < 1 || spec.n_patents < 1 || spec.n_classes < 1)
    throw DataError("gen_corpus dimensions must be at least 1");
  if (!(spec.uncited_share >= 0.0 && spec.uncited_share <= 1.0)) throw DataError("uncited share must lie in [0,1]");

  const Rng root(spec.seed);
  SyntheticCorpus out;
  const int m = std::min(spec.n_firms, 10);
  std::vector<std::string> classes;
  for (int k = 0; k < spec.n_classes; ++k)
    classes.push_back(k < static_cast<int>(kClassPool.size()) ? std::string(kClassPool[static_cast<std::size_t>(k)])
                                                              : pad("Y", k, 3));

  Rng frng = root.split("firms");
  static constexpr std::array<const char*, 3> kSectors = {"26", "62", "72"};
  for (int i = 1; i <= spec.n_firms; ++i) {
    ApplicantRecord a;
    a.applicant_id = pad("F", i, 4);
    a.name = "Synthetic firm " + std::to_string(i);
    a.country = kCountryPool[static_cast<std::size_t>((i - 1) % m)];
    a.nace = kSectors[static_cast<std::size_t>(frng.uniform_int(0, 2))];
    a.incorporation_year = frng.uniform_int(1950, 2015);
    if (i % 5 == 0) {
      a.parent_id = "GROUP1";
      a.parent_country = "US";
    }
    out.applicants.push_back(a);
  }
  auto planted_firm = [&](const char* id, const char* country, const char* nace) {
    ApplicantRecord a;
    a.applicant_id = id;
    a.name = std::string("Planted ") + id;
    a.country = country;
    a.nace = nace;
    a.incorporation_year = 2005;
    out.applicants.push_back(a);
  };
  planted_firm("F_IS", "IS", "62");
  planted_firm("F_MT", "MT", "62");
  planted_firm("F_MONO", "FI", "99");

  Rng prng = root.split("patents");
  const Month first = Month::of(2010, 1), last = Month::of(2018, 12);
  long serial = 0;
  auto add_patent = [&](const std::string& firm, std::vector<std::string> cls) {
    ++serial;
    PatentRecord p;
    p.patent_id = pad("P", serial, 6);
    p.family_id = pad("FAM", serial, 6);
    p.authority = kAuthorities[static_cast<std::size_t>(prng.uniform_int(0, static_cast<int>(kAuthorities.size()) - 1))];
    const Month pub{prng.uniform_int(first.ordinal, last.ordinal)};
    p.earliest_pub_date = month_date(pub);
    p.grant_date = month_date(Month{pub.ordinal + prng.uniform_int(12, 36)});
    std::sort(cls.begin(), cls.end());
    cls.erase(std::unique(cls.begin(), cls.end()), cls.end());
    p.cpc_classes = std::move(cls);
    p.applicant_id = firm;
    out.patents.push_back(std::move(p));
  };
  for (int k = 0; k < spec.n_patents; ++k) {
    const std::string firm = out.applicants[static_cast<std::size_t>(prng.uniform_int(0, spec.n_firms - 1))].applicant_id;
    const int nc = prng.uniform_int(1, std::min(3, spec.n_classes));
    std::vector<std::string> cls;
    for (int c = 0; c < nc; ++c) cls.push_back(classes[static_cast<std::size_t>(prng.uniform_int(0, spec.n_classes - 1))]);
    add_patent(firm, std::move(cls));
  }
  const std::array<std::pair<const char*, int>, 3> is_mix = {{{"G06N", 5}, {"G06F", 3}, {"H04L", 2}}};
  const std::array<std::pair<const char*, int>, 3> mt_mix = {{{"G06N", 2}, {"G06F", 3}, {"H04L", 5}}};
  for (const auto& [cls, count] : is_mix)
    for (int k = 0; k < count; ++k) add_patent("F_IS", {cls});
  for (const auto& [cls, count] : mt_mix)
    for (int k = 0; k < count; ++k) add_patent("F_MT", {cls});
  for (int k = 0; k < 7; ++k) add_patent("F_MONO", {"G06N"});

  // Exactly round(share * families) families stay uncited; the rest are first
  // cited 1-59 months after publication, so every event precedes the window end.
  Rng crng = root.split("citations");
  const std::size_t families = out.patents.size();
  std::vector<std::size_t> order(families);
  for (std::size_t k = 0; k < families; ++k) order[k] = k;
  for (std::size_t k = families; k > 1; --k)
    std::swap(order[k - 1], order[static_cast<std::size_t>(crng.uniform_int(0, static_cast<int>(k) - 1))]);
  const auto uncited = static_cast<std::size_t>(std::llround(spec.uncited_share * static_cast<double>(families)));
  std::vector<bool> cited(families, true);
  for (std::size_t k = 0; k < uncited; ++k) cited[order[k]] = false;

  const Month window_end = *parse_month(kWindowEnd);
  long citing = 0;
  for (std::size_t k = 0; k < families; ++k) {
    if (!cited[k]) continue;
    const auto& p = out.patents[k];
    const Month pub = Month::of(p.earliest_pub_date);
    int lag = crng.uniform_int(1, 59);
    const auto extra = crng.poisson(1.0);
    for (std::uint64_t e = 0; e <= extra; ++e) {
      if (e) lag = std::min(lag + crng.uniform_int(0, 24), months_between(pub, window_end));
      CitationRecord r;
      r.citing_family = pad("CIT", ++citing, 7);
      r.cited_family = p.family_id;
      r.citing_applicant_id = out.applicants[static_cast<std::size_t>(crng.uniform_int(0, spec.n_firms - 1))].applicant_id;
      r.citation_date = month_date(Month{pub.ordinal + lag});
      out.citations.push_back(std::move(r));
    }
  }

  std::map<std::string, double> counts;
  std::map<std::string, std::string> firm_country;
  for (const auto& a : out.applicants) firm_country[a.applicant_id] = a.country;
  for (const auto& p : out.patents) counts[firm_country[p.applicant_id]] += 1.0;
  Rng trng = root.split("totals");
  for (const auto& [c, n] : counts) out.totals[c] = n * static_cast<double>(1 + trng.uniform_int(4, 40));

  auto& t = out.truth;
  t.seed = spec.seed;
  t.firms = spec.n_firms;
  t.patents = spec.n_patents;
  t.classes = spec.n_classes;
  nlohmann::json cc = nlohmann::json::object(), tot = nlohmann::json::object();
  for (const auto& [c, n] : counts) cc[c] = n;
  for (const auto& [c, n] : out.totals) tot[c] = n;
  t.planted = {
      {"country_counts", cc},
      {"totals", tot},
      {"proximity", {{"pair", {"IS", "MT"}}, {"shares", {{"G06N", {0.5, 0.2}}, {"G06F", {0.3, 0.3}}, {"H04L", {0.2, 0.5}}}}, {"value", 0.7}}},
      {"monopoly", {{"sector", "99"}, {"firm", "F_MONO"}, {"cr5", 1.0}}},
      {"uncited", {{"families", uncited}, {"total", families},
                   {"share", static_cast<double>(uncited) / static_cast<double>(families)}}},
      {"window_end", kWindowEnd},
  };
  return out;
}

// ---- writers ---------------------------------------------------------------

void write_patents(const std::filesystem::path& path, const std::vector<PatentRecord>& rows) {
  auto out = open_out(path);
  csv::write_row(out, kPatentHeader);
  for (const auto& p : rows) {
    std::string cls;
    for (const auto& c : p.cpc_classes) cls += (cls.empty() ? "" : "|") + c;
    csv::write_row(out, {p.patent_id, p.family_id, p.authority, to_string(p.grant_date), to_string(p.earliest_pub_date),
                         cls, p.applicant_id});
  }
}

void write_applicants(const std::filesystem::path& path, const std::vector<ApplicantRecord>& rows) {
  auto out = open_out(path);
  csv::write_row(out, kApplicantHeader);
  for (const auto& a : rows)
    csv::write_row(out, {a.applicant_id, a.name, a.country, a.nace,
                         a.incorporation_year ? std::to_string(*a.incorporation_year) : "", a.parent_id,
                         a.parent_country});
}

void write_citations(const std::filesystem::path& path, const std::vector<CitationRecord>& rows) {
  auto out = open_out(path);
  csv::write_row(out, kCitationHeader);
  for (const auto& c : rows)
    csv::write_row(out, {c.citing_family, c.cited_family, c.citing_applicant_id,
                         c.citation_date ? to_string(*c.citation_date) : ""});
}

void write_bilateral(const std::filesystem::path& path, const std::vector<BilateralRow>& rows) {
  auto out = open_out(path);
  csv::write_row(out, kBilateralHeader);
  for (const auto& b : rows)
    csv::write_row(out, {b.origin, b.dest, std::to_string(b.year), exact(b.distance_km),
                         std::to_string(b.common_language), std::to_string(b.common_legal), exact(b.common_religion),
                         std::to_string(b.colonial), std::to_string(b.contiguous), std::to_string(b.rta),
                         std::to_string(b.eu_pair)});
}

void write_macro(const std::filesystem::path& path, const std::vector<MacroRow>& rows) {
  auto out = open_out(path);
  csv::write_row(out, kMacroHeader);
  for (const auto& m : rows)
    csv::write_row(out, {m.country, std::to_string(m.year), exact(m.gdp), exact(m.gdp_pc), exact(m.rd_share),
                         m.ai_patent_stock ? exact(*m.ai_patent_stock) : ""});
}

void write_totals(const std::filesystem::path& path, const std::map<std::string, double>& totals) {
  auto out = open_out(path);
  csv::write_row(out, {"country", "total_count"});
  for (const auto& [c, n] : totals) csv::write_row(out, {c, exact(n)});
}

void write_truth(const std::filesystem::path& path, const TruthRecord& truth) {
  auto out = open_out(path);
  out << to_json(truth).dump(2) << '\n';
}

std::vector<std::filesystem::path> write_dataset(const std::filesystem::path& dir, const SyntheticCorpus& corpus) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> paths = {dir / "patents.csv", dir / "applicants.csv", dir / "citations.csv",
                                              dir / "totals.csv", dir / "truth.json"};
  write_patents(paths[0], corpus.patents);
  write_applicants(paths[1], corpus.applicants);
  write_citations(paths[2], corpus.citations);
  write_totals(paths[3], corpus.totals);
  write_truth(paths[4], corpus.truth);
  return paths;
}

std::vector<std::filesystem::path> write_dataset(const std::filesystem::path& dir, const SyntheticPanel& panel) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> paths = {dir / "patents.csv",   dir / "applicants.csv", dir / "citations.csv",
                                              dir / "totals.csv",    dir / "bilateral.csv",  dir / "macro.csv",
                                              dir / "truth.json"};
  write_patents(paths[0], panel.patents);
  write_applicants(paths[1], panel.applicants);
  write_citations(paths[2], panel.citations);
  write_totals(paths[3], panel.totals);
  write_bilateral(paths[4], panel.bilateral);
  write_macro(paths[5], panel.macro);
  write_truth(paths[6], panel.truth);
  return paths;
}

}  // namespace patscape::synth
