#include <doctest.h>

#include <cmath>

#include "patscape/error.hpp"
#include "patscape/indices.hpp"
#include "patscape/rng.hpp"
#include "patscape/survival.hpp"
#include "patscape/synth.hpp"
#include "support.hpp"

using namespace patscape;
using testing::TempDir;

namespace {

LinkedCorpus link_synthetic(const std::vector<PatentRecord>& patents, const std::vector<ApplicantRecord>& applicants,
                            const std::vector<CitationRecord>& citations) {
  LinkedCorpus c;
  c.patent_rows = patents;
  c.applicants = applicants;
  c.citation_rows = citations;
  return link_records(std::move(c));
}

std::map<std::string, std::string> directory_bytes(const std::filesystem::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& entry : std::filesystem::directory_iterator(dir))
    out[entry.path().filename().string()] = testing::read_text(entry.path());
  return out;
}

}  // namespace

TEST_CASE("random streams are reproducible and labelled") {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.next() == b.next());
  const Rng root(7);
  auto x = root.split("x"), x2 = root.split("x"), y = root.split("y");
  CHECK(x.next() == x2.next());
  CHECK(x.next() != y.next());

  Rng r(1);
  double sum = 0.0, sq = 0.0, pois_small = 0.0, pois_large = 0.0;
  std::set<int> seen;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = r.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    const int k = r.uniform_int(-2, 3);
    REQUIRE(k >= -2);
    REQUIRE(k <= 3);
    seen.insert(k);
    const double z = r.normal();
    sum += z;
    sq += z * z;
    pois_small += static_cast<double>(r.poisson(2.5));
    pois_large += static_cast<double>(r.poisson(250.0));
  }
  CHECK(seen.size() == 6);
  CHECK(std::abs(sum / n) < 4.0 / std::sqrt(n));
  CHECK(std::abs(sq / n - 1.0) < 0.02);
  CHECK(std::abs(pois_small / n - 2.5) < 4.0 * std::sqrt(2.5 / n));
  CHECK(std::abs(pois_large / n - 250.0) < 4.0 * std::sqrt(250.0 / n));
  CHECK(r.poisson(0.0) == 0);
}

TEST_CASE("dataset generation is byte-identical for a seed") {
  TempDir a, b, c;
  synth::PanelSpec spec;
  spec.seed = 42;
  synth::write_dataset(a.path(), synth::gen_panel(spec));
  synth::write_dataset(b.path(), synth::gen_panel(spec));
  spec.seed = 43;
  synth::write_dataset(c.path(), synth::gen_panel(spec));
  const auto first = directory_bytes(a.path());
  CHECK(first.size() == 7);
  CHECK(first == directory_bytes(b.path()));
  CHECK(first.at("bilateral.csv") != directory_bytes(c.path()).at("bilateral.csv"));

  TempDir d, e;
  synth::write_dataset(d.path(), synth::gen_corpus({}));
  synth::write_dataset(e.path(), synth::gen_corpus({}));
  CHECK(directory_bytes(d.path()) == directory_bytes(e.path()));
}

TEST_CASE("truth record round-trips through JSON") {
  const auto panel = synth::gen_panel(synth::heckman_spec(5, 0.25));
  const auto j = synth::to_json(panel.truth);
  const auto back = synth::truth_from_json(nlohmann::json::parse(j.dump()));
  CHECK(back.seed == 5);
  CHECK(back.beta_true == panel.truth.beta_true);
  REQUIRE(back.gamma_true.has_value());
  CHECK(*back.gamma_true == synth::default_gamma());
  CHECK(back.delta_true == 0.25);
  CHECK(back.countries == 20);
  CHECK(back.years == 5);
}

TEST_CASE("panel dimensions and errors") {
  synth::PanelSpec spec;
  spec.n_countries = 4;
  spec.n_years = 3;
  const auto p = synth::gen_panel(spec);
  CHECK(p.rows.size() == 4 * 3 * 3);
  CHECK(p.macro.size() == 4 * 3);
  for (const auto& o : p.rows) CHECK(o.origin != o.dest);
  spec.n_countries = 2;
  CHECK_THROWS_AS(synth::gen_panel(spec), DataError);
  spec.n_countries = 3;
  spec.n_years = 1;
  CHECK_THROWS_AS(synth::gen_panel(spec), DataError);
  spec.n_years = 2;
  spec.beta = {{"not_a_regressor", 1.0}};
  CHECK_THROWS_AS(synth::gen_panel(spec), DataError);
  CHECK_THROWS_AS(synth::gen_corpus({1, 0, 10, 3, 0.3}), DataError);
  CHECK_THROWS_AS(synth::gen_corpus({1, 5, 0, 3, 0.3}), DataError);
  CHECK_THROWS_AS(synth::gen_corpus({1, 5, 10, 0, 0.3}), DataError);
  CHECK_NOTHROW(synth::gen_corpus({1, 20, 5, 3, 0.3}));
}

TEST_CASE("intercept-only panel has Poisson mean e^c") {
  synth::PanelSpec spec;
  spec.seed = 9;
  spec.beta = {{"const", 1.0}};
  spec.year_effect_sd = 0.0;
  const auto p = synth::gen_panel(spec);
  double sum = 0.0;
  for (const auto& o : p.rows) sum += o.citations;
  const double n = static_cast<double>(p.rows.size());
  CHECK(std::abs(sum / n - std::exp(1.0)) <= 3.0 * std::sqrt(std::exp(1.0)) / std::sqrt(n));
}

TEST_CASE("selection gate") {
  synth::PanelSpec spec;
  spec.seed = 4;
  spec.selection = synth::Selection{{{"const", 40.0}}, 0.0, 0.5};
  const auto sure = synth::gen_panel(spec);
  for (int linked : sure.linked) CHECK(linked == 1);

  const auto gated = synth::gen_panel(synth::heckman_spec(4));
  std::size_t closed = 0;
  for (std::size_t k = 0; k < gated.rows.size(); ++k) {
    if (!gated.linked[k]) {
      ++closed;
      CHECK(gated.rows[k].citations == 0.0);
    }
  }
  CHECK(closed > 0);
}

TEST_CASE("panel rebuilt from the written files matches the generator") {
  TempDir dir;
  synth::PanelSpec spec;
  spec.seed = 12;
  spec.n_countries = 8;
  const auto p = synth::gen_panel(spec);
  synth::write_dataset(dir.path(), p);
  const auto corpus =
      link_records(load_corpus(dir / "patents.csv", dir / "applicants.csv", dir / "citations.csv"));
  const auto panel = build_panel(corpus, dir / "bilateral.csv", dir / "macro.csv");
  REQUIRE(panel.rows.size() == p.rows.size());
  CHECK(panel.dropped_rows == 0);
  CHECK(panel.dropped_citations == 0.0);
  for (std::size_t k = 0; k < p.rows.size(); ++k) {
    const auto& a = panel.rows[k];
    const auto& b = p.rows[k];
    CHECK(a.origin == b.origin);
    CHECK(a.year == b.year);
    CHECK(a.citations == b.citations);
    CHECK(a.distance_km == b.distance_km);
    CHECK(a.gdp_i == b.gdp_i);
    CHECK(a.ai_patents_j == b.ai_patents_j);
    CHECK(a.eu_ij == b.eu_ij);
    CHECK(a.proximity == doctest::Approx(b.proximity).epsilon(1e-12));
  }
}

TEST_CASE("planted corpus facts are recovered") {
  const auto s = synth::gen_corpus({});
  const auto c = link_synthetic(s.patents, s.applicants, s.citations);
  const auto& planted = s.truth.planted;

  SUBCASE("country counts") {
    const auto counts = country_patent_counts(c);
    for (const auto& [code, n] : planted.at("country_counts").items())
      CHECK(counts.per_country.at(code) == n.get<double>());
    CHECK(counts.unattributed == 0.0);
  }
  SUBCASE("proximity pair") {
    const auto is = portfolio_vector(c, "IS");
    const auto mt = portfolio_vector(c, "MT");
    CHECK(is.shares.at("G06N") == 0.5);
    CHECK(mt.shares.at("H04L") == 0.5);
    CHECK(std::abs(min_complement_proximity(is, mt) - planted.at("proximity").at("value").get<double>()) <= 1e-15);
  }
  SUBCASE("monopoly sector") {
    for (const auto& sc : sector_concentration(c, 5))
      if (sc.sector == "99") CHECK(sc.cr == 1.0);
  }
  SUBCASE("uncited share is the survival plateau") {
    const auto lags = first_citation_lags(c, *parse_month(synth::kWindowEnd));
    CHECK(lags.invalid_families.empty());
    const auto curve = km_estimate(lags.records);
    CHECK(std::abs(uncited_share(curve) - planted.at("uncited").at("share").get<double>()) <= 1e-12);
    CHECK(std::abs(uncited_share(curve) - 0.30) <= 0.005);
  }
  SUBCASE("totals cover every country") {
    for (const auto& [code, n] : planted.at("country_counts").items()) {
      REQUIRE(s.totals.count(code));
      CHECK(s.totals.at(code) >= n.get<double>());
    }
  }
}
