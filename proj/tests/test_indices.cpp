#include <doctest.h>

#include <random>

#include "patscape/error.hpp"
#include "patscape/indices.hpp"
#include "support.hpp"

using namespace patscape;
using testing::TempDir;
using testing::corpus_from;

namespace {

PortfolioVector random_vector(std::mt19937& gen, const std::string& holder) {
  std::uniform_int_distribution<int> size(1, 50);
  std::uniform_int_distribution<int> key(0, 79);
  std::uniform_real_distribution<double> mass(0.01, 1.0);
  std::map<std::string, double> raw;
  const int n = size(gen);
  for (int i = 0; i < n; ++i) raw["C" + std::to_string(key(gen))] += mass(gen);
  double total = 0.0;
  for (const auto& [k, v] : raw) total += v;
  PortfolioVector p;
  p.holder = holder;
  for (const auto& [k, v] : raw) p.shares[k] = v / total;
  return p;
}

}  // namespace

TEST_CASE("portfolio vector from class lists") {
  const std::vector<std::string> g06n{"G06N"}, h04l{"H04L"}, g06f{"G06F"}, both{"G06F", "G06N"};
  SUBCASE("singleton") {
    auto p = portfolio_from_classes("X", {{&g06n, 1.0}});
    CHECK(p.shares == std::map<std::string, double>{{"G06N", 1.0}});
    CHECK(p.support_size() == 1);
  }
  SUBCASE("four patents") {
    auto p = portfolio_from_classes("X", {{&g06n, 1.0}, {&g06n, 1.0}, {&h04l, 1.0}, {&g06f, 1.0}});
    CHECK(p.shares.at("G06N") == 0.5);
    CHECK(p.shares.at("H04L") == 0.25);
    CHECK(p.shares.at("G06F") == 0.25);
  }
  SUBCASE("multi-class patent is split equally") {
    auto p = portfolio_from_classes("X", {{&both, 1.0}, {&g06n, 1.0}});
    CHECK(p.shares.at("G06F") == 0.25);
    CHECK(p.shares.at("G06N") == 0.75);
  }
  SUBCASE("truncation merges subgroups") {
    const std::vector<std::string> deep{"G06N3/08", "G06N20/00"};
    auto p = portfolio_from_classes("X", {{&deep, 1.0}});
    CHECK(p.shares == std::map<std::string, double>{{"G06N", 1.0}});
    auto fine = portfolio_from_classes("X", {{&deep, 1.0}}, 5);
    CHECK(fine.support_size() == 2);
  }
  SUBCASE("empty") { CHECK_THROWS_WITH_AS(portfolio_from_classes("X", {}), doctest::Contains("empty portfolio"), DataError); }
}

TEST_CASE("portfolio vector from a linked corpus") {
  TempDir dir;
  auto c = corpus_from(dir,
                       "P1,F1,EP,2016-01-01,2015-01-01,G06N,A1\n"
                       "P2,F2,EP,2016-01-01,2015-01-01,G06N,A1\n"
                       "P3,F3,EP,2016-01-01,2015-01-01,H04L,A1\n"
                       "P4,F4,EP,2016-01-01,2015-01-01,G06F,A1\n"
                       "P5,F5,EP,2016-01-01,2015-01-01,G06F,A2\n",
                       "A1,Alpha,US,62,1990,,\nA2,Beta,DE,62,1990,,\n", "");
  auto us = portfolio_vector(c, "US");
  CHECK(us.shares.at("G06N") == 0.5);
  CHECK(us.shares.at("H04L") == 0.25);
  CHECK(us.shares.at("G06F") == 0.25);
  CHECK_THROWS_AS(portfolio_vector(c, "JP"), DataError);
  auto firm = portfolio_vector(c, "A2", HolderKind::firm);
  CHECK(firm.shares.at("G06F") == 1.0);
  auto eu = portfolio_vector(aggregate_eu(c, {"DE"}), "EU");
  CHECK(eu.shares.at("G06F") == 1.0);
}

TEST_CASE("portfolio invariants on random inputs") {
  std::mt19937 gen(11);
  const std::vector<std::string> pool{"G06N", "G06F", "H04L", "G10L", "A61B", "B60W", "G06T", "G05B"};
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<std::vector<std::string>> patents(1 + gen() % 20);
    for (auto& p : patents)
      for (int k = 0, n = 1 + static_cast<int>(gen() % 4); k < n; ++k) p.push_back(pool[gen() % pool.size()]);
    std::vector<WeightedClasses> held;
    for (const auto& p : patents) held.push_back({&p, 1.0});
    auto v = portfolio_from_classes("X", held);
    double sum = 0.0;
    for (const auto& [k, s] : v.shares) {
      CHECK(s > 0.0);
      sum += s;
    }
    CHECK(std::abs(sum - 1.0) <= 1e-12);
    CHECK(v.support_size() == v.shares.size());
  }
}

TEST_CASE("min-complement proximity examples") {
  PortfolioVector a{"a", {{"X", 0.5}, {"Y", 0.3}, {"Z", 0.2}}};
  PortfolioVector b{"b", {{"X", 0.2}, {"Y", 0.3}, {"Z", 0.5}}};
  PortfolioVector d{"d", {{"Q", 1.0}}};
  CHECK(min_complement_proximity(a, a) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(min_complement_proximity(a, d) == 0.0);
  CHECK(min_complement_proximity(a, b) == doctest::Approx(0.7).epsilon(1e-12));
}

TEST_CASE("proximity properties on random sparse vectors") {
  std::mt19937 gen(2024);
  for (int trial = 0; trial < 500; ++trial) {
    const auto a = random_vector(gen, "a");
    const auto b = random_vector(gen, "b");
    const double ab = min_complement_proximity(a, b);
    CHECK(ab == min_complement_proximity(b, a));
    CHECK(ab >= 0.0);
    CHECK(ab <= 1.0);
    CHECK(std::abs(min_complement_proximity(a, a) - 1.0) <= 1e-12);
    CHECK(std::abs(ab - testing::proximity_union(a.shares, b.shares)) <= 1e-12);
  }
}

TEST_CASE("proximity matrix is symmetric with unit diagonal") {
  TempDir dir;
  auto c = corpus_from(dir,
                       "P1,F1,EP,2016-01-01,2015-01-01,G06N,A1\n"
                       "P2,F2,EP,2016-01-01,2015-01-01,G06F|G06N,A2\n"
                       "P3,F3,EP,2016-01-01,2015-01-01,H04L,A3\n",
                       "A1,Alpha,US,62,1990,,\nA2,Beta,CN,62,1990,,\nA3,Gamma,JP,62,1990,,\n", "");
  auto m = proximity_matrix(c, {"US", "CN", "JP"});
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(m.values[i][i] == doctest::Approx(1.0));
    for (std::size_t j = 0; j < 3; ++j) CHECK(m.values[i][j] == m.values[j][i]);
  }
  CHECK(m.values[0][1] == doctest::Approx(0.5));
  CHECK(m.values[0][2] == 0.0);
}

TEST_CASE("revealed comparative advantage") {
  CHECK(rca({"A", 10, 100}, {"W", 50, 500}) == doctest::Approx(1.0).epsilon(1e-15));
  const double us = rca({"US", 80371, 933528}, {"World", 0.016716, 1.0});
  CHECK(us == doctest::Approx(5.15).epsilon(0.001));
  // back-solve: the world ratio implied by the published RCA of the same row
  const double implied = (80371.0 / 933528.0) / 5.15;
  CHECK(implied == doctest::Approx(0.016716).epsilon(0.001));
  CHECK_THROWS_WITH_AS(rca({"A", 1, 0}, {"W", 5, 50}), doctest::Contains("total_count of A"), DataError);
  CHECK_THROWS_WITH_AS(rca({"A", 1, 10}, {"W", 5, 0}), doctest::Contains("world total_count"), DataError);
  CHECK_THROWS_WITH_AS(rca({"A", 1, 10}, {"W", 0, 50}), doctest::Contains("world ai_count"), DataError);
}

TEST_CASE("RCA aggregation identity") {
  std::mt19937 gen(5);
  std::uniform_real_distribution<double> ai(0.0, 1000.0), extra(1.0, 50000.0);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<CountryPatentCounts> rows(2 + gen() % 30);
    CountryPatentCounts world{"W", 0, 0};
    for (auto& r : rows) {
      r.ai_count = std::round(ai(gen));
      r.total_count = r.ai_count + std::round(extra(gen));
      world.ai_count += r.ai_count;
      world.total_count += r.total_count;
    }
    if (world.ai_count == 0.0) continue;
    double sum = 0.0;
    for (const auto& r : rows) sum += r.total_count / world.total_count * rca(r, world);
    CHECK(std::abs(sum - 1.0) <= 1e-9);
  }
}

TEST_CASE("RCA table from a corpus and totals") {
  TempDir dir;
  auto c = corpus_from(dir,
                       "P1,F1,EP,2016-01-01,2015-01-01,G06N,A1\n"
                       "P2,F2,EP,2016-01-01,2015-01-01,G06N,A1\n"
                       "P3,F3,EP,2016-01-01,2015-01-01,G06N,A1\n"
                       "P4,F4,EP,2016-01-01,2015-01-01,G06N,A2\n",
                       "A1,Alpha,US,62,1990,,\nA2,Beta,DE,62,1990,,\n", "");
  const std::map<std::string, double> totals{{"US", 30}, {"DE", 70}};
  auto t = rca_table(c, totals);
  REQUIRE(t.rows.size() == 2);
  CHECK(t.world.ai_count == 4);
  CHECK(t.world.total_count == 100);
  CHECK(t.rows[0].country == "US");
  CHECK(t.rows[0].share == doctest::Approx(0.1));
  CHECK(t.rows[0].rca == doctest::Approx((3.0 / 30) / (4.0 / 100)));
  double identity = 0.0;
  for (const auto& r : t.rows) identity += r.total_count / t.world.total_count * r.rca;
  CHECK(identity == doctest::Approx(1.0).epsilon(1e-9));

  auto missing = rca_table(c, {{"US", 30}});
  CHECK(missing.missing_totals == std::vector<std::string>{"DE"});
  CHECK_THROWS_AS(rca_table(c, {{"US", 0}, {"DE", 70}}), DataError);

  auto eu = rca_table(aggregate_eu(c, {"DE"}), totals);
  bool found = false;
  for (const auto& r : eu.rows)
    if (r.country == "EU") {
      found = true;
      CHECK(r.ai_count == 1);
      CHECK(r.total_count == 70);
    }
  CHECK(found);
}

TEST_CASE("totals file validation") {
  TempDir dir;
  CHECK(read_totals(dir.write("t.csv", "country,total_count\nUS,10\nDE,2.5\n")).at("DE") == 2.5);
  CHECK_THROWS_AS(read_totals(dir.write("t.csv", "country,total_count\nUS,10\nUS,3\n")), DataError);
  CHECK_THROWS_AS(read_totals(dir.write("t.csv", "country,total_count\nQQ,10\n")), DataError);
  CHECK_THROWS_AS(read_totals(dir.write("t.csv", "country,total_count\nUS,-1\n")), DataError);
  CHECK_THROWS_AS(read_totals(dir.write("t.csv", "country,total\nUS,1\n")), DataError);
}

TEST_CASE("concentration ratio examples") {
  CHECK(concentration_ratio({{"f1", 12}}).cr == 1.0);
  std::map<std::string, double> ten;
  for (int i = 0; i < 10; ++i) ten["f" + std::to_string(i)] = 10;
  CHECK(concentration_ratio(ten, 5).cr == 0.5);
  const auto tie = concentration_ratio({{"a", 5}, {"b", 5}, {"c", 5}, {"d", 5}}, 3);
  CHECK(tie.cr == 0.75);
  CHECK(tie.total == 20);
  CHECK_THROWS_AS(concentration_ratio({}), DataError);
  CHECK_THROWS_AS(concentration_ratio({{"a", 1}}, 0), DataError);
}

TEST_CASE("concentration ratio is monotone in q") {
  std::mt19937 gen(9);
  for (int trial = 0; trial < 100; ++trial) {
    std::map<std::string, double> firms;
    const int n = 1 + static_cast<int>(gen() % 25);
    for (int i = 0; i < n; ++i) firms["f" + std::to_string(i)] = 1 + gen() % 40;
    double previous = 0.0;
    for (int q = 1; q <= n; ++q) {
      const auto sc = concentration_ratio(firms, q);
      CHECK(sc.cr >= previous);
      CHECK(sc.cr <= 1.0);
      std::vector<double> counts;
      for (const auto& [f, v] : firms) counts.push_back(v);
      CHECK(sc.cr == doctest::Approx(testing::top_q_share(counts, q)).epsilon(1e-12));
      previous = sc.cr;
    }
    CHECK(concentration_ratio(firms, n).cr == 1.0);
  }
}

TEST_CASE("sector concentration from a corpus") {
  TempDir dir;
  auto c = corpus_from(dir,
                       "P1,F1,EP,2016-01-01,2015-01-01,G06N,A1\n"
                       "P2,F2,EP,2016-01-01,2015-01-01,G06N,A1\n"
                       "P3,F3,EP,2016-01-01,2015-01-01,G06N,A2\n"
                       "P4,F4,EP,2016-01-01,2015-01-01,G06N,A3\n",
                       "A1,Alpha,US,62,1990,,\nA2,Beta,DE,62,1990,,\nA3,Gamma,DE,26,1990,,\n", "");
  auto sectors = sector_concentration(c, 1);
  REQUIRE(sectors.size() == 2);
  CHECK(sectors[0].sector == "26");
  CHECK(sectors[0].cr == 1.0);
  CHECK(sectors[1].sector == "62");
  CHECK(sectors[1].cr == doctest::Approx(2.0 / 3.0));
  double sum = 0.0;
  for (const auto& [f, v] : sectors[1].per_firm) sum += v;
  CHECK(sum == sectors[1].total);
}

namespace {

LinkedCorpus citation_fixture(const TempDir& dir) {
  return aggregate_eu(corpus_from(dir,
                                  "P1,FU1,EP,2016-01-01,2015-01-01,G06N,AU\n"
                                  "P2,FU2,EP,2016-01-01,2015-01-01,G06N,AU\n"
                                  "P3,FC1,EP,2016-01-01,2015-01-01,G06N,AC\n"
                                  "P4,FC2,EP,2016-01-01,2015-01-01,G06N,AC\n"
                                  "P5,FC3,EP,2016-01-01,2015-01-01,G06N,AC\n"
                                  "P6,FD1,EP,2016-01-01,2015-01-01,G06N,AD\n",
                                  "AU,Us,US,62,1990,,\nAC,Cn,CN,62,1990,,\nAD,De,DE,62,1990,,\n",
                                  "FU1,FU2,AU,2017-01-01\n"
                                  "FU1,FC1,AU,2017-01-01\n"
                                  "FC1,FC2,AC,2017-01-01\n"
                                  "FC2,FC3,AC,2017-01-01\n"
                                  "FC2,FC3,AC,2017-02-01\n"
                                  "FD1,FU1,AD,2017-01-01\n"),
                      {"DE"});
}

}  // namespace

TEST_CASE("citation matrix") {
  TempDir dir;
  const auto c = citation_fixture(dir);
  SUBCASE("five-edge fixture") {
    auto m = citation_matrix(c, {"US", "CN", "EU"});
    CHECK(m.counts == std::vector<std::vector<double>>{{1, 1, 0}, {0, 2, 0}, {1, 0, 0}});
    CHECK(m.total() == 5);
    CHECK(m.row_sum(1) == 2);
  }
  SUBCASE("single edge and diagonal") {
    auto m = citation_matrix(c, {"EU", "US"});
    CHECK(m.counts == std::vector<std::vector<double>>{{0, 1}, {0, 1}});
  }
  SUBCASE("default axis folds EU members") {
    CHECK(default_citation_axis(c) == std::vector<std::string>{"CN", "EU", "US"});
  }
  SUBCASE("axis errors") {
    CHECK_THROWS_AS(citation_matrix(c, {"US", "QQ"}), DataError);
    CHECK_THROWS_AS(citation_matrix(c, {"US", "US"}), DataError);
    CHECK_THROWS_AS(citation_matrix(c, {"EU", "DE"}), DataError);
  }
}

TEST_CASE("citation conservation on random graphs") {
  std::mt19937 gen(17);
  const std::vector<std::string> codes{"US", "CN", "JP", "DE"};
  for (int trial = 0; trial < 10; ++trial) {
    TempDir dir;
    std::string patents, citations;
    const int families = 30;
    for (int f = 0; f < families; ++f)
      patents += "P" + std::to_string(f) + ",F" + std::to_string(f) + ",EP,2016-01-01,2015-01-01,G06N,A_" +
                 codes[gen() % codes.size()] + "\n";
    std::set<std::pair<int, int>> pairs;
    for (int k = 0; k < 80; ++k) {
      const int a = static_cast<int>(gen() % families), b = static_cast<int>(gen() % families);
      pairs.insert({a, b});
      citations += "F" + std::to_string(a) + ",F" + std::to_string(b) + ",,2017-01-01\n";
    }
    std::string applicants;
    for (const auto& code : codes) applicants += "A_" + code + ",X," + code + ",62,1990,,\n";
    auto c = corpus_from(dir, patents, applicants, citations);
    auto m = citation_matrix(c, codes);
    CHECK(m.total() == doctest::Approx(static_cast<double>(pairs.size())));
    for (const auto& row : m.counts)
      for (double v : row) CHECK(v >= 0.0);
  }
}

TEST_CASE("foreign citation share") {
  CitationMatrix m;
  m.axis = {"A", "B", "C"};
  m.counts = {{4, 0, 0}, {3, 7, 0}, {0, 0, 0}};
  CHECK(foreign_citation_share(m, "A") == 0.0);
  CHECK(foreign_citation_share(m, "B") == doctest::Approx(0.3).epsilon(1e-15));
  CHECK_THROWS_AS(foreign_citation_share(m, "C"), DataError);
  CHECK_THROWS_AS(foreign_citation_share(m, "Z"), DataError);
}
