#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "patscape/countries.hpp"
#include "patscape/csv.hpp"
#include "patscape/error.hpp"
#include "support.hpp"

using namespace patscape;
using testing::TempDir;
using testing::corpus_from;

TEST_CASE("csv parser handles quoting, CRLF and BOM") {
  auto t = csv::parse("\xEF\xBB\xBF" "a,b\r\n\"x,1\",\"say \"\"hi\"\"\"\r\n\"multi\nline\",2\n");
  REQUIRE(t.header == csv::Row{"a", "b"});
  REQUIRE(t.rows.size() == 2);
  CHECK(t.rows[0][0] == "x,1");
  CHECK(t.rows[0][1] == "say \"hi\"");
  CHECK(t.rows[1][0] == "multi\nline");
  CHECK(t.lines[1] == 3);

  std::ostringstream out;
  csv::write_row(out, {"plain", "with,comma", "q\"uote"});
  CHECK(out.str() == "plain,\"with,comma\",\"q\"\"uote\"\n");
}

TEST_CASE("number formatting is fixed at six significant digits") {
  CHECK(csv::format_number(0.123456789) == "0.123457");
  CHECK(csv::format_number(19.0) == "19");
  CHECK(csv::format_number(-0.0) == "0");
  CHECK(csv::format_number(std::nan("")) == "NA");
}

TEST_CASE("dates parse strictly and months subtract") {
  CHECK(parse_date("2015-01-31").has_value());
  CHECK_FALSE(parse_date("2015-02-30").has_value());
  CHECK_FALSE(parse_date("2015-1-3").has_value());
  CHECK(parse_date("2024-02-29").has_value());
  CHECK_FALSE(parse_date("2023-02-29").has_value());
  CHECK(months_between(Month::of(2015, 1), Month::of(2015, 7)) == 6);
  CHECK(months_between(Month::of(2020, 1), *parse_month("2023-12")) == 47);
  CHECK(to_string(*parse_month("2023-12")) == "2023-12");
}

TEST_CASE("country registry") {
  CHECK(countries::is_iso("US"));
  CHECK(countries::is_iso("MT"));
  CHECK_FALSE(countries::is_iso("EU"));
  CHECK_FALSE(countries::is_iso("XX"));
  CHECK(countries::is_supranational("EP"));
  CHECK(countries::is_recognized("WO"));
  CHECK(countries::eu27().size() == 27);
  CHECK(countries::eu27().count("DE"));
  CHECK_FALSE(countries::eu27().count("GB"));
  CHECK(countries::parse_member_list("DE, FR\nNL") == std::set<std::string>{"DE", "FR", "NL"});
  CHECK_THROWS_AS(countries::parse_member_list("DE,QQ"), DataError);
}

TEST_CASE("missing report counts blank applicant fields") {
  TempDir dir;
  auto c = corpus_from(dir, "P1,F1,EP,2016-01-01,2015-01-01,G06N,A1\n",
                       "A1,Alpha,US,62,1990,,\nA2,Beta,DE,,1991,,\nA3,Gamma,FR,26,,,\n", "");
  CHECK(c.missing_report.at("nace").missing == 1);
  CHECK(c.missing_report.at("nace").total == 3);
  CHECK(c.missing_report.at("nace").share() == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(c.missing_report.at("incorporation_year").share() == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(c.missing_report.at("country").missing == 0);
}

TEST_CASE("missing report reproduces firm-level missing-data proportions") {
  // 100 applicants: 11 without incorporation date, 10 without NACE code.
  TempDir dir;
  std::string applicants;
  for (int i = 0; i < 100; ++i) {
    applicants += "A" + std::to_string(i) + ",Firm,US," + (i < 10 ? "" : "62") + "," +
                  (i >= 50 && i < 61 ? "" : "2001") + ",,\n";
  }
  auto c = corpus_from(dir, "P1,F1,EP,2016-01-01,2015-01-01,G06N,A0\n", applicants, "");
  CHECK(c.missing_report.at("incorporation_year").share() == doctest::Approx(0.11));
  CHECK(c.missing_report.at("nace").share() == doctest::Approx(0.10));
  for (const auto& [field, m] : c.missing_report) {
    CHECK(m.share() >= 0.0);
    CHECK(m.share() <= 1.0);
  }
}

TEST_CASE("load errors") {
  TempDir dir;
  SUBCASE("empty patents file") {
    CHECK_THROWS_WITH_AS(corpus_from(dir, "", "A1,Alpha,US,62,1990,,\n", ""), doctest::Contains("no patent rows"),
                         DataError);
  }
  SUBCASE("malformed header") {
    const auto p = dir.write("patents.csv", "patent_id,family\nP1,F1\n");
    const auto a = dir.write("applicants.csv", testing::kApplicantsHeader);
    const auto c = dir.write("citations.csv", testing::kCitationsHeader);
    CHECK_THROWS_WITH_AS(load_corpus(p, a, c), doctest::Contains("header"), DataError);
  }
  SUBCASE("unreadable file") {
    CHECK_THROWS_AS(load_corpus(dir / "nope.csv", dir / "nope2.csv", dir / "nope3.csv"), DataError);
  }
  SUBCASE("more than half the rows fail") {
    CHECK_THROWS_AS(corpus_from(dir,
                                "P1,F1,EP,2016-01-01,2015-01-01,G06N,A1\n"
                                "P2,F2,EP,bad,2015-01-01,G06N,A1\n"
                                "P3,F3,EP,2016-13-01,2015-01-01,G06N,A1\n",
                                "A1,Alpha,US,62,1990,,\n", ""),
                    DataError);
  }
}

TEST_CASE("row violations are collected in row order without aborting") {
  TempDir dir;
  auto c = corpus_from(dir,
                       "P1,F1,EP,2016-01-01,2015-01-01,G06N,A1\n"
                       "P2,F2,EP,2016-01-01,2015-01-01,G06N,A1\n"
                       "P3,F3,EP,2016-01-01,2015-01-01,,A1\n"
                       "P4,,EP,2016-01-01,2015-01-01,G06N,A1\n",
                       "A1,Alpha,US,62,1990,,\nA2,Beta,US,6,1990,,\nA3,Gamma,US,62,1200,,\n"
                       "A4,Delta,US,62,1990,,\nA5,Eps,US,62,1990,,\n",
                       "");
  CHECK(c.patents.size() == 3);  // P4 has no family, P3 is kept but flagged
  std::vector<std::size_t> rows;
  for (const auto& d : c.diagnostics)
    if (d.file == "patents.csv") rows.push_back(d.row);
  CHECK(std::is_sorted(rows.begin(), rows.end()));
  CHECK(c.applicants.size() == 3);
}

TEST_CASE("linking annotates countries and tags unlinked patents") {
  TempDir dir;
  auto c = corpus_from(dir,
                       "P1,F1,EP,2016-01-01,2015-01-01,G06N,A1\n"
                       "P2,F2,US,2016-01-01,2015-01-01,G06F,A9\n",
                       "A1,Alpha,US,62,1990,,\n", "");
  REQUIRE(c.patents.size() == 2);
  CHECK(c.patents[0].country.at("US") == 1.0);
  CHECK(c.patents[0].linked);
  CHECK_FALSE(c.patents[1].linked);
  CHECK(c.patents[1].country.empty());
  CHECK(c.missing_report.at("applicant").missing == 1);
  const auto counts = country_patent_counts(c);
  CHECK(counts.per_country.at("US") + counts.unattributed == doctest::Approx(counts.total));
}

TEST_CASE("duplicate applicant ids with conflicting countries") {
  TempDir dir;
  CHECK_THROWS_WITH_AS(corpus_from(dir, "P1,F1,EP,2016-01-01,2015-01-01,G06N,A1\n",
                                   "A1,Alpha,DE,62,1990,,\nA1,Alpha,FR,62,1990,,\n", ""),
                       doctest::Contains("A1"), DataError);
}

TEST_CASE("multi-applicant attribution") {
  TempDir dir;
  const std::string patents =
      "P1,F1,EP,2016-01-01,2015-01-01,G06N,A1\n"
      "P1,F1,EP,2016-01-01,2015-01-01,G06N,A2\n";
  const std::string applicants = "A1,Alpha,US,62,1990,,\nA2,Beta,CN,62,1990,,\n";
  SUBCASE("fractional") {
    auto c = corpus_from(dir, patents, applicants, "");
    REQUIRE(c.patents.size() == 1);
    CHECK(c.patents[0].country.at("US") == 0.5);
    CHECK(c.patents[0].country.at("CN") == 0.5);
  }
  SUBCASE("first applicant") {
    LoadOptions o;
    o.attribution = Attribution::first_applicant;
    auto c = corpus_from(dir, patents, applicants, "", o);
    CHECK(c.patents[0].country.size() == 1);
    CHECK(c.patents[0].country.at("US") == 1.0);
  }
}

TEST_CASE("parent country view") {
  TempDir dir;
  auto c = corpus_from(dir,
                       "P1,F1,EP,2016-01-01,2015-01-01,G06N,A1\n"
                       "P2,F2,EP,2016-01-01,2015-01-01,G06N,A2\n",
                       "A1,Sub,IE,62,1990,G1,US\nA2,Solo,DE,62,1990,,\n", "");
  CHECK(c.patents[0].parent_country.at("US") == 1.0);
  CHECK(c.patents[0].country.at("IE") == 1.0);
  CHECK(c.patents[1].parent_country.at("DE") == 1.0);
}

TEST_CASE("citation edges are family level and deduplicated") {
  TempDir dir;
  auto c = corpus_from(dir,
                       "P1,F1,EP,2016-01-01,2015-01-01,G06N,A1\n"
                       "P2,F1,US,2016-02-01,2015-03-01,G06F,A1\n"
                       "P3,F2,EP,2016-01-01,2015-01-01,G06N,A2\n",
                       "A1,Alpha,US,62,1990,,\nA2,Beta,CN,62,1990,,\n",
                       "F2,F1,A2,2017-05-01\nF2,F1,A2,2017-03-01\nX9,F2,A1,\nX9,MISSING,A1,2017-01-01\n");
  REQUIRE(c.families.size() == 2);
  CHECK(c.families[0].patent_count == 2);
  CHECK(c.families[0].cpc_classes == std::vector<std::string>{"G06F", "G06N"});
  REQUIRE(c.citations.size() == 2);
  CHECK(c.citations[0].citing_family == "F2");
  CHECK(c.citations[0].citing_country.at("CN") == 1.0);
  CHECK(c.citations[0].cited_country.at("US") == 1.0);
  CHECK(to_string(*c.citations[0].citation_date) == "2017-03-01");
  CHECK_FALSE(c.citations[1].citation_date.has_value());
  CHECK(c.dropped_citations == 1);
}

TEST_CASE("linking is idempotent") {
  TempDir dir;
  auto once = corpus_from(dir,
                          "P1,F1,EP,2016-01-01,2015-01-01,G06N|H04L,A1\n"
                          "P1,F1,EP,2016-01-01,2015-01-01,G06N,A2\n"
                          "P2,F2,EP,2016-01-01,2015-01-01,G06F,A3\n",
                          "A1,Alpha,US,62,1990,,\nA2,Beta,CN,26,1990,P,US\n", "F2,F1,A3,2017-01-01\n");
  auto twice = link_records(once);
  REQUIRE(twice.patents.size() == once.patents.size());
  for (std::size_t i = 0; i < once.patents.size(); ++i) {
    CHECK(twice.patents[i].country == once.patents[i].country);
    CHECK(twice.patents[i].parent_country == once.patents[i].parent_country);
    CHECK(twice.patents[i].sector == once.patents[i].sector);
  }
  CHECK(twice.citations.size() == once.citations.size());
  CHECK(twice.link_diagnostics.size() == once.link_diagnostics.size());
}

TEST_CASE("class codes normalize to trimmed upper case") {
  CHECK(normalize_class(" g06n 3/08 ") == "G06N3/08");
  CHECK(normalize_class("G06N") == "G06N");
  CHECK(normalize_class("").empty());
}

TEST_CASE("EU aggregate sums its members") {
  TempDir dir;
  SUBCASE("member counts summing to 16,689") {
    const std::vector<std::pair<std::string, int>> members = {{"DE", 6971}, {"FR", 2143}, {"NL", 1950},
                                                              {"SE", 1439}, {"IE", 1186}, {"IT", 3000}};
    std::string patents, applicants;
    int serial = 0;
    for (const auto& [code, n] : members) {
      applicants += "A_" + code + ",Firm," + code + ",62,1990,,\n";
      for (int k = 0; k < n; ++k) {
        const std::string id = std::to_string(serial++);
        patents += "P" + id + ",F" + id + ",EP,2016-01-01,2015-01-01,G06N,A_" + code + "\n";
      }
    }
    std::set<std::string> codes;
    for (const auto& [code, n] : members) codes.insert(code);
    auto c = aggregate_eu(corpus_from(dir, patents, applicants, ""), codes);
    const auto counts = country_patent_counts(c);
    CHECK(counts.per_country.at("EU") == 16689.0);
    CHECK(counts.per_country.at("DE") == 6971.0);  // member view retained
  }
  SUBCASE("singleton and additivity") {
    auto c = corpus_from(dir,
                         "P1,F1,EP,2016-01-01,2015-01-01,G06N,A1\n"
                         "P2,F2,EP,2016-01-01,2015-01-01,G06N,A1\n"
                         "P3,F3,EP,2016-01-01,2015-01-01,G06N,A2\n"
                         "P4,F4,EP,2016-01-01,2015-01-01,G06N,A2\n"
                         "P5,F5,EP,2016-01-01,2015-01-01,G06N,A2\n",
                         "A1,Alpha,DE,62,1990,,\nA2,Beta,FR,62,1990,,\n", "");
    CHECK(country_patent_counts(aggregate_eu(c, {"DE"})).per_country.at("EU") == 2.0);
    CHECK(country_patent_counts(aggregate_eu(c, {"DE", "FR"})).per_country.at("EU") == 5.0);
  }
  SUBCASE("unknown member code") {
    auto c = corpus_from(dir, "P1,F1,EP,2016-01-01,2015-01-01,G06N,A1\n", "A1,Alpha,DE,62,1990,,\n", "");
    CHECK_THROWS_AS(aggregate_eu(c, {"DE", "QQ"}), DataError);
    CHECK_THROWS_AS(aggregate_eu(c, {}), DataError);
  }
}

TEST_CASE("EU additivity on random member sets") {
  TempDir dir;
  const std::vector<std::string> pool = {"DE", "FR", "IT", "ES", "NL", "US", "CN", "JP"};
  std::mt19937 gen(7);
  std::string patents, applicants;
  for (const auto& code : pool) applicants += "A_" + code + ",Firm," + code + ",62,1990,,\n";
  for (int k = 0; k < 300; ++k) {
    const std::string id = std::to_string(k);
    patents += "P" + id + ",F" + id + ",EP,2016-01-01,2015-01-01,G06N,A_" + pool[gen() % pool.size()] + "\n";
    if (k % 7 == 0) patents += "P" + id + ",F" + id + ",EP,2016-01-01,2015-01-01,G06N,A_" + pool[gen() % pool.size()] + "\n";
  }
  const auto base = corpus_from(dir, patents, applicants, "");
  for (int trial = 0; trial < 50; ++trial) {
    std::set<std::string> members;
    for (const auto& code : pool)
      if (gen() % 2) members.insert(code);
    if (members.empty()) members.insert("DE");
    const auto counts = country_patent_counts(aggregate_eu(base, members));
    double sum = 0.0;
    for (const auto& m : members) sum += counts.per_country.count(m) ? counts.per_country.at(m) : 0.0;
    CHECK(counts.per_country.at("EU") == doctest::Approx(sum).epsilon(1e-12));
  }
}
