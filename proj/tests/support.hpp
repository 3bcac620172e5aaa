#pragma once

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <unistd.h>

#include "patscape/corpus.hpp"
#include "patscape/survival.hpp"

namespace testing {

namespace fs = std::filesystem;

// Scratch directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = fs::temp_directory_path() /
            ("patscape_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& name) const { return path_ / name; }

  fs::path write(const std::string& name, const std::string& content) const {
    std::ofstream out(path_ / name, std::ios::binary);
    out << content;
    return path_ / name;
  }

 private:
  fs::path path_;
};

inline std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline const char* kPatentsHeader = "patent_id,family_id,authority,grant_date,earliest_pub_date,cpc_classes,applicant_id\n";
inline const char* kApplicantsHeader = "applicant_id,name,country,nace,incorporation_year,parent_id,parent_country\n";
inline const char* kCitationsHeader = "citing_family,cited_family,citing_applicant_id,citation_date\n";

// Writes the three corpus tables (header lines added) and loads + links them.
inline patscape::LinkedCorpus corpus_from(const TempDir& dir, const std::string& patents,
                                          const std::string& applicants, const std::string& citations,
                                          const patscape::LoadOptions& options = {}) {
  const auto p = dir.write("patents.csv", kPatentsHeader + patents);
  const auto a = dir.write("applicants.csv", kApplicantsHeader + applicants);
  const auto c = dir.write("citations.csv", kCitationsHeader + citations);
  return patscape::link_records(patscape::load_corpus(p, a, c, options));
}

// ---- oracles -----------------------------------------------------------------

struct OracleStep {
  int t;
  std::size_t d, n;
  double s;
};

// Product-limit estimate by scanning the whole sample at every distinct event time.
inline std::vector<OracleStep> km_scan(const std::vector<patscape::LagRecord>& lags) {
  std::set<int> times;
  for (const auto& r : lags)
    if (r.event) times.insert(r.duration);
  std::vector<OracleStep> out;
  double s = 1.0;
  for (int t : times) {
    std::size_t n = 0, d = 0;
    for (const auto& r : lags) {
      n += r.duration >= t;
      d += r.event && r.duration == t;
    }
    s *= 1.0 - static_cast<double>(d) / static_cast<double>(n);
    out.push_back({t, d, n, s});
  }
  return out;
}

// Sum of coordinate minima over the union of keys, missing keys read as zero.
inline double proximity_union(const std::map<std::string, double>& a, const std::map<std::string, double>& b) {
  std::set<std::string> keys;
  for (const auto& [k, v] : a) keys.insert(k);
  for (const auto& [k, v] : b) keys.insert(k);
  double sum = 0.0;
  for (const auto& k : keys) {
    const double x = a.count(k) ? a.at(k) : 0.0;
    const double y = b.count(k) ? b.at(k) : 0.0;
    sum += x < y ? x : y;
  }
  return sum;
}

inline double top_q_share(std::vector<double> counts, int q) {
  std::sort(counts.begin(), counts.end(), std::greater<>());
  double top = 0.0, total = 0.0;
  for (std::size_t k = 0; k < counts.size(); ++k) {
    total += counts[k];
    if (static_cast<int>(k) < q) top += counts[k];
  }
  return top / total;
}

}  // namespace testing
