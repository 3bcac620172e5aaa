#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "patscape/gravity.hpp"
#include "patscape/survival.hpp"
#include "patscape/indices.hpp"

namespace patscape::cli {

struct RunConfig {
  std::string command;  // ingest | indices | survival | gravity | synth | report
  std::string target;   // indices: rca | proximity | cr | citations; synth: corpus | panel
  std::filesystem::path patents, applicants, citations;
  std::filesystem::path bilateral, macro, totals;
  std::filesystem::path eu_members;
  std::filesystem::path out = "out";
  std::size_t class_level = 4;
  int q = 5;
  std::string window_end = "2023-12";
  double offset = 1e-4;
  int specification = 1;  // 1-4; report fits all four
  bool heckman = false;
  ClusterOrientation cluster = ClusterOrientation::ordered;
  std::uint64_t seed = 42;
  bool svg = false;
  int threads = 1;
  // synth dimensions
  int n_countries = 20;
  int n_years = 5;
  int n_firms = 40;
  int n_patents = 400;
  int n_classes = 8;
  bool selection = false;
};

// Throws UsageError for missing inputs, bad values or invalid combinations.
void validate(const RunConfig& config);

// Runs one subcommand and writes its artifacts plus manifest.json under
// config.out. Returns 0, 1 on module errors, 2 on usage errors; diagnostics go
// to `log`.
int run_pipeline(const RunConfig& config, std::ostream& log);

struct Artifact {
  std::string name;  // file name relative to the output directory
  std::string content;
};

// ---- table renderers (fixed column order, 6 significant digits) -----------

std::string render_coefficients(const FitResult& fit);
std::string render_first_stage(const std::vector<std::string>& names, const Eigen::VectorXd& gamma,
                               const Eigen::VectorXd& se);
std::string render_rca(const RcaTable& table);
std::string render_proximity(const ProximityMatrix& matrix);
std::string render_concentration(const std::vector<SectorConcentration>& sectors);
std::string render_citation_matrix(const CitationMatrix& matrix);
std::string render_survival(const std::map<std::string, SurvivalCurve>& curves);
std::string render_survival_svg(const SurvivalCurve& curve);

std::string sha256_hex(std::string_view data);
std::string render_manifest(const std::vector<Artifact>& artifacts);

}  // namespace patscape::cli
