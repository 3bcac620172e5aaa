#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "patscape/cli.hpp"

namespace {

void add_common(CLI::App& cmd, patscape::cli::RunConfig& c) {
  cmd.add_option("--patents", c.patents, "patents.csv");
  cmd.add_option("--applicants", c.applicants, "applicants.csv");
  cmd.add_option("--citations", c.citations, "citations.csv");
  cmd.add_option("--eu-members", c.eu_members, "EU member list (default: EU-27)");
  cmd.add_option("--out", c.out, "output directory")->capture_default_str();
  cmd.add_option("--threads", c.threads, "worker threads for independent tables")->capture_default_str();
}

void add_indices(CLI::App& cmd, patscape::cli::RunConfig& c) {
  cmd.add_option("--class-level", c.class_level, "technology class truncation (1-4)")->capture_default_str();
  cmd.add_option("--q", c.q, "firms in the concentration ratio")->capture_default_str();
  cmd.add_option("--totals", c.totals, "country,total_count table for RCA");
}

void add_gravity(CLI::App& cmd, patscape::cli::RunConfig& c) {
  cmd.add_option("--bilateral", c.bilateral, "bilateral.csv");
  cmd.add_option("--macro", c.macro, "macro.csv");
  cmd.add_option("--spec", c.specification, "specification 1-4")->capture_default_str();
  cmd.add_option("--offset", c.offset, "log offset for zero values")->capture_default_str();
  cmd.add_option("--cluster", c.cluster, "cluster orientation")
      ->transform(CLI::CheckedTransformer(
          std::map<std::string, patscape::ClusterOrientation>{{"ordered", patscape::ClusterOrientation::ordered},
                                                              {"unordered", patscape::ClusterOrientation::unordered}}));
  cmd.add_flag("--heckman", c.heckman, "add the two-step selection correction");
}

void add_survival(CLI::App& cmd, patscape::cli::RunConfig& c) {
  cmd.add_option("--window-end", c.window_end, "last observed month YYYY-MM")->capture_default_str();
  cmd.add_flag("--svg", c.svg, "write one step plot per group");
}

}  // namespace

int main(int argc, char** argv) {
  patscape::cli::RunConfig c;
  CLI::App app{"Patent landscape indices, citation survival and gravity estimation"};
  app.require_subcommand(1);

  auto* ingest = app.add_subcommand("ingest", "load, validate and link the corpus");
  add_common(*ingest, c);

  auto* indices = app.add_subcommand("indices", "specialization and flow tables");
  add_common(*indices, c);
  add_indices(*indices, c);
  indices->add_option("target", c.target, "rca | proximity | cr | citations")->required();

  auto* survival = app.add_subcommand("survival", "time to first citation");
  add_common(*survival, c);
  add_survival(*survival, c);

  auto* gravity = app.add_subcommand("gravity", "PPML gravity estimation");
  add_common(*gravity, c);
  add_indices(*gravity, c);
  add_gravity(*gravity, c);

  auto* synth = app.add_subcommand("synth", "synthetic datasets with recorded truth");
  synth->add_option("target", c.target, "corpus | panel")->required();
  synth->add_option("--out", c.out, "output directory")->capture_default_str();
  synth->add_option("--seed", c.seed, "generator seed")->capture_default_str();
  synth->add_option("--countries", c.n_countries, "panel countries")->capture_default_str();
  synth->add_option("--years", c.n_years, "panel years")->capture_default_str();
  synth->add_option("--firms", c.n_firms, "corpus firms")->capture_default_str();
  synth->add_option("--n-patents", c.n_patents, "corpus patents")->capture_default_str();
  synth->add_option("--classes", c.n_classes, "corpus technology classes")->capture_default_str();
  synth->add_flag("--selection", c.selection, "panel with a latent link gate");

  auto* report = app.add_subcommand("report", "every table the inputs allow");
  add_common(*report, c);
  add_indices(*report, c);
  add_gravity(*report, c);
  add_survival(*report, c);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  c.command = app.get_subcommands().front()->get_name();
  return patscape::cli::run_pipeline(c, std::cerr);
}
