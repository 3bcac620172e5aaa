#include "patscape/cli.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "patscape/countries.hpp"
#include "patscape/csv.hpp"
#include "patscape/error.hpp"
#include "patscape/selection.hpp"
#include "patscape/synth.hpp"

namespace patscape::cli {
namespace {

namespace fs = std::filesystem;
using csv::format_number;

using Task = std::function<std::vector<Artifact>()>;

struct TaskOutcome {
  std::vector<Artifact> artifacts;
  std::exception_ptr error;
};

// Runs tasks on up to `threads` workers; outcomes keep task order.
std::vector<TaskOutcome> run_tasks(const std::vector<Task>& tasks, int threads) {
  std::vector<TaskOutcome> outcomes(tasks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < tasks.size(); k = next++) {
      try {
        outcomes[k].artifacts = tasks[k]();
      } catch (...) {
        outcomes[k].error = std::current_exception();
      }
    }
  };
  const auto n = std::min<std::size_t>(static_cast<std::size_t>(std::max(threads, 1)), tasks.size());
  std::vector<std::thread> pool;
  for (std::size_t k = 1; k < n; ++k) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return outcomes;
}

std::string join_row(const csv::Row& row) {
  std::ostringstream out;
  csv::write_row(out, row);
  return out.str();
}

bool is_fixed_effect(const std::string& name) {
  return name.starts_with("year_") || name.starts_with("origin_") || name.starts_with("dest_");
}

void require_file(const fs::path& path, const char* flag) {
  if (path.empty()) throw UsageError(std::string("missing required flag ") + flag);
  if (!fs::is_regular_file(path)) throw UsageError(std::string(flag) + ": no such file " + path.string());
}

LinkedCorpus load(const RunConfig& c) {
  LinkedCorpus corpus = link_records(load_corpus(c.patents, c.applicants, c.citations));
  const auto members = c.eu_members.empty() ? countries::eu27() : countries::read_member_list(c.eu_members.string());
  return aggregate_eu(std::move(corpus), members);
}

std::vector<std::string> portfolio_holders(const LinkedCorpus& corpus) {
  std::set<std::string> holders;
  for (const auto& p : corpus.patents) {
    if (p.cpc_classes.empty()) continue;
    for (const auto& [c, w] : p.country)
      if (w > 0.0) holders.insert(c);
  }
  if (!corpus.eu_members.empty())
    for (const auto& h : std::set<std::string>(holders))
      if (corpus.eu_members.count(h)) holders.insert(std::string(countries::kEu));
  return {holders.begin(), holders.end()};
}

// ---- per-command tasks -----------------------------------------------------

std::vector<Artifact> ingest_artifacts(const LinkedCorpus& corpus) {
  nlohmann::ordered_json summary;
  summary["patent_rows"] = corpus.patent_rows.size();
  summary["patents"] = corpus.patents.size();
  summary["families"] = corpus.families.size();
  summary["applicants"] = corpus.applicants.size();
  summary["citation_rows"] = corpus.citation_rows.size();
  summary["citation_edges"] = corpus.citations.size();
  summary["dropped_citations"] = corpus.dropped_citations;
  summary["diagnostics"] = corpus.diagnostics.size() + corpus.link_diagnostics.size();
  std::string missing = join_row({"field", "missing", "total", "share"});
  for (const auto& [field, m] : corpus.missing_report)
    missing += join_row({field, std::to_string(m.missing), std::to_string(m.total), format_number(m.share())});
  std::string diag = join_row({"file", "row", "message"});
  for (const auto* list : {&corpus.diagnostics, &corpus.link_diagnostics})
    for (const auto& d : *list) diag += join_row({d.file, std::to_string(d.row), d.message});
  return {{"ingest_summary.json", summary.dump(2) + "\n"},
          {"missing_report.csv", missing},
          {"diagnostics.csv", diag}};
}

std::vector<Artifact> rca_artifacts(const LinkedCorpus& corpus, const RunConfig& c) {
  return {{"rca.csv", render_rca(rca_table(corpus, read_totals(c.totals)))}};
}

std::vector<Artifact> proximity_artifacts(const LinkedCorpus& corpus, const RunConfig& c) {
  return {{"proximity.csv",
           render_proximity(proximity_matrix(corpus, portfolio_holders(corpus), HolderKind::country, c.class_level))}};
}

std::vector<Artifact> concentration_artifacts(const LinkedCorpus& corpus, const RunConfig& c) {
  return {{"concentration.csv", render_concentration(sector_concentration(corpus, c.q))}};
}

std::vector<Artifact> citation_artifacts(const LinkedCorpus& corpus) {
  const auto matrix = citation_matrix(corpus, default_citation_axis(corpus));
  std::string foreign = join_row({"country", "foreign_share"});
  for (const auto& code : matrix.axis) {
    const std::size_t i = matrix.index_of(code);
    foreign += join_row({code, matrix.row_sum(i) > 0.0 ? format_number(foreign_citation_share(matrix, code)) : "NA"});
  }
  return {{"citation_matrix.csv", render_citation_matrix(matrix)}, {"foreign_citation_share.csv", foreign}};
}

std::vector<Artifact> survival_artifacts(const LinkedCorpus& corpus, const RunConfig& c) {
  const auto end = parse_month(c.window_end);
  const auto lags = first_citation_lags(corpus, *end);
  const auto curves = km_by_group(lags.records, corpus.eu_members);
  std::vector<Artifact> out = {{"survival.csv", render_survival(curves)}};
  std::string summary = join_row({"group", "plateau", "subjects", "events"});
  for (const auto& [group, curve] : curves)
    summary += join_row({group, format_number(uncited_share(curve)), std::to_string(curve.subjects),
                         std::to_string(curve.events)});
  out.push_back({"survival_summary.csv", summary});
  if (!lags.invalid_families.empty()) {
    std::string invalid = join_row({"family_id"});
    for (const auto& f : lags.invalid_families) invalid += join_row({f});
    out.push_back({"survival_invalid_families.csv", invalid});
  }
  if (c.svg)
    for (const auto& [group, curve] : curves) out.push_back({"survival_" + group + ".svg", render_survival_svg(curve)});
  return out;
}

DesignOptions design_options(const RunConfig& c, int specification) {
  DesignOptions o;
  o.specification = specification;
  o.offset = c.offset;
  o.cluster = c.cluster;
  return o;
}

std::vector<Artifact> gravity_artifacts(const Panel& panel, const RunConfig& c, int specification) {
  const std::string tag = "spec" + std::to_string(specification);
  const auto opts = design_options(c, specification);
  std::vector<Artifact> out = {
      {"gravity_" + tag + ".csv", render_coefficients(fit_gravity(transform_covariates(panel.rows, opts)))}};
  if (c.heckman) {
    const auto h = heckman_two_step(panel.rows, opts);
    out.push_back({"heckman_first_stage.csv", render_first_stage(h.first_stage.names, h.first_stage.gamma, h.first_stage.se)});
    out.push_back({"heckman_" + tag + ".csv", render_coefficients(h.corrected)});
  }
  return out;
}

std::string panel_summary(const Panel& panel) {
  nlohmann::ordered_json j;
  j["rows"] = panel.rows.size();
  j["positive_rows"] = std::count_if(panel.rows.begin(), panel.rows.end(), [](const auto& o) { return o.citations > 0.0; });
  j["dropped_rows"] = panel.dropped_rows;
  j["dropped_citations"] = panel.dropped_citations;
  j["undated_citations"] = panel.undated_citations;
  j["warnings"] = panel.warnings;
  return j.dump(2) + "\n";
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << content;
  if (!out) throw DataError("failed writing " + path.string());
}

std::string read_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

bool needs_corpus(const RunConfig& c) { return c.command != "synth"; }
bool needs_panel(const RunConfig& c) {
  return c.command == "gravity" || (c.command == "report" && !c.bilateral.empty());
}

int execute(const RunConfig& c, std::ostream& log) {
  fs::create_directories(c.out);
  std::vector<Artifact> artifacts;

  if (c.command == "synth") {
    std::vector<fs::path> written;
    if (c.target == "corpus") {
      synth::CorpusSpec spec;
      spec.seed = c.seed;
      spec.n_firms = c.n_firms;
      spec.n_patents = c.n_patents;
      spec.n_classes = c.n_classes;
      written = synth::write_dataset(c.out, synth::gen_corpus(spec));
    } else {
      synth::PanelSpec spec;
      if (c.selection) spec.selection = synth::Selection{synth::default_gamma(), 0.0};
      spec.seed = c.seed;
      spec.n_countries = c.n_countries;
      spec.n_years = c.n_years;
      written = synth::write_dataset(c.out, synth::gen_panel(spec));
    }
    for (const auto& p : written) artifacts.push_back({p.filename().string(), read_bytes(p)});
    write_file(c.out / "manifest.json", render_manifest(artifacts));
    return 0;
  }

  const LinkedCorpus corpus = load(c);
  for (const auto* list : {&corpus.diagnostics, &corpus.link_diagnostics})
    for (const auto& d : *list) log << d.file << ":" << d.row << ": " << d.message << "\n";

  Panel panel;
  if (needs_panel(c)) {
    PanelOptions po;
    po.class_level = c.class_level;
    panel = build_panel(corpus, c.bilateral, c.macro, po);
    for (const auto& w : panel.warnings) log << "panel: " << w << "\n";
  }

  std::vector<Task> tasks;
  const bool all = c.command == "report";
  if (c.command == "ingest" || all) tasks.push_back([&] { return ingest_artifacts(corpus); });
  if ((c.command == "indices" && c.target == "rca") || (all && !c.totals.empty()))
    tasks.push_back([&] { return rca_artifacts(corpus, c); });
  if ((c.command == "indices" && c.target == "proximity") || all)
    tasks.push_back([&] { return proximity_artifacts(corpus, c); });
  if ((c.command == "indices" && c.target == "cr") || all)
    tasks.push_back([&] { return concentration_artifacts(corpus, c); });
  if ((c.command == "indices" && c.target == "citations") || all)
    tasks.push_back([&] { return citation_artifacts(corpus); });
  if (c.command == "survival" || all) tasks.push_back([&] { return survival_artifacts(corpus, c); });
  if (needs_panel(c)) {
    tasks.push_back([&] { return std::vector<Artifact>{{"panel_summary.json", panel_summary(panel)}}; });
    if (all) {
      // The first-stage table is shared; keep it from the first specification only.
      for (int s = 1; s <= 4; ++s)
        tasks.push_back([&, s] {
          auto out = gravity_artifacts(panel, c, s);
          if (s > 1) std::erase_if(out, [](const Artifact& a) { return a.name == "heckman_first_stage.csv"; });
          return out;
        });
    } else {
      tasks.push_back([&] { return gravity_artifacts(panel, c, c.specification); });
    }
  }

  const auto outcomes = run_tasks(tasks, c.threads);
  int status = 0;
  for (const auto& o : outcomes) {
    if (o.error) {
      try {
        std::rethrow_exception(o.error);
      } catch (const std::exception& e) {
        log << "error: " << e.what() << "\n";
      }
      status = 1;
      continue;
    }
    for (const auto& a : o.artifacts) {
      write_file(c.out / a.name, a.content);
      artifacts.push_back(a);
    }
  }
  write_file(c.out / "manifest.json", render_manifest(artifacts));
  return status;
}

}  // namespace

void validate(const RunConfig& c) {
  static const std::set<std::string> commands = {"ingest", "indices", "survival", "gravity", "synth", "report"};
  if (!commands.count(c.command)) throw UsageError("unknown subcommand '" + c.command + "'");
  if (c.command == "indices") {
    static const std::set<std::string> targets = {"rca", "proximity", "cr", "citations"};
    if (!targets.count(c.target)) throw UsageError("indices needs one of rca, proximity, cr, citations");
  } else if (c.command == "synth") {
    if (c.target != "corpus" && c.target != "panel") throw UsageError("synth needs corpus or panel");
  } else if (!c.target.empty()) {
    throw UsageError(c.command + " takes no target, got '" + c.target + "'");
  }
  if (c.out.empty()) throw UsageError("--out must not be empty");
  if (c.class_level < 1 || c.class_level > 4) throw UsageError("--class-level must lie in 1..4");
  if (c.q < 1) throw UsageError("--q must be at least 1");
  if (!(c.offset > 0.0)) throw UsageError("--offset must be positive");
  if (c.specification < 1 || c.specification > 4) throw UsageError("--spec must be 1, 2, 3 or 4");
  if (c.threads < 1) throw UsageError("--threads must be at least 1");
  if (!parse_month(c.window_end)) throw UsageError("--window-end must be YYYY-MM");
  if (c.heckman && c.command != "gravity" && c.command != "report")
    throw UsageError("--heckman applies to gravity and report only");
  if (c.svg && c.command != "survival" && c.command != "report")
    throw UsageError("--svg applies to survival and report only");
  if (c.selection && !(c.command == "synth" && c.target == "panel"))
    throw UsageError("--selection applies to synth panel only");

  if (needs_corpus(c)) {
    require_file(c.patents, "--patents");
    require_file(c.applicants, "--applicants");
    require_file(c.citations, "--citations");
    if (!c.eu_members.empty()) require_file(c.eu_members, "--eu-members");
  }
  if (c.command == "gravity") {
    require_file(c.bilateral, "--bilateral");
    require_file(c.macro, "--macro");
  }
  if (c.command == "report" && (c.bilateral.empty() != c.macro.empty()))
    throw UsageError("report needs both --bilateral and --macro, or neither");
  if (c.command == "report" && !c.bilateral.empty()) {
    require_file(c.bilateral, "--bilateral");
    require_file(c.macro, "--macro");
  }
  if (c.command == "report" && c.heckman && c.bilateral.empty())
    throw UsageError("--heckman needs --bilateral and --macro");
  if (c.command == "indices" && c.target == "rca") require_file(c.totals, "--totals");
  if (c.command == "report" && !c.totals.empty()) require_file(c.totals, "--totals");
}

int run_pipeline(const RunConfig& config, std::ostream& log) {
  try {
    validate(config);
    return execute(config, log);
  } catch (const UsageError& e) {
    log << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
    return 1;
  }
}

// ---- renderers ---------------------------------------------------------------

std::string render_coefficients(const FitResult& fit) {
  std::string out = join_row({"name", "estimate", "cluster_se", "stars"});
  for (std::size_t k = 0; k < fit.names.size(); ++k) {
    if (is_fixed_effect(fit.names[k])) continue;
    const auto i = static_cast<Eigen::Index>(k);
    out += join_row({fit.names[k], format_number(fit.coefficients[i]), format_number(fit.se[i]),
                     significance_stars(fit.coefficients[i], fit.se[i])});
  }
  out += join_row({"pseudo_r2", fit.pseudo_r2 ? format_number(*fit.pseudo_r2) : "NA", "", ""});
  out += join_row({"N", std::to_string(fit.n_obs), "", ""});
  out += join_row({"clusters", std::to_string(fit.clusters), "", ""});
  return out;
}

std::string render_first_stage(const std::vector<std::string>& names, const Eigen::VectorXd& gamma,
                               const Eigen::VectorXd& se) {
  std::string out = join_row({"name", "estimate", "se", "stars"});
  for (std::size_t k = 0; k < names.size(); ++k) {
    if (is_fixed_effect(names[k])) continue;
    const auto i = static_cast<Eigen::Index>(k);
    out += join_row({names[k], format_number(gamma[i]), format_number(se[i]), significance_stars(gamma[i], se[i])});
  }
  return out;
}

std::string render_rca(const RcaTable& table) {
  std::string out = join_row({"country", "ai_count", "total_count", "share", "rca"});
  for (const auto& r : table.rows)
    out += join_row({r.country, format_number(r.ai_count), format_number(r.total_count), format_number(r.share),
                     format_number(r.rca)});
  out += join_row({"WORLD", format_number(table.world.ai_count), format_number(table.world.total_count),
                   format_number(table.world.ai_count / table.world.total_count), "1"});
  return out;
}

std::string render_proximity(const ProximityMatrix& m) {
  csv::Row header = {"holder"};
  header.insert(header.end(), m.holders.begin(), m.holders.end());
  std::string out = join_row(header);
  for (std::size_t i = 0; i < m.holders.size(); ++i) {
    csv::Row row = {m.holders[i]};
    for (double v : m.values[i]) row.push_back(format_number(v));
    out += join_row(row);
  }
  return out;
}

std::string render_concentration(const std::vector<SectorConcentration>& sectors) {
  std::string out = join_row({"sector", "n_firms", "total", "cr"});
  for (const auto& s : sectors)
    out += join_row({s.sector, std::to_string(s.per_firm.size()), format_number(s.total), format_number(s.cr)});
  return out;
}

std::string render_citation_matrix(const CitationMatrix& m) {
  std::string out = join_row({"citing", "cited", "count"});
  for (std::size_t i = 0; i < m.axis.size(); ++i)
    for (std::size_t j = 0; j < m.axis.size(); ++j)
      out += join_row({m.axis[i], m.axis[j], format_number(m.counts[i][j])});
  return out;
}

std::string render_survival(const std::map<std::string, SurvivalCurve>& curves) {
  std::string out = join_row({"group", "t_months", "d", "n", "s"});
  for (const auto& [group, curve] : curves)
    for (const auto& s : curve.steps)
      out += join_row({group, std::to_string(s.t), std::to_string(s.d), std::to_string(s.n), format_number(s.s)});
  return out;
}

std::string render_survival_svg(const SurvivalCurve& curve) {
  constexpr double width = 640, height = 400, left = 70, right = 20, top = 40, bottom = 60;
  const double pw = width - left - right, ph = height - top - bottom;
  int t_max = 12;
  for (const auto& s : curve.steps) t_max = std::max(t_max, s.t);
  t_max = (t_max + 11) / 12 * 12;
  auto x = [&](double t) { return left + pw * t / t_max; };
  auto y = [&](double s) { return top + ph * (1.0 - s); };
  auto num = [](double v) { return format_number(v); };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(width) << "\" height=\"" << num(height)
      << "\" viewBox=\"0 0 " << num(width) << " " << num(height) << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << num(width / 2) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">Time to first citation: "
      << curve.group << "</text>\n";
  svg << "<line x1=\"" << num(left) << "\" y1=\"" << num(top + ph) << "\" x2=\"" << num(left + pw) << "\" y2=\""
      << num(top + ph) << "\" stroke=\"black\"/>\n";
  svg << "<line x1=\"" << num(left) << "\" y1=\"" << num(top) << "\" x2=\"" << num(left) << "\" y2=\"" << num(top + ph)
      << "\" stroke=\"black\"/>\n";
  for (int t = 0; t <= t_max; t += std::max(12, t_max / 6 / 12 * 12)) {
    svg << "<text x=\"" << num(x(t)) << "\" y=\"" << num(top + ph + 18) << "\" text-anchor=\"middle\" font-size=\"11\">"
        << t << "</text>\n";
  }
  for (int k = 0; k <= 4; ++k) {
    const double s = k / 4.0;
    svg << "<text x=\"" << num(left - 8) << "\" y=\"" << num(y(s) + 4) << "\" text-anchor=\"end\" font-size=\"11\">"
        << num(s) << "</text>\n";
  }
  svg << "<text x=\"" << num(left + pw / 2) << "\" y=\"" << num(height - 15)
      << "\" text-anchor=\"middle\" font-size=\"13\">Months since earliest publication</text>\n";
  svg << "<text transform=\"translate(18," << num(top + ph / 2)
      << ") rotate(-90)\" text-anchor=\"middle\" font-size=\"13\">Survival probability</text>\n";

  std::string path = "M" + num(x(0)) + "," + num(y(1.0));
  double s_prev = 1.0;
  for (const auto& st : curve.steps) {
    path += " H" + num(x(st.t)) + " V" + num(y(st.s));
    s_prev = st.s;
  }
  path += " H" + num(x(t_max));
  svg << "<path d=\"" << path << "\" fill=\"none\" stroke=\"#1f4e9c\" stroke-width=\"2\"/>\n";
  svg << "<text x=\"" << num(left + pw - 4) << "\" y=\"" << num(y(s_prev) - 6)
      << "\" text-anchor=\"end\" font-size=\"11\">plateau " << num(s_prev) << "</text>\n";
  svg << "</svg>\n";
  return svg.str();
}

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (!EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr))
    throw DataError("SHA-256 computation failed");
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 15]);
  }
  return out;
}

std::string render_manifest(const std::vector<Artifact>& artifacts) {
  std::vector<const Artifact*> sorted;
  for (const auto& a : artifacts) sorted.push_back(&a);
  std::sort(sorted.begin(), sorted.end(), [](const Artifact* a, const Artifact* b) { return a->name < b->name; });
  nlohmann::ordered_json j;
  j["artifacts"] = nlohmann::ordered_json::array();
  for (const auto* a : sorted)
    j["artifacts"].push_back({{"path", a->name}, {"bytes", a->content.size()}, {"sha256", sha256_hex(a->content)}});
  return j.dump(2) + "\n";
}

}  // namespace patscape::cli
