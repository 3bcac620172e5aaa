#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "patscape/error.hpp"
#include "patscape/gravity.hpp"

namespace patscape {
namespace {

std::string row_key(const DyadObservation& o) { return o.origin + "|" + o.dest + "|" + std::to_string(o.year); }

struct Regressor {
  const char* name;
  bool logged;
  double (*get)(const DyadObservation&);
};

// Every gravity regressor, in table order.
const std::vector<Regressor>& regressor_catalog() {
  static const std::vector<Regressor> catalog = {
      {"ln_distance", true, [](const DyadObservation& o) { return o.distance_km; }},
      {"common_language", false, [](const DyadObservation& o) { return double(o.common_language); }},
      {"common_legal", false, [](const DyadObservation& o) { return double(o.common_legal); }},
      {"common_religion", false, [](const DyadObservation& o) { return o.common_religion; }},
      {"colonial", false, [](const DyadObservation& o) { return double(o.colonial); }},
      {"contiguous", false, [](const DyadObservation& o) { return double(o.contiguous); }},
      {"rta", false, [](const DyadObservation& o) { return double(o.rta); }},
      {"ln_gdp_i", true, [](const DyadObservation& o) { return o.gdp_i; }},
      {"ln_gdp_j", true, [](const DyadObservation& o) { return o.gdp_j; }},
      {"ln_gdp_pc_i", true, [](const DyadObservation& o) { return o.gdp_pc_i; }},
      {"ln_gdp_pc_j", true, [](const DyadObservation& o) { return o.gdp_pc_j; }},
      {"rd_share_i", false, [](const DyadObservation& o) { return o.rd_share_i; }},
      {"rd_share_j", false, [](const DyadObservation& o) { return o.rd_share_j; }},
      {"ln_ai_patents_i", true, [](const DyadObservation& o) { return o.ai_patents_i; }},
      {"ln_ai_patents_j", true, [](const DyadObservation& o) { return o.ai_patents_j; }},
      {"proximity", false, [](const DyadObservation& o) { return o.proximity; }},
      {"eu_i", false, [](const DyadObservation& o) { return double(o.eu_i); }},
      {"eu_j", false, [](const DyadObservation& o) { return double(o.eu_j); }},
      {"eu_ij", false, [](const DyadObservation& o) { return double(o.eu_ij); }},
  };
  return catalog;
}

// Number of catalog entries used by each specification.
std::size_t regressor_count(int specification) {
  switch (specification) {
    case 1: return 7;
    case 2: return 13;
    case 3: return 16;
    case 4: return 19;
    default: throw DataError("specification must be 1, 2, 3 or 4; got " + std::to_string(specification));
  }
}

}  // namespace

std::optional<std::size_t> DesignMatrix::column(const std::string& name) const {
  auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) return std::nullopt;
  return static_cast<std::size_t>(it - names.begin());
}

DesignBuilder::DesignBuilder(std::span<const DyadObservation> rows, double offset, ClusterOrientation orientation)
    : rows_(rows), offset_(offset), orientation_(orientation) {
  if (!(offset > 0.0)) throw DataError("log offset must be positive");
  y_.reserve(rows.size());
  for (const auto& o : rows) y_.push_back(o.citations);
}

DesignBuilder& DesignBuilder::intercept() {
  columns_.emplace_back("const", std::vector<double>(rows_.size(), 1.0));
  return *this;
}

DesignBuilder& DesignBuilder::level(std::string name, Getter get) {
  std::vector<double> col;
  col.reserve(rows_.size());
  for (const auto& o : rows_) col.push_back(get(o));
  columns_.emplace_back(std::move(name), std::move(col));
  return *this;
}

DesignBuilder& DesignBuilder::log(std::string name, Getter get) {
  std::vector<double> col;
  col.reserve(rows_.size());
  for (const auto& o : rows_) {
    const double v = get(o);
    if (v < 0.0 || std::isnan(v))
      throw DataError("negative value " + std::to_string(v) + " in column " + name + " at row " + row_key(o));
    col.push_back(std::log(v + offset_));
  }
  columns_.emplace_back(std::move(name), std::move(col));
  return *this;
}

DesignBuilder& DesignBuilder::values(std::string name, std::vector<double> column) {
  if (column.size() != rows_.size()) throw DataError("column " + name + " has the wrong length");
  columns_.emplace_back(std::move(name), std::move(column));
  return *this;
}

DesignBuilder& DesignBuilder::fixed_effects(const std::string& prefix, KeyGetter key) {
  std::set<std::string> categories;
  for (const auto& o : rows_) categories.insert(key(o));
  if (categories.size() < 2) return *this;
  // The alphabetically first category is the reference.
  for (auto it = std::next(categories.begin()); it != categories.end(); ++it) {
    std::vector<double> col;
    col.reserve(rows_.size());
    for (const auto& o : rows_) col.push_back(key(o) == *it ? 1.0 : 0.0);
    columns_.emplace_back(prefix + *it, std::move(col));
  }
  return *this;
}

DesignBuilder& DesignBuilder::response(Getter get) {
  y_.clear();
  for (const auto& o : rows_) y_.push_back(get(o));
  return *this;
}

DesignMatrix DesignBuilder::build() const {
  DesignMatrix d;
  d.offset = offset_;
  const auto n = static_cast<Eigen::Index>(rows_.size());
  d.y = Eigen::Map<const Eigen::VectorXd>(y_.data(), n);

  std::vector<const std::pair<std::string, std::vector<double>>*> kept;
  for (const auto& col : columns_) {
    const auto& v = col.second;
    const bool constant = std::all_of(v.begin(), v.end(), [&](double x) { return x == v.front(); });
    if (constant && col.first != "const") {
      d.warnings.push_back("dropped constant column " + col.first);
      continue;
    }
    kept.push_back(&col);
  }
  d.x.resize(n, static_cast<Eigen::Index>(kept.size()));
  for (std::size_t k = 0; k < kept.size(); ++k) {
    d.names.push_back(kept[k]->first);
    d.x.col(static_cast<Eigen::Index>(k)) = Eigen::Map<const Eigen::VectorXd>(kept[k]->second.data(), n);
  }

  std::vector<std::string> labels;
  labels.reserve(rows_.size());
  for (const auto& o : rows_) {
    d.row_keys.push_back(row_key(o));
    if (orientation_ == ClusterOrientation::unordered && o.dest < o.origin) labels.push_back(o.dest + "|" + o.origin);
    else labels.push_back(o.origin + "|" + o.dest);
  }
  std::set<std::string> distinct(labels.begin(), labels.end());
  d.cluster_labels.assign(distinct.begin(), distinct.end());
  std::map<std::string, int> id;
  for (std::size_t g = 0; g < d.cluster_labels.size(); ++g) id[d.cluster_labels[g]] = static_cast<int>(g);
  for (const auto& l : labels) d.cluster.push_back(id[l]);
  return d;
}

std::vector<std::string> specification_regressors(int specification) {
  const std::size_t count = regressor_count(specification);
  std::vector<std::string> names;
  for (std::size_t k = 0; k < count; ++k) names.emplace_back(regressor_catalog()[k].name);
  return names;
}

bool specification_has_country_effects(int specification) {
  regressor_count(specification);
  return specification == 1;
}

DesignMatrix transform_covariates(std::span<const DyadObservation> panel, const DesignOptions& options,
                                  const std::vector<std::pair<std::string, std::vector<double>>>& extra) {
  if (panel.empty()) throw DataError("empty panel");
  DesignBuilder b(panel, options.offset, options.cluster);
  const std::size_t count = regressor_count(options.specification);
  for (std::size_t k = 0; k < count; ++k) {
    const auto& r = regressor_catalog()[k];
    if (r.logged) b.log(r.name, r.get);
    else b.level(r.name, r.get);
  }
  for (const auto& [name, column] : extra) b.values(name, column);
  b.intercept();
  b.fixed_effects("year_", [](const DyadObservation& o) { return std::to_string(o.year); });
  if (specification_has_country_effects(options.specification)) {
    b.fixed_effects("origin_", [](const DyadObservation& o) { return o.origin; });
    b.fixed_effects("dest_", [](const DyadObservation& o) { return o.dest; });
  }
  return b.build();
}

}  // namespace patscape
