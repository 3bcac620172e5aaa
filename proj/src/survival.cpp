#include "patscape/survival.hpp"

#include <algorithm>
#include <optional>
#include <unordered_map>

#include "patscape/countries.hpp"
#include "patscape/error.hpp"

namespace patscape {
namespace {

// Heaviest attributed country; ties go to the smaller code.
std::string dominant_country(const WeightMap& weights) {
  std::string best;
  double best_w = 0.0;
  for (const auto& [code, w] : weights) {
    if (w > best_w) {
      best = code;
      best_w = w;
    }
  }
  return best.empty() ? std::string(kUnlinkedGroup) : best;
}

}  // namespace

LagExtraction first_citation_lags(const LinkedCorpus& corpus, Month window_end, LagOrigin origin) {
  if (!corpus.linked) throw DataError("corpus must be linked first");

  std::unordered_map<std::string, Month> first_cited;
  for (const auto& e : corpus.citations) {
    if (!e.citation_date) continue;
    const Month m = Month::of(*e.citation_date);
    auto [it, inserted] = first_cited.emplace(e.cited_family, m);
    if (!inserted && m < it->second) it->second = m;
  }

  LagExtraction out;
  for (const auto& f : corpus.families) {
    const Month start = Month::of(origin == LagOrigin::grant ? f.grant_date : f.earliest_pub_date);
    if (start > window_end) {
      throw DataError("window end " + to_string(window_end) + " precedes the origin month " + to_string(start) +
                      " of family " + f.family_id);
    }
    LagRecord rec;
    rec.family_id = f.family_id;
    rec.group = dominant_country(f.country);
    auto it = first_cited.find(f.family_id);
    if (it != first_cited.end() && it->second <= window_end) {
      rec.duration = months_between(start, it->second);
      rec.event = true;
      if (rec.duration < 0) {
        out.invalid_families.push_back(f.family_id);
        continue;
      }
    } else {
      rec.duration = months_between(start, window_end);
      rec.event = false;
    }
    out.records.push_back(std::move(rec));
  }
  return out;
}

double SurvivalCurve::at(int t) const {
  double s = 1.0;
  for (const auto& step : steps) {
    if (step.t > t) break;
    s = step.s;
  }
  return s;
}

SurvivalCurve km_estimate(std::span<const LagRecord> lags, std::string group) {
  if (lags.empty()) throw DataError("Kaplan-Meier estimate of an empty sample");

  std::vector<std::pair<int, bool>> sorted;
  sorted.reserve(lags.size());
  for (const auto& l : lags) {
    if (l.duration < 0) throw DataError("negative duration for family " + l.family_id);
    sorted.emplace_back(l.duration, l.event);
  }
  std::sort(sorted.begin(), sorted.end());

  SurvivalCurve curve;
  curve.group = std::move(group);
  curve.subjects = lags.size();
  std::size_t at_risk = sorted.size();
  double s = 1.0;
  for (std::size_t i = 0; i < sorted.size();) {
    const int t = sorted[i].first;
    std::size_t deaths = 0;
    std::size_t leaving = 0;
    for (; i < sorted.size() && sorted[i].first == t; ++i) {
      deaths += sorted[i].second;
      ++leaving;
    }
    if (deaths > 0) {
      s *= 1.0 - static_cast<double>(deaths) / static_cast<double>(at_risk);
      curve.steps.push_back({t, deaths, at_risk, s});
      curve.events += deaths;
    }
    at_risk -= leaving;
  }
  curve.plateau = s;
  return curve;
}

std::map<std::string, SurvivalCurve> km_by_group(std::span<const LagRecord> lags,
                                                 const std::set<std::string>& eu_members) {
  std::map<std::string, std::vector<LagRecord>> groups;
  for (const auto& l : lags) {
    groups[l.group].push_back(l);
    if (eu_members.count(l.group)) groups[std::string(countries::kEu)].push_back(l);
  }
  std::map<std::string, SurvivalCurve> out;
  for (const auto& [g, members] : groups) out.emplace(g, km_estimate(members, g));
  return out;
}

double uncited_share(const SurvivalCurve& curve) { return curve.plateau; }

}  // namespace patscape
