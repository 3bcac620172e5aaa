#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "patscape/corpus.hpp"
#include "patscape/dates.hpp"

namespace patscape {

// Time origin for first-citation lags.
enum class LagOrigin { publication, grant };

struct LagRecord {
  std::string family_id;
  std::string group;
  int duration = 0;    // whole months
  bool event = false;  // false: censored at window end
};

struct LagExtraction {
  std::vector<LagRecord> records;            // one per valid family, family_id order
  std::vector<std::string> invalid_families;  // first citation predates the origin
};

inline constexpr const char* kUnlinkedGroup = "UNLINKED";

// Families whose first citation falls after `window_end` are censored there.
LagExtraction first_citation_lags(const LinkedCorpus& corpus, Month window_end,
                                  LagOrigin origin = LagOrigin::publication);

struct SurvivalStep {
  int t = 0;
  std::size_t d = 0;  // events at t
  std::size_t n = 0;  // at risk just before t
  double s = 1.0;
};

struct SurvivalCurve {
  std::string group;
  std::vector<SurvivalStep> steps;
  double plateau = 1.0;
  std::size_t subjects = 0;
  std::size_t events = 0;

  // Right-continuous step function value at month t.
  double at(int t) const;
};

// Product-limit estimate; censored subjects leave the risk set without a step.
SurvivalCurve km_estimate(std::span<const LagRecord> lags, std::string group = {});

// One curve per distinct group, in group order. When `eu_members` is non-empty an
// extra "EU" curve pools the member groups.
std::map<std::string, SurvivalCurve> km_by_group(std::span<const LagRecord> lags,
                                                 const std::set<std::string>& eu_members = {});

double uncited_share(const SurvivalCurve& curve);

}  // namespace patscape
