#pragma once

#include <compare>
#include <optional>
#include <string>
#include <string_view>

namespace patscape {

struct Date {
  int year = 0;
  int month = 0;
  int day = 0;

  auto operator<=>(const Date&) const = default;
};

// Calendar month as a single ordinal (year * 12 + month - 1).
struct Month {
  int ordinal = 0;

  static Month of(int year, int month) { return Month{year * 12 + month - 1}; }
  static Month of(const Date& d) { return of(d.year, d.month); }
  int year() const { return ordinal / 12; }
  int month() const { return ordinal % 12 + 1; }

  auto operator<=>(const Month&) const = default;
};

inline int months_between(Month from, Month to) { return to.ordinal - from.ordinal; }

// ISO-8601 calendar date YYYY-MM-DD; nullopt on any malformed or impossible date.
std::optional<Date> parse_date(std::string_view text);
// YYYY-MM, or a full date truncated to its month.
std::optional<Month> parse_month(std::string_view text);

std::string to_string(const Date& d);
std::string to_string(Month m);

}  // namespace patscape
