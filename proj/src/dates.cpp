#include "patscape/dates.hpp"

#include <charconv>
#include <cstdio>

namespace patscape {
namespace {

std::optional<int> parse_int(std::string_view s, std::size_t width) {
  if (s.size() != width) return std::nullopt;
  int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

bool leap(int y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

int days_in_month(int y, int m) {
  static constexpr int kDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  return m == 2 && leap(y) ? 29 : kDays[m - 1];
}

}  // namespace

std::optional<Date> parse_date(std::string_view text) {
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
  auto y = parse_int(text.substr(0, 4), 4);
  auto m = parse_int(text.substr(5, 2), 2);
  auto d = parse_int(text.substr(8, 2), 2);
  if (!y || !m || !d || *m < 1 || *m > 12 || *d < 1 || *d > days_in_month(*y, *m)) return std::nullopt;
  return Date{*y, *m, *d};
}

std::optional<Month> parse_month(std::string_view text) {
  if (text.size() == 10) {
    auto d = parse_date(text);
    if (!d) return std::nullopt;
    return Month::of(*d);
  }
  if (text.size() != 7 || text[4] != '-') return std::nullopt;
  auto y = parse_int(text.substr(0, 4), 4);
  auto m = parse_int(text.substr(5, 2), 2);
  if (!y || !m || *m < 1 || *m > 12) return std::nullopt;
  return Month::of(*y, *m);
}

std::string to_string(const Date& d) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", d.year, d.month, d.day);
  return buf;
}

std::string to_string(Month m) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02d", m.year(), m.month());
  return buf;
}

}  // namespace patscape
