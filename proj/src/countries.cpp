#include "patscape/countries.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>
#include <sstream>

#include "patscape/error.hpp"

namespace patscape::countries {
namespace {

// Sorted for binary search.
constexpr std::array<std::string_view, 249> kIso = {
    "AD", "AE", "AF", "AG", "AI", "AL", "AM", "AO", "AQ", "AR", "AS", "AT", "AU", "AW", "AX", "AZ",
    "BA", "BB", "BD", "BE", "BF", "BG", "BH", "BI", "BJ", "BL", "BM", "BN", "BO", "BQ", "BR", "BS",
    "BT", "BV", "BW", "BY", "BZ", "CA", "CC", "CD", "CF", "CG", "CH", "CI", "CK", "CL", "CM", "CN",
    "CO", "CR", "CU", "CV", "CW", "CX", "CY", "CZ", "DE", "DJ", "DK", "DM", "DO", "DZ", "EC", "EE",
    "EG", "EH", "ER", "ES", "ET", "FI", "FJ", "FK", "FM", "FO", "FR", "GA", "GB", "GD", "GE", "GF",
    "GG", "GH", "GI", "GL", "GM", "GN", "GP", "GQ", "GR", "GS", "GT", "GU", "GW", "GY", "HK", "HM",
    "HN", "HR", "HT", "HU", "ID", "IE", "IL", "IM", "IN", "IO", "IQ", "IR", "IS", "IT", "JE", "JM",
    "JO", "JP", "KE", "KG", "KH", "KI", "KM", "KN", "KP", "KR", "KW", "KY", "KZ", "LA", "LB", "LC",
    "LI", "LK", "LR", "LS", "LT", "LU", "LV", "LY", "MA", "MC", "MD", "ME", "MF", "MG", "MH", "MK",
    "ML", "MM", "MN", "MO", "MP", "MQ", "MR", "MS", "MT", "MU", "MV", "MW", "MX", "MY", "MZ", "NA",
    "NC", "NE", "NF", "NG", "NI", "NL", "NO", "NP", "NR", "NU", "NZ", "OM", "PA", "PE", "PF", "PG",
    "PH", "PK", "PL", "PM", "PN", "PR", "PS", "PT", "PW", "PY", "QA", "RE", "RO", "RS", "RU", "RW",
    "SA", "SB", "SC", "SD", "SE", "SG", "SH", "SI", "SJ", "SK", "SL", "SM", "SN", "SO", "SR", "SS",
    "ST", "SV", "SX", "SY", "SZ", "TC", "TD", "TF", "TG", "TH", "TJ", "TK", "TL", "TM", "TN", "TO",
    "TR", "TT", "TV", "TW", "TZ", "UA", "UG", "UM", "US", "UY", "UZ", "VA", "VC", "VE", "VG", "VI",
    "VN", "VU", "WF", "WS", "YE", "YT", "ZA", "ZM", "ZW"};

constexpr std::array<std::string_view, 7> kSupranational = {"AP", "EA", "EM", "EP", "GC", "OA", "WO"};

}  // namespace

bool is_iso(std::string_view code) { return std::binary_search(kIso.begin(), kIso.end(), code); }

bool is_supranational(std::string_view code) {
  return std::find(kSupranational.begin(), kSupranational.end(), code) != kSupranational.end();
}

bool is_recognized(std::string_view code) { return is_iso(code) || is_supranational(code); }

const std::set<std::string>& eu27() {
  static const std::set<std::string> members = {"AT", "BE", "BG", "CY", "CZ", "DE", "DK", "EE", "ES",
                                                "FI", "FR", "GR", "HR", "HU", "IE", "IT", "LT", "LU",
                                                "LV", "MT", "NL", "PL", "PT", "RO", "SE", "SI", "SK"};
  return members;
}

std::set<std::string> parse_member_list(std::string_view text) {
  std::set<std::string> out;
  std::string token;
  auto flush = [&] {
    if (token.empty()) return;
    if (!is_iso(token)) throw DataError("EU member code not in registry: " + token);
    out.insert(token);
    token.clear();
  };
  for (char c : text) {
    if (c == ',' || std::isspace(static_cast<unsigned char>(c))) {
      flush();
    } else {
      token.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
    }
  }
  flush();
  if (out.empty()) throw DataError("EU member list is empty");
  return out;
}

std::set<std::string> read_member_list(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read EU member list: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_member_list(buf.str());
}

}  // namespace patscape::countries
