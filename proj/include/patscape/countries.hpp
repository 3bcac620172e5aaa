#pragma once

#include <set>
#include <string>
#include <string_view>

namespace patscape::countries {

// Pseudo-country holding the union of the configured EU members.
inline constexpr std::string_view kEu = "EU";

// ISO-3166-1 alpha-2 code (upper case).
bool is_iso(std::string_view code);
// Supranational applicant codes (EP, WO, ...). Passed through untranslated.
bool is_supranational(std::string_view code);
// ISO or supranational; "EU" is not a registry entry.
bool is_recognized(std::string_view code);

// Static EU-27 membership.
const std::set<std::string>& eu27();

// Reads a member list: codes separated by commas, whitespace or newlines.
// Throws DataError for codes outside the ISO registry.
std::set<std::string> read_member_list(const std::string& path);
std::set<std::string> parse_member_list(std::string_view text);

}  // namespace patscape::countries
