#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace fast::url {

/// Decodes %XX escapes; '+' is left alone. Malformed escapes are kept
/// verbatim.
std::string percent_decode(std::string_view text);

std::string percent_encode(std::string_view text);

/// Splits "k=v&k2=v2" into decoded pairs, keeping order. Pairs without '='
/// get an empty value.
/// `plus_as_space` applies form-body rules, where '+' encodes a space.
std::vector<std::pair<std::string, std::string>> parse_query(std::string_view query, bool plus_as_space = false);

std::string_view trim(std::string_view s) noexcept;

}  // namespace fast::url
