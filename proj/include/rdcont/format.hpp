// format.hpp: locale-independent number formatting and parsing.
#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace rdcont {

/// Shortest-general formatting with `digits` significant digits ("%.12g").
std::string format_number(double value, int digits = 12);

/// Parses a full token as a double with '.' as the only decimal separator.
/// Leading/trailing blanks are ignored; anything else left over fails.
std::optional<double> parse_number(std::string_view token);

}  // namespace rdcont
