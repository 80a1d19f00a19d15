#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace posauth {

/// Shortest decimal text that parses back to the identical double.
std::string format_double(double value);

/// Strict full-string parse; throws InvalidArgument on trailing garbage.
double parse_double(std::string_view text);

std::vector<std::string_view> split(std::string_view line, char sep);

std::string_view trim(std::string_view s);

}  // namespace posauth
