#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace banditq::csv {

// 17 significant digits, locale-independent; parses back to the same double.
std::string format_real(double v);

double parse_real(std::string_view field);
unsigned long long parse_uint(std::string_view field);

std::vector<std::string_view> split(std::string_view line);

// Strips a trailing '\r'.
std::string_view chomp(std::string_view line);

}  // namespace banditq::csv
