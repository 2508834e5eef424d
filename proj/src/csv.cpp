#include "banditq/csv.hpp"

#include <charconv>
#include <cmath>

#include "banditq/core.hpp"

namespace banditq::csv {

std::string format_real(double v) {
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

double parse_real(std::string_view field) {
  double v = 0.0;
  auto res = std::from_chars(field.data(), field.data() + field.size(), v);
  if (res.ec != std::errc() || res.ptr != field.data() + field.size()) {
    throw Error(ErrorCode::Parse, "not a real number: '" + std::string(field) + "'");
  }
  return v;
}

unsigned long long parse_uint(std::string_view field) {
  unsigned long long v = 0;
  auto res = std::from_chars(field.data(), field.data() + field.size(), v);
  if (res.ec != std::errc() || res.ptr != field.data() + field.size()) {
    throw Error(ErrorCode::Parse, "not an unsigned integer: '" + std::string(field) + "'");
  }
  return v;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return out;
}

std::string_view chomp(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

}  // namespace banditq::csv
