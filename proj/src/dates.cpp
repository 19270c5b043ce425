#include "fsl/dates.hpp"

#include <array>
#include <cctype>
#include <cstdio>

namespace fsl {

Date parse_date(const std::string& s) {
  if (s.size() != 10 || s[4] != '-' || s[7] != '-')
    throw Error("malformed date (want YYYY-MM-DD): '" + s + "'");
  for (size_t i : {0u, 1u, 2u, 3u, 5u, 6u, 8u, 9u})
    if (!std::isdigit(static_cast<unsigned char>(s[i])))
      throw Error("malformed date (want YYYY-MM-DD): '" + s + "'");
  int y = std::stoi(s.substr(0, 4));
  int m = std::stoi(s.substr(5, 2));
  int d = std::stoi(s.substr(8, 2));
  static constexpr std::array<int, 13> dim = {0, 31, 29, 31, 30, 31, 30,
                                              31, 31, 30, 31, 30, 31};
  if (m < 1 || m > 12 || d < 1 || d > dim[m])
    throw Error("date out of range: '" + s + "'");
  return Date(y * 10000 + m * 100 + d);
}

std::string to_string(Date d) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", d.year(), d.month(),
                d.day());
  return buf;
}

}  // namespace fsl
