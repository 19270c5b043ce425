#pragma once

#include <cstdint>
#include <string>

#include "fsl/common.hpp"

namespace fsl {

// Calendar date stored as yyyymmdd. Ordering is the natural integer order.
struct Date {
  int32_t ymd = 0;

  Date() = default;
  explicit Date(int32_t v) : ymd(v) {}

  int year() const { return ymd / 10000; }
  int month() const { return (ymd / 100) % 100; }
  int day() const { return ymd % 100; }
  // Months since year 0; adjacent months differ by exactly 1.
  int month_key() const { return year() * 12 + month() - 1; }

  auto operator<=>(const Date&) const = default;
};

// Parses strict ISO-8601 (YYYY-MM-DD). Throws Error on malformed input.
Date parse_date(const std::string& s);

std::string to_string(Date d);

}  // namespace fsl
