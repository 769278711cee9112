#pragma once

#include <chrono>
#include <compare>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>

namespace charforge {

// Calendar date with day resolution.
struct Date {
  int year = 1970;
  unsigned month = 1;
  unsigned day = 1;

  auto operator<=>(const Date&) const = default;

  std::string str() const {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", year, month, day);
    return buf;
  }

  // Accepts "YYYY-MM-DD", optionally followed by a time part introduced by
  // 'T' or ' '. Partial dates ("2015", "2015-03") are rejected, never guessed.
  static std::optional<Date> parse(std::string_view s) {
    if (s.size() > 10) {
      if (s[10] != 'T' && s[10] != ' ') return std::nullopt;
      s = s.substr(0, 10);
    }
    if (s.size() != 10 || s[4] != '-' || s[7] != '-') return std::nullopt;
    auto digits = [&](size_t pos, size_t n, int& out) {
      out = 0;
      for (size_t i = pos; i < pos + n; ++i) {
        if (s[i] < '0' || s[i] > '9') return false;
        out = out * 10 + (s[i] - '0');
      }
      return true;
    };
    int y, m, d;
    if (!digits(0, 4, y) || !digits(5, 2, m) || !digits(8, 2, d)) {
      return std::nullopt;
    }
    std::chrono::year_month_day ymd{std::chrono::year{y},
                                    std::chrono::month{static_cast<unsigned>(m)},
                                    std::chrono::day{static_cast<unsigned>(d)}};
    if (!ymd.ok()) return std::nullopt;
    return Date{y, static_cast<unsigned>(m), static_cast<unsigned>(d)};
  }
};

// Closed interval [from, to].
struct DateRange {
  Date from;
  Date to;

  bool contains(const Date& d) const { return from <= d && d <= to; }
  bool valid() const { return from <= to; }
};

}  // namespace charforge
