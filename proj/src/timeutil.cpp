#include "sentidrop/timeutil.hpp"

#include <array>
#include <cstdio>

#include "sentidrop/error.hpp"

namespace sentidrop::timeutil {

namespace {

bool parse_digits(std::string_view s, size_t offset, size_t len, int& out) {
  if (offset + len > s.size()) return false;
  int value = 0;
  for (size_t i = 0; i < len; ++i) {
    char c = s[offset + i];
    if (c < '0' || c > '9') return false;
    value = value * 10 + (c - '0');
  }
  out = value;
  return true;
}

bool is_leap(int year) {
  if (year % 400 == 0) return true;
  if (year % 100 == 0) return false;
  return year % 4 == 0;
}

int days_in_month(int year, int month) {
  static constexpr std::array<int, 12> kDays = {31, 28, 31, 30, 31, 30,
                                                31, 31, 30, 31, 30, 31};
  if (month < 1 || month > 12) return 0;
  if (month == 2) return is_leap(year) ? 29 : 28;
  return kDays[static_cast<size_t>(month - 1)];
}

}  // namespace

int64_t days_from_civil(int y, int m, int d) {
  // Howard Hinnant's civil-days algorithm.
  y -= m <= 2;
  const int era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy =
      static_cast<unsigned>((153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1);
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return static_cast<int64_t>(era) * 146097 + static_cast<int64_t>(doe) - 719468;
}

int64_t epoch_from_civil(int year, int month, int day, int hour, int minute, int second) {
  return days_from_civil(year, month, day) * 86400 + hour * 3600 + minute * 60 + second;
}

bool try_parse_iso8601(std::string_view s, int64_t& epoch_seconds) {
  int year = 0, month = 0, day = 0;
  if (s.size() < 10) return false;
  if (!parse_digits(s, 0, 4, year) || s[4] != '-' || !parse_digits(s, 5, 2, month) ||
      s[7] != '-' || !parse_digits(s, 8, 2, day)) {
    return false;
  }
  if (month < 1 || month > 12 || day < 1 || day > days_in_month(year, month)) return false;

  int hour = 0, minute = 0, second = 0;
  int offset_sign = 0, offset_hour = 0, offset_minute = 0;
  size_t pos = 10;
  if (pos < s.size()) {
    if (s[pos] != 'T' && s[pos] != ' ') return false;
    ++pos;
    if (!parse_digits(s, pos, 2, hour) || pos + 2 >= s.size() || s[pos + 2] != ':' ||
        !parse_digits(s, pos + 3, 2, minute)) {
      return false;
    }
    pos += 5;
    if (pos < s.size() && s[pos] == ':') {
      if (!parse_digits(s, pos + 1, 2, second)) return false;
      pos += 3;
    }
    if (hour > 23 || minute > 59 || second > 60) return false;
    if (pos < s.size() && s[pos] == '.') {
      ++pos;
      size_t frac = 0;
      while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9') {
        ++pos;
        ++frac;
      }
      if (frac == 0) return false;
    }
    if (pos < s.size()) {
      if (s[pos] == 'Z') {
        ++pos;
      } else if (s[pos] == '+' || s[pos] == '-') {
        offset_sign = s[pos] == '+' ? 1 : -1;
        if (!parse_digits(s, pos + 1, 2, offset_hour) || pos + 3 >= s.size() ||
            s[pos + 3] != ':' || !parse_digits(s, pos + 4, 2, offset_minute)) {
          return false;
        }
        pos += 6;
        if (offset_hour > 14 || offset_minute > 59) return false;
      } else {
        return false;
      }
    }
    if (pos != s.size()) return false;
  }
  epoch_seconds = epoch_from_civil(year, month, day, hour, minute, second) -
                  offset_sign * (offset_hour * 3600 + offset_minute * 60);
  return true;
}

int64_t parse_iso8601(std::string_view s) {
  int64_t out = 0;
  if (!try_parse_iso8601(s, out)) {
    throw Error("BadTimestamp", "core_data",
                "not an ISO-8601 timestamp: '" + std::string(s) + "'");
  }
  return out;
}

std::string format_iso8601(int64_t epoch_seconds) {
  int64_t days = epoch_seconds / 86400;
  int64_t rem = epoch_seconds % 86400;
  if (rem < 0) {
    rem += 86400;
    --days;
  }
  // Inverse of days_from_civil.
  days += 719468;
  const int64_t era = (days >= 0 ? days : days - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(days - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  int64_t y = static_cast<int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  const unsigned d = doy - (153 * mp + 2) / 5 + 1;
  const unsigned m = mp + (mp < 10 ? 3 : static_cast<unsigned>(-9));
  y += (m <= 2);

  int hour = static_cast<int>(rem / 3600);
  int minute = static_cast<int>((rem % 3600) / 60);
  int second = static_cast<int>(rem % 60);

  char buf[32];
  std::snprintf(buf, sizeof(buf), "%04lld-%02u-%02uT%02d:%02d:%02dZ",
                static_cast<long long>(y), m, d, hour, minute, second);
  return buf;
}

YearMonth year_month_utc(int64_t epoch_seconds) {
  int64_t days = epoch_seconds / 86400;
  if (epoch_seconds % 86400 < 0) --days;
  days += 719468;
  const int64_t era = (days >= 0 ? days : days - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(days - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  int64_t y = static_cast<int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  const unsigned m = mp + (mp < 10 ? 3 : static_cast<unsigned>(-9));
  y += (m <= 2);
  return {static_cast<int>(y), static_cast<int>(m)};
}

int month_index(YearMonth ym, YearMonth start) {
  return (ym.year - start.year) * 12 + (ym.month - start.month);
}

}  // namespace sentidrop::timeutil
