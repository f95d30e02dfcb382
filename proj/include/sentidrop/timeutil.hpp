#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace sentidrop::timeutil {

struct YearMonth {
  int year = 0;
  int month = 0;  // 1..12
  auto operator<=>(const YearMonth&) const = default;
};

// Accepts ISO-8601 at day precision or finer: "YYYY-MM-DD",
// "YYYY-MM-DD[T ]HH:MM:SS", optional fractional seconds (ignored) and
// optional "Z" or "+HH:MM"/"-HH:MM" offset. Result is UTC epoch seconds.
bool try_parse_iso8601(std::string_view s, int64_t& epoch_seconds);
int64_t parse_iso8601(std::string_view s);  // throws sentidrop::Error("BadTimestamp", ...)

std::string format_iso8601(int64_t epoch_seconds);

YearMonth year_month_utc(int64_t epoch_seconds);

// Months elapsed from `start` to `ym` (0 for the same calendar month).
int month_index(YearMonth ym, YearMonth start);

int64_t days_from_civil(int year, int month, int day);
int64_t epoch_from_civil(int year, int month, int day, int hour = 0, int minute = 0, int second = 0);

}  // namespace sentidrop::timeutil
