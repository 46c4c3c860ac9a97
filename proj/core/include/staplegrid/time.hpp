#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>

namespace staplegrid {

// All timestamps are UTC with one-second resolution.
using UtcTime = std::chrono::sys_seconds;
using Seconds = std::chrono::seconds;

inline constexpr Seconds kHour{3600};
inline constexpr Seconds kDay{86400};

UtcTime utc_now();

// Injected wherever a component needs "now"; tests pass fixed clocks.
using Clock = std::function<UtcTime()>;
UtcTime make_utc(int year, unsigned month, unsigned day, int hour = 0, int minute = 0, int second = 0);

// "YYYY-MM-DD HH:MM:SS", the column format of the staple cache.
std::string format_sql_time(UtcTime t);
UtcTime parse_sql_time(std::string_view text);

// "YYYYMMDDHHMMSSZ"
std::string format_generalized_time(UtcTime t);
UtcTime parse_generalized_time(std::string_view text);
// "YYMMDDHHMMSSZ", two-digit years pivot at 1950.
std::string format_utc_time(UtcTime t);
UtcTime parse_utc_time(std::string_view text);

// Durations like "90", "90s", "15m", "12h", "7d", "6d23h".
Seconds parse_duration(std::string_view text);

}  // namespace staplegrid
