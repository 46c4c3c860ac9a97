#include "staplegrid/time.hpp"

#include <cstdio>

#include "staplegrid/error.hpp"

namespace staplegrid {

using namespace std::chrono;

namespace {

struct Civil {
  int year;
  unsigned month, day;
  int hour, minute, second;
};

Civil to_civil(UtcTime t) {
  auto day_point = floor<days>(t);
  year_month_day ymd{day_point};
  hh_mm_ss hms{t - day_point};
  return {static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
          static_cast<unsigned>(ymd.day()), static_cast<int>(hms.hours().count()),
          static_cast<int>(hms.minutes().count()), static_cast<int>(hms.seconds().count())};
}

int digits(std::string_view s, std::size_t pos, std::size_t n) {
  int v = 0;
  for (std::size_t i = pos; i < pos + n; ++i) {
    if (i >= s.size() || s[i] < '0' || s[i] > '9') fail(Errc::MalformedDer, "bad time digits");
    v = v * 10 + (s[i] - '0');
  }
  return v;
}

UtcTime checked(int year, int month, int day, int hour, int minute, int second) {
  year_month_day ymd{std::chrono::year{year}, std::chrono::month{static_cast<unsigned>(month)},
                     std::chrono::day{static_cast<unsigned>(day)}};
  if (!ymd.ok() || hour > 23 || minute > 59 || second > 59) {
    fail(Errc::MalformedDer, "time field out of range");
  }
  return sys_days{ymd} + hours{hour} + minutes{minute} + std::chrono::seconds{second};
}

}  // namespace

UtcTime utc_now() { return floor<std::chrono::seconds>(system_clock::now()); }

UtcTime make_utc(int year, unsigned month, unsigned day, int hour, int minute, int second) {
  return checked(year, static_cast<int>(month), static_cast<int>(day), hour, minute, second);
}

std::string format_sql_time(UtcTime t) {
  auto c = to_civil(t);
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u %02d:%02d:%02d", c.year, c.month, c.day, c.hour,
                c.minute, c.second);
  return buf;
}

UtcTime parse_sql_time(std::string_view s) {
  if (s.size() != 19 || s[4] != '-' || s[7] != '-' || s[10] != ' ' || s[13] != ':' || s[16] != ':') {
    fail(Errc::InvalidArgument, "expected YYYY-MM-DD HH:MM:SS");
  }
  try {
    return checked(digits(s, 0, 4), digits(s, 5, 2), digits(s, 8, 2), digits(s, 11, 2),
                   digits(s, 14, 2), digits(s, 17, 2));
  } catch (const Error& e) {
    fail(Errc::InvalidArgument, e.detail());
  }
}

// Hot in response encoding, so no snprintf.
std::string format_generalized_time(UtcTime t) {
  auto c = to_civil(t);
  if (c.year < 0 || c.year > 9999) fail(Errc::InvalidArgument, "GeneralizedTime year out of range");
  std::string out(15, 'Z');
  auto put = [&out](std::size_t at, unsigned v, std::size_t width) {
    for (std::size_t i = width; i-- > 0; v /= 10) out[at + i] = static_cast<char>('0' + v % 10);
  };
  put(0, static_cast<unsigned>(c.year), 4);
  put(4, c.month, 2);
  put(6, c.day, 2);
  put(8, static_cast<unsigned>(c.hour), 2);
  put(10, static_cast<unsigned>(c.minute), 2);
  put(12, static_cast<unsigned>(c.second), 2);
  return out;
}

UtcTime parse_generalized_time(std::string_view s) {
  if (s.size() < 15 || s.back() != 'Z') fail(Errc::MalformedDer, "GeneralizedTime must end in Z");
  std::string_view frac = s.substr(14, s.size() - 15);
  if (!frac.empty()) {
    // Fractional seconds are accepted and truncated to whole seconds.
    if (frac.size() < 2 || frac[0] != '.' || frac.back() == '0') {
      fail(Errc::MalformedDer, "bad GeneralizedTime fraction");
    }
    digits(frac, 1, frac.size() - 1);
  }
  return checked(digits(s, 0, 4), digits(s, 4, 2), digits(s, 6, 2), digits(s, 8, 2),
                 digits(s, 10, 2), digits(s, 12, 2));
}

std::string format_utc_time(UtcTime t) {
  auto c = to_civil(t);
  if (c.year < 1950 || c.year > 2049) fail(Errc::InvalidArgument, "UTCTime year out of range");
  char buf[32];
  std::snprintf(buf, sizeof buf, "%02d%02u%02u%02d%02d%02dZ", c.year % 100, c.month, c.day, c.hour,
                c.minute, c.second);
  return buf;
}

UtcTime parse_utc_time(std::string_view s) {
  if (s.size() != 13 || s.back() != 'Z') fail(Errc::MalformedDer, "UTCTime must be YYMMDDHHMMSSZ");
  int yy = digits(s, 0, 2);
  int year = yy >= 50 ? 1900 + yy : 2000 + yy;
  return checked(year, digits(s, 2, 2), digits(s, 4, 2), digits(s, 6, 2), digits(s, 8, 2),
                 digits(s, 10, 2));
}

Seconds parse_duration(std::string_view text) {
  if (text.empty()) fail(Errc::InvalidArgument, "empty duration");
  long long total = 0;
  long long current = 0;
  bool have_digits = false;
  bool negative = false;
  std::size_t i = 0;
  if (text[0] == '-') {
    negative = true;
    i = 1;
  }
  for (; i < text.size(); ++i) {
    char c = text[i];
    if (c >= '0' && c <= '9') {
      current = current * 10 + (c - '0');
      have_digits = true;
      continue;
    }
    if (!have_digits) fail(Errc::InvalidArgument, "bad duration: " + std::string(text));
    long long unit = 0;
    switch (c) {
      case 's': unit = 1; break;
      case 'm': unit = 60; break;
      case 'h': unit = 3600; break;
      case 'd': unit = 86400; break;
      default: fail(Errc::InvalidArgument, "bad duration unit: " + std::string(text));
    }
    total += current * unit;
    current = 0;
    have_digits = false;
  }
  total += current;
  return Seconds{negative ? -total : total};
}

}  // namespace staplegrid
