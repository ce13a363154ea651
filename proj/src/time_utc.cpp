#include "newsrag/time_utc.hpp"

#include <array>
#include <cstdio>

#include "newsrag/error.hpp"

namespace newsrag {
namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (c < '0' || c > '9') return false;
  }
  return true;
}

int to_int(std::string_view s) {
  int v = 0;
  for (char c : s) v = v * 10 + (c - '0');
  return v;
}

// Days since 1970-01-01 for a proleptic Gregorian civil date.
std::int64_t days_from_civil(int y, int m, int d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const int yoe = static_cast<int>(y - era * 400);
  const int doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const int doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + doe - 719468;
}

void civil_from_days(std::int64_t z, int& y, int& m, int& d) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const int doe = static_cast<int>(z - era * 146097);
  const int yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const std::int64_t yy = yoe + era * 400;
  const int doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const int mp = (5 * doy + 2) / 153;
  d = doy - (153 * mp + 2) / 5 + 1;
  m = mp + (mp < 10 ? 3 : -9);
  y = static_cast<int>(yy + (m <= 2));
}

bool is_leap(int y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

int days_in_month(int y, int m) {
  static constexpr std::array<int, 12> kDays = {31, 28, 31, 30, 31, 30,
                                                31, 31, 30, 31, 30, 31};
  if (m == 2 && is_leap(y)) return 29;
  return kDays[m - 1];
}

[[noreturn]] void bad(std::string_view s) {
  throw Error(ErrorCode::InvalidTimestamp, "not an ISO-8601 UTC timestamp: \"" + std::string(s) + "\"");
}

}  // namespace

UtcMillis parse_utc(std::string_view s) {
  // YYYY-MM-DDTHH:MM:SS[.mmm]Z
  if (s.size() < 20 || s.back() != 'Z') bad(s);
  if (s[4] != '-' || s[7] != '-' || s[10] != 'T' || s[13] != ':' || s[16] != ':') bad(s);

  std::string_view year = s.substr(0, 4), month = s.substr(5, 2), day = s.substr(8, 2);
  std::string_view hour = s.substr(11, 2), minute = s.substr(14, 2), second = s.substr(17, 2);
  if (!all_digits(year) || !all_digits(month) || !all_digits(day) || !all_digits(hour) ||
      !all_digits(minute) || !all_digits(second)) {
    bad(s);
  }

  int millis = 0;
  if (s.size() == 24) {
    if (s[19] != '.' || !all_digits(s.substr(20, 3))) bad(s);
    millis = to_int(s.substr(20, 3));
  } else if (s.size() != 20) {
    bad(s);
  }

  const int y = to_int(year), mo = to_int(month), d = to_int(day);
  const int h = to_int(hour), mi = to_int(minute), sec = to_int(second);
  if (mo < 1 || mo > 12 || d < 1 || d > days_in_month(y, mo) || h > 23 || mi > 59 || sec > 59) {
    bad(s);
  }

  const std::int64_t days = days_from_civil(y, mo, d);
  return ((days * 24 + h) * 60 + mi) * 60000 + sec * 1000 + millis;
}

std::string format_utc(UtcMillis ms) {
  std::int64_t days = ms / 86400000;
  std::int64_t rem = ms % 86400000;
  if (rem < 0) {
    rem += 86400000;
    days -= 1;
  }
  int y, mo, d;
  civil_from_days(days, y, mo, d);
  const int h = static_cast<int>(rem / 3600000);
  const int mi = static_cast<int>(rem / 60000 % 60);
  const int sec = static_cast<int>(rem / 1000 % 60);
  const int millis = static_cast<int>(rem % 1000);

  char buf[48];
  if (millis != 0) {
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02d.%03dZ", y, mo, d, h, mi, sec, millis);
  } else {
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02dZ", y, mo, d, h, mi, sec);
  }
  return buf;
}

}  // namespace newsrag
