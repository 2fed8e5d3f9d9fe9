#include "core/timestamps.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>

namespace tracerank {
namespace {

// Days since 1970-01-01 for a proleptic Gregorian civil date.
int64_t days_from_civil(int64_t y, unsigned m, unsigned d) {
  y -= m <= 2;
  const int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<int64_t>(doe) - 719468;
}

void civil_from_days(int64_t z, int64_t& y, unsigned& m, unsigned& d) {
  z += 719468;
  const int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  y = static_cast<int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  d = doy - (153 * mp + 2) / 5 + 1;
  m = mp + (mp < 10 ? 3 : -9);
  y += m <= 2;
}

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  return true;
}

std::optional<int> to_int(std::string_view s) {
  int v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) return std::nullopt;
  return v;
}

unsigned days_in_month(int64_t y, unsigned m) {
  static const unsigned lengths[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  if (m == 2) {
    bool leap = (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
    return leap ? 29 : 28;
  }
  return lengths[m - 1];
}

}  // namespace

std::optional<int64_t> parse_timestamp(std::string_view text) {
  // Trim surrounding whitespace.
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  if (text.empty()) return std::nullopt;

  // Plain integer Unix seconds (optionally signed). from_chars takes no '+',
  // so parse the unsigned body and apply the sign ourselves.
  {
    std::string_view body = text;
    bool negative = body.front() == '-';
    if (body.front() == '-' || body.front() == '+') body.remove_prefix(1);
    if (all_digits(body)) {
      int64_t v = 0;
      auto [p, ec] = std::from_chars(body.data(), body.data() + body.size(), v);
      if (ec == std::errc() && p == body.data() + body.size()) return negative ? -v : v;
      return std::nullopt;
    }
  }

  // RFC 3339: YYYY-MM-DD 'T'|'t'|' ' HH:MM:SS[.frac] ('Z'|'z'|±HH:MM)
  if (text.size() < 20) return std::nullopt;
  auto year = to_int(text.substr(0, 4));
  auto mon = to_int(text.substr(5, 2));
  auto day = to_int(text.substr(8, 2));
  if (!year || !mon || !day) return std::nullopt;
  if (text[4] != '-' || text[7] != '-') return std::nullopt;
  char sep = text[10];
  if (sep != 'T' && sep != 't' && sep != ' ') return std::nullopt;
  auto hh = to_int(text.substr(11, 2));
  auto mi = to_int(text.substr(14, 2));
  auto ss = to_int(text.substr(17, 2));
  if (!hh || !mi || !ss) return std::nullopt;
  if (text[13] != ':' || text[16] != ':') return std::nullopt;

  size_t pos = 19;
  if (pos < text.size() && text[pos] == '.') {
    ++pos;
    size_t start = pos;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
    if (pos == start) return std::nullopt;  // '.' with no digits
  }
  if (pos >= text.size()) return std::nullopt;

  int64_t offset_seconds = 0;
  char tz = text[pos];
  if (tz == 'Z' || tz == 'z') {
    if (pos + 1 != text.size()) return std::nullopt;
  } else if (tz == '+' || tz == '-') {
    if (pos + 6 != text.size() || text[pos + 3] != ':') return std::nullopt;
    auto oh = to_int(text.substr(pos + 1, 2));
    auto om = to_int(text.substr(pos + 4, 2));
    if (!oh || !om || *oh > 23 || *om > 59) return std::nullopt;
    offset_seconds = static_cast<int64_t>(*oh) * 3600 + *om * 60;
    if (tz == '-') offset_seconds = -offset_seconds;
  } else {
    return std::nullopt;
  }

  if (*mon < 1 || *mon > 12) return std::nullopt;
  if (*day < 1 || static_cast<unsigned>(*day) > days_in_month(*year, *mon)) return std::nullopt;
  if (*hh > 23 || *mi > 59 || *ss > 60) return std::nullopt;  // 60 tolerates leap seconds
  int sec = *ss == 60 ? 59 : *ss;

  int64_t days = days_from_civil(*year, *mon, *day);
  int64_t t = days * kSecondsPerDay + *hh * 3600 + *mi * 60 + sec;
  return t - offset_seconds;
}

std::string format_rfc3339(int64_t unix_seconds) {
  int64_t days = unix_seconds / kSecondsPerDay;
  int64_t rem = unix_seconds % kSecondsPerDay;
  if (rem < 0) {
    rem += kSecondsPerDay;
    days -= 1;
  }
  int64_t y;
  unsigned m, d;
  civil_from_days(days, y, m, d);
  char buf[40];
  std::snprintf(buf, sizeof buf, "%04lld-%02u-%02uT%02lld:%02lld:%02lldZ",
                static_cast<long long>(y), m, d,
                static_cast<long long>(rem / 3600),
                static_cast<long long>((rem / 60) % 60),
                static_cast<long long>(rem % 60));
  return buf;
}

}  // namespace tracerank
