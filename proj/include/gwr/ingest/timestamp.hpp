#pragma once

#include <charconv>
#include <cstdio>
#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace gwr {

using Date = std::chrono::year_month_day;

struct Timestamp
{
  Date date;
  int hour = 0;
  int minute = 0;

  auto operator<=>(const Timestamp&) const = default;
};

namespace detail {

inline bool parse_fixed_int(std::string_view s, int& out)
{
  if (s.empty())
    return false;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size();
}

} // namespace detail

/// Parses YYYY-MM-DD.
inline std::optional<Date> parse_date(std::string_view s)
{
  if (s.size() != 10 || s[4] != '-' || s[7] != '-')
    return std::nullopt;
  int y = 0, m = 0, d = 0;
  if (!detail::parse_fixed_int(s.substr(0, 4), y) || !detail::parse_fixed_int(s.substr(5, 2), m) ||
      !detail::parse_fixed_int(s.substr(8, 2), d))
    return std::nullopt;
  const Date date{std::chrono::year(y), std::chrono::month(static_cast<unsigned>(m)),
                  std::chrono::day(static_cast<unsigned>(d))};
  if (!date.ok())
    return std::nullopt;
  return date;
}

/// Parses "YYYY-MM-DD HH:MM" with an optional ":SS" suffix; 'T' may
/// separate date and time.
inline std::optional<Timestamp> parse_timestamp(std::string_view s)
{
  if (s.size() != 16 && s.size() != 19)
    return std::nullopt;
  if (s[10] != ' ' && s[10] != 'T')
    return std::nullopt;
  const auto date = parse_date(s.substr(0, 10));
  if (!date || s[13] != ':')
    return std::nullopt;
  Timestamp t{*date, 0, 0};
  if (!detail::parse_fixed_int(s.substr(11, 2), t.hour) || !detail::parse_fixed_int(s.substr(14, 2), t.minute))
    return std::nullopt;
  if (t.hour < 0 || t.hour > 23 || t.minute < 0 || t.minute > 59)
    return std::nullopt;
  if (s.size() == 19) {
    int sec = 0;
    if (s[16] != ':' || !detail::parse_fixed_int(s.substr(17, 2), sec) || sec < 0 || sec > 59)
      return std::nullopt;
  }
  return t;
}

inline int year_of(const Date& d) { return static_cast<int>(d.year()); }
inline int month_of(const Date& d) { return static_cast<int>(static_cast<unsigned>(d.month())); }

inline std::string format_date(const Date& d)
{
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(d.year()),
                static_cast<unsigned>(d.month()), static_cast<unsigned>(d.day()));
  return buf;
}

} // namespace gwr
