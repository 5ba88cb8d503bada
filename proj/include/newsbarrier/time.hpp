#pragma once

#include <charconv>
#include <chrono>
#include <compare>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>

#include "newsbarrier/error.hpp"

namespace newsbarrier {

/// UTC instant at second resolution.
struct Timestamp {
  std::int64_t seconds = 0;

  constexpr auto operator<=>(const Timestamp &) const = default;
};

inline constexpr std::int64_t kSecondsPerHour = 3600;
inline constexpr std::int64_t kSecondsPerDay = 86400;

/// Half-open interval [start, end).
struct TimeWindow {
  Timestamp start;
  Timestamp end;

  constexpr bool contains(Timestamp t) const { return start <= t && t < end; }
  constexpr bool valid() const { return start < end; }
  constexpr auto operator<=>(const TimeWindow &) const = default;
};

inline TimeWindow make_window(Timestamp start, Timestamp end) {
  if (!(start < end))
    throw Error(ErrorCode::ValidationError, "window start must precede end");
  return {start, end};
}

namespace detail {

inline bool read_int(std::string_view s, std::size_t pos, std::size_t len,
                     int &out) {
  if (pos + len > s.size())
    return false;
  const char *first = s.data() + pos;
  const char *last = first + len;
  for (const char *p = first; p != last; ++p)
    if (*p < '0' || *p > '9')
      return false;
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc{} && ptr == last;
}

} // namespace detail

inline Timestamp from_civil(int y, unsigned mo, unsigned d, int h = 0,
                            int mi = 0, int s = 0) {
  using namespace std::chrono;
  const sys_days days{year{y} / month{mo} / day{d}};
  return Timestamp{days.time_since_epoch().count() * kSecondsPerDay +
                   h * kSecondsPerHour + mi * 60 + s};
}

/// Accepts `YYYY-MM-DD` and `YYYY-MM-DD[T ]HH:MM[:SS[.fff]][Z|+HH:MM|-HH:MM]`.
/// A missing offset is read as UTC; fractional seconds are truncated.
inline Timestamp parse_timestamp(std::string_view text) {
  using namespace std::chrono;
  auto fail = [&] {
    return Error(ErrorCode::MalformedTimestamp, std::string(text));
  };
  int y = 0, mo = 0, d = 0;
  if (text.size() < 10 || text[4] != '-' || text[7] != '-' ||
      !detail::read_int(text, 0, 4, y) || !detail::read_int(text, 5, 2, mo) ||
      !detail::read_int(text, 8, 2, d))
    throw fail();
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)},
                           day{static_cast<unsigned>(d)}};
  if (!ymd.ok())
    throw fail();

  int h = 0, mi = 0, s = 0;
  std::int64_t offset = 0;
  std::size_t pos = 10;
  if (pos < text.size()) {
    if (text[pos] != 'T' && text[pos] != 't' && text[pos] != ' ')
      throw fail();
    ++pos;
    if (!detail::read_int(text, pos, 2, h) || pos + 2 >= text.size() ||
        text[pos + 2] != ':' || !detail::read_int(text, pos + 3, 2, mi))
      throw fail();
    pos += 5;
    if (pos < text.size() && text[pos] == ':') {
      if (!detail::read_int(text, pos + 1, 2, s))
        throw fail();
      pos += 3;
      if (pos < text.size() && (text[pos] == '.' || text[pos] == ',')) {
        ++pos;
        const std::size_t digits = pos;
        while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9')
          ++pos;
        if (pos == digits)
          throw fail();
      }
    }
    if (h > 23 || mi > 59 || s > 59)
      throw fail();
    if (pos < text.size()) {
      const char z = text[pos];
      if ((z == 'Z' || z == 'z') && pos + 1 == text.size()) {
        pos = text.size();
      } else if (z == '+' || z == '-') {
        int oh = 0, om = 0;
        std::string_view rest = text.substr(pos + 1);
        bool ok = false;
        if (rest.size() == 5 && rest[2] == ':')
          ok = detail::read_int(rest, 0, 2, oh) && detail::read_int(rest, 3, 2, om);
        else if (rest.size() == 4)
          ok = detail::read_int(rest, 0, 2, oh) && detail::read_int(rest, 2, 2, om);
        else if (rest.size() == 2)
          ok = detail::read_int(rest, 0, 2, oh);
        if (!ok || oh > 23 || om > 59)
          throw fail();
        offset = (oh * kSecondsPerHour + om * 60) * (z == '+' ? 1 : -1);
        pos = text.size();
      } else {
        throw fail();
      }
    }
  }
  const Timestamp local = from_civil(y, static_cast<unsigned>(mo),
                                     static_cast<unsigned>(d), h, mi, s);
  return Timestamp{local.seconds - offset};
}

/// Floor division onto a bucket boundary (works for pre-epoch times too).
constexpr std::int64_t floor_to(std::int64_t value, std::int64_t step) {
  std::int64_t q = value / step;
  if (value % step != 0 && value < 0)
    --q;
  return q * step;
}

inline std::string format_date(Timestamp t) {
  using namespace std::chrono;
  const sys_days days{
      std::chrono::days{floor_to(t.seconds, kSecondsPerDay) / kSecondsPerDay}};
  const year_month_day ymd{days};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()),
                static_cast<unsigned>(ymd.day()));
  return buf;
}

inline std::string format_timestamp(Timestamp t) {
  const std::int64_t secs = t.seconds - floor_to(t.seconds, kSecondsPerDay);
  char buf[16];
  std::snprintf(buf, sizeof buf, "T%02d:%02d:%02dZ",
                static_cast<int>(secs / kSecondsPerHour),
                static_cast<int>(secs % kSecondsPerHour / 60),
                static_cast<int>(secs % 60));
  return format_date(t) + buf;
}

/// Parses `7d`, `36h`, `90m`, `3600s` or a bare number of seconds.
/// `none` (or an empty string) means no cap.
inline std::optional<std::int64_t> parse_duration(std::string_view text) {
  if (text.empty() || text == "none")
    return std::nullopt;
  std::int64_t unit = 1;
  std::string_view digits = text;
  switch (text.back()) {
  case 'd': unit = kSecondsPerDay; digits.remove_suffix(1); break;
  case 'h': unit = kSecondsPerHour; digits.remove_suffix(1); break;
  case 'm': unit = 60; digits.remove_suffix(1); break;
  case 's': digits.remove_suffix(1); break;
  default: break;
  }
  std::int64_t value = 0;
  auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value);
  if (digits.empty() || ec != std::errc{} || ptr != digits.data() + digits.size() ||
      value < 0)
    throw Error(ErrorCode::ValidationError, "bad duration '" + std::string(text) + "'");
  return value * unit;
}

inline std::string format_duration(std::optional<std::int64_t> seconds) {
  if (!seconds)
    return "none";
  if (*seconds % kSecondsPerDay == 0)
    return std::to_string(*seconds / kSecondsPerDay) + "d";
  if (*seconds % kSecondsPerHour == 0)
    return std::to_string(*seconds / kSecondsPerHour) + "h";
  return std::to_string(*seconds) + "s";
}

} // namespace newsbarrier
