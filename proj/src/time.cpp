#include "gevi/time.hpp"

#include <charconv>
#include <cstdio>
#include <stdexcept>

namespace gevi {

namespace {

int read_fixed(std::string_view text, std::size_t pos, std::size_t width, std::string_view whole) {
  if (pos + width > text.size()) {
    throw std::invalid_argument("truncated timestamp: '" + std::string(whole) + "'");
  }
  int value = 0;
  auto first = text.data() + pos;
  auto [ptr, ec] = std::from_chars(first, first + width, value);
  if (ec != std::errc{} || ptr != first + width) {
    throw std::invalid_argument("bad digits in timestamp: '" + std::string(whole) + "'");
  }
  return value;
}

void expect(std::string_view text, std::size_t pos, char c, std::string_view whole) {
  if (pos >= text.size() || text[pos] != c) {
    throw std::invalid_argument("malformed timestamp: '" + std::string(whole) + "'");
  }
}

}  // namespace

Instant parse_instant(std::string_view text) {
  const std::string_view whole = text;
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r')) text.remove_suffix(1);

  const int year = read_fixed(text, 0, 4, whole);
  expect(text, 4, '-', whole);
  const int month = read_fixed(text, 5, 2, whole);
  expect(text, 7, '-', whole);
  const int day = read_fixed(text, 8, 2, whole);

  const std::chrono::year_month_day ymd{std::chrono::year{year},
                                        std::chrono::month{static_cast<unsigned>(month)},
                                        std::chrono::day{static_cast<unsigned>(day)}};
  if (!ymd.ok()) throw std::invalid_argument("invalid calendar date: '" + std::string(whole) + "'");

  std::size_t pos = 10;
  int hour = 0, minute = 0, second = 0;
  if (pos < text.size() && (text[pos] == 'T' || text[pos] == ' ')) {
    hour = read_fixed(text, pos + 1, 2, whole);
    expect(text, pos + 3, ':', whole);
    minute = read_fixed(text, pos + 4, 2, whole);
    pos += 6;
    if (pos < text.size() && text[pos] == ':') {
      second = read_fixed(text, pos + 1, 2, whole);
      pos += 3;
    }
    if (pos < text.size() && text[pos] == '.') {
      ++pos;
      while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') ++pos;
    }
  }
  const std::string_view zone = text.substr(pos);
  if (!(zone.empty() || zone == "Z" || zone == "+00:00" || zone == "+0000")) {
    throw std::invalid_argument("timestamp is not UTC: '" + std::string(whole) + "'");
  }
  if (hour > 23 || minute > 59 || second > 60) {
    throw std::invalid_argument("invalid time of day: '" + std::string(whole) + "'");
  }

  return std::chrono::sys_days{ymd} + std::chrono::hours{hour} + std::chrono::minutes{minute} +
         std::chrono::seconds{second};
}

std::string format_instant(Instant t) {
  const auto day_start = std::chrono::floor<std::chrono::days>(t);
  const std::chrono::year_month_day ymd{day_start};
  const std::chrono::hh_mm_ss hms{t - day_start};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<int>(hms.hours().count()), static_cast<int>(hms.minutes().count()),
                static_cast<int>(hms.seconds().count()));
  return buf;
}

std::string format_date(Instant t) { return format_instant(t).substr(0, 10); }

}  // namespace gevi
