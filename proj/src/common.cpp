#include "rhp/common.hpp"

#include <charconv>
#include <cstdio>
#include <limits>
#include <cmath>
#include <numbers>

namespace rhp {

namespace {

bool parse_uint(std::string_view text, unsigned& out) {
  if (text.empty()) return false;
  for (char c : text) {
    if (c < '0' || c > '9') return false;
  }
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc() && ptr == text.data() + text.size();
}

}  // namespace

Date::Date(int year, unsigned month, unsigned day) {
  const std::chrono::year_month_day ymd{std::chrono::year{year},
                                        std::chrono::month{month},
                                        std::chrono::day{day}};
  if (!ymd.ok()) {
    throw DataError("invalid calendar date " + std::to_string(year) + "-" +
                    std::to_string(month) + "-" + std::to_string(day));
  }
  day_ = std::chrono::sys_days{ymd};
}

Date Date::parse(std::string_view text) {
  std::string_view date = text;
  if (const auto pos = text.find_first_of("T "); pos != std::string_view::npos) {
    date = text.substr(0, pos);
  }
  if (date.size() != 10 || date[4] != '-' || date[7] != '-') {
    throw DataError("expected ISO-8601 date YYYY-MM-DD, got '" + std::string(text) + "'");
  }
  unsigned y = 0, m = 0, d = 0;
  if (!parse_uint(date.substr(0, 4), y) || !parse_uint(date.substr(5, 2), m) ||
      !parse_uint(date.substr(8, 2), d)) {
    throw DataError("expected ISO-8601 date YYYY-MM-DD, got '" + std::string(text) + "'");
  }
  return Date(static_cast<int>(y), m, d);
}

std::string Date::iso() const {
  const std::chrono::year_month_day ymd{day_};
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buf;
}

std::uint64_t Rng::below(std::uint64_t n) {
  if (n == 0) throw DomainError("Rng::below requires n > 0");
  // Rejection sampling keeps the result unbiased.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t x = engine_();
  while (x >= limit) x = engine_();
  return x % n;
}

double Rng::normal() {
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(value));
  return buf;
}

}  // namespace rhp
