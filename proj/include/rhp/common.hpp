#pragma once

#include <chrono>
#include <compare>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace rhp {

// Error hierarchy. Everything thrown by the library derives from Error so
// callers (the CLI in particular) can map it to a structured failure line.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A precondition on a numeric argument was violated (votes < 1, n = 0, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Unreadable or unwritable file.
class IoError : public Error {
 public:
  using Error::Error;
};

// Input data or configuration that cannot be used (empty splits, bad
// manifest, token id outside the vocabulary, ...).
class DataError : public Error {
 public:
  using Error::Error;
};

inline constexpr int kNumClasses = 5;

// Helpfulness classes are the integers 1..5.
using HelpfulnessClass = int;

inline bool is_valid_class(int c) { return c >= 1 && c <= kNumClasses; }

// Calendar date at UTC day resolution.
class Date {
 public:
  Date() = default;
  explicit Date(std::chrono::sys_days day) : day_(day) {}
  Date(int year, unsigned month, unsigned day);

  // Accepts "YYYY-MM-DD", optionally followed by a time part
  // ("T..." or " ..."), which is ignored. Throws DataError otherwise.
  static Date parse(std::string_view text);

  std::string iso() const;
  std::chrono::sys_days sys_days() const { return day_; }
  Date plus_days(int days) const { return Date(day_ + std::chrono::days(days)); }

  // Signed number of whole days from `earlier` to `*this`.
  long days_since(const Date& earlier) const {
    return static_cast<long>((day_ - earlier.day_).count());
  }

  friend auto operator<=>(const Date&, const Date&) = default;

 private:
  std::chrono::sys_days day_{};
};

// splitmix64 finalizer. Used for seed derivation and for the hash text
// encoder, so its exact definition is part of the on-disk contract.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  return splitmix64(base ^ splitmix64(stream + 0x632BE59BD9B4E019ULL));
}

// Seeded generator whose output sequence does not depend on the standard
// library implementation (std distributions are implementation-defined, so
// they are not used).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform in [0, 1) with 53 bits of precision.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n). n must be > 0.
  std::uint64_t below(std::uint64_t n);

  // Standard normal via Box-Muller.
  double normal();

  template <class T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(below(i));
      using std::swap;
      swap(items[i - 1], items[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

// Stable 64-bit FNV-1a, used for config fingerprints.
std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t value);

}  // namespace rhp
