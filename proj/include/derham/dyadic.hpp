#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "derham/errors.hpp"

namespace derham {

inline constexpr int kMaxDyadicLevel = 62;

/// Exact dyadic rational k / 2^n in [0, 1], kept in lowest terms.
class Dyadic {
 public:
  Dyadic() = default;

  /// Reduces (2j, n) to (j, n - 1) until canonical. Rejects k > 2^n and
  /// n > 62.
  static Dyadic make(std::uint64_t numerator, int level);

  /// Parses "k/2^n". Only canonical, in-range input is accepted.
  static Dyadic parse(std::string_view text);

  std::uint64_t numerator() const { return numerator_; }
  int level() const { return level_; }
  double to_double() const;
  bool is_zero() const { return numerator_ == 0; }
  bool is_one() const { return numerator_ == 1 && level_ == 0; }

  /// Numerator of the same value written at a finer level.
  std::uint64_t numerator_at(int level) const;

  /// "k/2^n"
  std::string to_string() const;
  /// Finite decimal expansion, e.g. "0.375".
  std::string to_decimal() const;

  friend bool operator==(const Dyadic&, const Dyadic&) = default;

 private:
  Dyadic(std::uint64_t k, int n) : numerator_(k), level_(n) {}
  std::uint64_t numerator_ = 0;
  int level_ = 0;
};

struct DigitExpansion {
  std::vector<int> bits;  // X_1 ... X_n
  Dyadic truncation;      // sum_i 2^{-i} X_i, the largest level-n dyadic <= x
};

/// Binary digits of x in [0, 1). For real input the digits are those of the
/// binary value actually stored in the double, extracted exactly.
DigitExpansion digits(double x, int n);
DigitExpansion digits(const Dyadic& x, int n);

/// The position of the last 1 digit of x in (0, 1).
int last_one_index(const Dyadic& x);

/// Smallest n such that 2^n x is an integer, or -1 if that exceeds max_level.
int terminating_level(double x, int max_level);

}  // namespace derham
