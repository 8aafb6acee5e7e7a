#include "derham/dyadic.hpp"

#include <bit>
#include <charconv>
#include <cmath>

namespace derham {

namespace {

void check_level(int n) {
  if (n < 0 || n > kMaxDyadicLevel) {
    throw SizeError("dyadic level must be in [0, 62], got " + std::to_string(n));
  }
}

__extension__ using Wide = unsigned __int128;

std::uint64_t pow2(int n) { return std::uint64_t{1} << n; }

std::uint64_t parse_uint(std::string_view s, std::string_view what) {
  std::uint64_t v = 0;
  if (s.empty()) throw ParseError("dyadic: missing " + std::string(what));
  if (s.size() > 1 && s.front() == '0') {
    throw ParseError("dyadic: " + std::string(what) + " has a leading zero: '" + std::string(s) + "'");
  }
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size()) {
    throw ParseError("dyadic: " + std::string(what) + " is not a non-negative integer: '" +
                     std::string(s) + "'");
  }
  return v;
}

}  // namespace

Dyadic Dyadic::make(std::uint64_t numerator, int level) {
  check_level(level);
  if (numerator > pow2(level)) {
    throw DomainError("dyadic: value exceeds 1 (numerator > 2^level)");
  }
  if (numerator == 0) return {0, 0};
  const int shift = std::min(std::countr_zero(numerator), level);
  return {numerator >> shift, level - shift};
}

Dyadic Dyadic::parse(std::string_view text) {
  const auto slash = text.find('/');
  if (slash == std::string_view::npos || text.substr(slash + 1, 2) != "2^") {
    throw ParseError("dyadic: expected the form k/2^n, got '" + std::string(text) + "'");
  }
  const std::uint64_t k = parse_uint(text.substr(0, slash), "numerator");
  const std::uint64_t n = parse_uint(text.substr(slash + 3), "exponent");
  if (n > kMaxDyadicLevel) throw ParseError("dyadic: exponent must be <= 62");
  const int level = static_cast<int>(n);
  if (k > pow2(level)) throw ParseError("dyadic: value must lie in [0, 1] (k <= 2^n)");
  const Dyadic d = make(k, level);
  if (d.numerator_ != k || d.level_ != level) {
    throw ParseError("dyadic: not canonical, write it as " + d.to_string() +
                     " (k odd, or 0/2^0, or 1/2^0)");
  }
  return d;
}

double Dyadic::to_double() const { return std::ldexp(static_cast<double>(numerator_), -level_); }

std::uint64_t Dyadic::numerator_at(int level) const {
  check_level(level);
  if (level < level_) throw DomainError("dyadic: cannot coarsen below the canonical level");
  return numerator_ << (level - level_);
}

std::string Dyadic::to_string() const {
  return std::to_string(numerator_) + "/2^" + std::to_string(level_);
}

std::string Dyadic::to_decimal() const {
  if (level_ == 0) return numerator_ == 0 ? "0" : "1";
  // k / 2^n = k * 5^n / 10^n; expand digit by digit to avoid overflow.
  std::string out = "0.";
  std::uint64_t rem = numerator_;
  const std::uint64_t den = pow2(level_);
  for (int i = 0; i < level_; ++i) {
    // rem < den <= 2^62, so the long division stays within 128 bits.
    const Wide scaled = static_cast<Wide>(rem) * 10;
    out.push_back(static_cast<char>('0' + static_cast<int>(scaled / den)));
    rem = static_cast<std::uint64_t>(scaled % den);
  }
  return out;
}

DigitExpansion digits(const Dyadic& x, int n) {
  check_level(n);
  if (x.is_one()) throw DomainError("digits: x must lie in [0, 1)");
  DigitExpansion out;
  out.bits.resize(static_cast<std::size_t>(n));
  // Work with the numerator at level max(n, x.level()).
  const int level = std::max(n, x.level());
  const std::uint64_t k = x.numerator_at(level);
  std::uint64_t trunc = 0;
  for (int i = 1; i <= n; ++i) {
    const int bit = static_cast<int>((k >> (level - i)) & 1U);
    out.bits[static_cast<std::size_t>(i - 1)] = bit;
    trunc = (trunc << 1) | static_cast<std::uint64_t>(bit);
  }
  out.truncation = Dyadic::make(trunc, n);
  return out;
}

DigitExpansion digits(double x, int n) {
  if (!(x >= 0.0 && x < 1.0)) throw DomainError("digits: x must lie in [0, 1)");
  check_level(n);
  // Multiplying by a power of two is exact, so floor(2^n x) is the exact
  // level-n truncation of the stored binary value.
  const double scaled = std::floor(std::ldexp(x, n));
  return digits(Dyadic::make(static_cast<std::uint64_t>(scaled), n), n);
}

int last_one_index(const Dyadic& x) {
  if (x.is_zero() || x.is_one()) {
    throw DomainError("last_one_index: x must lie strictly inside (0, 1)");
  }
  return x.level();
}

int terminating_level(double x, int max_level) {
  for (int n = 0; n <= max_level; ++n) {
    const double s = std::ldexp(x, n);
    if (s == std::floor(s)) return n;
  }
  return -1;
}

}  // namespace derham
