#pragma once

#include <optional>
#include <span>
#include <vector>

#include "derham/dyadic.hpp"
#include "derham/mobius.hpp"

namespace derham {

enum class Precision {
  standard,  // IEEE double
  extended,  // 50 significant decimal digits, rounded to double at the end
};

inline constexpr int kMaxTableLevel = 30;

/// Parameter u > 0 together with everything derived from it.
class DeRhamModel {
 public:
  explicit DeRhamModel(double u);

  double u() const { return u_; }
  double x_u() const { return x_u_; }
  const Matrix2& left() const { return gens_.left; }
  const Matrix2& right() const { return gens_.right; }
  const Matrix2& generator(int digit) const { return digit == 0 ? gens_.left : gens_.right; }
  /// 1 / Phi(A0; 1) = (1 + x_u) / (2 x_u)
  double gamma() const { return gamma_; }
  /// Phi(A0; 1) = Phi(A1; 0), the CDF value at 1/2.
  double join_value() const { return 1.0 / gamma_; }
  /// Attracting fixed point of the right map inside (0, 1); only for u > sqrt(3).
  std::optional<double> z1() const { return z1_; }

 private:
  double u_;
  double x_u_;
  GeneratorPair gens_;
  double gamma_;
  std::optional<double> z1_;
};

/// g_u on the full level-n dyadic grid: values[j] = g_u(j / 2^n).
struct CdfTable {
  int level = 0;
  std::vector<double> values;

  double at(const Dyadic& x) const;
};

CdfTable build_table(const DeRhamModel& model, int level, Precision precision = Precision::standard);

struct Bracket {
  double lower = 0.0;
  double upper = 0.0;
  int depth = 0;       // number of digits composed
  bool exact = false;  // x was dyadic within the depth budget

  double width() const { return upper - lower; }
  double mid() const { return 0.5 * (lower + upper); }
};

/// Bracket of the right-continuous limit CDF at x in [0, 1]. Dyadic x whose
/// expansion ends within max_depth digits gets the exact value as a
/// zero-width bracket. For u >= sqrt(3) the width is only reported, not
/// guaranteed.
Bracket eval_cdf(const DeRhamModel& model, double x, int max_depth = kMaxDyadicLevel,
                 Precision precision = Precision::standard);

/// Exact g_u(x).
double eval_cdf(const DeRhamModel& model, const Dyadic& x,
                Precision precision = Precision::standard);

/// Phi(A_{b_1}; Phi(A_{b_2}; ... Phi(A_{b_m}; z))), innermost first.
double compose_digits(const DeRhamModel& model, std::span<const int> bits, double z);

/// Smallest x (within tol) with f_u(x) >= p. tol must be >= 1e-12.
double quantile(const DeRhamModel& model, double p, double tol);

/// g_u(zeta_n(x) + 2^-n) - g_u(zeta_n(x)).
double increment(const DeRhamModel& model, double x, int n);

/// A_{X_1(x)} ... A_{X_n(x)}. Without renormalization n <= 40 and entries
/// leaving [1e-150, 1e150] raise NumericRangeError; with it every partial
/// product is divided by its largest entry (same Mobius map, n <= 62).
Matrix2 product_entries(const DeRhamModel& model, double x, int n, bool renormalize = false);

}  // namespace derham
