#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "derham/errors.hpp"

namespace derham {

inline constexpr double kDenominatorFloor = 1e-14;

/// 2x2 real matrix acting on the line as the fractional-linear map
/// z -> (a z + b) / (c z + d).
///
/// Entries are finite and the determinant is nonzero; both are checked on
/// construction.
class Matrix2 {
 public:
  Matrix2(double a, double b, double c, double d);

  static Matrix2 identity() { return {1.0, 0.0, 0.0, 1.0}; }

  double a() const { return a_; }
  double b() const { return b_; }
  double c() const { return c_; }
  double d() const { return d_; }
  double det() const { return a_ * d_ - b_ * c_; }
  double max_abs_entry() const;

  // Scalar multiples induce the same map; used to keep long products in range.
  Matrix2 normalized() const;

  friend bool operator==(const Matrix2&, const Matrix2&) = default;

  std::string to_string() const;

 private:
  // Products of invertible matrices are invertible even when a d - b c
  // cancels to zero in floating point, so they skip the determinant check.
  struct Product {};
  Matrix2(Product, double a, double b, double c, double d);
  friend Matrix2 compose(const Matrix2& lhs, const Matrix2& rhs);

  double a_, b_, c_, d_;
};

class PoleError : public DomainError {
 public:
  PoleError(const Matrix2& m, double z);
  const Matrix2& matrix() const { return matrix_; }
  double point() const { return point_; }

 private:
  Matrix2 matrix_;
  double point_;
};

class DegenerateError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Positive root of 2 u^2 x^2 + x - 1 = 0, i.e. 2 / (1 + sqrt(1 + 8 u^2)).
double x_param(double u);

struct GeneratorPair {
  Matrix2 left;   // acts on the half [0, 1/2]
  Matrix2 right;  // acts on the half [1/2, 1]
};

/// The two generators for parameter u > 0. u = 0 is rejected: the right
/// generator degenerates and the limit law is the point mass at 0.
GeneratorPair generators(double u);

double apply(const Matrix2& m, double z, double floor = kDenominatorFloor);
Matrix2 compose(const Matrix2& lhs, const Matrix2& rhs);
Matrix2 transpose(const Matrix2& m);
double derivative(const Matrix2& m, double z, double floor = kDenominatorFloor);

/// Real fixed points of the map, ascending; a double root is reported twice.
std::vector<double> fixed_points(const Matrix2& m);

}  // namespace derham

namespace derham {

inline const double kSqrt3 = std::sqrt(3.0);

/// True when u equals sqrt(3) up to a relative 1e-12; the regime boundary
/// where the right generator stops being a contraction.
inline bool near_sqrt3(double u) { return std::abs(u - kSqrt3) <= 1e-12 * kSqrt3; }

}  // namespace derham
