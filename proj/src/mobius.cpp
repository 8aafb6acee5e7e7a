#include "derham/mobius.hpp"

#include <algorithm>
#include <cstdio>

namespace derham {

Matrix2::Matrix2(double a, double b, double c, double d) : a_(a), b_(b), c_(c), d_(d) {
  if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(c) || !std::isfinite(d)) {
    throw NumericRangeError("Matrix2: non-finite entry");
  }
  if (det() == 0.0) {
    throw DomainError("Matrix2: zero determinant " + to_string());
  }
}

Matrix2::Matrix2(Product, double a, double b, double c, double d) : a_(a), b_(b), c_(c), d_(d) {
  if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(c) || !std::isfinite(d)) {
    throw NumericRangeError("Matrix2: non-finite entry");
  }
}

double Matrix2::max_abs_entry() const {
  return std::max({std::abs(a_), std::abs(b_), std::abs(c_), std::abs(d_)});
}

Matrix2 Matrix2::normalized() const {
  const double s = max_abs_entry();
  return {Product{}, a_ / s, b_ / s, c_ / s, d_ / s};
}

std::string Matrix2::to_string() const {
  char buf[160];
  std::snprintf(buf, sizeof buf, "[[%.17g, %.17g], [%.17g, %.17g]]", a_, b_, c_, d_);
  return buf;
}

PoleError::PoleError(const Matrix2& m, double z)
    : DomainError("pole: denominator below floor for " + m.to_string() + " at z=" +
                  std::to_string(z)),
      matrix_(m),
      point_(z) {}

double x_param(double u) {
  if (!(u >= 0.0) || !std::isfinite(u)) throw DomainError("x_param: u must be finite and >= 0");
  return 2.0 / (1.0 + std::sqrt(1.0 + 8.0 * u * u));
}

GeneratorPair generators(double u) {
  if (u == 0.0) {
    throw DomainError("generators: u = 0 has no generator pair; the limit law is the point mass at 0");
  }
  const double x = x_param(u);
  const double ux2 = u * u * x * x;
  const double d1 = 1.0 - ux2;
  // c1 equals -u^2 x^2 up to rounding; pick the representable neighbour for
  // which c1 + d1 == x in floating point, so the right map fixes 1 exactly
  // and Phi(A1; 0) stays bitwise equal to Phi(A0; 1).
  double c1 = x - d1;
  for (int step = 0; step < 8 && c1 + d1 != x; ++step) {
    c1 = std::nextafter(c1, c1 + d1 < x ? 0.0 : -1.0);
  }
  if (c1 + d1 != x) c1 = -ux2;
  return {Matrix2{x, 0.0, -ux2, 1.0}, Matrix2{0.0, x, c1, d1}};
}

double apply(const Matrix2& m, double z, double floor) {
  const double den = m.c() * z + m.d();
  if (!(std::abs(den) > floor)) throw PoleError(m, z);
  return (m.a() * z + m.b()) / den;
}

Matrix2 compose(const Matrix2& lhs, const Matrix2& rhs) {
  return {Matrix2::Product{}, lhs.a() * rhs.a() + lhs.b() * rhs.c(),
          lhs.a() * rhs.b() + lhs.b() * rhs.d(), lhs.c() * rhs.a() + lhs.d() * rhs.c(),
          lhs.c() * rhs.b() + lhs.d() * rhs.d()};
}

Matrix2 transpose(const Matrix2& m) { return {m.a(), m.c(), m.b(), m.d()}; }

double derivative(const Matrix2& m, double z, double floor) {
  const double den = m.c() * z + m.d();
  if (!(std::abs(den) > floor)) throw PoleError(m, z);
  return m.det() / (den * den);
}

std::vector<double> fixed_points(const Matrix2& m) {
  if (m.b() == 0.0 && m.c() == 0.0 && m.a() == m.d()) {
    throw DegenerateError("fixed_points: scalar multiple of the identity fixes every point");
  }
  // c z^2 + (d - a) z - b = 0
  const double qa = m.c();
  const double qb = m.d() - m.a();
  const double qc = -m.b();
  if (qa == 0.0) {
    if (qb == 0.0) return {};
    return {-qc / qb};
  }
  double disc = qb * qb - 4.0 * qa * qc;
  // A double root computed in floating point can come out slightly negative.
  const double scale = qb * qb + std::abs(4.0 * qa * qc);
  if (disc < -1e-14 * scale) return {};
  disc = std::max(disc, 0.0);
  const double root = std::sqrt(disc);
  // Cancellation-free pairing of the two roots.
  const double q = -0.5 * (qb + std::copysign(root, qb));
  double r1, r2;
  if (q == 0.0) {
    r1 = r2 = 0.0;
  } else {
    r1 = q / qa;
    r2 = qc / q;
  }
  if (r1 > r2) std::swap(r1, r2);
  return {r1, r2};
}

}  // namespace derham
