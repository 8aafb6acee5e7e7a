#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>

#include "derham/mobius.hpp"

using namespace derham;

namespace {

// Exact-rational check of a fractional-linear map at a rational point, done
// in long double so the oracle does not share the library's rounding path.
long double phi_ld(long double a, long double b, long double c, long double d, long double z) {
  return (a * z + b) / (c * z + d);
}

double random_u(std::mt19937_64& g) {
  std::uniform_real_distribution<double> d(0.05, 6.0);
  return d(g);
}

}  // namespace

TEST_CASE("x_param closed values") {
  CHECK(x_param(1.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(x_param(kSqrt3) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(x_param(0.0) == 1.0);
  CHECK_THROWS_AS(x_param(-0.1), DomainError);
  CHECK_THROWS_AS(x_param(std::numeric_limits<double>::quiet_NaN()), DomainError);
}

TEST_CASE("x_param solves the quadratic") {
  std::mt19937_64 g(11);
  for (int i = 0; i < 500; ++i) {
    const double u = random_u(g);
    const double x = x_param(u);
    CHECK(x > 0.0);
    CHECK(x <= 1.0);
    CHECK(std::abs(2 * u * u * x * x + x - 1) <= 1e-14);
  }
}

TEST_CASE("generators at u = 1") {
  const auto gens = generators(1.0);
  CHECK(gens.left == Matrix2(0.5, 0.0, -0.25, 1.0));
  CHECK(gens.right.a() == 0.0);
  CHECK(gens.right.b() == 0.5);
  CHECK(gens.right.c() == doctest::Approx(-0.25).epsilon(1e-15));
  CHECK(gens.right.d() == doctest::Approx(0.75).epsilon(1e-15));
}

TEST_CASE("generators at sqrt3 give 1/(2-z)") {
  const auto gens = generators(kSqrt3);
  for (double z : {0.0, 0.25, 0.5, 0.9, 1.0}) {
    CHECK(apply(gens.right, z) == doctest::Approx(1.0 / (2.0 - z)).epsilon(1e-14));
  }
  CHECK(apply(gens.right, 0.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK_THROWS_AS(generators(0.0), DomainError);
}

TEST_CASE("join condition and endpoint values for random u") {
  std::mt19937_64 g(3);
  for (int i = 0; i < 500; ++i) {
    const double u = random_u(g);
    const auto gens = generators(u);
    const double x = x_param(u);
    const double join = x / (1.0 - u * u * x * x);
    CHECK(apply(gens.left, 1.0) == doctest::Approx(join).epsilon(1e-14));
    CHECK(apply(gens.right, 0.0) == apply(gens.left, 1.0));
    CHECK(apply(gens.left, 0.0) == 0.0);
    CHECK(std::abs(apply(gens.right, 1.0) - 1.0) <= 1e-12);
    if (u <= kSqrt3) CHECK(apply(gens.right, 1.0) == 1.0);
  }
}

TEST_CASE("apply examples") {
  const auto gens = generators(1.0);
  CHECK(apply(Matrix2::identity(), 0.123) == 0.123);
  CHECK(apply(gens.left, 1.0) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  Matrix2 pole{1.0, 0.0, 1.0, -1.0};
  CHECK_THROWS_AS(apply(pole, 1.0), PoleError);
  try {
    apply(pole, 1.0);
  } catch (const PoleError& e) {
    CHECK(e.matrix() == pole);
    CHECK(e.point() == 1.0);
  }
}

TEST_CASE("compose matches nested application") {
  const auto gens = generators(1.0);
  const auto a00 = compose(gens.left, gens.left);
  CHECK(apply(a00, 0.0) == 0.0);
  CHECK(apply(a00, 1.0) == doctest::Approx(0.4).epsilon(1e-15));
  const auto a10 = compose(gens.right, gens.left);
  CHECK(apply(a10, 1.0) == doctest::Approx(6.0 / 7.0).epsilon(1e-15));
  CHECK(compose(gens.left, Matrix2::identity()) == gens.left);

  std::mt19937_64 g(5);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int i = 0; i < 300; ++i) {
    const auto gg = generators(random_u(g));
    const double z = unit(g);
    const auto m = compose(gg.right, gg.left);
    CHECK(apply(m, z) == doctest::Approx(apply(gg.right, apply(gg.left, z))).epsilon(1e-13));
  }
}

TEST_CASE("transpose") {
  Matrix2 s{2.0, 1.0, 1.0, 3.0};
  CHECK(transpose(s) == s);
  Matrix2 m{1.0, 2.0, 3.0, 4.0};
  CHECK(transpose(m) == Matrix2(1.0, 3.0, 2.0, 4.0));
  CHECK(transpose(transpose(m)) == m);
}

TEST_CASE("derivative") {
  CHECK(derivative(Matrix2::identity(), 0.7) == 1.0);
  const auto gens = generators(kSqrt3);
  CHECK(derivative(gens.right, 0.0) == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(derivative(gens.right, 1.0) == doctest::Approx(1.0).epsilon(1e-12));

  // Central difference oracle in long double.
  std::mt19937_64 g(9);
  std::uniform_real_distribution<double> unit(0.05, 0.95);
  for (int i = 0; i < 200; ++i) {
    const auto gg = generators(random_u(g));
    const auto& r = gg.right;
    const long double z = unit(g), h = 1e-6L;
    const long double fd = (phi_ld(r.a(), r.b(), r.c(), r.d(), z + h) -
                            phi_ld(r.a(), r.b(), r.c(), r.d(), z - h)) / (2 * h);
    CHECK(derivative(r, static_cast<double>(z)) == doctest::Approx(static_cast<double>(fd)).epsilon(1e-8));
  }
}

TEST_CASE("fixed points of the right generator") {
  auto fp = fixed_points(generators(1.0).right);
  REQUIRE(fp.size() == 2);
  CHECK(fp[0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(fp[1] == doctest::Approx(2.0).epsilon(1e-14));

  fp = fixed_points(generators(kSqrt3).right);
  REQUIRE(fp.size() == 2);
  CHECK(fp[0] == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(fp[1] == doctest::Approx(1.0).epsilon(1e-7));

  std::mt19937_64 g(21);
  for (int i = 0; i < 300; ++i) {
    const double u = random_u(g);
    if (near_sqrt3(u)) continue;
    const double x = x_param(u);
    const double other = 1.0 / (u * u * x);
    const auto pts = fixed_points(generators(u).right);
    REQUIRE(pts.size() == 2);
    CHECK(pts[0] == doctest::Approx(std::min(1.0, other)).epsilon(1e-9));
    CHECK(pts[1] == doctest::Approx(std::max(1.0, other)).epsilon(1e-9));
    for (double p : pts) CHECK(std::abs(apply(generators(u).right, p) - p) <= 1e-9 * std::max(1.0, p));
  }
}

TEST_CASE("fixed points edge cases") {
  CHECK_THROWS_AS(fixed_points(Matrix2::identity()), DegenerateError);
  CHECK_THROWS_AS(fixed_points(Matrix2(3.0, 0.0, 0.0, 3.0)), DegenerateError);
  // Rotation-like map without real fixed points: z -> -1/z.
  CHECK(fixed_points(Matrix2(0.0, -1.0, 1.0, 0.0)).empty());
  // Affine map z -> 2z + 1 fixes -1 only.
  auto fp = fixed_points(Matrix2(2.0, 1.0, 0.0, 1.0));
  REQUIRE(fp.size() == 1);
  CHECK(fp[0] == doctest::Approx(-1.0));
}

TEST_CASE("Matrix2 construction checks") {
  CHECK_THROWS_AS(Matrix2(1.0, 2.0, 2.0, 4.0), DomainError);
  CHECK_THROWS_AS(Matrix2(std::numeric_limits<double>::infinity(), 0.0, 0.0, 1.0), NumericRangeError);
  Matrix2 m{4.0, -8.0, 2.0, 1.0};
  const auto n = m.normalized();
  CHECK(n.max_abs_entry() == 1.0);
  CHECK(apply(n, 0.3) == doctest::Approx(apply(m, 0.3)).epsilon(1e-15));
  CHECK_FALSE(m.to_string().empty());
  // Long products stay usable even when a d - b c cancels to zero.
  const auto g = generators(3.0);
  Matrix2 p = Matrix2::identity();
  for (int i = 0; i < 60; ++i) p = compose(p, i % 3 == 0 ? g.left : g.right);
  CHECK(apply(p.normalized(), 1.0) >= apply(p.normalized(), 0.0));
}

TEST_CASE("near_sqrt3") {
  CHECK(near_sqrt3(kSqrt3));
  CHECK(near_sqrt3(std::nextafter(kSqrt3, 2.0)));
  CHECK_FALSE(near_sqrt3(1.7320));
  CHECK_FALSE(near_sqrt3(1.7321));
}
