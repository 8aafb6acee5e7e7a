#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "derham/derham_cdf.hpp"

using namespace derham;

namespace {

double closed_form_u1(double x) { return 2.0 * x / (1.0 + x); }

// Simple random walk started at 0, absorbed at -(k + 1) and at +top:
// P(hit +top first) = (k + 1) / (top + k + 1). Conditioning on exit at +top
// from the symmetric interval gives the level-n table entry at index k.
double gamblers_ruin(int level, int k) {
  const double top = std::ldexp(1.0, level);
  if (k == 0) return 0.0;
  // P(R <= top + k - 1 | exit at +top), i.e. the walk never reaches -k.
  const double p_avoid = k / (top + k);
  return p_avoid / 0.5;
}

Dyadic random_dyadic(std::mt19937_64& g, int max_level) {
  const int n = static_cast<int>(g() % (max_level + 1));
  const std::uint64_t span = (std::uint64_t{1} << n) + 1;
  return Dyadic::make(g() % span, n);
}

const double kUs[] = {0.3, 0.7, 1.0, 1.5, kSqrt3, 2.0, 3.0};

}  // namespace

TEST_CASE("model basics") {
  DeRhamModel m(1.0);
  CHECK(m.x_u() == doctest::Approx(0.5));
  CHECK(m.gamma() == doctest::Approx(1.5));
  CHECK(m.join_value() == doctest::Approx(2.0 / 3.0));
  CHECK_FALSE(m.z1().has_value());
  CHECK_FALSE(DeRhamModel(kSqrt3).z1().has_value());
  REQUIRE(DeRhamModel(2.0).z1().has_value());
  CHECK(*DeRhamModel(2.0).z1() == doctest::Approx((1.0 + std::sqrt(33.0)) / 8.0).epsilon(1e-14));
  CHECK_THROWS_AS(DeRhamModel(0.0), DomainError);
  CHECK_THROWS_AS(DeRhamModel(-1.0), DomainError);
}

TEST_CASE("table level 0, 1, 2 at u = 1") {
  DeRhamModel m(1.0);
  CHECK(build_table(m, 0).values == std::vector<double>{0.0, 1.0});
  const auto t1 = build_table(m, 1);
  REQUIRE(t1.values.size() == 3);
  CHECK(t1.values[1] == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  const auto t2 = build_table(m, 2);
  const double expect[] = {0.0, 0.4, 2.0 / 3.0, 6.0 / 7.0, 1.0};
  for (int j = 0; j < 5; ++j) CHECK(t2.values[j] == doctest::Approx(expect[j]).epsilon(1e-15));
  CHECK_THROWS_AS(build_table(m, kMaxTableLevel + 1), SizeError);
  CHECK_THROWS_AS(build_table(m, -1), SizeError);
}

TEST_CASE("u = 1 table matches the gambler's-ruin oracle") {
  DeRhamModel m(1.0);
  for (int n = 1; n <= 8; ++n) {
    const auto t = build_table(m, n);
    for (int k = 0; k <= (1 << n); ++k) {
      CAPTURE(n);
      CAPTURE(k);
      const double oracle = k == (1 << n) ? 1.0 : gamblers_ruin(n, k);
      CHECK(t.values[k] == doctest::Approx(oracle).epsilon(1e-13));
      CHECK(t.values[k] == doctest::Approx(closed_form_u1(std::ldexp(k, -n))).epsilon(1e-13));
    }
  }
}

TEST_CASE("table invariants for many u") {
  std::mt19937_64 g(29);
  std::uniform_real_distribution<double> ud(0.05, 5.0);
  for (int i = 0; i < 40; ++i) {
    const double u = ud(g);
    DeRhamModel m(u);
    const auto t = build_table(m, 10);
    CHECK(t.values.front() == 0.0);
    CHECK(t.values.back() == 1.0);
    for (std::size_t j = 1; j < t.values.size(); ++j) CHECK(t.values[j] > t.values[j - 1]);
    // Refinement: the level-9 table is the even-index subsequence.
    const auto coarse = build_table(m, 9);
    for (std::size_t j = 0; j < coarse.values.size(); ++j) CHECK(coarse.values[j] == t.values[2 * j]);
    // Self-similarity: left half is Phi0 of the level-9 table, right half Phi1.
    for (std::size_t j = 0; j < coarse.values.size(); j += 37) {
      CHECK(t.values[j] == doctest::Approx(apply(m.left(), coarse.values[j])).epsilon(1e-14));
      CHECK(t.values[512 + j] == doctest::Approx(apply(m.right(), coarse.values[j])).epsilon(1e-13));
    }
  }
}

TEST_CASE("extended precision agrees with double") {
  for (double u : kUs) {
    DeRhamModel m(u);
    const auto a = build_table(m, 12);
    const auto b = build_table(m, 12, Precision::extended);
    double worst = 0.0;
    for (std::size_t j = 0; j < a.values.size(); ++j) worst = std::max(worst, std::abs(a.values[j] - b.values[j]));
    CAPTURE(u);
    CHECK(worst <= 1e-13);
  }
}

TEST_CASE("three evaluators agree at random dyadics") {
  std::mt19937_64 g(31);
  for (double u : kUs) {
    DeRhamModel m(u);
    const auto t = build_table(m, 12);
    for (int i = 0; i < 300; ++i) {
      const auto d = random_dyadic(g, 12);
      const double tv = t.at(d);
      const double ev = eval_cdf(m, d);
      CHECK(std::abs(tv - ev) <= 1e-12);
      if (!d.is_one() && !d.is_zero()) {
        const double pv = apply(product_entries(m, d.to_double(), 12), 0.0);
        CHECK(std::abs(tv - pv) <= 1e-12);
      }
      const auto br = eval_cdf(m, d.to_double());
      CHECK(br.exact);
      CHECK(br.width() == 0.0);
      CHECK(br.lower == doctest::Approx(tv).epsilon(1e-12));
    }
  }
}

TEST_CASE("eval_cdf brackets") {
  DeRhamModel m(1.0);
  CHECK(eval_cdf(m, 0.0).lower == 0.0);
  CHECK(eval_cdf(m, 0.0).upper == 0.0);
  CHECK(eval_cdf(m, 1.0).lower == 1.0);
  CHECK(eval_cdf(m, 1.0).upper == 1.0);
  const auto b = eval_cdf(m, 1.0 / 3.0, 40);
  CHECK(b.width() < 1e-6);
  CHECK(b.lower <= 0.5 + 1e-15);
  CHECK(b.upper >= 0.5 - 1e-15);
  CHECK_THROWS_AS(eval_cdf(m, 1.5), DomainError);
  CHECK_THROWS_AS(eval_cdf(m, -0.1), DomainError);

  std::mt19937_64 g(37);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int i = 0; i < 300; ++i) {
    const double x = unit(g);
    const auto br = eval_cdf(m, x, 45);
    CHECK(br.lower <= closed_form_u1(x) + 1e-14);
    CHECK(br.upper >= closed_form_u1(x) - 1e-14);
  }
}

TEST_CASE("all-ones prefix at sqrt3 gives n/(n+1)") {
  DeRhamModel m(kSqrt3);
  for (int n = 1; n <= 60; ++n) {
    const auto d = Dyadic::make((std::uint64_t{1} << n) - 1, n);
    CHECK(eval_cdf(m, d) == doctest::Approx(n / (n + 1.0)).epsilon(1e-12));
  }
}

TEST_CASE("functional equation at u = 1 on random x") {
  DeRhamModel m(1.0);
  std::mt19937_64 g(41);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    const double x = unit(g);
    const double half = eval_cdf(m, x / 2).mid();
    CHECK(half == doctest::Approx(apply(m.left(), eval_cdf(m, x).mid())).epsilon(1e-10));
  }
}

TEST_CASE("compose_digits") {
  DeRhamModel m(1.0);
  const std::vector<int> none;
  CHECK(compose_digits(m, none, 0.3) == 0.3);
  const std::vector<int> ten{1, 0};
  CHECK(compose_digits(m, ten, 1.0) == doctest::Approx(6.0 / 7.0).epsilon(1e-15));
  CHECK(compose_digits(m, ten, 0.0) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("quantile") {
  DeRhamModel m(1.0);
  CHECK(quantile(m, 0.0, 1e-9) == 0.0);
  CHECK(quantile(m, 1.0, 1e-9) == 1.0);
  CHECK(quantile(m, 0.5, 1e-9) == doctest::Approx(1.0 / 3.0).epsilon(1e-8));
  CHECK(quantile(m, 2.0 / 3.0, 1e-9) == doctest::Approx(0.5).epsilon(1e-8));
  CHECK_THROWS_AS(quantile(m, 0.5, 1e-13), DomainError);
  CHECK_THROWS_AS(quantile(m, 1.5, 1e-9), DomainError);
  // Inverse property against the closed form.
  for (double p = 0.05; p < 1.0; p += 0.1) {
    const double q = quantile(m, p, 1e-10);
    CHECK(closed_form_u1(q) >= p - 1e-12);
    CHECK(closed_form_u1(q - 2e-10) < p + 1e-12);
  }
}

TEST_CASE("increment") {
  std::mt19937_64 g(43);
  for (double u : kUs) {
    DeRhamModel m(u);
    CHECK(increment(m, 0.0, 1) == doctest::Approx(m.join_value()).epsilon(1e-14));
    // Telescoping over one level.
    const int n = 7;
    double sum = 0.0;
    for (int k = 0; k < (1 << n); ++k) sum += increment(m, std::ldexp(k, -n), n);
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-13));
  }
  CHECK(increment(DeRhamModel(1.0), 0.0, 1) == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("product_entries") {
  DeRhamModel m(1.0);
  const auto p = product_entries(m, 0.5, 1);
  CHECK(p == m.right());
  const auto zeros = product_entries(m, 0.0, 5);
  Matrix2 power = Matrix2::identity();
  for (int i = 0; i < 5; ++i) power = compose(power, m.left());
  CHECK(zeros == power);
  CHECK_THROWS_AS(product_entries(m, 0.3, 41), SizeError);
  const auto r = product_entries(m, 0.3, 62, true);
  CHECK(r.max_abs_entry() == doctest::Approx(1.0));
  // Renormalization keeps the same Mobius map.
  for (double u : kUs) {
    DeRhamModel mu(u);
    const auto plain = product_entries(mu, 0.3, 40);
    const auto scaled = product_entries(mu, 0.3, 40, true);
    CHECK(apply(scaled, 0.0) == doctest::Approx(apply(plain, 0.0)).epsilon(1e-12));
    CHECK(apply(scaled, 1.0) == doctest::Approx(apply(plain, 1.0)).epsilon(1e-12));
  }
}
