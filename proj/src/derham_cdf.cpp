#include "derham/derham_cdf.hpp"

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <cmath>

namespace derham {

namespace {

using Extended = boost::multiprecision::cpp_bin_float_50;

// Generator entries recomputed from u in extended precision.
struct ExtendedGenerators {
  explicit ExtendedGenerators(double u) {
    const Extended uu = Extended(u) * Extended(u);
    x = 2 / (1 + sqrt(1 + 8 * uu));
    ux2 = uu * x * x;
  }
  Extended x, ux2;

  Extended apply(int digit, const Extended& z) const {
    return digit == 0 ? x * z / (1 - ux2 * z) : x / ((1 - ux2) - ux2 * z);
  }
};

double compose_extended(double u, std::span<const int> bits, double z) {
  const ExtendedGenerators g(u);
  Extended v = z;
  for (auto it = bits.rbegin(); it != bits.rend(); ++it) v = g.apply(*it, v);
  return static_cast<double>(v);
}

}  // namespace

namespace {

double checked_u(double u) {
  if (!(u > 0.0) || !std::isfinite(u)) throw DomainError("DeRhamModel: u must be finite and > 0");
  return u;
}

}  // namespace

DeRhamModel::DeRhamModel(double u)
    : u_(checked_u(u)), x_u_(x_param(u_)), gens_(generators(u_)) {
  gamma_ = (1.0 - u * u * x_u_ * x_u_) / x_u_;
  if (u > kSqrt3 && !near_sqrt3(u)) z1_ = 1.0 / (u * u * x_u_);
}

double CdfTable::at(const Dyadic& x) const {
  if (x.level() > level) throw DomainError("CdfTable: dyadic finer than table level");
  return values.at(static_cast<std::size_t>(x.numerator_at(level)));
}

CdfTable build_table(const DeRhamModel& model, int level, Precision precision) {
  if (level < 0 || level > kMaxTableLevel) {
    throw SizeError("build_table: level must be in [0, 30], got " + std::to_string(level));
  }
  CdfTable t;
  t.level = level;
  const std::size_t size = (std::size_t{1} << level) + 1;

  if (precision == Precision::extended) {
    const ExtendedGenerators g(model.u());
    std::vector<Extended> cur{Extended(0), Extended(1)};
    for (int n = 0; n < level; ++n) {
      const std::size_t half = cur.size() - 1;
      std::vector<Extended> next(2 * half + 1);
      for (std::size_t j = 0; j <= half; ++j) next[j] = g.apply(0, cur[j]);
      for (std::size_t j = 1; j <= half; ++j) next[half + j] = g.apply(1, cur[j]);
      cur = std::move(next);
    }
    t.values.reserve(size);
    for (const auto& v : cur) t.values.push_back(static_cast<double>(v));
    return t;
  }

  // Doubling pass in place: the right half is filled first from the old
  // values, then the left half overwrites them.
  t.values.assign(size, 0.0);
  t.values[1] = 1.0;
  for (int n = 0; n < level; ++n) {
    const std::size_t half = std::size_t{1} << n;
    // g(1) = 1 by definition; for u > sqrt(3) the right map may miss the
    // fixed endpoint by rounding and that error would grow level by level.
    t.values[2 * half] = 1.0;
    for (std::size_t j = half - 1; j >= 1; --j) {
      t.values[half + j] = apply(model.right(), t.values[j]);
    }
    for (std::size_t j = half + 1; j-- > 0;) {
      t.values[j] = apply(model.left(), t.values[j]);
    }
  }
  return t;
}

double compose_digits(const DeRhamModel& model, std::span<const int> bits, double z) {
  for (auto it = bits.rbegin(); it != bits.rend(); ++it) z = apply(model.generator(*it), z);
  return z;
}

namespace {

double compose_bits(const DeRhamModel& model, std::span<const int> bits, double z, Precision p) {
  return p == Precision::extended ? compose_extended(model.u(), bits, z)
                                  : compose_digits(model, bits, z);
}

}  // namespace

double eval_cdf(const DeRhamModel& model, const Dyadic& x, Precision precision) {
  if (x.is_one()) return 1.0;
  if (x.is_zero()) return 0.0;
  const auto d = digits(x, x.level());
  return compose_bits(model, d.bits, 0.0, precision);
}

Bracket eval_cdf(const DeRhamModel& model, double x, int max_depth, Precision precision) {
  if (!(x >= 0.0 && x <= 1.0)) throw DomainError("eval_cdf: x must lie in [0, 1]");
  if (max_depth < 0 || max_depth > kMaxDyadicLevel) {
    throw SizeError("eval_cdf: max_depth must be in [0, 62]");
  }
  if (x == 1.0) return {1.0, 1.0, 0, true};
  if (x == 0.0) return {0.0, 0.0, 0, true};

  const int term = terminating_level(x, max_depth);
  if (term >= 0) {
    const auto d = digits(x, term);
    const double v = compose_bits(model, d.bits, 0.0, precision);
    return {v, v, term, true};
  }
  const auto d = digits(x, max_depth);
  return {compose_bits(model, d.bits, 0.0, precision), compose_bits(model, d.bits, 1.0, precision),
          max_depth, false};
}

double quantile(const DeRhamModel& model, double p, double tol) {
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("quantile: p must lie in [0, 1]");
  if (!(tol >= 1e-12)) throw DomainError("quantile: tol must be >= 1e-12");
  if (p == 0.0) return 0.0;
  // Invariant: f(lo) < p <= f(hi). Midpoints are dyadic of level <= 40, so
  // every evaluation is exact.
  std::uint64_t lo = 0, hi = 1;
  int level = 0;
  while (std::ldexp(1.0, -level) > tol) {
    lo <<= 1;
    hi <<= 1;
    ++level;
    const std::uint64_t mid = (lo + hi) / 2;
    if (eval_cdf(model, Dyadic::make(mid, level)) >= p) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return std::ldexp(static_cast<double>(hi), -level);
}

double increment(const DeRhamModel& model, double x, int n) {
  if (n < 1) throw DomainError("increment: n must be >= 1");
  const auto d = digits(x, n);
  // Phi(P; 1) - Phi(P; 0) = det P / (d (c + d)). The determinant is carried as
  // a running product so the increment never comes from a cancelling
  // difference of two nearby CDF values.
  Matrix2 p = Matrix2::identity();
  double det = 1.0;
  for (int bit : d.bits) {
    const Matrix2& g = model.generator(bit);
    p = compose(p, g);
    const double s = p.max_abs_entry();
    p = p.normalized();
    det *= g.det() / (s * s);
  }
  return det / (p.d() * (p.c() + p.d()));
}

Matrix2 product_entries(const DeRhamModel& model, double x, int n, bool renormalize) {
  if (n < 1) throw DomainError("product_entries: n must be >= 1");
  if (!renormalize && n > 40) {
    throw SizeError("product_entries: n > 40 requires renormalization");
  }
  const auto d = digits(x, n);
  Matrix2 p = model.generator(d.bits.front());
  for (std::size_t i = 1; i < d.bits.size(); ++i) {
    p = compose(p, model.generator(d.bits[i]));
    if (renormalize) {
      p = p.normalized();
    } else if (const double m = p.max_abs_entry(); m < 1e-150 || m > 1e150) {
      throw NumericRangeError("product_entries: entries out of range at factor " +
                              std::to_string(i + 1) + "; enable renormalization");
    }
  }
  return p;
}

}  // namespace derham
