#include "derham/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace derham {

namespace {

bool near_one(double u) { return std::abs(u - 1.0) <= 1e-12; }
bool above_sqrt3(double u) { return u > kSqrt3 && !near_sqrt3(u); }

void require_positive(double u, const char* what) {
  if (!(u > 0.0) || !std::isfinite(u)) throw DomainError(std::string(what) + ": u must be > 0");
}

}  // namespace

std::string to_string(Classification c) {
  switch (c) {
    case Classification::delta_at_0: return "delta-at-0";
    case Classification::absolutely_continuous: return "absolutely-continuous";
    case Classification::singular_continuous_regime: return "singular-continuous-regime";
    case Classification::boundary_sqrt3: return "boundary-sqrt3";
    case Classification::singular_with_atoms: return "singular-with-atoms";
  }
  return "unknown";
}

Classification classify(double u) {
  if (!(u >= 0.0) || !std::isfinite(u)) throw DomainError("classify: u must be >= 0");
  if (u == 0.0) return Classification::delta_at_0;
  if (near_one(u)) return Classification::absolutely_continuous;
  if (near_sqrt3(u)) return Classification::boundary_sqrt3;
  if (u > kSqrt3) return Classification::singular_with_atoms;
  return Classification::singular_continuous_regime;
}

double entropy(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("entropy: p must lie in [0, 1]");
  auto term = [](double t) { return t > 0.0 ? -t * std::log(t) : 0.0; };
  return term(p) + term(1.0 - p);
}

DimensionBounds dimension_bounds(double u) {
  if (!(u >= 0.0) || !std::isfinite(u)) throw DomainError("dimension_bounds: u must be >= 0");
  DimensionBounds b;
  b.strictly_below_one = u > 0.0 && u < kSqrt3 && !near_sqrt3(u) && !near_one(u);
  if (!(u > 0.0 && u < 1.0)) return b;
  const double x = x_param(u);
  b.applicable = true;
  b.upper = entropy(x) / std::numbers::ln2;
  b.lower = entropy(2.0 * x / (1.0 + x)) / std::numbers::ln2;
  return b;
}

GammaRatios gamma_and_ratios(double u, double z) {
  const DeRhamModel model(u);
  const double g = model.gamma();
  if (!(z > -g)) throw DomainError("gamma_and_ratios: z must exceed -gamma_u");
  const double p0 = (z + 1.0) / (z + g);
  return {g, p0, 1.0 - p0};
}

std::array<double, 2> singularity_criterion(double u) {
  const DeRhamModel model(u);
  const double z = model.gamma() - 2.0;
  return {apply(transpose(model.left()), z) - z, apply(transpose(model.right()), z) - z};
}

AtomAnalysis atom_analysis(double u, int iterations) {
  const DeRhamModel model(u);
  AtomAnalysis out;
  out.iterates.reserve(static_cast<std::size_t>(iterations) + 1);
  double z = 0.0;
  out.iterates.push_back(z);
  for (int j = 0; j < iterations; ++j) {
    z = apply(model.right(), z);
    out.iterates.push_back(z);
  }
  if (!above_sqrt3(u)) return out;

  out.z1 = model.z1();
  // The right map's derivative is increasing on [0, 1], below 1 at 0 and
  // equal to u^2 x_u > 1 at 1.
  double lo = 0.0, hi = 1.0;
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    (derivative(model.right(), mid) < 1.0 ? lo : hi) = mid;
  }
  out.z0 = 0.5 * (lo + hi);
  return out;
}

AtomMass atom_mass(double u, const Dyadic& x) {
  require_positive(u, "atom_mass");
  if (x.is_zero()) throw DomainError("atom_mass: x must lie in (0, 1]");
  AtomMass out;
  if (!above_sqrt3(u)) return out;
  const DeRhamModel model(u);
  const double z1 = *model.z1();
  out.applicable = true;
  if (x.is_one()) {
    out.mass = 1.0 - z1;
    return out;
  }
  // phi = Phi_{x_1} o ... o Phi_{x_{m-1}} o Phi_0
  out.last_one = last_one_index(x);
  auto bits = digits(x, out.last_one).bits;
  bits.back() = 0;
  out.mass = compose_digits(model, bits, 1.0) - compose_digits(model, bits, z1);
  return out;
}

double left_jump(double u, const Dyadic& x, int n) {
  const DeRhamModel model(u);
  if (x.is_zero()) throw DomainError("left_jump: x must lie in (0, 1]");
  if (n < x.level() || n < 1 || n > kMaxDyadicLevel) {
    throw DomainError("left_jump: need level(x) <= n <= 62");
  }
  const Dyadic before = Dyadic::make(x.numerator_at(n) - 1, n);
  return eval_cdf(model, x) - eval_cdf(model, before);
}

double max_increment(double u, int m) {
  if (m < 1 || m > 24) throw SizeError("max_increment: m must be in [1, 24]");
  const auto table = build_table(DeRhamModel(u), m);
  double best = 0.0;
  for (std::size_t j = 1; j < table.values.size(); ++j) {
    best = std::max(best, table.values[j] - table.values[j - 1]);
  }
  return best;
}

BoundaryMapChecks boundary_map_checks(int grid_size) {
  if (grid_size < 100) throw DomainError("boundary_map_checks: grid_size must be >= 100");
  const DeRhamModel model(kSqrt3);
  const auto& h0 = model.left();
  const auto& h1 = model.right();
  const double threshold = apply(h1, apply(h1, 0.0));

  BoundaryMapChecks out{true, true, true, true};
  double prev0 = -1.0, prev1 = -1.0;
  for (int i = 0; i <= grid_size; ++i) {
    const double z = static_cast<double>(i) / grid_size;
    if (!(apply(h0, z) < apply(h1, z))) out.left_below_right = false;
    if (i == 0 || i == grid_size) continue;  // the rest are stated on (0, 1)
    const double d0 = derivative(h0, z);
    const double d1 = derivative(h1, z);
    if (i > 1 && !(d0 > prev0 && d1 > prev1)) out.derivatives_increasing = false;
    prev0 = d0;
    prev1 = d1;
    if (!(d0 <= 3.0 * d1)) out.left_slope_within_three = false;
    if (z >= threshold && !(d0 <= d1)) out.left_slope_below_past_two = false;
  }
  return out;
}

DerivativeDiagnostic derivative_diagnostic(double u, double x, int max_level) {
  if (max_level < 1 || max_level > 61) {
    throw DomainError("derivative_diagnostic: max_level must be in [1, 61]");
  }
  if (!(x > 0.0 && x < 1.0)) throw DomainError("derivative_diagnostic: x must lie in (0, 1)");
  if (terminating_level(x, max_level + 1) >= 0) {
    throw DomainError("derivative_diagnostic: x is dyadic at this resolution; use atom_mass");
  }
  const DeRhamModel model(u);
  const auto d = digits(x, max_level);
  DerivativeDiagnostic out;
  for (int n = 1; n <= max_level; ++n) {
    out.scaled_increments.push_back(std::ldexp(increment(model, x, n), n));
  }
  for (int n = 1; n < max_level; ++n) {
    const Matrix2 p = product_entries(model, x, n, /*renormalize=*/true);
    const auto r = gamma_and_ratios(u, p.c() / p.d());
    out.ratios.push_back(d.bits[static_cast<std::size_t>(n)] == 0 ? r.p0 : r.p1);
  }
  return out;
}

RegularityReport regularity_report(double u) {
  RegularityReport r;
  r.u = u;
  r.classification = classify(u);
  r.dims = dimension_bounds(u);
  if (u == 0.0) return r;  // x_u = 1, gamma = 1: point mass at 0
  const DeRhamModel model(u);
  r.x_u = model.x_u();
  r.gamma_u = model.gamma();
  r.criterion_residuals = singularity_criterion(u);
  r.atoms = atom_analysis(u);
  if (above_sqrt3(u)) r.atom_mass_at_1 = atom_mass(u, Dyadic::make(1, 0)).mass;
  return r;
}

}  // namespace derham

namespace derham {

double left_jump_by_iteration(double u, const Dyadic& x, int steps) {
  if (x.is_zero()) throw DomainError("left_jump_by_iteration: x must lie in (0, 1]");
  if (steps < 0) throw DomainError("left_jump_by_iteration: steps must be >= 0");
  const DeRhamModel model(u);
  double z = 0.0;
  for (int j = 0; j < steps; ++j) z = apply(model.right(), z);
  if (x.is_one()) return 1.0 - z;
  auto bits = digits(x, last_one_index(x)).bits;
  bits.back() = 0;
  return compose_digits(model, bits, 1.0) - compose_digits(model, bits, z);
}

}  // namespace derham
