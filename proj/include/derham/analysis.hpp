#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "derham/derham_cdf.hpp"
#include "derham/dyadic.hpp"

namespace derham {

enum class Classification {
  delta_at_0,
  absolutely_continuous,
  singular_continuous_regime,
  boundary_sqrt3,
  singular_with_atoms,
};

std::string to_string(Classification c);
Classification classify(double u);

/// Natural-log binary entropy, 0 log 0 = 0.
double entropy(double p);

struct DimensionBounds {
  bool applicable = false;          // 0 < u < 1
  double upper = 0.0;               // s(x_u) / log 2
  double lower = 0.0;               // s(2 x_u / (1 + x_u)) / log 2
  bool strictly_below_one = false;  // u != 1 and 0 < u < sqrt(3)
};

DimensionBounds dimension_bounds(double u);

struct GammaRatios {
  double gamma;
  double p0;
  double p1;
};

/// gamma_u together with p0(z) = (z + 1) / (z + gamma_u) and p1 = 1 - p0.
GammaRatios gamma_and_ratios(double u, double z);

/// Fixed-point residuals of the transposed generators at gamma_u - 2; both
/// vanish exactly when u = 1.
std::array<double, 2> singularity_criterion(double u);

struct AtomAnalysis {
  std::optional<double> z1;   // attracting fixed point of the right map, u > sqrt(3)
  std::optional<double> z0;   // where the right map's derivative crosses 1
  std::vector<double> iterates;  // right map iterated from 0
};

AtomAnalysis atom_analysis(double u, int iterations = 60);

struct AtomMass {
  bool applicable = false;  // false: u <= sqrt(3), no atoms
  double mass = 0.0;
  int last_one = 0;         // 0 for x = 1
};

/// Mass of the atom at the dyadic x in (0, 1].
AtomMass atom_mass(double u, const Dyadic& x);

/// g_u(x) - g_u(x - 2^-n) from exact dyadic evaluation; tends to the atom
/// mass as n grows.
double left_jump(double u, const Dyadic& x, int n);

/// Largest adjacent difference of the level-m table.
double max_increment(double u, int m);

struct BoundaryMapChecks {
  bool left_below_right = false;           // h0 < h1 on [0, 1]
  bool derivatives_increasing = false;     // h0', h1' strictly increasing on (0, 1)
  bool left_slope_within_three = false;    // h0' <= 3 h1' on (0, 1)
  bool left_slope_below_past_two = false;  // h0' <= h1' for z >= h1(h1(0))

  bool all() const {
    return left_below_right && derivatives_increasing && left_slope_within_three &&
           left_slope_below_past_two;
  }
};

/// The four inequalities for the u = sqrt(3) maps on a uniform grid.
BoundaryMapChecks boundary_map_checks(int grid_size);

struct DerivativeDiagnostic {
  std::vector<double> scaled_increments;  // 2^n increment(x, n), n = 1..max_level
  std::vector<double> ratios;             // p_{X_{n+1}}(r_n / s_n), n = 1..max_level-1
};

/// x must not terminate within max_level + 1 binary digits.
DerivativeDiagnostic derivative_diagnostic(double u, double x, int max_level);

struct RegularityReport {
  double u = 0.0;
  double x_u = 1.0;
  double gamma_u = 1.0;
  std::optional<std::array<double, 2>> criterion_residuals;  // absent for u = 0
  DimensionBounds dims;
  AtomAnalysis atoms;
  std::optional<double> atom_mass_at_1;
  Classification classification = Classification::delta_at_0;
};

RegularityReport regularity_report(double u);

}  // namespace derham

namespace derham {

/// g_u(x) - g_u(x - 2^{-(m + steps)}) through the fixed-point route
/// phi(1) - phi(Phi_{u,1}^steps(0)), m = last_one_index(x) (m = 0 and
/// phi = id for x = 1). Not limited by the 62-level dyadic range.
double left_jump_by_iteration(double u, const Dyadic& x, int steps);

}  // namespace derham
