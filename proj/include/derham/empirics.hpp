#pragma once

#include <cstdint>
#include <vector>

#include "derham/derham_cdf.hpp"
#include "derham/walk_model.hpp"

namespace derham {

/// Fraction of sampled depths <= d, for d in [0, 2^N - 1].
struct EmpiricalCDF {
  int level = 0;
  std::vector<double> cumulative;
  std::uint64_t total = 0;

  /// Empirical P(R_N / 2^N - 1 < k / 2^n), the quantity the exact level-n
  /// table holds at index k.
  double at_coarse_boundary(int grid_level, std::uint64_t k) const;
};

EmpiricalCDF ecdf(const DepthHistogram& hist);

/// Sup over the level-n dyadic grid of |ECDF - g_u|. On that grid the
/// finite-N law coincides with the level-n table, so there is no
/// discretization error.
double ks_against_exact(const EmpiricalCDF& e, const DeRhamModel& model, int grid_level);
double ks_against_table(const EmpiricalCDF& e, const CdfTable& table);

/// Sup over the level-n grid of |ECDF_a - ECDF_b| for samples at any levels >= n.
double ks_between(const EmpiricalCDF& a, const EmpiricalCDF& b, int grid_level);

/// Dvoretzky-Kiefer-Wolfowitz half-width sqrt(ln(2 / alpha) / (2 n)), capped at 1.
double dkw_epsilon(std::uint64_t n_samples, double confidence);

}  // namespace derham
