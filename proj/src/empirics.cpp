#include "derham/empirics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace derham {

EmpiricalCDF ecdf(const DepthHistogram& hist) {
  if (hist.total == 0) throw DomainError("ecdf: empty histogram");
  EmpiricalCDF e;
  e.level = hist.level;
  e.total = hist.total;
  e.cumulative.resize(hist.counts.size());
  std::uint64_t running = 0;
  for (std::size_t d = 0; d < hist.counts.size(); ++d) {
    running += hist.counts[d];
    e.cumulative[d] = static_cast<double>(running) / static_cast<double>(hist.total);
  }
  return e;
}

double EmpiricalCDF::at_coarse_boundary(int grid_level, std::uint64_t k) const {
  if (grid_level < 0 || grid_level > level) {
    throw DomainError("ecdf: grid level " + std::to_string(grid_level) +
                      " exceeds sample level " + std::to_string(level));
  }
  if (k == 0) return 0.0;
  // D_N / 2^N < k / 2^n  <=>  D_N <= k 2^{N-n} - 1
  const std::uint64_t d = (k << (level - grid_level)) - 1;
  return cumulative.at(static_cast<std::size_t>(d));
}

double ks_against_table(const EmpiricalCDF& e, const CdfTable& table) {
  const std::uint64_t cells = std::uint64_t{1} << table.level;
  double worst = 0.0;
  for (std::uint64_t k = 1; k <= cells; ++k) {
    worst = std::max(worst, std::abs(e.at_coarse_boundary(table.level, k) -
                                     table.values[static_cast<std::size_t>(k)]));
  }
  return worst;
}

double ks_against_exact(const EmpiricalCDF& e, const DeRhamModel& model, int grid_level) {
  if (grid_level > e.level) {
    throw DomainError("ks_against_exact: grid level exceeds sample level");
  }
  return ks_against_table(e, build_table(model, grid_level));
}

double ks_between(const EmpiricalCDF& a, const EmpiricalCDF& b, int grid_level) {
  const std::uint64_t cells = std::uint64_t{1} << grid_level;
  double worst = 0.0;
  for (std::uint64_t k = 1; k <= cells; ++k) {
    worst = std::max(worst, std::abs(a.at_coarse_boundary(grid_level, k) -
                                     b.at_coarse_boundary(grid_level, k)));
  }
  return worst;
}

double dkw_epsilon(std::uint64_t n_samples, double confidence) {
  if (n_samples < 1) throw DomainError("dkw_epsilon: need at least one sample");
  if (!(confidence > 0.0 && confidence < 1.0)) {
    throw DomainError("dkw_epsilon: confidence must lie in (0, 1)");
  }
  const double eps =
      std::sqrt(std::log(2.0 / (1.0 - confidence)) / (2.0 * static_cast<double>(n_samples)));
  return std::min(eps, 1.0);
}

}  // namespace derham
