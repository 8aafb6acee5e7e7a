#pragma once

#include <cstdint>
#include <vector>

#include "derham/errors.hpp"

namespace derham {

/// Finite nearest-neighbour path on the integers starting at 0.
class LatticePath {
 public:
  explicit LatticePath(std::vector<std::int64_t> points);

  const std::vector<std::int64_t>& points() const { return points_; }
  /// Number of steps.
  std::size_t length() const { return points_.size() - 1; }
  std::int64_t back() const { return points_.back(); }
  std::int64_t min() const;

  /// The reflected path -omega.
  LatticePath negated() const;

  friend bool operator==(const LatticePath&, const LatticePath&) = default;

 private:
  std::vector<std::int64_t> points_;
};

/// Coarse path of successive first visits to new points of 2^M Z, divided
/// by 2^M. M = 0 is the identity.
LatticePath decimate(const LatticePath& path, int M);

/// Empty if path lies in W_{N,+} (first hit of {-2^N, 2^N} is +2^N at the
/// last point), otherwise the violated condition.
std::string membership_violation(const LatticePath& path, int N);

/// Exact probability of path under the level-N positive-exit law. u >= 0
/// with 0^0 = 1.
double path_weight(double u, int N, const LatticePath& path);

/// The level-1 coarse path (0, e_1, 0, e_2, ..., 0, e_{m-1}, 0, 1, 2).
struct Skeleton {
  int pairs = 1;
  std::vector<int> signs;  // m - 1 entries of +1 / -1

  int minus_count() const;
  LatticePath to_path() const;
};

/// Counter-based generator: the stream is a pure function of (key, stream),
/// so samples do not depend on scheduling.
class CounterRng {
 public:
  using result_type = std::uint64_t;
  CounterRng(std::uint64_t key, std::uint64_t stream);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }
  result_type operator()();
  /// Uniform on (0, 1].
  double uniform_open0();

 private:
  std::uint64_t state_;
};

Skeleton sample_skeleton(double u, CounterRng& rng);

inline constexpr int kMaxSampleLevel = 20;

/// Excursion depth D_N = R_N - 2^N under the level-N positive-exit law.
std::int64_t sample_depth(double u, int N, CounterRng& rng);

struct DepthHistogram {
  int level = 0;
  std::vector<std::uint64_t> counts;  // counts[d] for d in [0, 2^N - 1]
  std::uint64_t total = 0;
  std::uint64_t seed = 0;

  static DepthHistogram empty(int level, std::uint64_t seed);
  void add(std::int64_t depth, std::uint64_t n = 1);
  void merge(const DepthHistogram& other);
};

/// Default recursion budget; overridable through DERHAM_RANGE_BUDGET.
inline constexpr double kDefaultBudget = 1e9;
double budget_from_environment();

/// Expected recursion calls for count samples: count * (1 / x_u)^N.
double expected_cost(double u, int N, std::uint64_t count);

/// Histogram of count independent depths. Sample i draws from
/// CounterRng(seed, i); workers take contiguous index blocks.
DepthHistogram simulate_ranges(double u, int N, std::uint64_t count, std::uint64_t seed,
                               int workers, double budget = budget_from_environment());

struct ExactEnumeration {
  std::vector<double> cdf;  // cdf[k] = enumerated P(R_N <= 2^N + k), k in [0, 2^N - 1]
  double tail_bound = 0.0;  // upper bound on the mass not enumerated
};

/// Brute-force sum of path weights over all coarse/fine path classes with at
/// most m_max pairs per hierarchy level. N in {1, 2}.
ExactEnumeration enumerate_exact(double u, int N, int m_max);

}  // namespace derham
