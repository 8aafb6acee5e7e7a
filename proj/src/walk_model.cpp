#include "derham/walk_model.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <string>
#include <thread>

#include "derham/mobius.hpp"

namespace derham {

LatticePath::LatticePath(std::vector<std::int64_t> points) : points_(std::move(points)) {
  if (points_.empty()) throw DomainError("LatticePath: empty path");
  if (points_.front() != 0) throw DomainError("LatticePath: path must start at 0");
  for (std::size_t i = 1; i < points_.size(); ++i) {
    if (std::abs(points_[i] - points_[i - 1]) != 1) {
      throw DomainError("LatticePath: step " + std::to_string(i) + " is not nearest-neighbour");
    }
  }
}

std::int64_t LatticePath::min() const { return *std::min_element(points_.begin(), points_.end()); }

LatticePath LatticePath::negated() const {
  std::vector<std::int64_t> p(points_.size());
  std::transform(points_.begin(), points_.end(), p.begin(), [](std::int64_t v) { return -v; });
  return LatticePath(std::move(p));
}

namespace {

bool divisible(std::int64_t v, std::int64_t scale) { return v % scale == 0; }

// T_0 = 0 and T_i = first j > T_{i-1} with omega(j) in 2^M Z \ {omega(T_{i-1})}.
std::vector<std::size_t> hitting_times(const LatticePath& path, int M) {
  const auto& p = path.points();
  const std::int64_t scale = std::int64_t{1} << M;
  std::vector<std::size_t> times{0};
  for (std::size_t j = 1; j < p.size(); ++j) {
    if (divisible(p[j], scale) && p[j] != p[times.back()]) times.push_back(j);
  }
  return times;
}

double weight_unchecked(double u, double x, int N, const LatticePath& path) {
  const auto L = static_cast<double>(path.length());
  if (N == 1) return std::pow(u, L - 2.0) * std::pow(x, L - 1.0);

  const int M = N - 1;
  const auto times = hitting_times(path, M);
  const auto& p = path.points();
  std::vector<std::int64_t> coarse;
  coarse.reserve(times.size());
  for (auto t : times) coarse.push_back(p[t] >> M);
  double w = weight_unchecked(u, x, 1, LatticePath(std::move(coarse)));

  for (std::size_t j = 1; j < times.size() && w > 0.0; ++j) {
    const std::int64_t start = p[times[j - 1]];
    const std::int64_t sign = p[times[j]] > start ? 1 : -1;
    std::vector<std::int64_t> seg;
    seg.reserve(times[j] - times[j - 1] + 1);
    for (std::size_t i = times[j - 1]; i <= times[j]; ++i) seg.push_back(sign * (p[i] - start));
    w *= weight_unchecked(u, x, M, LatticePath(std::move(seg)));
  }
  return w;
}

std::uint64_t splitmix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

struct SkeletonLaw {
  explicit SkeletonLaw(double u) : x(x_param(u)), log_q(std::log1p(-x)) {}
  double x;
  double log_q;  // log(1 - x); -inf when x = 1
};

// Pair count is geometric with success x; signs are fair coins, 64 per word.
int draw_pairs(const SkeletonLaw& law, CounterRng& rng) {
  if (law.x >= 1.0) return 1;
  const double g = std::floor(std::log(rng.uniform_open0()) / law.log_q);
  if (g > 1e9) throw ResourceError("sample_skeleton: pair count overflow");
  return 1 + static_cast<int>(g);
}

template <class OnWord>
void draw_signs(int count, CounterRng& rng, OnWord&& on_word) {
  for (int done = 0; done < count; done += 64) {
    const int take = std::min(64, count - done);
    std::uint64_t word = rng();
    if (take < 64) word &= (std::uint64_t{1} << take) - 1;
    on_word(word, take);
  }
}

std::int64_t depth_rec(const SkeletonLaw& law, int N, CounterRng& rng) {
  if (N == 0) return 0;
  const int m = draw_pairs(law, rng);
  int minus = 0;
  draw_signs(m - 1, rng, [&](std::uint64_t word, int) { minus += std::popcount(word); });
  // A pair entered downwards reaches -2^{N-1} and adds its return sub-walk's
  // depth below that; it dominates every other contribution, which all stay
  // above -2^{N-1}.
  const int draws = minus > 0 ? minus : m;
  std::int64_t best = 0;
  for (int i = 0; i < draws; ++i) best = std::max(best, depth_rec(law, N - 1, rng));
  return minus > 0 ? (std::int64_t{1} << (N - 1)) + best : best;
}

}  // namespace

LatticePath decimate(const LatticePath& path, int M) {
  if (M < 0 || M > 62) throw DomainError("decimate: M must be in [0, 62]");
  if (M == 0) return path;
  const auto& p = path.points();
  std::vector<std::int64_t> coarse;
  for (auto t : hitting_times(path, M)) coarse.push_back(p[t] >> M);
  return LatticePath(std::move(coarse));
}

std::string membership_violation(const LatticePath& path, int N) {
  if (N < 1 || N > 62) return "level must be in [1, 62]";
  const std::int64_t edge = std::int64_t{1} << N;
  const auto& p = path.points();
  for (std::size_t i = 0; i + 1 < p.size(); ++i) {
    if (std::abs(p[i]) >= edge) {
      return "path reaches +-2^N at step " + std::to_string(i) + " before its last point";
    }
  }
  if (p.back() != edge) return "last point is not +2^N";
  return {};
}

double path_weight(double u, int N, const LatticePath& path) {
  if (!(u >= 0.0) || !std::isfinite(u)) throw DomainError("path_weight: u must be >= 0");
  if (auto why = membership_violation(path, N); !why.empty()) {
    throw DomainError("path_weight: not in W_{N,+}: " + why);
  }
  return weight_unchecked(u, x_param(u), N, path);
}

int Skeleton::minus_count() const {
  return static_cast<int>(std::count(signs.begin(), signs.end(), -1));
}

LatticePath Skeleton::to_path() const {
  std::vector<std::int64_t> p;
  p.reserve(static_cast<std::size_t>(2 * pairs + 1));
  for (int s : signs) {
    p.push_back(0);
    p.push_back(s);
  }
  p.insert(p.end(), {0, 1, 2});
  return LatticePath(std::move(p));
}

CounterRng::CounterRng(std::uint64_t key, std::uint64_t stream)
    : state_(splitmix(key ^ splitmix(stream + kGolden))) {}

CounterRng::result_type CounterRng::operator()() {
  state_ += kGolden;
  return splitmix(state_);
}

double CounterRng::uniform_open0() {
  return static_cast<double>(((*this)() >> 11) + 1) * 0x1.0p-53;
}

Skeleton sample_skeleton(double u, CounterRng& rng) {
  if (!(u >= 0.0)) throw DomainError("sample_skeleton: u must be >= 0");
  const SkeletonLaw law(u);
  Skeleton s;
  s.pairs = draw_pairs(law, rng);
  s.signs.reserve(static_cast<std::size_t>(s.pairs - 1));
  draw_signs(s.pairs - 1, rng, [&](std::uint64_t word, int take) {
    for (int b = 0; b < take; ++b) s.signs.push_back((word >> b) & 1U ? -1 : 1);
  });
  return s;
}

std::int64_t sample_depth(double u, int N, CounterRng& rng) {
  if (!(u >= 0.0)) throw DomainError("sample_depth: u must be >= 0");
  if (N < 0 || N > kMaxSampleLevel) throw ResourceError("sample_depth: N must be in [0, 20]");
  if (u == 0.0) return 0;
  return depth_rec(SkeletonLaw(u), N, rng);
}

DepthHistogram DepthHistogram::empty(int level, std::uint64_t seed) {
  DepthHistogram h;
  h.level = level;
  h.seed = seed;
  h.counts.assign(std::size_t{1} << level, 0);
  return h;
}

void DepthHistogram::add(std::int64_t depth, std::uint64_t n) {
  if (depth < 0 || static_cast<std::size_t>(depth) >= counts.size()) {
    throw DomainError("DepthHistogram: depth " + std::to_string(depth) + " outside [0, 2^N - 1]");
  }
  counts[static_cast<std::size_t>(depth)] += n;
  total += n;
}

void DepthHistogram::merge(const DepthHistogram& other) {
  if (other.level != level) throw DomainError("DepthHistogram: level mismatch in merge");
  for (std::size_t d = 0; d < counts.size(); ++d) counts[d] += other.counts[d];
  total += other.total;
}

double budget_from_environment() {
  const char* raw = std::getenv("DERHAM_RANGE_BUDGET");
  if (raw == nullptr || *raw == '\0') return kDefaultBudget;
  std::string_view s(raw);
  std::uint64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size()) {
    throw ParseError("DERHAM_RANGE_BUDGET must be a non-negative integer");
  }
  return static_cast<double>(v);
}

double expected_cost(double u, int N, std::uint64_t count) {
  return static_cast<double>(count) * std::pow(1.0 / x_param(u), N);
}

DepthHistogram simulate_ranges(double u, int N, std::uint64_t count, std::uint64_t seed,
                               int workers, double budget) {
  if (!(u >= 0.0) || !std::isfinite(u)) throw DomainError("simulate_ranges: u must be >= 0");
  if (N < 0 || N > kMaxSampleLevel) throw ResourceError("simulate_ranges: N must be in [0, 20]");
  if (count < 1) throw DomainError("simulate_ranges: count must be >= 1");
  if (workers < 1) throw DomainError("simulate_ranges: workers must be >= 1");
  if (const double cost = expected_cost(u, N, count); cost > budget) {
    throw ResourceError("simulate_ranges: estimated " + std::to_string(cost) +
                        " recursion calls exceed budget " + std::to_string(budget));
  }

  const auto nw = static_cast<std::uint64_t>(workers);
  std::vector<DepthHistogram> parts(nw, DepthHistogram::empty(N, seed));
  auto work = [&](std::uint64_t w) {
    const std::uint64_t begin = count * w / nw;
    const std::uint64_t end = count * (w + 1) / nw;
    for (std::uint64_t i = begin; i < end; ++i) {
      CounterRng rng(seed, i);
      parts[w].add(sample_depth(u, N, rng));
    }
  };
  if (nw == 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(nw);
    for (std::uint64_t w = 0; w < nw; ++w) pool.emplace_back(work, w);
  }
  DepthHistogram out = DepthHistogram::empty(N, seed);
  for (const auto& part : parts) out.merge(part);
  return out;
}

namespace {

struct PathClass {
  LatticePath path;
  double weight;        // probability of one path in the class
  double multiplicity;  // number of paths sharing the sign count
};

// Every W_{1,+} path with at most m_max pairs, grouped by (pairs, minus
// signs). The class representative puts the minus signs first.
std::vector<PathClass> level_one_classes(double u, int m_max) {
  std::vector<PathClass> out;
  for (int m = 1; m <= m_max; ++m) {
    double binom = 1.0;
    for (int c = 0; c <= m - 1; ++c) {
      Skeleton s;
      s.pairs = m;
      for (int i = 0; i < m - 1; ++i) s.signs.push_back(i < c ? -1 : 1);
      LatticePath p = s.to_path();
      const double w = path_weight(u, 1, p);
      out.push_back({std::move(p), w, binom});
      binom = binom * static_cast<double>(m - 1 - c) / static_cast<double>(c + 1);
    }
  }
  return out;
}

}  // namespace

ExactEnumeration enumerate_exact(double u, int N, int m_max) {
  if (N < 1 || N > 2) throw DomainError("enumerate_exact: N must be 1 or 2");
  if (m_max < 1) throw DomainError("enumerate_exact: m_max must be >= 1");
  if (!(u > 0.0)) throw DomainError("enumerate_exact: u must be > 0");
  const double x = x_param(u);
  const double q_tail = std::pow(1.0 - x, m_max);
  constexpr double kSlack = 1e-15;
  const auto classes = level_one_classes(u, m_max);

  ExactEnumeration out;
  const std::int64_t depths = std::int64_t{1} << N;
  out.cdf.assign(static_cast<std::size_t>(depths), 0.0);

  if (N == 1) {
    for (const auto& c : classes) {
      const std::int64_t depth = -c.path.min();
      for (std::int64_t k = depth; k < depths; ++k) {
        out.cdf[static_cast<std::size_t>(k)] += c.multiplicity * c.weight;
      }
    }
    out.tail_bound = q_tail + kSlack;
    return out;
  }

  // Level 2: a path is a coarse W_{1,+} path whose every step is refined by
  // an independent (reoriented, shifted) W_{1,+} path. The event "min >= -k"
  // is a product of per-step events, so the sum over all refinements
  // factorizes step by step.
  // stay[k][start + 1][orient > 0] = total weight of refinements of a step
  // from coarse height start in direction orient whose minimum is >= -k.
  std::vector<std::array<std::array<double, 2>, 3>> stay(static_cast<std::size_t>(depths));
  for (std::int64_t k = 0; k < depths; ++k) {
    for (int start = -1; start <= 1; ++start) {
      for (int o = 0; o < 2; ++o) {
        const std::int64_t orient = o == 1 ? 1 : -1;
        double total = 0.0;
        for (const auto& c : classes) {
          std::int64_t lo = 2 * start;
          for (auto v : c.path.points()) lo = std::min(lo, 2 * start + orient * v);
          if (lo >= -k) total += c.multiplicity * c.weight;
        }
        stay[static_cast<std::size_t>(k)][static_cast<std::size_t>(start + 1)]
            [static_cast<std::size_t>(o)] = total;
      }
    }
  }
  for (const auto& top : classes) {
    const auto& p = top.path.points();
    for (std::int64_t k = 0; k < depths; ++k) {
      double prod = top.multiplicity * top.weight;
      for (std::size_t j = 1; j < p.size(); ++j) {
        const int o = p[j] > p[j - 1] ? 1 : 0;
        prod *= stay[static_cast<std::size_t>(k)][static_cast<std::size_t>(p[j - 1] + 1)]
                    [static_cast<std::size_t>(o)];
      }
      out.cdf[static_cast<std::size_t>(k)] += prod;
    }
  }
  // Missing mass: top skeletons beyond m_max, plus for each of the 2m steps
  // of an enumerated skeleton a refinement beyond m_max; E[2m] = 2 / x.
  out.tail_bound = q_tail * (1.0 + 2.0 / x) + kSlack;
  return out;
}

}  // namespace derham
