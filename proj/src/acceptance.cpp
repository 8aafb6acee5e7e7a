#include "derham/acceptance.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>

#include "derham/analysis.hpp"
#include "derham/cli.hpp"
#include "derham/derham_cdf.hpp"
#include "derham/empirics.hpp"
#include "derham/walk_model.hpp"

namespace derham::acceptance {

namespace {

struct Verdict {
  bool pass = true;
  std::ostringstream detail;

  void check(bool ok, const std::string& label, double measured, double bound) {
    char buf[200];
    std::snprintf(buf, sizeof buf, "%s%s=%.3g%s%.3g", detail.tellp() > 0 ? "; " : "",
                  label.c_str(), measured, ok ? "<=" : " VIOLATES ", bound);
    detail << buf;
    pass = pass && ok;
  }
  void require(bool ok, const std::string& label) {
    detail << (detail.tellp() > 0 ? "; " : "") << label << (ok ? " ok" : " FAILED");
    pass = pass && ok;
  }
};

const std::vector<double> kModelGrid = {0.3, 0.7, 1.0, 1.5, kSqrt3, 2.0, 3.0};

double closed_form_u1(double x) { return 2.0 * x / (1.0 + x); }

// Simple random walk on {lo, ..., hi} absorbed at both ends: probability of
// reaching hi before lo from 0, by Gauss-Seidel on the harmonic equations.
double srw_hit_upper_first(int lo, int hi) {
  const auto n = static_cast<std::size_t>(hi - lo + 1);
  std::vector<double> h(n, 0.0);
  h[n - 1] = 1.0;
  for (int sweep = 0; sweep < 200000; ++sweep) {
    double change = 0.0;
    for (std::size_t i = 1; i + 1 < n; ++i) {
      const double v = 0.5 * (h[i - 1] + h[i + 1]);
      change = std::max(change, std::abs(v - h[i]));
      h[i] = v;
    }
    if (change < 1e-17) break;
  }
  return h[static_cast<std::size_t>(-lo)];
}

Verdict closed_form_u1_criterion() {
  Verdict v;
  const DeRhamModel model(1.0);
  const auto table = build_table(model, 12);
  double worst = 0.0, residual = 0.0;
  for (std::size_t j = 0; j < table.values.size(); ++j) {
    const double x = std::ldexp(static_cast<double>(j), -12);
    worst = std::max(worst, std::abs(table.values[j] - closed_form_u1(x)));
    // The closed form substituted into the functional equation.
    const double rhs = x <= 0.5 ? apply(model.left(), closed_form_u1(2.0 * x))
                                : apply(model.right(), closed_form_u1(2.0 * x - 1.0));
    residual = std::max(residual, std::abs(closed_form_u1(x) - rhs));
  }
  v.check(worst <= 1e-12, "max|table-2x/(1+x)|", worst, 1e-12);
  v.check(residual <= 1e-12, "closed-form FE residual", residual, 1e-12);

  double ruin = 0.0;
  for (int n = 1; n <= 3; ++n) {
    const auto t = build_table(model, n);
    const int top = 1 << n;
    const double exit_plus = srw_hit_upper_first(-top, top);
    for (int k = 0; k < top; ++k) {
      const double oracle = srw_hit_upper_first(-(k + 1), top) / exit_plus;
      ruin = std::max(ruin, std::abs(oracle - t.values[static_cast<std::size_t>(k + 1)]));
    }
  }
  v.check(ruin <= 1e-12, "gambler's-ruin levels 1-3", ruin, 1e-12);
  return v;
}

Verdict evaluator_equivalence() {
  Verdict v;
  std::mt19937_64 gen(20240611);
  std::uniform_int_distribution<int> level_dist(0, 12);
  double worst = 0.0;
  for (double u : kModelGrid) {
    const DeRhamModel model(u);
    const auto table = build_table(model, 12);
    for (int i = 0; i < 1000; ++i) {
      const int level = level_dist(gen);
      std::uniform_int_distribution<std::uint64_t> k_dist(0, std::uint64_t{1} << level);
      const Dyadic x = Dyadic::make(k_dist(gen), level);
      const double from_table = table.at(x);
      const double from_digits = eval_cdf(model, x);
      const Bracket b = eval_cdf(model, x.to_double());
      worst = std::max({worst, std::abs(from_table - from_digits),
                        std::abs(from_table - b.lower), std::abs(from_table - b.upper)});
      if (!x.is_one()) {
        const double from_product = apply(product_entries(model, x.to_double(), 12), 0.0);
        worst = std::max(worst, std::abs(from_table - from_product));
      }
    }
  }
  v.check(worst <= 1e-12, "max disagreement", worst, 1e-12);
  return v;
}

Verdict functional_equation_residual() {
  Verdict v;
  double worst = 0.0;
  int fallbacks = 0;
  for (double u : kModelGrid) {
    const DeRhamModel model(u);
    for (int i = 0; i < 10000; ++i) {
      const double x = i / 1e4;
      const bool left = x <= 0.5;
      const double y = left ? 2.0 * x : 2.0 * x - 1.0;
      const Matrix2& g = left ? model.left() : model.right();
      // Inner value in extended precision, outer in double: two independent
      // evaluation paths.
      const Bracket outer = eval_cdf(model, x);
      const Bracket inner = eval_cdf(model, y, kMaxDyadicLevel, Precision::extended);
      double r;
      if (outer.width() <= 1e-12 && inner.width() <= 1e-12) {
        r = std::max(std::abs(outer.lower - apply(g, inner.lower)),
                     std::abs(outer.upper - apply(g, inner.upper)));
      } else {
        ++fallbacks;
        const Dyadic xd = digits(x, 48).truncation;
        const Dyadic yd = Dyadic::make(left ? xd.numerator_at(48) * 2
                                            : xd.numerator_at(48) * 2 - (std::uint64_t{1} << 48),
                                       48);
        r = std::abs(eval_cdf(model, xd) - apply(g, eval_cdf(model, yd, Precision::extended)));
      }
      worst = std::max(worst, r);
    }
  }
  v.check(worst <= 1e-10, "max residual", worst, 1e-10);
  v.detail << "; dyadic fallbacks=" << fallbacks;
  return v;
}

Verdict enumeration_oracle() {
  Verdict v;
  double worst_excess = 0.0;
  for (double u : {0.5, 1.0, 2.0}) {
    const DeRhamModel model(u);
    for (int N : {1, 2}) {
      const auto en = enumerate_exact(u, N, 60);
      const auto table = build_table(model, N);
      for (std::size_t k = 0; k < en.cdf.size(); ++k) {
        const double gap = std::abs(en.cdf[k] - table.values[k + 1]);
        worst_excess = std::max(worst_excess, gap - en.tail_bound);
      }
      if (N == 1) {
        const double x = model.x_u();
        const double analytic = x / (1.0 - u * u * x * x);
        const double gap = std::abs(en.cdf[0] - analytic);
        worst_excess = std::max(worst_excess, gap - en.tail_bound);
      }
    }
  }
  v.check(worst_excess <= 1e-12, "max(|enum-table|-tail)", worst_excess, 1e-12);
  return v;
}

Verdict monte_carlo_vs_exact() {
  Verdict v;
  struct Case {
    double u;
    int level;
    std::uint64_t samples;
    double gate;
  };
  for (const Case& c : {Case{1.0, 10, 100000, 0.01}, Case{0.5, 8, 100000, 0.01},
                        Case{2.0, 6, 20000, 0.0125}}) {
    const auto hist = simulate_ranges(c.u, c.level, c.samples, 42, 1);
    const double ks = ks_against_exact(ecdf(hist), DeRhamModel(c.u), 6);
    char label[64];
    std::snprintf(label, sizeof label, "KS(u=%g,N=%d)", c.u, c.level);
    v.check(ks <= c.gate, label, ks, c.gate);
  }
  return v;
}

Verdict sqrt3_boundary() {
  Verdict v;
  const DeRhamModel model(kSqrt3);
  double z = 0.0, drift = 0.0;
  for (int n = 1; n <= 100; ++n) {
    z = apply(model.right(), z);
    drift = std::max(drift, std::abs(z - n / (n + 1.0)));
  }
  v.check(drift <= 1e-12, "max|h1^n(0)-n/(n+1)|", drift, 1e-12);
  double worst_ratio = 0.0;
  for (int m = 1; m <= 14; ++m) {
    worst_ratio = std::max(worst_ratio, max_increment(kSqrt3, m) * (m + 1) / 9.0);
  }
  v.check(worst_ratio <= 1.0, "max_m increment/(9/(m+1))", worst_ratio, 1.0);
  const auto bmc = boundary_map_checks(1000);
  v.require(bmc.left_below_right, "h0<h1");
  v.require(bmc.derivatives_increasing, "h' increasing");
  v.require(bmc.left_slope_within_three, "h0'<=3h1'");
  v.require(bmc.left_slope_below_past_two, "h0'<=h1' past h1^2(0)");
  return v;
}

Verdict atoms() {
  Verdict v;
  const double u = 2.0;
  const DeRhamModel model(u);
  const double z1 = *model.z1();
  v.check(std::abs(apply(model.right(), z1) - z1) <= 1e-12, "|Phi1(z1)-z1|",
          std::abs(apply(model.right(), z1) - z1), 1e-12);
  const auto iter = atom_analysis(u, 40).iterates;
  const double gap40 = std::abs(iter[40] - z1);
  v.check(gap40 <= 1e-6, "|Phi1^40(0)-z1|", gap40, 1e-6);

  const Dyadic one = Dyadic::make(1, 0);
  const double mass1 = atom_mass(u, one).mass;
  v.check(std::abs(mass1 - (1.0 - z1)) <= 1e-15, "|mass(1)-(1-z1)|",
          std::abs(mass1 - (1.0 - z1)), 1e-15);
  const double finite40 = left_jump(u, one, 40);
  v.check(std::abs(mass1 - finite40) <= 1e-6, "|mass(1)-(1-g(1-2^-40))|",
          std::abs(mass1 - finite40), 1e-6);

  // Context for the two n = 40 gates: the iterates approach z1 at the rate
  // Phi1'(z1) = 1 / (u^2 x_u), so report where the 1e-6 gap is first met and
  // the same identity at a depth where it has converged.
  int first = 0;
  for (int n = 1; n <= 400 && first == 0; ++n) {
    if (std::abs(left_jump_by_iteration(u, one, n) - mass1) <= 1e-6) first = n;
  }
  v.detail << "; contraction rate at z1=" << 1.0 / (u * u * model.x_u())
           << "; 1e-6 gap first reached at n=" << first;
  const double deep = std::abs(left_jump_by_iteration(u, one, 300) - mass1);
  v.detail << "; |mass(1)-(1-Phi1^300(0))|=" << deep;

  double total = 0.0, smallest = 1.0;
  for (int level = 0; level <= 6; ++level) {
    for (std::uint64_t k = 1; k <= (std::uint64_t{1} << level); k += 2) {
      const double m = atom_mass(u, Dyadic::make(k, level)).mass;
      smallest = std::min(smallest, m);
      total += m;
      if (level == 0) break;  // 1/2^0 is the only level-0 point in (0, 1]
    }
  }
  v.require(smallest > 0.0, "all level<=6 atoms positive");
  v.check(total <= 1.0, "total atom mass", total, 1.0);
  return v;
}

Verdict singularity() {
  Verdict v;
  const auto at1 = singularity_criterion(1.0);
  const double r1 = std::max(std::abs(at1[0]), std::abs(at1[1]));
  v.check(r1 <= 1e-12, "residual(u=1)", r1, 1e-12);
  for (double u : {0.5, 2.0}) {
    const auto r = singularity_criterion(u);
    const double smallest = std::min(std::abs(r[0]), std::abs(r[1]));
    char label[48];
    std::snprintf(label, sizeof label, "min residual(u=%g)>=1e-2", u);
    v.require(smallest >= 1e-2, label);
  }
  using C = Classification;
  const std::vector<std::pair<double, C>> expected = {
      {0.0, C::delta_at_0},         {0.5, C::singular_continuous_regime},
      {1.0, C::absolutely_continuous}, {1.6, C::singular_continuous_regime},
      {kSqrt3, C::boundary_sqrt3},  {2.0, C::singular_with_atoms},
      {5.0, C::singular_with_atoms}};
  bool all = true;
  for (const auto& [u, c] : expected) all = all && classify(u) == c;
  v.require(all, "classification case split");
  return v;
}

Verdict dimension() {
  Verdict v;
  double prev = 0.0;
  bool ordered = true, monotone = true, formula = true;
  for (double u : {0.1, 0.5, 0.9}) {
    const auto b = dimension_bounds(u);
    const double x = 2.0 / (1.0 + std::sqrt(1.0 + 8.0 * u * u));
    const double s = -x * std::log(x) - (1.0 - x) * std::log(1.0 - x);
    ordered = ordered && b.applicable && 0.0 < b.lower && b.lower <= b.upper && b.upper < 1.0;
    formula = formula && std::abs(b.upper - s / std::numbers::ln2) <= 1e-14;
    monotone = monotone && b.upper > prev;
    prev = b.upper;
  }
  v.require(ordered, "0<lower<=upper<1");
  v.require(formula, "upper=s(x_u)/log2");
  v.require(monotone, "upper increasing toward 1");
  bool marker = true;
  for (double u : {1.0, 1.5, 2.0}) marker = marker && !dimension_bounds(u).applicable;
  v.require(marker, "not-applicable for u>=1");
  return v;
}

Verdict determinism_and_consistency() {
  Verdict v;
  cli::RunConfig cfg;
  cfg.command = cli::Command::simulate;
  cfg.u = 0.7;
  cfg.level = 9;
  cfg.samples = 20000;
  cfg.seed = 7;
  cfg.workers = 2;
  cfg.timestamp = false;
  std::ostringstream a, b, err;
  const int ca = cli::run(cfg, a, err);
  const int cb = cli::run(cfg, b, err);
  v.require(ca == 0 && cb == 0 && a.str() == b.str() && !a.str().empty(),
            "simulate byte-identical");

  const std::uint64_t n = 100000;
  const auto e7 = ecdf(simulate_ranges(0.7, 7, n, 1001, 1));
  const auto e9 = ecdf(simulate_ranges(0.7, 9, n, 2002, 1));
  const double diff = ks_between(e7, e9, 5);
  const double band = 2.0 * dkw_epsilon(n, 0.99);
  v.check(diff <= band, "sup|F7-F9| on level-5 grid", diff, band);
  return v;
}

struct CriterionDef {
  const char* name;
  double time_limit;
  std::function<Verdict()> body;
};

const std::vector<CriterionDef>& definitions() {
  static const std::vector<CriterionDef> s = {
      {"u=1 closed form", 1.0, closed_form_u1_criterion},
      {"evaluator equivalence", 5.0, evaluator_equivalence},
      {"functional-equation residual", 10.0, functional_equation_residual},
      {"brute-force enumeration oracle", 30.0, enumeration_oracle},
      {"Monte Carlo vs exact", 600.0, monte_carlo_vs_exact},
      {"u=sqrt3 boundary", 10.0, sqrt3_boundary},
      {"atoms at u=2", 5.0, atoms},
      {"singularity criterion", 1.0, singularity},
      {"dimension bounds", 1.0, dimension},
      {"determinism and level consistency", 120.0, determinism_and_consistency},
  };
  return s;
}

}  // namespace

CriterionResult run_criterion(int id) {
  if (id < 1 || id > kCriterionCount) throw DomainError("acceptance: no criterion " + std::to_string(id));
  const CriterionDef& s = definitions()[static_cast<std::size_t>(id - 1)];
  CriterionResult r;
  r.id = id;
  r.name = s.name;
  r.time_limit = s.time_limit;
  const auto start = std::chrono::steady_clock::now();
  try {
    Verdict v = s.body();
    r.pass = v.pass;
    r.detail = v.detail.str();
  } catch (const std::exception& e) {
    r.pass = false;
    r.detail = std::string("exception: ") + e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (r.seconds > r.time_limit) {
    r.pass = false;
    r.detail += "; runtime over limit";
  }
  return r;
}

std::vector<CriterionResult> run_all() {
  std::vector<CriterionResult> out;
  for (int id = 1; id <= kCriterionCount; ++id) out.push_back(run_criterion(id));
  return out;
}

std::string format_line(const CriterionResult& r) {
  char head[160];
  std::snprintf(head, sizeof head, "%s  #%-2d %-34s (%.2f s / %.0f s): ", r.pass ? "PASS" : "FAIL",
                r.id, r.name.c_str(), r.seconds, r.time_limit);
  return head + r.detail;
}

}  // namespace derham::acceptance
