#include "derham/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iostream>
#include <sstream>

#include "derham/acceptance.hpp"
#include "derham/analysis.hpp"
#include "derham/derham_cdf.hpp"
#include "derham/dyadic.hpp"
#include "derham/empirics.hpp"
#include "derham/walk_model.hpp"

#ifndef DERHAM_VERSION
#define DERHAM_VERSION "0.0.0"
#endif

namespace derham::cli {

using json = nlohmann::ordered_json;

namespace {

const char* command_name(Command c) {
  switch (c) {
    case Command::cdf: return "cdf";
    case Command::simulate: return "simulate";
    case Command::compare: return "compare";
    case Command::analyze: return "analyze";
    case Command::atoms: return "atoms";
    case Command::selftest: return "selftest";
  }
  return "?";
}

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json metadata(const RunConfig& c) {
  json m;
  m["tool"] = "derham-range";
  m["version"] = version();
  m["command"] = command_name(c.command);
  m["u"] = c.u;
  m["level"] = c.level;
  m["seed"] = c.seed;
  m["workers"] = c.workers;
  if (c.timestamp) m["timestamp"] = utc_timestamp();
  return m;
}

void csv_header(const RunConfig& c, std::ostream& os) {
  os << "# derham-range " << version() << " command=" << command_name(c.command)
     << " u=" << fmt17(c.u) << " level=" << c.level << " seed=" << c.seed
     << " workers=" << c.workers;
  if (c.timestamp) os << " timestamp=" << utc_timestamp();
  os << '\n';
}

// x given either as "k/2^n" or as a decimal real.
struct Point {
  std::optional<Dyadic> dyadic;
  double value;
};

Point parse_point(const std::string& text) {
  if (text.find('/') != std::string::npos) {
    const Dyadic d = Dyadic::parse(text);
    return {d, d.to_double()};
  }
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size()) throw ParseError("--x: expected k/2^n or a decimal number");
  if (!(v >= 0.0 && v <= 1.0)) throw DomainError("--x: must lie in [0, 1]");
  return {std::nullopt, v};
}

int do_cdf(const RunConfig& c, std::ostream& os) {
  // u = 0: every level-n table is g = [0, 1, ..., 1] (the range is always 2^n).
  std::optional<DeRhamModel> model;
  if (c.u > 0.0) model.emplace(c.u);

  if (c.x) {
    const Point p = parse_point(*c.x);
    double lower, upper;
    int depth = 0;
    bool exact = true;
    if (!model) {
      lower = upper = p.value > 0.0 ? 1.0 : 0.0;
    } else if (p.dyadic) {
      lower = upper = eval_cdf(*model, *p.dyadic);
      depth = p.dyadic->level();
    } else {
      const Bracket b = eval_cdf(*model, p.value);
      lower = b.lower;
      upper = b.upper;
      depth = b.depth;
      exact = b.exact;
    }
    if (c.format == Format::csv) {
      csv_header(c, os);
      os << "x,cdf_lower,cdf_upper\n" << fmt17(p.value) << ',' << fmt17(lower) << ','
         << fmt17(upper) << '\n';
    } else {
      json j = metadata(c);
      j["x"] = p.value;
      j["lower"] = lower;
      j["upper"] = upper;
      j["depth"] = depth;
      j["exact"] = exact;
      os << j.dump(2) << '\n';
    }
    return kExitOk;
  }

  std::vector<double> values;
  if (model) {
    values = build_table(*model, c.level).values;
  } else {
    values.assign((std::size_t{1} << c.level) + 1, 1.0);
    values[0] = 0.0;
  }

  if (c.format == Format::csv) {
    csv_header(c, os);
    os << "x,cdf\n";
    for (std::size_t j = 0; j < values.size(); ++j) {
      os << Dyadic::make(j, c.level).to_decimal() << ',' << fmt17(values[j]) << '\n';
    }
    return kExitOk;
  }
  json j = metadata(c);
  json xs = json::array(), cdf = json::array();
  for (std::size_t k = 0; k < values.size(); ++k) {
    xs.push_back(Dyadic::make(k, c.level).to_double());
    cdf.push_back(values[k]);
  }
  j["x"] = std::move(xs);
  j["cdf"] = std::move(cdf);
  json q;
  for (double p : {0.25, 0.5, 0.75}) {
    q[fmt17(p)] = model ? quantile(*model, p, c.tol) : 0.0;
  }
  j["tol"] = c.tol;
  j["quantiles"] = std::move(q);
  os << j.dump(2) << '\n';
  return kExitOk;
}

DepthHistogram simulate(const RunConfig& c) {
  return simulate_ranges(c.u, c.level, c.samples, c.seed, c.workers);
}

int do_simulate(const RunConfig& c, std::ostream& os) {
  const auto hist = simulate(c);
  if (c.format == Format::csv) {
    csv_header(c, os);
    os << "depth,count\n";
    for (std::size_t d = 0; d < hist.counts.size(); ++d) {
      if (hist.counts[d] != 0) os << d << ',' << hist.counts[d] << '\n';
    }
    return kExitOk;
  }
  json j = metadata(c);
  j["samples"] = hist.total;
  json counts = json::object();
  for (std::size_t d = 0; d < hist.counts.size(); ++d) {
    if (hist.counts[d] != 0) counts[std::to_string(d)] = hist.counts[d];
  }
  j["counts"] = std::move(counts);
  os << j.dump(2) << '\n';
  return kExitOk;
}

int do_compare(const RunConfig& c, std::ostream& os) {
  const auto e = ecdf(simulate(c));
  const double ks = ks_against_exact(e, DeRhamModel(c.u), c.grid_level);
  const double band = dkw_epsilon(e.total, 0.99);
  const bool pass = ks <= band;
  if (c.format == Format::csv) {
    csv_header(c, os);
    os << "samples,grid_level,ks,dkw99,pass\n"
       << e.total << ',' << c.grid_level << ',' << fmt17(ks) << ',' << fmt17(band) << ','
       << (pass ? "true" : "false") << '\n';
  } else {
    json j = metadata(c);
    j["samples"] = e.total;
    j["grid_level"] = c.grid_level;
    j["ks"] = ks;
    j["dkw99"] = band;
    j["pass"] = pass;
    os << j.dump(2) << '\n';
  }
  return pass ? kExitOk : kExitGateFailed;
}

int do_analyze(const RunConfig& c, std::ostream& os) {
  const RegularityReport r = regularity_report(c.u);
  json j = metadata(c);
  j["x_u"] = r.x_u;
  j["gamma_u"] = r.gamma_u;
  j["classification"] = to_string(r.classification);
  json res = json::array();
  if (r.criterion_residuals) {
    res.push_back((*r.criterion_residuals)[0]);
    res.push_back((*r.criterion_residuals)[1]);
  }
  j["criterion_residuals"] = std::move(res);

  json dims;
  dims["applicable"] = r.dims.applicable;
  if (r.dims.applicable) {
    dims["upper"] = r.dims.upper;
    dims["lower"] = r.dims.lower;
  }
  dims["strictly_below_one"] = r.dims.strictly_below_one;
  j["dim_bounds"] = std::move(dims);

  json atoms;
  atoms["applicable"] = r.atom_mass_at_1.has_value();
  if (r.atom_mass_at_1) {
    atoms["z1"] = *r.atoms.z1;
    atoms["z0"] = *r.atoms.z0;
    atoms["mass_at_1"] = *r.atom_mass_at_1;
    atoms["mass_is_derived_equality"] = true;
  }
  j["atoms"] = std::move(atoms);

  if (c.format == Format::csv) {
    csv_header(c, os);
    os << "key,value\n";
    for (const auto& [k, v] : j.items()) {
      if (!v.is_structured()) os << k << ',' << v.dump() << '\n';
    }
    return kExitOk;
  }
  os << j.dump(2) << '\n';
  return kExitOk;
}

int do_atoms(const RunConfig& c, std::ostream& os) {
  const Dyadic x = Dyadic::parse(*c.x);
  if (x.is_zero()) throw DomainError("--x: atoms are reported on (0, 1]");
  const AtomMass a = atom_mass(c.u, x);
  constexpr int kCheckLevel = kMaxDyadicLevel;
  const double jump = left_jump(c.u, x, kCheckLevel);
  json j = metadata(c);
  j["x"] = x.to_string();
  j["m"] = x.is_one() ? 0 : last_one_index(x);
  j["applicable"] = a.applicable;
  j["mass"] = a.mass;
  json check;
  check["n"] = kCheckLevel;
  check["left_jump"] = jump;
  check["abs_diff"] = std::abs(jump - a.mass);
  j["finite_n_check"] = std::move(check);
  // The dyadic difference converges only at the rate 1 / (u^2 x_u) per level,
  // so also report the same jump far past the 62-level range.
  constexpr int kIterSteps = 400;
  const double deep = left_jump_by_iteration(c.u, x, kIterSteps);
  json iter;
  iter["steps"] = kIterSteps;
  iter["left_jump"] = deep;
  iter["abs_diff"] = std::abs(deep - a.mass);
  j["iterated_check"] = std::move(iter);
  if (c.format == Format::csv) {
    csv_header(c, os);
    os << "x,m,mass,finite_n,left_jump\n"
       << x.to_string() << ',' << j["m"].get<int>() << ',' << fmt17(a.mass) << ','
       << kCheckLevel << ',' << fmt17(jump) << '\n';
    return kExitOk;
  }
  os << j.dump(2) << '\n';
  return kExitOk;
}

int do_selftest(const RunConfig& c, std::ostream& os) {
  const auto results = acceptance::run_all();
  const bool ok = std::all_of(results.begin(), results.end(), [](const auto& r) { return r.pass; });
  if (c.format == Format::json) {
    json j = metadata(c);
    json rows = json::array();
    for (const auto& r : results) {
      rows.push_back({{"id", r.id}, {"name", r.name}, {"pass", r.pass},
                      {"seconds", r.seconds}, {"detail", r.detail}});
    }
    j["criteria"] = std::move(rows);
    j["pass"] = ok;
    os << j.dump(2) << '\n';
  } else {
    for (const auto& r : results) os << acceptance::format_line(r) << '\n';
    os << (ok ? "all criteria passed" : "some criteria failed") << '\n';
  }
  return ok ? kExitOk : kExitGateFailed;
}

}  // namespace

std::string version() { return DERHAM_VERSION; }

std::optional<RunConfig> parse_args(const std::vector<std::string>& args, std::ostream& out) {
  CLI::App app{"Range of self-interacting walks at exit from [-2^N, 2^N]", "derham-range"};
  app.require_subcommand(1);
  RunConfig cfg;
  std::string format = "json";
  std::string x;
  std::string out_path;

  struct Sub {
    Command command;
    const char* name;
    const char* help;
  };
  const Sub subs[] = {
      {Command::cdf, "cdf", "exact CDF table on the level-n dyadic grid (or at --x)"},
      {Command::simulate, "simulate", "Monte Carlo histogram of the excursion depth"},
      {Command::compare, "compare", "simulate and compare against the exact table (KS vs DKW)"},
      {Command::analyze, "analyze", "regularity report for parameter u"},
      {Command::atoms, "atoms", "atom mass at a dyadic --x (u > sqrt(3))"},
      {Command::selftest, "selftest", "run the acceptance suite"},
  };
  std::vector<CLI::App*> apps;
  for (const auto& s : subs) {
    CLI::App* sub = app.add_subcommand(s.name, s.help);
    sub->add_option("--u", cfg.u, "walk parameter u >= 0");
    sub->add_option("--level", cfg.level, "dyadic / walk level N");
    sub->add_option("--samples", cfg.samples, "Monte Carlo sample count");
    sub->add_option("--seed", cfg.seed, "64-bit seed");
    sub->add_option("--workers", cfg.workers, "worker threads");
    sub->add_option("--grid-level", cfg.grid_level, "comparison grid level (<= level)");
    sub->add_option("--tol", cfg.tol, "quantile tolerance (>= 1e-12)");
    sub->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--out", out_path, "write output to this file");
    sub->add_option("--x", x, "point as k/2^n (or a decimal for cdf)");
    sub->add_flag("--no-timestamp", "omit the timestamp from the output");
    apps.push_back(sub);
  }

  // CLI11 consumes a reversed argument vector without the program name.
  std::vector<std::string> rev;
  if (args.size() > 1) rev.assign(args.rbegin(), args.rend() - 1);
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return std::nullopt;
  } catch (const CLI::ParseError& e) {
    std::string what = e.what();
    if (what.empty()) what = e.get_name();
    throw ParseError(what);
  }

  for (std::size_t i = 0; i < apps.size(); ++i) {
    if (apps[i]->parsed()) {
      cfg.command = subs[i].command;
      cfg.timestamp = apps[i]->count("--no-timestamp") == 0;
      if (apps[i]->count("--x") > 0) cfg.x = x;
      if (apps[i]->count("--out") > 0) cfg.out = out_path;
      if (cfg.command == Command::cdf && apps[i]->count("--level") == 0) cfg.level = 8;
      if (cfg.command == Command::selftest && apps[i]->count("--format") == 0) format = "csv";
    }
  }
  cfg.format = format == "csv" ? Format::csv : Format::json;
  return cfg;
}

void validate(const RunConfig& c) {
  if (!std::isfinite(c.u) || c.u < 0.0) throw DomainError("--u must be a finite number >= 0");
  const bool zero_ok = c.command == Command::cdf || c.command == Command::analyze ||
                       c.command == Command::selftest;
  if (c.u == 0.0 && !zero_ok) {
    throw DomainError("--u 0 (point mass at 0) is only accepted by cdf and analyze");
  }
  if (c.workers < 1) throw DomainError("--workers must be >= 1");
  switch (c.command) {
    case Command::cdf:
      if (c.level < 0 || c.level > kMaxTableLevel) throw DomainError("--level must be in [0, 30]");
      if (!(c.tol >= 1e-12)) throw DomainError("--tol must be >= 1e-12");
      break;
    case Command::simulate:
    case Command::compare:
      if (c.level < 0 || c.level > kMaxSampleLevel) {
        throw DomainError("--level must be in [0, 20]");
      }
      if (c.samples < 1) throw DomainError("--samples must be >= 1");
      if (c.command == Command::compare && (c.grid_level < 0 || c.grid_level > c.level)) {
        throw DomainError("--grid-level must be in [0, level]");
      }
      break;
    case Command::atoms:
      if (!c.x) throw DomainError("atoms requires --x k/2^n");
      break;
    case Command::analyze:
    case Command::selftest:
      break;
  }
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    validate(config);
    std::ostringstream buffer;
    int code = kExitOk;
    switch (config.command) {
      case Command::cdf: code = do_cdf(config, buffer); break;
      case Command::simulate: code = do_simulate(config, buffer); break;
      case Command::compare: code = do_compare(config, buffer); break;
      case Command::analyze: code = do_analyze(config, buffer); break;
      case Command::atoms: code = do_atoms(config, buffer); break;
      case Command::selftest: code = do_selftest(config, buffer); break;
    }
    if (config.out) {
      std::ofstream f(*config.out, std::ios::binary);
      if (!f) throw Error("cannot open --out file " + *config.out);
      f << buffer.str();
    } else {
      out << buffer.str();
    }
    return code;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  }
}

int main_entry(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  try {
    const auto cfg = parse_args(args, out);
    if (!cfg) return kExitOk;
    return run(*cfg, out, err);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  }
}

}  // namespace derham::cli
