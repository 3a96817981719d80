// halo2d <subcommand> --config <file> [--out <dir>] [--workers N]
//
// Exit codes: 0 success, 2 configuration error, 3 numerical failure (a
// diagnostics.json is written to the output directory).

#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "halo2d/halo2d.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace halo2d;

namespace {

struct Context {
  std::string command;
  Config config;
  fs::path out_dir = ".";
  int workers = 1;

  [[nodiscard]] Metadata meta(const std::string& units) const { return {command, config.hash(), units}; }

  [[nodiscard]] fs::path path(const std::string& name) const { return out_dir / name; }

  void write_csv_file(const std::string& name, const std::string& units, const CsvTable& t) const {
    std::ofstream f(path(name));
    if (!f) throw ConfigError("cannot write '" + path(name).string() + "'");
    halo2d::write_csv(f, meta(units), t);
    std::cout << "wrote " << path(name).string() << " (" << t.rows.size() << " rows)\n";
  }

  void write_json_file(const std::string& name, const std::string& units, json body) const {
    json doc;
    doc["meta"] = {{"version", kVersion},
                   {"command", command},
                   {"config_hash", hash_string(config.hash())},
                   {"units", units},
                   {"generated", utc_timestamp()}};
    for (auto& [k, v] : body.items()) doc[k] = v;
    std::ofstream f(path(name));
    if (!f) throw ConfigError("cannot write '" + path(name).string() + "'");
    f << doc.dump(2) << "\n";
    std::cout << "wrote " << path(name).string() << "\n";
  }
};

std::set<std::string> with_potential(std::set<std::string> keys) {
  keys.insert(potential_keys().begin(), potential_keys().end());
  keys.insert("workers");
  return keys;
}

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

// Hyperradius samples: explicit `<prefix>` list, or a log grid from
// `<prefix>_min`, `<prefix>_max`, `<prefix>_points`.
std::vector<double> sample_list(const Config& c, const std::string& prefix, double lo, double hi, int n) {
  if (c.has(prefix)) return c.list(prefix);
  lo = c.num(prefix + "_min", lo);
  hi = c.num(prefix + "_max", hi);
  n = c.integer(prefix + "_points", n);
  if (!(lo > 0.0 && hi > lo && n >= 2)) throw ConfigError(prefix + ": need 0 < min < max and points >= 2");
  return make_log_grid(lo, hi, n);
}

std::set<std::string> sample_keys(const std::string& prefix) {
  return {prefix, prefix + "_min", prefix + "_max", prefix + "_points"};
}

std::set<std::string> merge(std::set<std::string> a, const std::set<std::string>& b) {
  a.insert(b.begin(), b.end());
  return a;
}

// ------------------------------------------------------------------ commands

void cmd_two_body(const Context& ctx) {
  ctx.config.require_known(with_potential({"tolerance.two_body_energy"}));
  const PotentialSpec spec = potential_from_config(ctx.config);
  TwoBodyOptions opt;
  opt.energy_tolerance = ctx.config.num("tolerance.two_body_energy", opt.energy_tolerance);
  json body;
  const bool zero = spec.is_zero_range();
  std::optional<double> a;
  std::vector<double> energies;
  if (zero) {
    a = std::get<ZeroRange>(spec.model()).a;
    energies = bound_states(spec);
  } else {
    energies = bound_states(spec, std::nullopt, opt);
    try {
      a = scattering_length(spec, opt);
    } catch (const DomainError&) {
    }
  }
  body["a"] = optional_number(a);
  body["bound_energies"] = energies;
  body["k"] = energies.empty() ? json(nullptr) : json(std::sqrt(-energies.back()));
  if (!zero) {
    const int count = count_bound_states(spec, opt);
    body["bound_state_count"] = count;
    // The zero-energy solution has one node per bound state; the outermost is
    // the logarithm's zero at r = a, the rest lie inside. With interior nodes
    // a still comes from the outer logarithm but no longer sizes a single state.
    const int interior = std::max(0, count - 1);
    body["interior_nodes"] = interior;
    body["a_has_interior_nodes"] = interior > 0;
  }
  ctx.write_json_file("two_body.json", zero ? kUnitsZero : kUnitsFinite, body);
}

void cmd_angular_scan(const Context& ctx) {
  ctx.config.require_known(with_potential(merge(sample_keys("scan.rho"), {"angular.channels", "angular.order",
                                                                          "angular.beta_points",
                                                                          "angular.skip_spurious"})));
  const PotentialSpec spec = potential_from_config(ctx.config);
  if (spec.is_zero_range()) throw ConfigError("angular-scan: needs a finite-range potential (see zero-range-lambda)");
  AngularOptions opt;
  opt.order = ctx.config.integer("angular.order", opt.order);
  opt.beta_points = ctx.config.integer("angular.beta_points", opt.beta_points);
  const int n = ctx.config.integer("angular.channels", 3);
  const bool skip = ctx.config.flag("angular.skip_spurious", false);
  if (n < 1) throw ConfigError("angular.channels must be >= 1");
  const std::vector<double> rho = sample_list(ctx.config, "scan.rho", 0.1, 100.0, 31);
  std::vector<std::vector<double>> rows(rho.size());
  parallel_for(rho.size(), ctx.workers, [&](std::size_t j) {
    const AngularSpectrum s = solve_angular(spec, rho[j], n + (skip ? 3 : 0), opt);
    for (std::size_t k = 0; k < s.size() && static_cast<int>(rows[j].size()) < n; ++k) {
      if (!skip || !s.spurious[k]) rows[j].push_back(s.lambdas[k]);
    }
  });
  CsvTable t;
  t.columns = {"rho"};
  for (int k = 1; k <= n; ++k) t.columns.push_back("lambda_" + std::to_string(k));
  for (std::size_t j = 0; j < rho.size(); ++j) {
    std::vector<std::string> row{fmt(rho[j])};
    for (double v : rows[j]) row.push_back(fmt(v));
    row.resize(t.columns.size());
    t.add(row);
  }
  ctx.write_csv_file("angular_scan.csv", kUnitsFinite, t);
}

void cmd_zero_range_lambda(const Context& ctx) {
  ctx.config.require_known(with_potential(merge(sample_keys("scan.rho_over_a"), {"zero_range.channels"})));
  const int n = ctx.config.integer("zero_range.channels", 3);
  if (n < 1) throw ConfigError("zero_range.channels must be >= 1");
  const std::vector<double> x = sample_list(ctx.config, "scan.rho_over_a", 1e-3, 1e3, 61);
  CsvTable t;
  t.columns = {"rho_over_a"};
  for (int k = 1; k <= n; ++k) t.columns.push_back("lambda_" + std::to_string(k));
  std::vector<std::vector<double>> rows(x.size(), std::vector<double>(n));
  parallel_for(x.size(), ctx.workers, [&](std::size_t j) {
    for (int k = 1; k <= n; ++k) rows[j][k - 1] = solve_lambda_zero_range(x[j], k).lambda;
  });
  for (std::size_t j = 0; j < x.size(); ++j) {
    std::vector<std::string> row{fmt(x[j])};
    for (double v : rows[j]) row.push_back(fmt(v));
    t.add(row);
  }
  ctx.write_csv_file("zero_range_lambda.csv", kUnitsZero, t);
}

void cmd_efimov3d(const Context& ctx) {
  ctx.config.require_known({"scan.rho_over_a", "workers"});
  const std::vector<double> x = ctx.config.list("scan.rho_over_a", {0.0, 0.01, 0.1, 0.3, 1.0, 3.0, 10.0, 100.0});
  CsvTable t;
  t.columns = {"rho_over_a", "lambda"};
  for (double v : x) {
    if (v < 0.0) throw ConfigError("scan.rho_over_a: values must be >= 0");
    t.add({fmt(v), fmt(efimov3d_lowest(v))});
  }
  ctx.write_csv_file("efimov3d.csv", kUnitsZero, t);
}

double interpolate_profile(const ThreeBodyState& s, double rho) {
  if (rho <= s.rho.front() || rho >= s.rho.back()) return 0.0;
  const auto it = std::upper_bound(s.rho.begin(), s.rho.end(), rho);
  const std::size_t i = static_cast<std::size_t>(it - s.rho.begin());
  const double w = (rho - s.rho[i - 1]) / (s.rho[i] - s.rho[i - 1]);
  return (1.0 - w) * s.f[0][i - 1] + w * s.f[0][i];
}

void cmd_fig1(const Context& ctx) {
  ctx.config.require_known(with_potential(sample_keys("fig1.rho_over_a")));
  const PotentialSpec spec = potential_from_config(ctx.config);
  if (!spec.is_zero_range()) throw ConfigError("fig1: reproduces the zero-range figure; use potential.type = zero_range");
  const double a = std::get<ZeroRange>(spec.model()).a;
  const ChannelTable table = zero_range_table(a);
  const std::vector<ThreeBodyState> states = solve_bound_states(table);
  const std::vector<double> x = sample_list(ctx.config, "fig1.rho_over_a", 1e-6, 10.0, 241);
  const ChannelInterpolant ip(table);
  CsvTable t;
  t.columns = {"rho_over_a", "U_times_a2", "f_ground", "f_excited"};
  for (double v : x) {
    const double rho = v * a;
    if (rho < table.rho.front() || rho > table.rho.back()) {
      throw ConfigError("fig1.rho_over_a: outside the tabulated range");
    }
    // U = (lambda + 3/4) / rho^2 - Q from the interpolated table.
    const double lam = ip.reduced_lambda(0, std::log(rho)) + 2.0 * ip.threshold(0) * rho * rho;
    const double u = (lam + 0.75) / (rho * rho) + ip.rho2_d(0, 0, std::log(rho)) / (rho * rho);
    const double fg = states.size() > 0 ? std::sqrt(a) * interpolate_profile(states[0], rho) : 0.0;
    const double fe = states.size() > 1 ? std::sqrt(a) * interpolate_profile(states[1], rho) : 0.0;
    t.add({fmt(v), fmt(u * a * a), fmt(fg), fmt(fe)});
  }
  ctx.write_csv_file("fig1.csv", kUnitsZero, t);
}

json states_json(const std::vector<ThreeBodyState>& states, double e2, double unit) {
  json arr = json::array();
  for (const ThreeBodyState& s : states) {
    json st;
    st["E3"] = s.E3;
    st["nodes"] = s.nodes;
    st["rms_over_a"] = rms_center_of_mass_radius(s) / unit;
    st["rms_rho_over_a"] = s.rms_rho / unit;
    st["E3_over_E2"] = e2 < 0.0 ? json(s.E3 / e2) : json(nullptr);
    arr.push_back(st);
  }
  return arr;
}

void cmd_spectrum(const Context& ctx) {
  ctx.config.require_known(with_potential({"sweep.channels", "grid.rho_min", "grid.points_per_decade",
                                           "grid.decay_lengths", "grid.unbound_rho_max", "grid.max_rho_max",
                                           "tolerance.energy", "tolerance.coupling", "angular.order"}));
  const PotentialSpec spec = potential_from_config(ctx.config);
  json body;
  if (spec.is_zero_range()) {
    const double a = std::get<ZeroRange>(spec.model()).a;
    const ChannelTable table = zero_range_table(a);
    const double e2 = table.lowest_threshold();
    body["E2"] = e2;
    body["a"] = a;
    body["channels"] = 1;
    body["states"] = states_json(solve_bound_states(table), e2, a);
    ctx.write_json_file("spectrum.json", kUnitsZero, body);
    return;
  }
  const auto* g = std::get_if<GaussianPair>(&spec.model());
  if (g == nullptr) throw ConfigError("spectrum: finite-range spectrum needs potential.type = gaussian");
  SweepConfig cfg;
  cfg.b = g->b;
  cfg.channels = ctx.config.integer("sweep.channels", 1);
  cfg.rho_min = ctx.config.num("grid.rho_min", cfg.rho_min);
  cfg.points_per_decade = ctx.config.integer("grid.points_per_decade", cfg.points_per_decade);
  cfg.decay_lengths = ctx.config.num("grid.decay_lengths", cfg.decay_lengths);
  cfg.unbound_rho_max = ctx.config.num("grid.unbound_rho_max", cfg.unbound_rho_max);
  cfg.max_rho_max = ctx.config.num("grid.max_rho_max", cfg.max_rho_max);
  cfg.radial.energy_tolerance = ctx.config.num("tolerance.energy", cfg.radial.energy_tolerance);
  cfg.channel.richardson_tolerance = ctx.config.num("tolerance.coupling", cfg.channel.richardson_tolerance);
  cfg.channel.angular.order = ctx.config.integer("angular.order", cfg.channel.angular.order);
  const SweepPoint p = evaluate_point(cfg, g->s1, g->s2);
  if (p.dimers > 0 && !p.e2) throw NumericalError("spectrum: dimer binding too weak to resolve");
  const double e2 = p.e2.value_or(0.0);
  const double unit = p.scattering_length.value_or(g->b);
  body["E2"] = p.e2 ? json(e2) : json(nullptr);
  body["a"] = optional_number(p.scattering_length);
  body["channels"] = cfg.channels;
  body["length_unit"] = p.scattering_length ? "a" : "b";
  body["states"] = states_json(p.states, e2, unit);
  if (cfg.channels > 1) {
    // Single-channel values alongside, as the upper bound they converge from.
    SweepConfig one = cfg;
    one.channels = 1;
    body["states_single_channel"] = states_json(evaluate_point(one, g->s1, g->s2).states, e2, unit);
  }
  ctx.write_json_file("spectrum.json", kUnitsFinite, body);
}

void cmd_fig2_sweep(const Context& ctx) {
  ctx.config.require_known(sweep_keys());
  SweepConfig cfg = sweep_from_config(ctx.config);
  cfg.workers = ctx.workers;
  const std::vector<SweepPoint> points = fig2_sweep(cfg);
  ctx.write_csv_file("fig2_" + to_string(cfg.family) + ".csv", kUnitsFinite, fig2_table(cfg, points));
}

void cmd_borromean_scan(const Context& ctx) {
  ctx.config.require_known(sweep_keys());
  SweepConfig cfg = sweep_from_config(ctx.config);
  cfg.workers = ctx.workers;
  const BorromeanScan scan = borromean_scan(cfg, ctx.config.list("scan.S1"), ctx.config.list("scan.S2"));
  ctx.write_csv_file("borromean_" + to_string(cfg.family) + ".csv", kUnitsFinite, borromean_table(scan));
  json body;
  body["family"] = to_string(cfg.family);
  body["cells"] = scan.cells.size();
  body["borromean_cells"] = scan.borromean_count();
  json window = json::array();
  for (const BorromeanWindow& w : scan.window) {
    window.push_back({{"S1", w.s1}, {"S2_min", w.s2_min}, {"S2_max", w.s2_max}, {"cells", w.cells}});
  }
  body["window"] = window;
  ctx.write_json_file("borromean_" + to_string(cfg.family) + "_window.json", kUnitsFinite, body);
  std::cout << "borromean cells: " << scan.borromean_count() << " of " << scan.cells.size() << "\n";
}

void cmd_no_third_state(const Context& ctx) {
  ctx.config.require_known(with_potential({"no_third_state.rho_max_over_a"}));
  const PotentialSpec spec = potential_from_config(ctx.config);
  const double rho_max = ctx.config.num("no_third_state.rho_max_over_a", 1e3);
  if (!(rho_max > 0.0)) throw ConfigError("no_third_state.rho_max_over_a must be positive");
  const NoThirdStateReport rep = no_third_state(spec, rho_max);
  json body;
  body["count"] = rep.count;
  body["rho_max_over_a"] = rep.rho_max_over_a;
  body["node_positions_over_a"] = rep.node_positions_over_a;
  body["stable"] = rep.stable();
  json runs = json::array();
  for (const auto& r : rep.runs) {
    runs.push_back({{"points_per_decade", r.points_per_decade}, {"x_step", r.x_step}, {"count", r.count}});
  }
  body["grid_convergence"] = runs;
  ctx.write_json_file("no_third_state.json", spec.is_zero_range() ? kUnitsZero : kUnitsFinite, body);
  std::cout << "zero-energy nodes to rho = " << rho_max << ": " << rep.count
            << (rep.stable() ? " (stable under grid doubling)" : " (NOT stable under grid doubling)") << "\n";
}

void write_diagnostics(const Context& ctx, const std::string& kind, const std::string& what) {
  std::error_code ec;
  fs::create_directories(ctx.out_dir, ec);
  std::ofstream f(ctx.path("diagnostics.json"));
  if (!f) return;
  json d;
  d["command"] = ctx.command;
  d["error"] = kind;
  d["message"] = what;
  d["config_hash"] = hash_string(ctx.config.hash());
  d["version"] = kVersion;
  f << d.dump(2) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Three identical bosons in two dimensions: hyperspherical Faddeev solver"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  const std::vector<std::pair<std::string, std::string>> commands{
      {"two-body", "two-body bound states and scattering length"},
      {"angular-scan", "hyperangular eigenvalues over a hyperradius grid"},
      {"zero-range-lambda", "zero-range eigenvalues lambda_n(rho/a)"},
      {"efimov3d", "three-dimensional comparison eigenvalue"},
      {"fig1", "zero-range effective potential and bound-state profiles"},
      {"spectrum", "three-body bound states"},
      {"fig2-sweep", "ratio (E3 - E2) / E2 across a potential family"},
      {"borromean-scan", "classify (S1, S2) cells by two- and three-body binding"},
      {"no-third-state", "node count of the threshold solution to large rho"}};

  std::string config_path;
  std::string out_dir = ".";
  int workers = 0;
  std::map<std::string, CLI::App*> subs;
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "flat key = value configuration file");
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--workers", workers, "worker threads (results do not depend on it)")->check(CLI::NonNegativeNumber);
    subs[name] = sub;
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  Context ctx;
  for (const auto& [name, sub] : subs) {
    if (sub->parsed()) ctx.command = name;
  }
  ctx.out_dir = out_dir;

  const std::map<std::string, std::function<void(const Context&)>> run{
      {"two-body", cmd_two_body},         {"angular-scan", cmd_angular_scan},     {"zero-range-lambda", cmd_zero_range_lambda},
      {"efimov3d", cmd_efimov3d},         {"fig1", cmd_fig1},                     {"spectrum", cmd_spectrum},
      {"fig2-sweep", cmd_fig2_sweep},     {"borromean-scan", cmd_borromean_scan}, {"no-third-state", cmd_no_third_state}};

  try {
    if (!config_path.empty()) ctx.config = Config::load(config_path);
    ctx.workers = workers > 0 ? workers : ctx.config.integer("workers", 1);
    std::error_code ec;
    fs::create_directories(ctx.out_dir, ec);
    if (ec) throw ConfigError("cannot create output directory '" + out_dir + "': " + ec.message());
    run.at(ctx.command)(ctx);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    write_diagnostics(ctx, "numerical", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    write_diagnostics(ctx, "unexpected", e.what());
    return 3;
  }
  return 0;
}
