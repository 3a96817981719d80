#pragma once

// Configuration, sweeps and dataset writers behind the command-line tool.
//
// Configuration files are flat `key = value` text with `#` comments. Lists
// are comma separated or `lo:hi:n` (n points, linear). Every output file
// starts with a metadata header carrying the version, a hash of the
// configuration and the units.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "halo2d/channels.hpp"
#include "halo2d/constants.hpp"
#include "halo2d/errors.hpp"
#include "halo2d/parallel.hpp"
#include "halo2d/potential.hpp"
#include "halo2d/radial.hpp"
#include "halo2d/twobody.hpp"

namespace halo2d {

// ---------------------------------------------------------------- config ---

class Config {
 public:
  Config() = default;

  static Config parse(std::string_view text) {
    Config c;
    std::istringstream in{std::string(text)};
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
      ++number;
      if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
      const std::string t = trim(line);
      if (t.empty()) continue;
      const auto eq = t.find('=');
      if (eq == std::string::npos) {
        throw ConfigError("config line " + std::to_string(number) + ": expected key = value");
      }
      const std::string key = trim(t.substr(0, eq));
      const std::string value = trim(t.substr(eq + 1));
      if (key.empty()) throw ConfigError("config line " + std::to_string(number) + ": empty key");
      if (c.values_.count(key) != 0) throw ConfigError("config: duplicate key '" + key + "'");
      c.values_[key] = value;
    }
    return c;
  }

  static Config load(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("config: cannot open '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    return parse(ss.str());
  }

  void set(const std::string& key, const std::string& value) { values_[key] = value; }
  [[nodiscard]] bool has(const std::string& key) const { return values_.count(key) != 0; }
  [[nodiscard]] const std::map<std::string, std::string>& entries() const { return values_; }

  [[nodiscard]] std::string str(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError("config: missing key '" + key + "'");
    return it->second;
  }
  [[nodiscard]] std::string str(const std::string& key, const std::string& fallback) const {
    return has(key) ? str(key) : fallback;
  }

  [[nodiscard]] double num(const std::string& key) const { return to_double(key, str(key)); }
  [[nodiscard]] double num(const std::string& key, double fallback) const {
    return has(key) ? num(key) : fallback;
  }

  [[nodiscard]] int integer(const std::string& key, int fallback) const {
    if (!has(key)) return fallback;
    const double v = num(key);
    if (v != std::floor(v) || std::abs(v) > 1e9) throw ConfigError("config: '" + key + "' must be an integer");
    return static_cast<int>(v);
  }

  [[nodiscard]] bool flag(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    const std::string v = str(key);
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError("config: '" + key + "' must be true or false");
  }

  [[nodiscard]] std::vector<double> list(const std::string& key) const {
    const std::string v = str(key);
    std::vector<double> out;
    if (v.find(':') != std::string::npos) {
      std::vector<std::string> parts = split(v, ':');
      if (parts.size() != 3) throw ConfigError("config: '" + key + "' range must be lo:hi:n");
      const double lo = to_double(key, parts[0]);
      const double hi = to_double(key, parts[1]);
      const double n = to_double(key, parts[2]);
      if (n < 1 || n != std::floor(n)) throw ConfigError("config: '" + key + "' needs a positive point count");
      for (int i = 0; i < static_cast<int>(n); ++i) out.push_back(n == 1 ? lo : lo + (hi - lo) * i / (n - 1));
      return out;
    }
    for (const std::string& p : split(v, ',')) out.push_back(to_double(key, p));
    if (out.empty()) throw ConfigError("config: '" + key + "' is an empty list");
    return out;
  }
  [[nodiscard]] std::vector<double> list(const std::string& key, std::vector<double> fallback) const {
    return has(key) ? list(key) : fallback;
  }

  /// Rejects keys outside the given set (catches misspellings).
  void require_known(const std::set<std::string>& known) const {
    for (const auto& [k, v] : values_) {
      if (known.count(k) == 0) throw ConfigError("config: unknown key '" + k + "'");
    }
  }

  /// FNV-1a over the canonical "key=value\n" listing (sorted keys).
  [[nodiscard]] std::uint64_t hash() const {
    std::uint64_t h = 1469598103934665603ULL;
    for (const auto& [k, v] : values_) {
      for (const char ch : k + "=" + v + "\n") {
        h ^= static_cast<unsigned char>(ch);
        h *= 1099511628211ULL;
      }
    }
    return h;
  }

 private:
  static std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
  }
  static std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) {
      item = trim(item);
      if (!item.empty()) out.push_back(item);
    }
    return out;
  }
  static double to_double(const std::string& key, const std::string& s) {
    try {
      std::size_t pos = 0;
      const double v = std::stod(s, &pos);
      if (pos != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      throw ConfigError("config: '" + key + "' = '" + s + "' is not a number");
    }
  }

  std::map<std::string, std::string> values_;
};

/// Keys understood by potential_from_config.
inline const std::set<std::string>& potential_keys() {
  static const std::set<std::string> keys{"potential.type", "potential.a",  "potential.b",
                                          "potential.S1",   "potential.S2", "potential.file"};
  return keys;
}

inline PotentialSpec load_tabulated_potential(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("potential.file: cannot open '" + path + "'");
  std::vector<double> r;
  std::vector<double> v;
  std::string line;
  while (std::getline(f, line)) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    double x = 0.0;
    double y = 0.0;
    if (!(ls >> x)) continue;
    if (!(ls >> y)) throw ConfigError("potential.file: expected two columns 'r V'");
    r.push_back(x);
    v.push_back(y);
  }
  try {
    return PotentialSpec::tabulated(std::move(r), std::move(v));
  } catch (const DomainError& e) {
    throw ConfigError(std::string("potential.file: ") + e.what());
  }
}

/// potential.type = zero_range (a) | gaussian (b, S1, S2) | free (b) | tabulated (file).
inline PotentialSpec potential_from_config(const Config& c) {
  const std::string type = c.str("potential.type", c.has("potential.file") ? "tabulated" : "zero_range");
  try {
    if (type == "zero_range") return PotentialSpec::zero_range(c.num("potential.a", 1.0));
    if (type == "gaussian" || type == "gaussian_pair") {
      return PotentialSpec::gaussian_pair(c.num("potential.b", 1.0), c.num("potential.S1", 0.0),
                                          c.num("potential.S2", 0.0));
    }
    if (type == "free") return PotentialSpec::free(c.num("potential.b", 1.0));
    if (type == "tabulated") return load_tabulated_potential(c.str("potential.file"));
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
  throw ConfigError("potential.type: unknown type '" + type + "'");
}

// ---------------------------------------------------------------- output ---

struct Metadata {
  std::string command;
  std::uint64_t config_hash = 0;
  std::string units;
};

inline std::string hash_string(std::uint64_t h) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "fnv1a64:%016llx", static_cast<unsigned long long>(h));
  return buf;
}

inline std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

/// Shortest round-trip-stable text for a value; empty for NaN.
inline std::string fmt(double v) {
  if (std::isnan(v)) return {};
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  void add(std::vector<std::string> row) {
    if (row.size() != columns.size()) throw NumericalError("CsvTable: row width mismatch");
    rows.push_back(std::move(row));
  }
};

inline void write_csv(std::ostream& out, const Metadata& meta, const CsvTable& t) {
  out << "# halo2d " << kVersion << "\n"
      << "# command: " << meta.command << "\n"
      << "# config_hash: " << hash_string(meta.config_hash) << "\n"
      << "# units: " << meta.units << "\n"
      << "# generated: " << utc_timestamp() << "\n";
  for (std::size_t i = 0; i < t.columns.size(); ++i) out << (i ? "," : "") << t.columns[i];
  out << "\n";
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
    out << "\n";
  }
}

inline constexpr const char* kUnitsFinite = "hbar = m = 1; lengths in b, energies in hbar^2/(m b^2)";
inline constexpr const char* kUnitsZero = "hbar = m = 1; lengths in a, energies in hbar^2/(m a^2)";

// ---------------------------------------------------------------- sweeps ---

enum class Family { pure_attractive, repulsive_core, repulsive_barrier };

inline Family family_from_string(const std::string& s) {
  if (s == "pure_attractive") return Family::pure_attractive;
  if (s == "repulsive_core") return Family::repulsive_core;
  if (s == "repulsive_barrier") return Family::repulsive_barrier;
  throw ConfigError("sweep.family: unknown family '" + s + "'");
}

inline std::string to_string(Family f) {
  switch (f) {
    case Family::pure_attractive:
      return "pure_attractive";
    case Family::repulsive_core:
      return "repulsive_core";
    case Family::repulsive_barrier:
      return "repulsive_barrier";
  }
  return {};
}

/// Shape-class sign rules: pure_attractive S1 <= 0, S2 <= 0; repulsive_core
/// S1 < 0 < S2; repulsive_barrier S2 < 0 < S1 (wide repulsion outside narrow
/// attraction). The attractive strength is the swept one: S1 for the first
/// two classes, S2 for the barrier class.
inline bool shape_consistent(Family f, double s1, double s2) {
  switch (f) {
    case Family::pure_attractive:
      return s1 <= 0.0 && s2 <= 0.0;
    case Family::repulsive_core:
      return s1 < 0.0 && s2 > 0.0;
    case Family::repulsive_barrier:
      return s1 > 0.0 && s2 < 0.0;
  }
  return false;
}

struct SweepConfig {
  Family family = Family::pure_attractive;
  double b = 1.0;
  double fixed = 0.0;                  ///< the strength that is not swept
  std::vector<double> target_binding;  ///< |E2| targets, strength found by bisection
  std::vector<double> strengths;       ///< or explicit swept strengths
  int channels = 1;
  double rho_min = 0.01;          ///< in b
  int points_per_decade = 12;
  double decay_lengths = 60.0;    ///< rho_max in units of the shallowest expected decay length
  double unbound_rho_max = 60.0;  ///< rho_max (in b) when there is no dimer
  double max_rho_max = 1e6;       ///< cap on rho_max (in b)
  int workers = 1;
  ChannelOptions channel;
  RadialOptions radial;
  TwoBodyOptions two_body;

  [[nodiscard]] std::pair<double, double> strengths_for(double swept) const {
    return family == Family::repulsive_barrier ? std::pair{fixed, swept} : std::pair{swept, fixed};
  }

  void validate() const {
    if (!(b > 0.0)) throw ConfigError("sweep: b must be positive");
    if (channels < 1) throw ConfigError("sweep: channels must be >= 1");
    if (!(rho_min > 0.0) || points_per_decade < 2 || !(decay_lengths > 0.0) || !(unbound_rho_max > rho_min)) {
      throw ConfigError("sweep: invalid grid parameters");
    }
    for (double t : target_binding) {
      if (!(t > 0.0)) throw ConfigError("sweep.target_E2: binding targets must be positive");
    }
    // Swept values of 0 would leave the class; test with a nominal attraction.
    const double probe = -1.0;
    const auto [p1, p2] = strengths_for(probe);
    if (!shape_consistent(family, p1, p2)) {
      throw ConfigError("sweep: fixed strength inconsistent with family " + to_string(family));
    }
    for (double s : strengths) {
      const auto [s1, s2] = strengths_for(s);
      if (!shape_consistent(family, s1, s2)) {
        throw ConfigError("sweep.strengths: value " + fmt(s) + " inconsistent with family " + to_string(family));
      }
    }
  }
};

inline const std::set<std::string>& sweep_keys() {
  static const std::set<std::string> keys{
      "sweep.family",   "sweep.b",        "sweep.fixed",         "sweep.target_E2",      "sweep.strengths",
      "sweep.channels", "grid.rho_min",   "grid.points_per_decade", "grid.decay_lengths", "grid.unbound_rho_max",
      "grid.max_rho_max", "tolerance.energy", "tolerance.coupling", "tolerance.two_body_energy",
      "angular.order",  "angular.beta_points", "scan.S1", "scan.S2", "workers"};
  return keys;
}

inline SweepConfig sweep_from_config(const Config& c) {
  SweepConfig s;
  s.family = family_from_string(c.str("sweep.family", "pure_attractive"));
  s.b = c.num("sweep.b", 1.0);
  const double default_fixed = s.family == Family::repulsive_core ? 5.0 : (s.family == Family::repulsive_barrier ? 20.0 : 0.0);
  s.fixed = c.num("sweep.fixed", default_fixed);
  if (c.has("sweep.target_E2")) {
    s.target_binding = c.list("sweep.target_E2");
    for (double& t : s.target_binding) t = std::abs(t);
  }
  if (c.has("sweep.strengths")) s.strengths = c.list("sweep.strengths");
  s.channels = c.integer("sweep.channels", 1);
  s.rho_min = c.num("grid.rho_min", s.rho_min);
  s.points_per_decade = c.integer("grid.points_per_decade", s.points_per_decade);
  s.decay_lengths = c.num("grid.decay_lengths", s.decay_lengths);
  s.unbound_rho_max = c.num("grid.unbound_rho_max", s.unbound_rho_max);
  s.max_rho_max = c.num("grid.max_rho_max", s.max_rho_max);
  s.radial.energy_tolerance = c.num("tolerance.energy", s.radial.energy_tolerance);
  s.channel.richardson_tolerance = c.num("tolerance.coupling", s.channel.richardson_tolerance);
  s.two_body.energy_tolerance = c.num("tolerance.two_body_energy", s.two_body.energy_tolerance);
  s.channel.angular.order = c.integer("angular.order", s.channel.angular.order);
  s.channel.angular.beta_points = c.integer("angular.beta_points", s.channel.angular.beta_points);
  s.channel.two_body = s.two_body;
  s.workers = c.integer("workers", 1);
  s.validate();
  return s;
}

/// Dimer binding |E2| of the deepest two-body state; 0 if unbound, and the
/// smallest positive double when a state exists with binding too weak to
/// resolve (the exact count still sees it).
inline double dimer_binding(const PotentialSpec& spec, const TwoBodyOptions& opt) {
  if (count_bound_states(spec, opt) == 0) return 0.0;
  const std::vector<double> e = bound_states(spec, std::nullopt, opt);
  return e.empty() ? std::numeric_limits<double>::min() : -e.front();
}

/// Swept strength giving |E2| = target (relative 1e-8), by bisection on the
/// monotone binding-versus-attraction curve.
inline double tune_strength(const SweepConfig& cfg, double target) {
  auto binding = [&](double s) {
    const auto [s1, s2] = cfg.strengths_for(s);
    return dimer_binding(PotentialSpec::gaussian_pair(cfg.b, s1, s2), cfg.two_body);
  };
  double weak = 0.0;
  if (binding(weak) >= target) {
    throw ConfigError("sweep: fixed strength alone binds deeper than |E2| = " + fmt(target));
  }
  double strong = -1.0;
  for (int i = 0; binding(strong) < target; ++i) {
    if (i > 60) throw NumericalError("tune_strength: no strength reaches |E2| = " + fmt(target));
    weak = strong;
    strong *= 2.0;
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (weak + strong);
    const double bm = binding(mid);
    if (std::abs(bm - target) <= 1e-8 * target || std::abs(strong - weak) <= 1e-14 * std::abs(mid)) return mid;
    (bm < target ? weak : strong) = mid;
  }
  return 0.5 * (weak + strong);
}

/// Everything computed for one potential of a sweep.
struct SweepPoint {
  double s1 = 0.0;
  double s2 = 0.0;
  int dimers = 0;                  ///< exact two-body bound-state count
  std::optional<double> e2;        ///< deepest dimer energy if resolvable
  std::optional<double> scattering_length;
  std::vector<ThreeBodyState> states;  ///< below min(E2, 0)
  std::size_t flagged = 0;         ///< weakly tracked grid points
};

/// Hyperradial grid for a potential with dimer energy e2 (or none).
inline std::vector<double> sweep_grid(const SweepConfig& cfg, std::optional<double> e2) {
  double rho_max = cfg.unbound_rho_max * cfg.b;
  if (e2) {
    // Shallowest universal state sits at ~1.27 E2: decay sqrt(2 * 0.267 |E2|).
    const double kappa = std::sqrt(2.0 * 0.2667 * std::abs(*e2));
    rho_max = std::max(rho_max, cfg.decay_lengths / kappa);
  }
  rho_max = std::min(rho_max, cfg.max_rho_max * cfg.b);
  const double lo = cfg.rho_min * cfg.b;
  const int n = std::max(24, static_cast<int>(std::ceil(cfg.points_per_decade * std::log10(rho_max / lo)))) + 1;
  return make_log_grid(lo, rho_max, n);
}

inline SweepPoint evaluate_point(const SweepConfig& cfg, double s1, double s2, bool with_three_body = true) {
  SweepPoint p;
  p.s1 = s1;
  p.s2 = s2;
  const PotentialSpec spec = PotentialSpec::gaussian_pair(cfg.b, s1, s2);
  p.dimers = count_bound_states(spec, cfg.two_body);
  if (p.dimers > 0) {
    const std::vector<double> e = bound_states(spec, std::nullopt, cfg.two_body);
    if (!e.empty()) p.e2 = e.front();
    try {
      p.scattering_length = scattering_length(spec, cfg.two_body);
    } catch (const Error&) {
    }
  }
  // A dimer with unresolvably weak binding has no usable threshold.
  if (!with_three_body || (p.dimers > 0 && !p.e2)) return p;
  ChannelOptions copt = cfg.channel;
  copt.workers = 1;
  const ChannelTable table = build_channel_table(spec, sweep_grid(cfg, p.e2), cfg.channels, copt);
  p.flagged = table.flagged_rho.size();
  p.states = solve_bound_states(table, {}, cfg.radial);
  return p;
}

/// Universality-sweep dataset: one row per three-body state, ratio = (E3 - E2) / E2.
inline std::vector<SweepPoint> fig2_sweep(const SweepConfig& cfg) {
  std::vector<double> swept = cfg.strengths;
  if (swept.empty()) {
    if (cfg.target_binding.empty()) throw ConfigError("sweep: give sweep.target_E2 or sweep.strengths");
    swept.resize(cfg.target_binding.size());
    parallel_for(swept.size(), cfg.workers, [&](std::size_t i) { swept[i] = tune_strength(cfg, cfg.target_binding[i]); });
  }
  std::vector<SweepPoint> out(swept.size());
  parallel_for(swept.size(), cfg.workers, [&](std::size_t i) {
    const auto [s1, s2] = cfg.strengths_for(swept[i]);
    out[i] = evaluate_point(cfg, s1, s2);
  });
  return out;
}

inline CsvTable fig2_table(const SweepConfig& cfg, const std::vector<SweepPoint>& points) {
  CsvTable t;
  t.columns = {"family", "S1", "S2", "E2", "state_index", "E3", "ratio", "flag"};
  for (const SweepPoint& p : points) {
    const std::string fam = to_string(cfg.family);
    if (p.dimers == 0 || !p.e2) {
      const std::string flag = p.dimers == 0 ? "no_dimer" : "dimer_unresolved";
      if (p.states.empty()) t.add({fam, fmt(p.s1), fmt(p.s2), p.dimers == 0 ? "0" : "", "", "", "", flag});
      for (std::size_t k = 0; k < p.states.size(); ++k) {
        t.add({fam, fmt(p.s1), fmt(p.s2), "0", std::to_string(k), fmt(p.states[k].E3), "", flag});
      }
      continue;
    }
    const double e2 = *p.e2;
    if (p.states.empty()) t.add({fam, fmt(p.s1), fmt(p.s2), fmt(e2), "", "", "", "no_trimer"});
    for (std::size_t k = 0; k < p.states.size(); ++k) {
      const double e3 = p.states[k].E3;
      t.add({fam, fmt(p.s1), fmt(p.s2), fmt(e2), std::to_string(k), fmt(e3), fmt((e3 - e2) / e2),
             p.flagged ? "tracking_flagged" : ""});
    }
  }
  return t;
}

// -------------------------------------------------------------- borromean ---

enum class CellLabel { dimer_trimer, dimer, borromean, unbound };

inline std::string to_string(CellLabel l) {
  switch (l) {
    case CellLabel::dimer_trimer:
      return "dimer+trimer";
    case CellLabel::dimer:
      return "dimer";
    case CellLabel::borromean:
      return "borromean";
    case CellLabel::unbound:
      return "unbound";
  }
  return {};
}

struct BorromeanCell {
  double s1 = 0.0;
  double s2 = 0.0;
  CellLabel label = CellLabel::unbound;
  int dimers = 0;
  std::optional<double> e2;
  std::optional<double> e3;  ///< lowest three-body energy
  int trimers = 0;
};

struct BorromeanWindow {
  double s1 = 0.0;
  double s2_min = 0.0;
  double s2_max = 0.0;
  int cells = 0;
};

struct BorromeanScan {
  std::vector<BorromeanCell> cells;
  std::vector<BorromeanWindow> window;  ///< per S1 row holding Borromean cells
  [[nodiscard]] int borromean_count() const {
    return static_cast<int>(std::count_if(cells.begin(), cells.end(),
                                          [](const BorromeanCell& c) { return c.label == CellLabel::borromean; }));
  }
};

/// Labels every (S1, S2) cell. With a dimer only the ground trimer is sought
/// (grid sized to its universal decay length); without one, the grid extends
/// to unbound_rho_max. A single adiabatic channel gives an upper bound on the
/// ground-state energy, so a Borromean label from N = 1 is never spurious.
inline BorromeanScan borromean_scan(const SweepConfig& cfg, const std::vector<double>& s1_values,
                                    const std::vector<double>& s2_values) {
  std::vector<std::pair<double, double>> grid;
  for (double s1 : s1_values) {
    for (double s2 : s2_values) {
      if (!shape_consistent(cfg.family, s1, s2) && !(s1 == 0.0 && s2 == 0.0)) {
        throw ConfigError("borromean-scan: cell (" + fmt(s1) + ", " + fmt(s2) + ") outside family " +
                          to_string(cfg.family));
      }
      grid.emplace_back(s1, s2);
    }
  }
  BorromeanScan scan;
  scan.cells.resize(grid.size());
  parallel_for(grid.size(), cfg.workers, [&](std::size_t i) {
    const auto [s1, s2] = grid[i];
    BorromeanCell& cell = scan.cells[i];
    cell.s1 = s1;
    cell.s2 = s2;
    SweepConfig local = cfg;
    local.decay_lengths = 40.0;
    const PotentialSpec spec = PotentialSpec::gaussian_pair(cfg.b, s1, s2);
    cell.dimers = count_bound_states(spec, cfg.two_body);
    if (cell.dimers > 0) {
      const std::vector<double> e = bound_states(spec, std::nullopt, cfg.two_body);
      if (e.empty()) {
        cell.label = CellLabel::dimer;
        return;
      }
      cell.e2 = e.front();
      // Ground state decays like sqrt(2 * 15.5 |E2|); size the grid for it.
      local.unbound_rho_max = std::min(cfg.max_rho_max, std::max(cfg.unbound_rho_max,
                                                                  40.0 / std::sqrt(31.0 * std::abs(*cell.e2)) / cfg.b));
      const ChannelTable table =
          build_channel_table(spec, sweep_grid(local, std::nullopt), cfg.channels, [&] {
            ChannelOptions o = cfg.channel;
            o.workers = 1;
            return o;
          }());
      const auto states = solve_bound_states(table, {}, cfg.radial);
      cell.trimers = static_cast<int>(states.size());
      if (!states.empty()) cell.e3 = states.front().E3;
      cell.label = states.empty() ? CellLabel::dimer : CellLabel::dimer_trimer;
      return;
    }
    if (spec.is_identically_zero()) {
      cell.label = CellLabel::unbound;
      return;
    }
    ChannelOptions o = cfg.channel;
    o.workers = 1;
    const ChannelTable table = build_channel_table(spec, sweep_grid(cfg, std::nullopt), cfg.channels, o);
    const auto states = solve_bound_states(table, {}, cfg.radial);
    cell.trimers = static_cast<int>(states.size());
    if (!states.empty()) cell.e3 = states.front().E3;
    cell.label = states.empty() ? CellLabel::unbound : CellLabel::borromean;
  });
  std::map<double, BorromeanWindow> rows;
  for (const BorromeanCell& c : scan.cells) {
    if (c.label != CellLabel::borromean) continue;
    auto [it, fresh] = rows.try_emplace(c.s1, BorromeanWindow{c.s1, c.s2, c.s2, 0});
    it->second.s2_min = std::min(it->second.s2_min, c.s2);
    it->second.s2_max = std::max(it->second.s2_max, c.s2);
    ++it->second.cells;
  }
  for (const auto& [k, w] : rows) scan.window.push_back(w);
  return scan;
}

inline CsvTable borromean_table(const BorromeanScan& scan) {
  CsvTable t;
  t.columns = {"S1", "S2", "label", "dimers", "E2", "E3", "trimers"};
  for (const BorromeanCell& c : scan.cells) {
    t.add({fmt(c.s1), fmt(c.s2), to_string(c.label), std::to_string(c.dimers), c.e2 ? fmt(*c.e2) : "",
           c.e3 ? fmt(*c.e3) : "", std::to_string(c.trimers)});
  }
  return t;
}

// --------------------------------------------------------- zero-range runs ---

/// Default zero-range grid in units of a.
inline std::vector<double> zero_range_grid(double rho_max_over_a = 60.0, int points_per_decade = 34) {
  const double lo = 1e-7;
  const int n = std::max(32, static_cast<int>(std::ceil(points_per_decade * std::log10(rho_max_over_a / lo)))) + 1;
  return make_log_grid(lo, rho_max_over_a, n);
}

inline ChannelTable zero_range_table(double a, double rho_max_over_a = 60.0, int points_per_decade = 34) {
  std::vector<double> g = zero_range_grid(rho_max_over_a, points_per_decade);
  for (double& r : g) r *= a;
  return build_channel_table(PotentialSpec::zero_range(a), g, 1);
}

struct NoThirdStateReport {
  int count = 0;
  double rho_max_over_a = 0.0;
  std::vector<double> node_positions_over_a;
  struct Run {
    int points_per_decade;
    double x_step;
    int count;
  };
  std::vector<Run> runs;  ///< grid-convergence evidence
  [[nodiscard]] bool stable() const {
    return std::all_of(runs.begin(), runs.end(), [&](const Run& r) { return r.count == count; });
  }
};

/// Zero-threshold node count out to rho_max, repeated with the table density
/// and the Numerov step doubled.
inline NoThirdStateReport no_third_state(const PotentialSpec& spec, double rho_max_over_a = 1e3) {
  NoThirdStateReport rep;
  rep.rho_max_over_a = rho_max_over_a;
  const double unit = spec.is_zero_range() ? std::get<ZeroRange>(spec.model()).a : spec.effective_range_scale();
  auto table_for = [&](int ppd) {
    if (spec.is_zero_range()) return zero_range_table(unit, std::max(rho_max_over_a, 1.0), ppd);
    const double lo = 0.01 * unit;
    const double hi = std::max(rho_max_over_a * unit, 10.0 * unit);
    const int n = static_cast<int>(std::ceil(ppd * std::log10(hi / lo))) + 1;
    return build_channel_table(spec, make_log_grid(lo, hi, n), 1);
  };
  const int base_ppd = spec.is_zero_range() ? 30 : 12;
  const double base_step = 2e-3;
  const ChannelTable base = table_for(base_ppd);
  const ChannelTable fine = table_for(2 * base_ppd);
  RadialOptions o;
  o.x_step = base_step;
  rep.count = count_zero_energy_nodes(base, rho_max_over_a * unit, o);
  rep.runs.push_back({base_ppd, base_step, rep.count});
  rep.runs.push_back({2 * base_ppd, base_step, count_zero_energy_nodes(fine, rho_max_over_a * unit, o)});
  o.x_step = 0.5 * base_step;
  rep.runs.push_back({2 * base_ppd, 0.5 * base_step, count_zero_energy_nodes(fine, rho_max_over_a * unit, o)});
  o.x_step = base_step;
  for (double r : zero_energy_node_positions(base, rho_max_over_a * unit, o)) rep.node_positions_over_a.push_back(r / unit);
  return rep;
}

}  // namespace halo2d
