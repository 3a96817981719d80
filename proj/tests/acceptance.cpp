// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
// The sweep criteria read the sample configs so they exercise the same inputs
// as the command-line runs.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "halo2d/halo2d.hpp"
#include "oracles.hpp"

#ifndef HALO2D_CONFIG_DIR
#define HALO2D_CONFIG_DIR "configs"
#endif

using namespace halo2d;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string printf_string(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double rel(double value, double target) { return std::abs(value / target - 1.0); }

SweepConfig config(const std::string& name) {
  const Config c = Config::load(std::string(HALO2D_CONFIG_DIR) + "/" + name);
  return sweep_from_config(c);
}

Outcome free_spectrum() {
  const auto s = solve_angular(PotentialSpec::free(), 1.0, 3);
  const double d = std::max({std::abs(s.lambdas[0]), std::abs(s.lambdas[1] - 8.0), std::abs(s.lambdas[2] - 24.0)});
  return {d < 1e-6 && s.spurious[1],
          printf_string("lambda = %.9f, %.9f (spurious), %.9f; max deviation %.1e", s.lambdas[0], s.lambdas[1],
                        s.lambdas[2], d)};
}

Outcome q11_law() {
  double worst = 0.0;
  for (double k_rho : {50.0, 100.0, 400.0}) {
    const double rho = k_rho;  // k = 1
    worst = std::max(worst, rel(q11_from_profile(1.0, rho).value, -1.0 / (3.0 * rho * rho)));
  }
  return {worst < 1e-3, printf_string("k rho in {50, 100, 400}: max relative deviation %.2e", worst)};
}

Outcome parabola() {
  const int m = 41;
  Eigen::MatrixXd a(m, 2);
  Eigen::VectorXd y(m);
  for (int i = 0; i < m; ++i) {
    const double x = 10.0 * std::pow(10.0, static_cast<double>(i) / (m - 1));
    a(i, 0) = 1.0;
    a(i, 1) = x * x;
    y(i) = solve_lambda_zero_range(x, 1).lambda;
  }
  const Eigen::VectorXd c = a.colPivHouseholderQr().solve(y);
  const double e2 = rel(c(1), -kParabolaCoefficient);
  const double e0 = rel(c(0), -4.0 / 3.0);
  return {e2 < 1e-3 && e0 < 0.1,
          printf_string("c2 = %.7f (target %.7f, %.1e); c0 = %.5f vs -4/3 (%.1f%%)", c(1), -kParabolaCoefficient, e2,
                        c(0), 100.0 * e0)};
}

Outcome effective_asymptote() {
  const auto t = build_channel_table(PotentialSpec::zero_range(1.0), {60.0, 80.0, 100.0, 120.0}, 1);
  const double u = effective_potential(t, 1)[2];
  const double target = -1.0 / (4.0 * 100.0 * 100.0) - kParabolaCoefficient;
  return {rel(u, target) < 0.01, printf_string("U(100 a) = %.8f, target %.8f, relative %.1e", u, target, rel(u, target))};
}

const std::vector<ThreeBodyState>& universal_states(double& e2) {
  static double threshold = 0.0;
  static const std::vector<ThreeBodyState> states = [] {
    const ChannelTable t = zero_range_table(1.0);
    threshold = t.thresholds[0];
    return solve_bound_states(t);
  }();
  e2 = threshold;
  return states;
}

Outcome universal_ratios() {
  double e2 = 0.0;
  const auto& s = universal_states(e2);
  if (s.size() != 2) return {false, printf_string("%zu bound states", s.size())};
  const double r0 = s[0].E3 / e2;
  const double r1 = s[1].E3 / e2;
  return {rel(r0, 16.52) < 0.01 && rel(r1, 1.267) < 0.005,
          printf_string("2 states, E3/E2 = %.4f, %.5f", r0, r1)};
}

Outcome halo_radii() {
  double e2 = 0.0;
  const auto& s = universal_states(e2);
  if (s.size() != 2) return {false, "needs two states"};
  const double r0 = rms_center_of_mass_radius(s[0]);
  const double r1 = rms_center_of_mass_radius(s[1]);
  return {rel(r0, 0.111) < 0.03 && rel(r1, 0.927) < 0.03,
          printf_string("rms distance from the centre of mass %.4f a, %.4f a (sqrt<rho^2> = %.4f a, %.4f a)", r0, r1,
                        s[0].rms_rho, s[1].rms_rho)};
}

Outcome no_third() {
  const auto rep = no_third_state(PotentialSpec::zero_range(1.0), 1e3);
  std::string runs;
  for (const auto& r : rep.runs) runs += printf_string(" [%d/decade, dx %.0e: %d]", r.points_per_decade, r.x_step, r.count);
  return {rep.count == 2 && rep.stable(), printf_string("nodes to 1000 a: %d;", rep.count) + runs};
}

Outcome efimov() {
  const double l0 = efimov3d_lowest(0.0);
  const double big = efimov3d_lowest(1e8);
  const double nu = std::sqrt(big + 4.0);
  const bool limit = efimov3d_lowest(INFINITY) == 0.0 && std::abs(nu - 2.0) < 1e-6;
  return {rel(l0, -5.012) < 5e-4 && limit,
          printf_string("lambda(0) = %.5f; nu(1e8 a) = %.8f; lambda(inf) = 0", l0, nu)};
}

Outcome weak_binding() {
  SweepConfig cfg;
  cfg.family = Family::pure_attractive;
  const double s1 = tune_strength(cfg, 5e-5);
  const auto spec = PotentialSpec::gaussian_pair(1.0, s1, 0.0);
  const double k = std::sqrt(-bound_states(spec).back());
  const double a = scattering_length(spec);
  const double v = k * a * std::exp(kEulerGamma) / 2.0;
  return {std::abs(v - 1.0) < 0.01, printf_string("S1 = %.6f, |E2| = 5e-5, a = %.4f b: k a e^gamma / 2 = %.5f", s1, a, v)};
}

Outcome universality() {
  double e2 = 0.0;
  const auto& zr = universal_states(e2);
  if (zr.size() != 2) return {false, "zero-range reference unavailable"};
  const double ref0 = (zr[0].E3 - e2) / e2;
  const double ref1 = (zr[1].E3 - e2) / e2;
  bool ok = true;
  std::string d = printf_string("zero range %.3f, %.4f;", ref0, ref1);
  for (const char* name : {"fig2_pure_attractive.cfg", "fig2_repulsive_core.cfg"}) {
    const SweepConfig cfg = config(name);
    const auto pts = fig2_sweep(cfg);
    std::size_t smallest = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (pts[i].e2 && (!pts[smallest].e2 || std::abs(*pts[i].e2) < std::abs(*pts[smallest].e2))) smallest = i;
    }
    const SweepPoint& p = pts[smallest];
    if (!p.e2 || p.states.size() < 2) {
      ok = false;
      d += " " + to_string(cfg.family) + ": fewer than two states";
      continue;
    }
    const double r0 = (p.states[0].E3 - *p.e2) / *p.e2;
    const double r1 = (p.states[1].E3 - *p.e2) / *p.e2;
    ok = ok && rel(r0, ref0) < 0.1 && rel(r1, ref1) < 0.1;
    d += printf_string(" %s at |E2| = %.0e: %.3f (%.1f%%), %.4f (%.1f%%);", to_string(cfg.family).c_str(),
                       std::abs(*p.e2), r0, 100.0 * rel(r0, ref0), r1, 100.0 * rel(r1, ref1));
  }
  return {ok, d};
}

Outcome borromean() {
  auto run = [](const char* name) {
    const Config c = Config::load(std::string(HALO2D_CONFIG_DIR) + "/" + name);
    return borromean_scan(sweep_from_config(c), c.list("scan.S1"), c.list("scan.S2"));
  };
  const auto barrier = run("borromean_barrier.cfg");
  const auto attractive = run("borromean_attractive.cfg");
  std::string where;
  for (const auto& c : barrier.cells) {
    if (c.label == CellLabel::borromean) where += printf_string(" (%g, %g): E3 = %.4f", c.s1, c.s2, *c.e3);
  }
  return {barrier.borromean_count() >= 1 && attractive.borromean_count() == 0,
          printf_string("repulsive_barrier %d of %zu cells;", barrier.borromean_count(), barrier.cells.size()) + where +
              printf_string("; pure_attractive %d of %zu", attractive.borromean_count(), attractive.cells.size())};
}

Outcome oracles() {
  double worst = 0.0;
  std::size_t states = 0;
  for (const auto& [s1, s2] : std::vector<std::pair<double, double>>{{-4.0, 0.0}, {-8.0, 10.0}, {20.0, -60.0}}) {
    const auto spec = PotentialSpec::gaussian_pair(1.0, s1, s2);
    const auto lib = bound_states(spec);
    const auto ref = oracle::two_body_energies(oracle::gaussian(1.0, s1, s2), detail::potential_minimum(spec), 40.0, 16000);
    if (lib.size() != ref.size() || lib.empty()) return {false, printf_string("state count differs for (%g, %g)", s1, s2)};
    for (std::size_t i = 0; i < lib.size(); ++i) worst = std::max(worst, rel(lib[i], ref[i]));
    states += lib.size();
  }
  std::mt19937_64 rng(12);
  double angle = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const auto g = oracle::geometry(oracle::random_positions(rng));
    angle = std::max(angle, std::abs(rotated_angle(g.alpha[0], g.beta, +1) - g.alpha[1]));
    angle = std::max(angle, std::abs(rotated_angle(g.alpha[0], g.beta, -1) - g.alpha[2]));
  }
  return {worst < 1e-5 && angle < 1e-12,
          printf_string("two-body: %zu states, max relative %.1e; rotated angle: max %.1e over 1000 configurations",
                        states, worst, angle)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"AC1", free_spectrum},   {"AC2", q11_law},     {"AC3", parabola},     {"AC4", effective_asymptote},
      {"AC5", universal_ratios}, {"AC6", halo_radii}, {"AC7", no_third},     {"AC8", efimov},
      {"AC9", weak_binding},    {"AC10", universality}, {"AC11", borromean}, {"AC12", oracles},
  };
  int failed = 0;
  for (const auto& [id, check] : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s %s %s [%.1f s]\n", id, o.pass ? "PASS" : "FAIL", o.detail.c_str(), secs);
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
