// Prints one PASS/FAIL line per acceptance criterion; exits nonzero if any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "solar/cli.hpp"
#include "solar/energy.hpp"
#include "solar/hypergeom.hpp"
#include "solar/oracle.hpp"
#include "solar/profiles.hpp"
#include "solar/radiative.hpp"

using namespace solar;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

ModelParams shape(double delta, int gamma) { return ModelParams{delta, gamma, 1, 4}; }

const std::vector<std::pair<double, int>> oracle_pairs = {
    {3.0, 1}, {3.0, 2}, {1.0, 1}, {2.0, 3}, {4.0, 5}, {1.0, 3}};

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(double v) { return cli::format_number(v); }

template <typename F>
double derivative(const F& f, double x) {
  const double h = 1e-3 * std::min(x, 1.0 - x);
  return detail::central_derivative(f, x, h);
}

Outcome hand_values() {
  const SolarCalibration c;
  const auto p = shape(3.0, 1);
  const double mean = 3.0 * c.mass_total / (4.0 * std::numbers::pi * std::pow(c.radius_total, 3));
  const double p_c = central_pressure(p, c);
  const double t_c = central_temperature(p, c);
  const double errs[] = {
      rel(central_density(p, c), 2.0 * mean),
      rel(mass(p, c, 0.5), 0.234375 * c.mass_total),
      rel(p_c, 63.0 / (80.0 * std::numbers::pi) * c.pressure_unit()),
      rel(pressure(p, c, 0.5) / p_c, 143.0 / 256.0),
      rel(temperature(p, c, 0.5) / t_c, 143.0 / 224.0),
      rel(t_c, 0.525 * c.temperature_unit()),
  };
  const double worst = *std::max_element(std::begin(errs), std::end(errs));
  return {worst < 1e-12, "max rel error " + fmt(worst)};
}

Outcome boundaries() {
  const SolarCalibration c;
  int bad = 0;
  double worst = 0.0;
  for (double d : {0.5, 1.0, 2.0, 3.0, 4.0}) {
    for (int g : {1, 2, 3, 5, 10}) {
      const auto p = shape(d, g);
      const auto e = energy_rate_polynomial(p, EnergyLaw::from(p, 1.0), c);
      if (mass(p, c, 0.0) != 0.0 || luminosity(e, c, 0.0) != 0.0 || density(p, c, 1.0) != 0.0 ||
          pressure(p, c, 1.0) != 0.0 || temperature(p, c, 1.0) != 0.0) {
        ++bad;
      }
      worst = std::max(worst, rel(mass(p, c, 1.0), c.mass_total));
    }
  }
  return {bad == 0 && worst < 1e-12,
          std::to_string(bad) + " exact-zero violations, M(1) rel error " + fmt(worst)};
}

Outcome oracle() {
  const SolarCalibration c;
  const auto start = std::chrono::steady_clock::now();
  double worst = 0.0;
  bool all = true;
  for (const auto& [d, g] : oracle_pairs) {
    const auto p = shape(d, g);
    const auto law = EnergyLaw::from(p, solve_eps0(p, c));
    const auto e = energy_rate_polynomial(p, law, c);
    const auto opacity = OpacityLaw::kramers(solve_kappa0(p, e, c));
    const auto r = verify_model(p, law, c, opacity, uniform_grid(50));
    worst = std::max({worst, r.mass_error, r.pressure_error, r.luminosity_error});
    all = all && r.pass;
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {all && worst < 1e-8 && seconds < 5.0,
          "max deviation " + fmt(worst) + " in " + fmt(std::round(seconds * 1000) / 1000) + " s"};
}

Outcome gauss_identity() {
  std::mt19937 rng(20240601);
  std::uniform_int_distribution<int> g_dist(1, 12);
  std::uniform_real_distribution<double> b_dist(0.1, 10.0);
  double worst = 0.0;
  for (int trial = 0; trial < 500; ++trial) {
    const int g = g_dist(rng);
    const double b = b_dist(rng);
    double product = 1.0;
    for (int i = 0; i < g; ++i) product *= (i + 1) / (b + 1.0 + i);
    const double gamma_ratio =
        std::tgamma(b + 1.0) * std::tgamma(g + 1.0) / std::tgamma(b + 1.0 + g);
    const double series = gauss2f1_terminating(g, b, b + 1.0, 1.0);
    worst = std::max({worst, rel(series, product), rel(series, gamma_ratio)});
  }
  return {worst < 1e-12, "500 cases, max rel error " + fmt(worst)};
}

Outcome residuals() {
  const SolarCalibration c;
  const double r_sun = c.radius_total;
  const double G = c.constants.G;
  double worst_p = 0.0;
  double worst_m = 0.0;
  double worst_l = 0.0;
  for (const auto& [d, g] : oracle_pairs) {
    const auto p = shape(d, g);
    const auto e = energy_rate_polynomial(p, EnergyLaw::from(p, solve_eps0(p, c)), c);
    const double p_scale = central_pressure(p, c);
    auto pres = [&](double x) { return pressure(p, c, x); };
    auto mass_at = [&](double x) { return mass(p, c, x); };
    auto lum = [&](double x) { return luminosity(e, c, x); };
    for (int i = 1; i < 199; ++i) {
      const double x = i / 199.0;
      const double r = x * r_sun;
      const double shell = 4.0 * std::numbers::pi * r * r * density(p, c, x) * r_sun;
      worst_p = std::max(worst_p, std::abs(derivative(pres, x) + G * mass(p, c, x) *
                                                                     density(p, c, x) / (r * r) *
                                                                     r_sun) /
                                      p_scale);
      worst_m = std::max(worst_m, std::abs(derivative(mass_at, x) - shell) / c.mass_total);
      worst_l = std::max(worst_l,
                         std::abs(derivative(lum, x) - shell * e.rate(x)) / c.luminosity_target);
    }
  }
  const double worst = std::max({worst_p, worst_m, worst_l});
  return {worst < 1e-6, "hydrostatic " + fmt(worst_p) + ", mass " + fmt(worst_m) + ", energy " +
                            fmt(worst_l)};
}

Outcome scaling() {
  const SolarCalibration c;
  double worst = 0.0;
  for (const auto& [d, g] : oracle_pairs) {
    const auto p = shape(d, g);
    const auto k = scaling_exponents(p, c, OpacityLaw::kramers(1.0));
    const auto flat = scaling_exponents(p, c, OpacityLaw::constant(1.0));
    worst = std::max({worst, std::abs(k.mass_exponent - 5.5), std::abs(k.radius_exponent + 0.5),
                      std::abs(flat.mass_exponent - 3.0)});
  }
  return {worst < 1e-9, "max exponent error " + fmt(worst)};
}

Outcome convergence() {
  const SolarCalibration c;
  const auto p = shape(3.0, 1);
  const auto law = EnergyLaw::from(p, 1.0);
  auto error_at = [&](int order) {
    const auto e = energy_rate_polynomial(p, law, c, order);
    double worst = 0.0;
    for (int i = 0; i <= 200; ++i) {
      const double x = 0.5 * i / 200.0;
      worst = std::max(worst, std::abs(e.rate(x) - energy_rate_pointwise(p, law, c, x)) /
                                  e.eps_central);
    }
    return worst;
  };
  const int base = p.gamma * (p.m_exp - p.n_exp);
  double prev = error_at(base);
  const double first = prev;
  bool monotone = true;
  for (int order = base + 1; order <= base + 10; ++order) {
    const double err = error_at(order);
    monotone = monotone && err < prev;
    prev = err;
  }
  return {monotone, "order " + std::to_string(base) + ": " + fmt(first) + ", order " +
                        std::to_string(base + 10) + ": " + fmt(prev)};
}

Outcome radiation_pressure() {
  const SolarCalibration c;
  const double ratio = radiation_pressure_ratio(ModelParams{}, c, 0.0);
  return {ratio < 1e-3, "P_r/P_g at centre " + fmt(ratio) + " (threshold 1e-3)"};
}

std::string capture(std::initializer_list<const char*> args, int& code) {
  std::vector<const char*> argv{"solar_model"};
  argv.insert(argv.end(), args.begin(), args.end());
  std::ostringstream out;
  std::ostringstream err;
  code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return out.str();
}

Outcome determinism() {
  int a_code = 0;
  int b_code = 0;
  const std::string a = capture({"profile"}, a_code);
  const std::string b = capture({"profile"}, b_code);
  std::ifstream f(std::string(SOLAR_GOLDEN_DIR) + "/profile_default.csv", std::ios::binary);
  std::ostringstream golden;
  golden << f.rdbuf();
  const bool same = a_code == 0 && b_code == 0 && a == b && !a.empty();
  const bool matches = f.good() && a == golden.str();
  return {same && matches, std::string(same ? "runs identical" : "runs differ") + ", " +
                               (matches ? "golden matches" : "golden differs or missing")};
}

Outcome matching() {
  const SolarCalibration c;
  const ModelParams p;
  const auto e = energy_rate_polynomial(p, EnergyLaw::from(p, solve_eps0(p, c)), c);
  const auto opacity = OpacityLaw::kramers(solve_kappa0(p, e, c));
  const MatchResult r = matching_radius(p, e, c, opacity);
  const double dx = std::abs(r.x_star - 0.3);
  return {dx < 1e-6 && r.residual < 1e-8,
          "x* = " + fmt(r.x_star) + ", residual " + fmt(r.residual) + " L_sun"};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"hand-derived values for delta=3 gamma=1", hand_values},
      {"boundary conditions over 25 shapes", boundaries},
      {"closed forms agree with ODE oracle", oracle},
      {"Gauss identity at unit argument", gauss_identity},
      {"structure equation residuals", residuals},
      {"mass and radius scaling exponents", scaling},
      {"energy expansion converges with truncation", convergence},
      {"radiation pressure negligible at centre", radiation_pressure},
      {"profile output deterministic and matches golden", determinism},
      {"matching radius round trip", matching},
  };
  int failures = 0;
  int index = 0;
  for (const auto& [name, check] : criteria) {
    ++index;
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& ex) {
      o = {false, std::string("exception: ") + ex.what()};
    }
    failures += o.pass ? 0 : 1;
    std::printf("%s %d %s: %s\n", o.pass ? "PASS" : "FAIL", index, name, o.detail.c_str());
  }
  std::fflush(stdout);
  return failures == 0 ? 0 : 1;
}
