#pragma once

// Radial structure of the density family rho = rho_c (1 - x^delta)^gamma:
// mass, hydrostatic pressure and perfect-gas temperature in closed form.
//
// The `scaled` namespace works in units of M_sun, the mean density
// 3M/(4 pi R^3), G M^2 / R^4 and mu G M / (k_B N_A R). The unscaled functions
// multiply by the calibration's units on the way out.
//
// The mass series and the pressure sum alternate in sign. At gamma = 10 they
// cancel by ~1e5, so both are summed in wide_real and rounded once at the end.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "solar/calibration.hpp"
#include "solar/hypergeom.hpp"

namespace solar {

/// Shape of the density family plus the exponents of the energy law.
struct ModelParams {
  double delta = 3.0;
  int gamma = 1;
  int n_exp = 1;
  int m_exp = 4;

  void validate() const {
    if (!(delta > 0.0) || !std::isfinite(delta)) {
      throw std::invalid_argument("delta must be finite and > 0");
    }
    if (gamma < 1 || gamma > max_series_gamma) {
      throw std::invalid_argument("gamma must be an integer in [1, 64]");
    }
    if (n_exp < 0 || m_exp < 1) {
      throw std::invalid_argument("energy exponents need n >= 0 and m >= 1");
    }
  }
};

/// x87 extended precision on x86-64 (64-bit mantissa). Where long double is
/// plain double the sums lose the margin but keep the same code path.
using wide_real = long double;

/// Near-surface width below which T is taken from its linear expansion.
inline constexpr double surface_epsilon = 1e-6;

/// Width of the u-window next to the surface where the complementary
/// (beta_tail) route is used instead of the terminating series.
inline constexpr double surface_window = 0.5;

namespace scaled {

/// u = x^delta and w = 1 - u, with w accurate to full relative precision.
struct RadialVariable {
  double u;
  double w;
};

inline RadialVariable radial_variable(double x, double delta) {
  if (x <= 0.0) {
    return {0.0, 1.0};
  }
  if (x >= 1.0) {
    return {1.0, 0.0};
  }
  const double log_u = delta * std::log(x);
  const double u = std::exp(log_u);
  const double w = u < 0.5 ? 1.0 - u : -std::expm1(log_u);
  return {u, w};
}

/// rho_c / mean density = (1/gamma!) prod_{i=1..gamma} (3/delta + i).
inline double central_density(const ModelParams& p) {
  const double b = 3.0 / p.delta;
  return 1.0 / gauss2f1_unit(p.gamma, b, b + 1.0);
}

inline double density(const ModelParams& p, double x) {
  const auto [u, w] = radial_variable(x, p.delta);
  return central_density(p) * std::pow(w, p.gamma);
}

template <typename Real>
Real central_density_as(const ModelParams& p) {
  const Real b = Real(3) / Real(p.delta);
  return Real(1) / gauss2f1_unit(p.gamma, b, b + Real(1));
}

/// M(x) / M_sun = C x^3 2F1(-gamma, 3/delta; 3/delta+1; x^delta).
inline double mass(const ModelParams& p, double x) {
  if (x <= 0.0) {
    return 0.0;
  }
  if (x >= 1.0) {
    return 1.0;
  }
  const auto [u, w] = radial_variable(x, p.delta);
  const double b = 3.0 / p.delta;
  if (w <= surface_window) {
    // 1 - C b * (integral of s^(b-1)(1-s)^gamma over [u, 1])
    return 1.0 - central_density(p) * b * beta_tail(b, p.gamma, w);
  }
  const wide_real xw(x);
  const wide_real bw = wide_real(3) / wide_real(p.delta);
  const wide_real uw = std::pow(xw, wide_real(p.delta));
  return static_cast<double>(central_density_as<wide_real>(p) * xw * xw * xw *
                             gauss2f1_terminating(p.gamma, bw, bw + wide_real(1), uw));
}

/// Weight of the m-th outer term of the pressure sum,
/// (-gamma)_m / (m! (3/delta + m)(2/delta + m)).
template <typename Real>
Real pressure_weight_as(const ModelParams& p, int m) {
  const Real d(p.delta);
  return binomial_series_coeff(Real(-p.gamma), m) / ((Real(3) / d + Real(m)) * (Real(2) / d + Real(m)));
}

inline double pressure_weight(const ModelParams& p, int m) {
  return pressure_weight_as<double>(p, m);
}

/// Bracket of the m-th outer term:
/// gamma!/(2/delta+m+1)_gamma - x^(m delta+2) 2F1(-gamma, 2/delta+m; 2/delta+m+1; x^delta).
template <typename Real>
Real pressure_bracket_as(const ModelParams& p, int m, double x) {
  using std::exp;
  using std::expm1;
  using std::log;
  using std::pow;
  const Real d(p.delta);
  const Real b = Real(2) / d + Real(m);
  const Real whole = gauss2f1_unit(p.gamma, b, b + Real(1));
  if (x <= 0.0) {
    return whole;
  }
  if (x >= 1.0) {
    return Real(0);
  }
  const Real xr(x);
  const Real log_u = d * log(xr);
  const Real u = exp(log_u);
  if (u >= Real(1) - Real(surface_window)) {
    return b * beta_tail(b, p.gamma, Real(-expm1(log_u)));
  }
  return whole - pow(u, m) * xr * xr * gauss2f1_terminating(p.gamma, b, b + Real(1), u);
}

inline double pressure_bracket(const ModelParams& p, int m, double x) {
  return static_cast<double>(pressure_bracket_as<wide_real>(p, m, x));
}

template <typename Real>
Real pressure_sum_as(const ModelParams& p, double x) {
  Real s(0);
  for (int m = 0; m <= p.gamma; ++m) {
    s += pressure_weight_as<Real>(p, m) * pressure_bracket_as<Real>(p, m, x);
  }
  return s;
}

/// The outer sum of the pressure formula, S(x). S(0) equals eta_gamma.
inline double pressure_sum(const ModelParams& p, double x) {
  return static_cast<double>(pressure_sum_as<wide_real>(p, x));
}

/// P(x) / (G M^2 / R^4) = (9/4pi) C^2 / delta^2 * S(x).
/// (-gamma)_m vanishes for m > gamma, so the outer sum stops there.
inline double pressure(const ModelParams& p, double x) {
  if (x >= 1.0) {
    return 0.0;
  }
  const wide_real c = central_density_as<wide_real>(p);
  const wide_real d(p.delta);
  const wide_real pi = std::numbers::pi_v<wide_real>;
  return static_cast<double>(wide_real(9) / (wide_real(4) * pi) * c * c / (d * d) *
                             pressure_sum_as<wide_real>(p, x));
}

inline double central_pressure(const ModelParams& p) { return pressure(p, 0.0); }

/// T(x) / (mu G M / (k_B N_A R)) = (4pi/3) P / rho.
///
/// P/rho is 0/0 at the surface; within surface_epsilon of x = 1 the leading
/// term (1 - x)/(gamma + 1) of its expansion is returned instead.
inline double temperature(const ModelParams& p, double x) {
  if (x >= 1.0) {
    return 0.0;
  }
  if (x <= 1.0 - surface_epsilon) {
    const double rho = density(p, x);
    const double pres = pressure(p, x);
    if (rho > 0.0 && pres > 0.0) {
      return 4.0 * std::numbers::pi / 3.0 * pres / rho;
    }
  }
  return std::max(0.0, (1.0 - x) / (p.gamma + 1));
}

inline double central_temperature(const ModelParams& p) { return temperature(p, 0.0); }

}  // namespace scaled

inline double central_density(const ModelParams& p, const SolarCalibration& c) {
  return c.mean_density() * scaled::central_density(p);
}

inline double density(const ModelParams& p, const SolarCalibration& c, double x) {
  return c.mean_density() * scaled::density(p, x);
}

inline double mass(const ModelParams& p, const SolarCalibration& c, double x) {
  return c.mass_total * scaled::mass(p, x);
}

inline double pressure(const ModelParams& p, const SolarCalibration& c, double x) {
  return c.pressure_unit() * scaled::pressure(p, x);
}

inline double central_pressure(const ModelParams& p, const SolarCalibration& c) {
  return pressure(p, c, 0.0);
}

inline double temperature(const ModelParams& p, const SolarCalibration& c, double x) {
  return c.temperature_unit() * scaled::temperature(p, x);
}

/// mu P_c / (k_B N_A rho_c); identical to temperature(p, c, 0).
inline double central_temperature(const ModelParams& p, const SolarCalibration& c) {
  return temperature(p, c, 0.0);
}

/// P_r / P_g with P_r = a T^4 / 3. Diagnostic; 0 at the surface.
inline double radiation_pressure_ratio(const ModelParams& p, const SolarCalibration& c, double x) {
  if (x >= 1.0) {
    return 0.0;
  }
  const double t = temperature(p, c, x);
  const double pg = pressure(p, c, x);
  if (pg <= 0.0) {
    return 0.0;
  }
  return c.constants.a_rad * t * t * t * t / (3.0 * pg);
}

/// Radial table of the model on a uniform grid in x = r/R.
///
/// build_profile fills the structural columns; epsilon and luminosity are
/// filled by attach_energy (energy.hpp), kappa and luminosity_radiative by
/// attach_radiative (radiative.hpp).
struct StellarProfile {
  std::vector<double> x;
  std::vector<double> rho;          // kg m^-3
  std::vector<double> mass;         // kg
  std::vector<double> pressure;     // Pa
  std::vector<double> temperature;  // K
  std::vector<double> epsilon;      // W kg^-1
  std::vector<double> luminosity;   // W
  std::vector<double> kappa;        // m^2 kg^-1
  std::vector<double> luminosity_radiative;  // W

  std::size_t size() const { return x.size(); }
};

inline std::vector<double> uniform_grid(std::size_t points) {
  if (points < 2) {
    throw std::invalid_argument("grid needs at least 2 points");
  }
  std::vector<double> grid(points);
  const double last = static_cast<double>(points - 1);
  for (std::size_t i = 0; i < points; ++i) {
    grid[i] = static_cast<double>(i) / last;
  }
  return grid;
}

inline StellarProfile build_profile(const ModelParams& p, const SolarCalibration& c,
                                    std::size_t grid_size) {
  p.validate();
  StellarProfile out;
  out.x = uniform_grid(grid_size);
  const std::size_t n = out.x.size();
  out.rho.resize(n);
  out.mass.resize(n);
  out.pressure.resize(n);
  out.temperature.resize(n);
  out.epsilon.assign(n, 0.0);
  out.luminosity.assign(n, 0.0);
  out.kappa.assign(n, 0.0);
  out.luminosity_radiative.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = out.x[i];
    out.rho[i] = density(p, c, x);
    out.mass[i] = mass(p, c, x);
    out.pressure[i] = pressure(p, c, x);
    out.temperature[i] = temperature(p, c, x);
  }
  return out;
}

}  // namespace solar
