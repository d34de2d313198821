#pragma once

// Radiative transport check: the luminosity the analytic temperature gradient
// could carry by radiation, L_rad = -(16 pi a c / 3 kappa rho) r^2 T^3 dT/dr,
// compared with the nuclear luminosity. The assumed density lets the two agree
// at a single radius only.

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <utility>

#include "solar/calibration.hpp"
#include "solar/energy.hpp"
#include "solar/profiles.hpp"

namespace solar {

/// kappa = kappa0 rho^density_exponent T^temperature_exponent.
struct OpacityLaw {
  double kappa0 = 1.0;
  double density_exponent = 1.0;
  double temperature_exponent = -3.5;

  /// Kramers' law, kappa0 rho T^-7/2.
  static OpacityLaw kramers(double kappa0) { return {kappa0, 1.0, -3.5}; }
  /// Opacity independent of rho and T.
  static OpacityLaw constant(double kappa0) { return {kappa0, 0.0, 0.0}; }

  void validate() const {
    if (!(kappa0 > 0.0) || !std::isfinite(kappa0)) {
      throw std::invalid_argument("kappa0 must be finite and > 0");
    }
  }
};

inline double kramers_opacity(const OpacityLaw& law, double rho, double temperature) {
  if (!(temperature > 0.0)) {
    throw std::domain_error("opacity needs T > 0");
  }
  if (rho < 0.0) {
    throw std::domain_error("opacity needs rho >= 0");
  }
  return law.kappa0 * std::pow(rho, law.density_exponent) *
         std::pow(temperature, law.temperature_exponent);
}

namespace scaled {

/// dT/dx in temperature units:
///   -m(x)/x^2 + T(x) gamma delta x^(delta-1) / (1 - x^delta),
/// the quotient rule on (4pi/3) P/rho with dP/dx from hydrostatic equilibrium.
inline double temperature_gradient(const ModelParams& p, double x) {
  if (!(x > 0.0 && x < 1.0)) {
    throw std::domain_error("temperature_gradient needs 0 < x < 1");
  }
  const auto [u, w] = radial_variable(x, p.delta);
  return -mass(p, x) / (x * x) + temperature(p, x) * p.gamma * p.delta * (u / x) / w;
}

}  // namespace scaled

/// dT/dr in K m^-1.
inline double temperature_gradient(const ModelParams& p, const SolarCalibration& c, double x) {
  return c.temperature_unit() / c.radius_total * scaled::temperature_gradient(p, x);
}

/// L_rad(x) in W.
inline double radiative_luminosity(const ModelParams& p, const SolarCalibration& c,
                                   const OpacityLaw& opacity, double x) {
  if (!(x > 0.0 && x < 1.0)) {
    throw std::domain_error("radiative_luminosity needs 0 < x < 1");
  }
  const double rho = density(p, c, x);
  const double t = temperature(p, c, x);
  const double kappa = kramers_opacity(opacity, rho, t);
  const double r = x * c.radius_total;
  const double a = c.constants.a_rad;
  const double light = c.constants.c_light;
  return -(16.0 * std::numbers::pi * a * light / (3.0 * kappa * rho)) * r * r * t * t * t *
         temperature_gradient(p, c, x);
}

struct ScalingExponents {
  double mass_exponent;
  double radius_exponent;
};

/// d ln L_rad / d ln M at fixed (x, R) and d ln L_rad / d ln R at fixed (x, M),
/// as two-point log ratios with a factor of 2 change.
inline ScalingExponents scaling_exponents(const ModelParams& p, const SolarCalibration& c,
                                          const OpacityLaw& opacity, double x = 0.3) {
  const double base = radiative_luminosity(p, c, opacity, x);
  SolarCalibration heavy = c;
  heavy.mass_total *= 2.0;
  SolarCalibration wide = c;
  wide.radius_total *= 2.0;
  return {std::log(radiative_luminosity(p, heavy, opacity, x) / base) / std::numbers::ln2,
          std::log(radiative_luminosity(p, wide, opacity, x) / base) / std::numbers::ln2};
}

/// Raised when L_rad - L has no sign change on the search interval.
class NoBracketError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct MatchResult {
  double x_star;
  double luminosity;            // W, nuclear
  double luminosity_radiative;  // W
  double residual;              // |L_rad - L| / L_target
  int iterations;
};

inline constexpr double match_lo = 0.05;
inline constexpr double match_hi = 0.95;
inline constexpr int match_scan_points = 200;

/// Root of L_rad(x) - L(x) on [0.05, 0.95]: the first sign change of a
/// 200-point scan, refined by bisection to |dx| < 1e-10.
inline MatchResult matching_radius(const ModelParams& p, const EnergyExpansion& e,
                                   const SolarCalibration& c, const OpacityLaw& opacity) {
  auto diff = [&](double x) { return radiative_luminosity(p, c, opacity, x) - luminosity(e, c, x); };
  auto finish = [&](double x, int iterations) {
    const double l = luminosity(e, c, x);
    const double lr = radiative_luminosity(p, c, opacity, x);
    return MatchResult{x, l, lr, std::abs(lr - l) / c.luminosity_target, iterations};
  };

  double prev_x = match_lo;
  double prev_f = diff(prev_x);
  if (prev_f == 0.0) {
    return finish(prev_x, 0);
  }
  for (int i = 1; i < match_scan_points; ++i) {
    const double x = match_lo + (match_hi - match_lo) * i / (match_scan_points - 1);
    const double f = diff(x);
    if (f == 0.0) {
      return finish(x, 0);
    }
    if ((f > 0.0) != (prev_f > 0.0)) {
      double lo = prev_x;
      double hi = x;
      double f_lo = prev_f;
      int iterations = 0;
      while (hi - lo >= 1e-10) {
        const double mid = 0.5 * (lo + hi);
        const double f_mid = diff(mid);
        ++iterations;
        if (f_mid == 0.0) {
          return finish(mid, iterations);
        }
        if ((f_mid > 0.0) == (f_lo > 0.0)) {
          lo = mid;
          f_lo = f_mid;
        } else {
          hi = mid;
        }
      }
      return finish(0.5 * (lo + hi), iterations);
    }
    prev_x = x;
    prev_f = f;
  }
  throw NoBracketError(
      "no bracket: radiative and nuclear luminosity do not cross on [0.05, 0.95]; "
      "the (params, eps0, kappa0) combination is inconsistent");
}

inline MatchResult matching_radius(const ModelParams& p, const EnergyLaw& law,
                                   const SolarCalibration& c, const OpacityLaw& opacity,
                                   std::optional<int> truncation_order = std::nullopt) {
  return matching_radius(p, energy_rate_polynomial(p, law, c, truncation_order), c, opacity);
}

/// kappa0 for which L_rad(anchor) = L(anchor), placing the matching point there.
inline double solve_kappa0(const ModelParams& p, const EnergyExpansion& e,
                           const SolarCalibration& c, double anchor = 0.3,
                           OpacityLaw shape = OpacityLaw::kramers(1.0)) {
  shape.kappa0 = 1.0;
  return radiative_luminosity(p, c, shape, anchor) / luminosity(e, c, anchor);
}

/// Fills kappa and luminosity_radiative. At x = 0 L_rad is 0; at x = 1
/// T = 0 and both columns are undefined (NaN).
inline void attach_radiative(StellarProfile& prof, const ModelParams& p, const SolarCalibration& c,
                             const OpacityLaw& opacity) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t i = 0; i < prof.size(); ++i) {
    const double x = prof.x[i];
    if (x >= 1.0) {
      prof.kappa[i] = nan;
      prof.luminosity_radiative[i] = nan;
    } else if (x <= 0.0) {
      prof.kappa[i] = kramers_opacity(opacity, prof.rho[i], prof.temperature[i]);
      prof.luminosity_radiative[i] = 0.0;
    } else {
      prof.kappa[i] = kramers_opacity(opacity, prof.rho[i], prof.temperature[i]);
      prof.luminosity_radiative[i] = radiative_luminosity(p, c, opacity, x);
    }
  }
}

}  // namespace solar
