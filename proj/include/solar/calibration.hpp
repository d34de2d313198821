#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace solar {

/// SI constants. N_A is per mole; molar_mass_unit converts it to "per kg of
/// atomic mass units", so k_B N_A / molar_mass_unit is the gas constant per kg.
struct PhysicalConstants {
  double G = 6.67430e-11;       // m^3 kg^-1 s^-2
  double k_B = 1.380649e-23;    // J K^-1
  double N_A = 6.02214076e23;   // mol^-1
  double a_rad = 7.565733e-16;  // J m^-3 K^-4
  double c_light = 2.99792458e8;  // m s^-1
  double molar_mass_unit = 1.0e-3;  // kg mol^-1

  double gas_constant_per_kg() const { return k_B * N_A / molar_mass_unit; }

  void validate() const {
    for (double v : {G, k_B, N_A, a_rad, c_light, molar_mass_unit}) {
      if (!(v > 0.0) || !std::isfinite(v)) {
        throw std::invalid_argument("physical constants must be finite and positive");
      }
    }
  }
};

/// mu = 1 / (2X + 3Y/4 + Z/2) for a completely ionised mixture.
inline double mean_molecular_weight(double X, double Y, double Z) {
  for (double f : {X, Y, Z}) {
    if (!(f >= 0.0 && f <= 1.0)) {
      throw std::invalid_argument("mass fractions must lie in [0, 1]");
    }
  }
  if (std::abs(X + Y + Z - 1.0) > 1e-12) {
    throw std::invalid_argument("mass fractions must sum to 1");
  }
  return 1.0 / (2.0 * X + 0.75 * Y + 0.5 * Z);
}

/// Global solar data the closed forms are scaled by.
struct SolarCalibration {
  double mass_total = 1.98892e30;         // kg
  double radius_total = 6.9598e8;         // m
  double luminosity_target = 3.8418e26;   // W
  double X = 0.7;
  double Y = 0.28;
  double Z = 0.02;
  double mu = mean_molecular_weight(0.7, 0.28, 0.02);
  PhysicalConstants constants{};

  /// Builds a calibration with mu derived from the composition.
  static SolarCalibration make(double mass, double radius, double luminosity, double X, double Y,
                               double Z, PhysicalConstants constants = {}) {
    SolarCalibration c;
    c.mass_total = mass;
    c.radius_total = radius;
    c.luminosity_target = luminosity;
    c.X = X;
    c.Y = Y;
    c.Z = Z;
    c.mu = mean_molecular_weight(X, Y, Z);
    c.constants = constants;
    c.validate();
    return c;
  }

  void validate() const {
    if (!(mass_total > 0.0) || !(radius_total > 0.0) || !(luminosity_target > 0.0)) {
      throw std::invalid_argument("mass, radius and luminosity must be positive");
    }
    const double expected = mean_molecular_weight(X, Y, Z);
    if (std::abs(mu - expected) > 1e-12 * expected) {
      throw std::invalid_argument("mu does not match the composition");
    }
    constants.validate();
  }

  /// 3M / (4 pi R^3)
  double mean_density() const {
    return 3.0 * mass_total / (4.0 * std::numbers::pi * radius_total * radius_total * radius_total);
  }
  /// G M^2 / R^4
  double pressure_unit() const {
    const double r2 = radius_total * radius_total;
    return constants.G * mass_total * mass_total / (r2 * r2);
  }
  /// mu G M / (k_B N_A R), with N_A taken per kg
  double temperature_unit() const {
    return mu * constants.G * mass_total / (constants.gas_constant_per_kg() * radius_total);
  }
};

}  // namespace solar
