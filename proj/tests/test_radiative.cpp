#include <gtest/gtest.h>

#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "solar/oracle.hpp"
#include "solar/radiative.hpp"

using namespace solar;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

const std::vector<std::pair<double, int>> pairs = {
    {3.0, 1}, {3.0, 2}, {2.0, 3}, {4.0, 5}, {1.0, 1}, {1.0, 3}, {0.5, 10}};

struct DefaultModel {
  SolarCalibration c;
  ModelParams p;
  EnergyLaw law;
  EnergyExpansion e;
  OpacityLaw opacity;

  explicit DefaultModel(ModelParams shape = {})
      : p(shape),
        law(EnergyLaw::from(p, solve_eps0(p, c))),
        e(energy_rate_polynomial(p, law, c)),
        opacity(OpacityLaw::kramers(solve_kappa0(p, e, c))) {}
};

}  // namespace

TEST(KramersOpacity, Examples) {
  const auto k = OpacityLaw::kramers(1.0);
  EXPECT_EQ(kramers_opacity(k, 1.0, 1.0), 1.0);
  EXPECT_EQ(kramers_opacity(k, 2.0, 4.0), 0.015625);
  EXPECT_EQ(kramers_opacity(k, 6.0, 3.0), 2.0 * kramers_opacity(k, 3.0, 3.0));
  EXPECT_THROW(kramers_opacity(k, 1.0, 0.0), std::domain_error);
  EXPECT_THROW(kramers_opacity(k, -1.0, 1.0), std::domain_error);
  EXPECT_THROW(OpacityLaw::kramers(0.0).validate(), std::invalid_argument);
}

TEST(TemperatureGradient, MatchesFiniteDifference) {
  const SolarCalibration c;
  for (const auto& [d, g] : pairs) {
    const ModelParams p{d, g, 1, 4};
    auto t = [&](double x) { return temperature(p, c, x); };
    for (int i = 0; i <= 90; ++i) {
      const double x = 0.05 + 0.01 * i;
      const double h = 1e-3 * std::min(x, 1.0 - x);
      const double fd = detail::central_derivative(t, x, h) / c.radius_total;
      const double analytic = temperature_gradient(p, c, x);
      EXPECT_LT(std::abs(fd - analytic), 1e-6 * std::abs(analytic)) << d << " " << g << " " << x;
    }
  }
}

TEST(TemperatureGradient, SignAndCentralLimit) {
  for (const auto& [d, g] : pairs) {
    const ModelParams p{d, g, 1, 4};
    if (d > 1.0) {
      for (int i = 1; i < 100; ++i) {
        EXPECT_LT(scaled::temperature_gradient(p, i / 100.0), 0.0) << d << " " << g;
      }
      EXPECT_LT(std::abs(scaled::temperature_gradient(p, 1e-6)), 1e-5);
    } else {
      // rho is not flat at the centre; T rises off the centre
      EXPECT_GT(scaled::temperature_gradient(p, 1e-6), 0.0);
    }
  }
  const ModelParams p;
  EXPECT_THROW(scaled::temperature_gradient(p, 0.0), std::domain_error);
  EXPECT_THROW(scaled::temperature_gradient(p, 1.0), std::domain_error);
}

TEST(RadiativeLuminosity, PositiveAndInverseInKappa) {
  const DefaultModel m;
  for (int i = 0; i <= 90; ++i) {
    const double x = 0.05 + 0.01 * i;
    EXPECT_GT(radiative_luminosity(m.p, m.c, m.opacity, x), 0.0) << x;
  }
  OpacityLaw doubled = m.opacity;
  doubled.kappa0 *= 2.0;
  EXPECT_LT(rel(radiative_luminosity(m.p, m.c, doubled, 0.4),
                0.5 * radiative_luminosity(m.p, m.c, m.opacity, 0.4)),
            1e-15);
  EXPECT_THROW(radiative_luminosity(m.p, m.c, m.opacity, 1.0), std::domain_error);
  EXPECT_THROW(radiative_luminosity(m.p, m.c, m.opacity, 0.0), std::domain_error);
}

TEST(RadiativeLuminosity, MassDoublingScalesBy2To11Over2) {
  const DefaultModel m;
  SolarCalibration heavy = m.c;
  heavy.mass_total *= 2.0;
  for (double x : {0.1, 0.3, 0.7}) {
    const double ratio = radiative_luminosity(m.p, heavy, m.opacity, x) /
                         radiative_luminosity(m.p, m.c, m.opacity, x);
    EXPECT_LT(rel(ratio, std::pow(2.0, 5.5)), 1e-10) << x;
  }
}

TEST(ScalingExponents, KramersAndConstantOpacity) {
  for (const auto& [d, g] : pairs) {
    const ModelParams p{d, g, 1, 4};
    const SolarCalibration c;
    const auto kramers = scaling_exponents(p, c, OpacityLaw::kramers(1.0));
    EXPECT_NEAR(kramers.mass_exponent, 5.5, 1e-9) << d << " " << g;
    EXPECT_NEAR(kramers.radius_exponent, -0.5, 1e-9) << d << " " << g;
    const auto flat = scaling_exponents(p, c, OpacityLaw::constant(1.0));
    EXPECT_NEAR(flat.mass_exponent, 3.0, 1e-9) << d << " " << g;
    // dropping only the T dependence leaves kappa ~ rho ~ M: exponent 2
    const auto rho_only = scaling_exponents(p, c, OpacityLaw{1.0, 1.0, 0.0});
    EXPECT_NEAR(rho_only.mass_exponent, 2.0, 1e-9) << d << " " << g;
  }
}

TEST(MatchingRadius, RoundTripAtPointThree) {
  for (const auto& [d, g] : pairs) {
    const DefaultModel m(ModelParams{d, g, 1, 4});
    const MatchResult r = matching_radius(m.p, m.e, m.c, m.opacity);
    EXPECT_NEAR(r.x_star, 0.3, 1e-6) << d << " " << g;
    EXPECT_LT(r.residual, 1e-8) << d << " " << g;
    EXPECT_GT(r.iterations, 0);
  }
}

TEST(MatchingRadius, LawOverloadAgrees) {
  const DefaultModel m;
  const MatchResult a = matching_radius(m.p, m.e, m.c, m.opacity);
  const MatchResult b = matching_radius(m.p, m.law, m.c, m.opacity);
  EXPECT_EQ(a.x_star, b.x_star);
}

TEST(MatchingRadius, NoBracketWhenKappaFarOff) {
  const DefaultModel m;
  for (double factor : {1e10, 1e-10}) {
    OpacityLaw off = m.opacity;
    off.kappa0 *= factor;
    EXPECT_THROW(matching_radius(m.p, m.e, m.c, off), NoBracketError) << factor;
  }
}

TEST(MatchingRadius, LargerKappaLowersRadiativeLuminosity) {
  const DefaultModel m;
  OpacityLaw more = m.opacity;
  more.kappa0 *= 1.5;
  for (double x : {0.1, 0.5, 0.9}) {
    EXPECT_LT(radiative_luminosity(m.p, m.c, more, x), radiative_luminosity(m.p, m.c, m.opacity, x));
  }
}

TEST(AttachRadiative, EndpointsAndInterior) {
  const DefaultModel m;
  auto prof = build_profile(m.p, m.c, 21);
  attach_energy(prof, m.e, m.law, m.c);
  attach_radiative(prof, m.p, m.c, m.opacity);
  EXPECT_EQ(prof.luminosity_radiative[0], 0.0);
  EXPECT_TRUE(std::isnan(prof.kappa[20]));
  EXPECT_TRUE(std::isnan(prof.luminosity_radiative[20]));
  EXPECT_EQ(prof.kappa[5], kramers_opacity(m.opacity, prof.rho[5], prof.temperature[5]));
  EXPECT_EQ(prof.luminosity_radiative[5], radiative_luminosity(m.p, m.c, m.opacity, prof.x[5]));
}
