#pragma once

// Nuclear energy generation eps = eps0 rho^n T^m and the luminosity it feeds.
//
// Writing T/T_c = (eta - x^2 A(u)) / (eta (1-u)^gamma), with A the degree-2gamma
// polynomial of energy_coefficients, gives
//   eps / eps_c = (1-u)^(-gamma(m-n)) * sum_q (-m)_q/q! (x^2 A(u) / eta)^q.
// The binomial series of the first factor is truncated at `truncation_order`;
// everything else is exact. Each resulting term c x^k integrates against
// x^2 (1-x^delta)^gamma to a terminating 2F1, which is the closed-form luminosity.
//
// A(u)^q has large alternating coefficients once gamma grows (the sum of
// |terms| exceeds the value by ~1e36 at delta = 0.5, gamma = 10), so the
// expansion and the luminosity sums are carried in extended_real.

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <vector>

#include "solar/calibration.hpp"
#include "solar/hypergeom.hpp"
#include "solar/profiles.hpp"

namespace solar {

using extended_real = boost::multiprecision::number<boost::multiprecision::cpp_bin_float<100>,
                                                    boost::multiprecision::et_off>;

/// eps = eps0 rho^n T^m, SI units throughout.
struct EnergyLaw {
  double eps0 = 1.0;
  int n_exp = 1;
  int m_exp = 4;

  static EnergyLaw from(const ModelParams& p, double eps0) { return {eps0, p.n_exp, p.m_exp}; }

  void validate() const {
    if (!(eps0 > 0.0) || !std::isfinite(eps0)) {
      throw std::invalid_argument("eps0 must be finite and > 0");
    }
    if (n_exp < 0 || m_exp < 1) {
      throw std::invalid_argument("energy exponents need n >= 0 and m >= 1");
    }
  }
};

/// sum_{nu=0..gamma} (-gamma)_nu/nu! * gamma! / ((2/d+nu)(3/d+nu)(2/d+nu+1)_gamma).
/// Normalises the central temperature: T_c = (4pi/3)(9/4pi) C / delta^2 * eta.
template <typename Real>
Real eta_gamma_as(const ModelParams& p) {
  const Real d(p.delta);
  Real sum(0);
  for (int nu = 0; nu <= p.gamma; ++nu) {
    const Real b = Real(2) / d + Real(nu);
    sum += binomial_series_coeff(Real(-p.gamma), nu) * gauss2f1_unit(p.gamma, b, b + Real(1)) /
           (b * (Real(3) / d + Real(nu)));
  }
  return sum;
}

inline double eta_gamma(const ModelParams& p) { return eta_gamma_as<double>(p); }

/// Coefficients a_0..a_{2 gamma} of
///   sum_{m1,m2} (-gamma)_m1 (-gamma)_m2 / (m1! m2!) / ((3/d+m1)(2/d+m1+m2)) u^(m1+m2),
/// the polynomial with x^2 A(x^delta) = eta - S(x) (see pressure_sum).
template <typename Real>
PolynomialU<Real> energy_coefficients_as(const ModelParams& p) {
  const Real d(p.delta);
  std::vector<Real> a(2 * static_cast<std::size_t>(p.gamma) + 1, Real(0));
  for (int m1 = 0; m1 <= p.gamma; ++m1) {
    const Real w1 = binomial_series_coeff(Real(-p.gamma), m1) / (Real(3) / d + Real(m1));
    for (int m2 = 0; m2 <= p.gamma; ++m2) {
      a[static_cast<std::size_t>(m1 + m2)] +=
          w1 * binomial_series_coeff(Real(-p.gamma), m2) / (Real(2) / d + Real(m1 + m2));
    }
  }
  return PolynomialU<Real>(std::move(a));
}

inline PolynomialU<double> energy_coefficients(const ModelParams& p) {
  return energy_coefficients_as<double>(p);
}

/// One term c x^exponent of eps / eps_c.
struct EnergyTerm {
  double coefficient;
  double exponent;
  int s;  // order in the (1-u)^(-gamma(m-n)) series
  int q;  // power of the temperature bracket
  int k;  // power of u inside A(u)^q
};

/// Truncated polynomial form of eps(x).
struct EnergyExpansion {
  ModelParams params;
  PolynomialU<double> a_coeffs;
  double eta = 0.0;
  int truncation_order = 0;
  /// eps0 rho_c^n T_c^m, W kg^-1
  double eps_central = 0.0;
  /// Unmerged terms, one per (s, q, k).
  std::vector<EnergyTerm> terms;
  /// eps / eps_c = sum_q x^(2q) by_power[q](u), merged and in extended precision.
  std::vector<PolynomialU<extended_real>> by_power;

  /// eps(x) in W kg^-1 from the truncated expansion.
  double rate(double x) const { return eps_central * static_cast<double>(scaled_rate(x)); }

  extended_real scaled_rate(double x) const {
    using boost::multiprecision::pow;
    const extended_real xe(x);
    const extended_real u = x <= 0.0 ? extended_real(0) : pow(xe, extended_real(params.delta));
    const extended_real x2 = xe * xe;
    extended_real acc(0);
    extended_real x2q(1);
    for (const auto& poly : by_power) {
      acc += x2q * poly(u);
      x2q *= x2;
    }
    return acc;
  }
};

inline int default_truncation(const ModelParams& p) { return p.gamma * (p.m_exp - p.n_exp); }

/// eps0 rho_c^n T_c^m
inline double central_energy_rate(const ModelParams& p, const EnergyLaw& law,
                                  const SolarCalibration& c) {
  return law.eps0 * std::pow(central_density(p, c), law.n_exp) *
         std::pow(central_temperature(p, c), law.m_exp);
}

/// Reference rate eps0 rho(x)^n T(x)^m from the exact profiles.
inline double energy_rate_pointwise(const ModelParams& p, const EnergyLaw& law,
                                    const SolarCalibration& c, double x) {
  return law.eps0 * std::pow(density(p, c, x), law.n_exp) *
         std::pow(temperature(p, c, x), law.m_exp);
}

inline EnergyExpansion energy_rate_polynomial(const ModelParams& p, const EnergyLaw& law,
                                              const SolarCalibration& c,
                                              std::optional<int> truncation_order = std::nullopt) {
  p.validate();
  law.validate();
  if (law.m_exp < law.n_exp) {
    throw std::invalid_argument("energy expansion needs m >= n");
  }
  const int order = truncation_order.value_or(p.gamma * (law.m_exp - law.n_exp));
  if (order < 0) {
    throw std::invalid_argument("truncation order must be nonnegative");
  }
  EnergyExpansion e;
  e.params = p;
  e.params.n_exp = law.n_exp;
  e.params.m_exp = law.m_exp;
  e.truncation_order = order;
  e.eps_central = central_energy_rate(p, law, c);

  const auto a = energy_coefficients_as<extended_real>(p);
  const auto eta = eta_gamma_as<extended_real>(p);
  e.a_coeffs = a.cast<double>();
  e.eta = static_cast<double>(eta);

  const extended_real neg_exponent(p.gamma * (law.m_exp - law.n_exp));
  std::vector<extended_real> series(static_cast<std::size_t>(order) + 1);
  for (int s = 0; s <= order; ++s) {
    series[static_cast<std::size_t>(s)] = binomial_series_coeff(neg_exponent, s);
  }
  const PolynomialU<extended_real> binomial(series);

  auto a_pow = PolynomialU<extended_real>::constant(extended_real(1));
  extended_real eta_pow(1);
  for (int q = 0; q <= law.m_exp; ++q) {
    const extended_real weight = binomial_series_coeff(extended_real(-law.m_exp), q) / eta_pow;
    std::vector<extended_real> merged = poly_mul(binomial, a_pow).coeffs();
    for (auto& v : merged) {
      v *= weight;
    }
    e.by_power.emplace_back(std::move(merged));
    for (int s = 0; s <= order; ++s) {
      for (std::size_t k = 0; k <= a_pow.degree(); ++k) {
        const extended_real coeff = series[static_cast<std::size_t>(s)] * weight * a_pow[k];
        e.terms.push_back({static_cast<double>(coeff),
                           p.delta * (s + static_cast<double>(k)) + 2.0 * q, s, q,
                           static_cast<int>(k)});
      }
    }
    a_pow = poly_mul(a_pow, a);
    eta_pow *= eta;
  }
  return e;
}

namespace detail {

/// Integral of t^(k+2) (1 - t^delta)^gamma over [0, x] for the term x^k,
/// with k = 2q + delta j: x^(k+3)/(k+3) 2F1(-gamma, (k+3)/delta; (k+3)/delta + 1; x^delta).
inline extended_real shell_integral(int gamma, const extended_real& delta, const extended_real& k,
                                    const extended_real& x_pow_k3, const extended_real& u) {
  const extended_real k3 = k + extended_real(3);
  const extended_real b = k3 / delta;
  return x_pow_k3 / k3 * gauss2f1_terminating(gamma, b, b + extended_real(1), u);
}

/// Same integral over [0, 1]: gamma! / (delta prod_{i=0..gamma} (s* + i)), s* = (k+3)/delta.
inline extended_real shell_integral_total(int gamma, const extended_real& delta,
                                          const extended_real& k) {
  const extended_real s_star = (k + extended_real(3)) / delta;
  extended_real prod(1);
  for (int i = 0; i <= gamma; ++i) {
    prod *= s_star + extended_real(i);
  }
  extended_real fact(1);
  for (int i = 2; i <= gamma; ++i) {
    fact *= extended_real(i);
  }
  return fact / (delta * prod);
}


/// Sums poly[j] * integral(k) over every merged term, k = 2q + delta j.
template <typename Integral>
extended_real sum_terms(const EnergyExpansion& e, const extended_real& xe, const extended_real& u,
                        Integral&& integral) {
  const extended_real delta(e.params.delta);
  extended_real total(0);
  extended_real x_pow = xe * xe * xe;  // x^(2q+3)
  for (std::size_t q = 0; q < e.by_power.size(); ++q) {
    const auto& poly = e.by_power[q];
    extended_real u_pow(1);
    for (std::size_t j = 0; j <= poly.degree(); ++j) {
      const extended_real k =
          extended_real(2 * static_cast<int>(q)) + delta * extended_real(static_cast<int>(j));
      total += poly[j] * integral(k, x_pow * u_pow);
      u_pow *= u;
    }
    x_pow *= xe * xe;
  }
  return total;
}

}  // namespace detail

/// L(x) / (4 pi R^3 rho_c eps_c) from the term-by-term closed form.
inline extended_real scaled_luminosity(const EnergyExpansion& e, double x) {
  using boost::multiprecision::pow;
  if (x <= 0.0) {
    return extended_real(0);
  }
  const int gamma = e.params.gamma;
  const extended_real delta(e.params.delta);
  const extended_real xe(x >= 1.0 ? 1.0 : x);
  const extended_real u = x >= 1.0 ? extended_real(1) : pow(xe, delta);
  return detail::sum_terms(e, xe, u, [&](const extended_real& k, const extended_real& x_pow_k3) {
    return detail::shell_integral(gamma, delta, k, x_pow_k3, u);
  });
}

/// L(R) / (4 pi R^3 rho_c eps_c), every term in its unit-argument product form.
inline extended_real scaled_total_luminosity(const EnergyExpansion& e) {
  const int gamma = e.params.gamma;
  const extended_real delta(e.params.delta);
  const extended_real one(1);
  return detail::sum_terms(e, one, one, [&](const extended_real& k, const extended_real&) {
    return detail::shell_integral_total(gamma, delta, k);
  });
}

inline double luminosity_unit(const EnergyExpansion& e, const SolarCalibration& c) {
  const double r = c.radius_total;
  return 4.0 * std::numbers::pi * r * r * r * central_density(e.params, c) * e.eps_central;
}

/// L(x) in W for a prepared expansion.
inline double luminosity(const EnergyExpansion& e, const SolarCalibration& c, double x) {
  return luminosity_unit(e, c) * static_cast<double>(scaled_luminosity(e, x));
}

inline double luminosity(const ModelParams& p, const EnergyLaw& law, const SolarCalibration& c,
                         double x, std::optional<int> truncation_order = std::nullopt) {
  return luminosity(energy_rate_polynomial(p, law, c, truncation_order), c, x);
}

/// L(R) in W from the unit-argument form of every term.
inline double total_luminosity(const EnergyExpansion& e, const SolarCalibration& c) {
  return luminosity_unit(e, c) * static_cast<double>(scaled_total_luminosity(e));
}

inline double total_luminosity(const ModelParams& p, const EnergyLaw& law,
                               const SolarCalibration& c,
                               std::optional<int> truncation_order = std::nullopt) {
  return total_luminosity(energy_rate_polynomial(p, law, c, truncation_order), c);
}

/// eps0 giving total_luminosity = c.luminosity_target; L is linear in eps0.
inline double solve_eps0(const ModelParams& p, const SolarCalibration& c,
                         std::optional<int> truncation_order = std::nullopt) {
  const auto unit = EnergyLaw::from(p, 1.0);
  return c.luminosity_target / total_luminosity(p, unit, c, truncation_order);
}

/// Fills the epsilon (pointwise) and luminosity (closed form) columns.
inline void attach_energy(StellarProfile& prof, const EnergyExpansion& e,
                          const EnergyLaw& law, const SolarCalibration& c) {
  for (std::size_t i = 0; i < prof.size(); ++i) {
    prof.epsilon[i] = energy_rate_pointwise(e.params, law, c, prof.x[i]);
    prof.luminosity[i] = luminosity(e, c, prof.x[i]);
  }
}

}  // namespace solar
