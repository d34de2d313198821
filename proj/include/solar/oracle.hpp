#pragma once

// Independent numerical check of the closed forms. M and L are integrated
// outward from the centre and P inward from the surface, straight from
// dM/dr = 4 pi r^2 rho, dP/dr = -G M rho / r^2 and dL/dr = 4 pi r^2 rho eps,
// using nothing of the closed forms except rho(x) and the energy rate.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "solar/calibration.hpp"
#include "solar/energy.hpp"
#include "solar/profiles.hpp"
#include "solar/radiative.hpp"

namespace solar {

struct QuadratureSpec {
  double abs_tol = 1e-14;
  double rel_tol = 1e-12;
  int max_depth = 50;

  void validate() const {
    if (!(abs_tol > 0.0) || !(rel_tol > 0.0)) {
      throw std::invalid_argument("quadrature tolerances must be positive");
    }
    if (max_depth < 1 || max_depth > 60) {
      throw std::invalid_argument("quadrature max_depth must lie in [1, 60]");
    }
  }
};

class QuadratureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class OdeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

template <typename F>
double simpson_step(const F& f, double a, double fa, double b, double fb, double m, double fm,
                    double whole, double tol, int depth, const QuadratureSpec& spec) {
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double refined = left + right;
  const double delta = refined - whole;
  if (std::abs(delta) <= 15.0 * tol ||
      std::abs(delta) <= 64.0 * std::numeric_limits<double>::epsilon() * std::abs(refined)) {
    return refined + delta / 15.0;
  }
  if (depth >= spec.max_depth) {
    throw QuadratureError("adaptive quadrature: max depth exceeded");
  }
  return simpson_step(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth + 1, spec) +
         simpson_step(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth + 1, spec);
}

}  // namespace detail

/// Adaptive Simpson with Richardson correction. The tolerance is
/// max(abs_tol, rel_tol |I|), with |I| from a 64-panel Simpson estimate.
template <typename F>
double integrate_adaptive(const F& f, double lo, double hi, const QuadratureSpec& spec = {}) {
  spec.validate();
  if (hi < lo) {
    throw std::invalid_argument("integrate_adaptive needs lo <= hi");
  }
  if (hi == lo) {
    return 0.0;
  }
  constexpr int panels = 64;
  const double h = (hi - lo) / panels;
  std::array<double, 2 * panels + 1> fx{};
  for (int i = 0; i <= 2 * panels; ++i) {
    fx[static_cast<std::size_t>(i)] = f(lo + 0.5 * h * i);
  }
  double estimate = 0.0;
  for (int i = 0; i < panels; ++i) {
    const auto k = static_cast<std::size_t>(2 * i);
    estimate += h / 6.0 * (fx[k] + 4.0 * fx[k + 1] + fx[k + 2]);
  }
  const double tol = std::max(spec.abs_tol, spec.rel_tol * std::abs(estimate)) / panels;
  double total = 0.0;
  for (int i = 0; i < panels; ++i) {
    const auto k = static_cast<std::size_t>(2 * i);
    const double a = lo + h * i;
    const double b = i + 1 == panels ? hi : lo + h * (i + 1);
    const double whole = h / 6.0 * (fx[k] + 4.0 * fx[k + 1] + fx[k + 2]);
    total += detail::simpson_step(f, a, fx[k], b, fx[k + 2], 0.5 * (a + b), fx[k + 1], whole, tol,
                                  1, spec);
  }
  return total;
}

template <std::size_t N>
using OdeState = std::array<double, N>;

template <std::size_t N>
struct OdeResult {
  OdeState<N> state;
  OdeState<N> error;  // |y_h/2 - y_h| / 15 per component
};

namespace detail {

template <std::size_t N, typename Rhs>
OdeState<N> rk4_run(const Rhs& rhs, double x0, double x1, OdeState<N> y, long steps) {
  const double h = (x1 - x0) / static_cast<double>(steps);
  auto axpy = [](const OdeState<N>& a, double s, const OdeState<N>& b) {
    OdeState<N> out;
    for (std::size_t i = 0; i < N; ++i) {
      out[i] = a[i] + s * b[i];
    }
    return out;
  };
  for (long i = 0; i < steps; ++i) {
    const double x = i + 1 == steps ? x1 - h : x0 + h * static_cast<double>(i);
    const OdeState<N> k1 = rhs(x, y);
    const OdeState<N> k2 = rhs(x + 0.5 * h, axpy(y, 0.5 * h, k1));
    const OdeState<N> k3 = rhs(x + 0.5 * h, axpy(y, 0.5 * h, k2));
    const OdeState<N> k4 = rhs(x + h, axpy(y, h, k3));
    for (std::size_t j = 0; j < N; ++j) {
      y[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
      if (!std::isfinite(y[j])) {
        throw OdeError("ODE integration: nonfinite state");
      }
    }
  }
  return y;
}

}  // namespace detail

/// Classical RK4 with `steps` fixed steps and once more with 2*steps; returns
/// the finer solution with the Richardson error estimate. x1 < x0 is allowed.
template <std::size_t N, typename Rhs>
OdeResult<N> integrate_ode(const Rhs& rhs, double x0, double x1, const OdeState<N>& y0,
                           long steps) {
  if (steps < 16) {
    throw std::invalid_argument("integrate_ode needs at least 16 steps");
  }
  const OdeState<N> coarse = detail::rk4_run<N>(rhs, x0, x1, y0, steps);
  const OdeState<N> fine = detail::rk4_run<N>(rhs, x0, x1, y0, 2 * steps);
  OdeResult<N> out{fine, {}};
  for (std::size_t i = 0; i < N; ++i) {
    out.error[i] = std::abs(fine[i] - coarse[i]) / 15.0;
  }
  return out;
}

/// Maximum relative deviation of each closed form from the oracle.
struct VerificationReport {
  ModelParams params;
  double eps0 = 0.0;
  double kappa0 = 0.0;
  int truncation_order = 0;
  std::size_t points = 0;
  double mass_error = 0.0;
  double pressure_error = 0.0;
  double luminosity_error = 0.0;
  double gradient_error = 0.0;
  double structure_threshold = 1e-8;  // mass, pressure, luminosity
  double gradient_threshold = 1e-6;
  bool pass = false;
  std::string failure;  // integrator diagnostic, empty on success
};

struct VerifyOptions {
  /// Relative perturbation of rho_c seen by the oracle only; a negative control.
  double density_perturbation = 0.0;
  /// Relative accuracy requested from each ODE segment.
  double ode_rel_tol = 1e-12;
  /// Starting radius of the outward integration (removable singularity at 0).
  double start_radius = 1e-8;
};

namespace detail {

inline double relative_deviation(double closed, double oracle) {
  if (closed == oracle) {
    return 0.0;
  }
  const double scale = std::abs(oracle);
  return scale > 0.0 ? std::abs(closed - oracle) / scale : std::abs(closed);
}

/// Integrates [from, to] with RK4, doubling the step count until the
/// Richardson estimate meets rel_tol on every component.
template <std::size_t N, typename Rhs>
OdeState<N> integrate_segment(const Rhs& rhs, double from, double to, const OdeState<N>& y0,
                              double rel_tol) {
  long steps = std::max<long>(16, static_cast<long>(std::ceil(std::abs(to - from) * 512.0)));
  for (int attempt = 0; attempt < 14; ++attempt, steps *= 2) {
    const auto r = integrate_ode<N>(rhs, from, to, y0, steps);
    bool ok = true;
    for (std::size_t i = 0; i < N; ++i) {
      if (r.error[i] > rel_tol * std::abs(r.state[i]) + std::numeric_limits<double>::min()) {
        ok = false;
      }
    }
    if (ok) {
      return r.state;
    }
  }
  throw OdeError("ODE integration: step refinement did not reach the requested accuracy");
}

/// Fourth-order central difference with step h.
template <typename F>
double central_derivative(const F& f, double x, double h) {
  return (f(x - 2.0 * h) - 8.0 * f(x - h) + 8.0 * f(x + h) - f(x + 2.0 * h)) / (12.0 * h);
}

}  // namespace detail

/// eps truncated the way the expansion truncates it, from the pointwise rate:
/// eps(x) * B_S(u) * (1-u)^(gamma(m-n)), B_S the order-S partial sum of (1-u)^(-gamma(m-n)).
inline double truncated_rate_reference(const ModelParams& p, const EnergyLaw& law,
                                       const SolarCalibration& c, int truncation_order, double x) {
  const auto [u, w] = scaled::radial_variable(x, p.delta);
  const int power = p.gamma * (law.m_exp - law.n_exp);
  double partial = 0.0;
  for (int s = truncation_order; s >= 0; --s) {
    partial = partial * u + binomial_series_coeff(static_cast<double>(power), s);
  }
  return energy_rate_pointwise(p, law, c, x) * partial * std::pow(w, power);
}

/// Checks M, P, L and dT/dr against the oracle at the sample points.
inline VerificationReport verify_model(const ModelParams& p, const EnergyLaw& law,
                                       const SolarCalibration& c, const OpacityLaw& opacity,
                                       const std::vector<double>& grid,
                                       std::optional<int> truncation_order = std::nullopt,
                                       const VerifyOptions& options = {}) {
  p.validate();
  law.validate();
  c.validate();
  opacity.validate();
  VerificationReport report;
  report.params = p;
  report.eps0 = law.eps0;
  report.kappa0 = opacity.kappa0;
  report.points = grid.size();
  if (!std::is_sorted(grid.begin(), grid.end()) || grid.empty() || grid.front() < 0.0 ||
      grid.back() > 1.0) {
    throw std::invalid_argument("verify_model needs a sorted sample grid inside [0, 1]");
  }

  try {
    const EnergyExpansion expansion = energy_rate_polynomial(p, law, c, truncation_order);
    report.truncation_order = expansion.truncation_order;
    const double c_rho = scaled::central_density(p);
    const double scale = 1.0 + options.density_perturbation;
    auto rho_hat = [&](double x) { return scale * scaled::density(p, x); };
    const double eps_c = expansion.eps_central;
    auto eps_hat = [&](double x) {
      return truncated_rate_reference(p, law, c, expansion.truncation_order, x) / eps_c;
    };

    // Outward: y = (M / M_sun, L / (4 pi R^3 rho_c eps_c), Q) with
    // dQ/dx = -dP/dx, used only to carry P across the innermost interval.
    auto outward = [&](double x, const OdeState<3>& y) {
      const double rho = rho_hat(x);
      return OdeState<3>{3.0 * x * x * rho, x * x * rho / c_rho * eps_hat(x),
                         3.0 / (4.0 * std::numbers::pi) * y[0] * rho / (x * x)};
    };
    const double x0 = options.start_radius;
    const double rho0 = scale * c_rho;
    OdeState<3> y{rho0 * x0 * x0 * x0, scale * x0 * x0 * x0 / 3.0,
                  3.0 / (8.0 * std::numbers::pi) * rho0 * rho0 * x0 * x0};
    double at = x0;
    std::vector<double> mass_o(grid.size());
    std::vector<double> lum_o(grid.size());
    std::vector<double> drop_o(grid.size());
    // On the first interval integrate in s with x = s^k. This keeps RK4 at full
    // order against the x^delta kink of rho and the M/x^2 term of Q.
    const double k = std::max(3.0, std::ceil(4.0 / p.delta));
    auto graded = [&](double s, const OdeState<3>& y) {
      const double x = std::pow(s, k);
      OdeState<3> dy = outward(x, y);
      const double jac = k * x / s;
      for (double& v : dy) {
        v *= jac;
      }
      return dy;
    };
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double target = grid[i];
      if (target <= x0) {
        continue;
      }
      if (at == x0) {
        y = detail::integrate_segment<3>(graded, std::pow(x0, 1.0 / k), std::pow(target, 1.0 / k),
                                         y, options.ode_rel_tol);
      } else {
        y = detail::integrate_segment<3>(outward, at, target, y, options.ode_rel_tol);
      }
      at = target;
      mass_o[i] = y[0];
      lum_o[i] = y[1];
      drop_o[i] = y[2];
    }
    if (at < 1.0) {
      y = detail::integrate_segment<3>(outward, at, 1.0, y, options.ode_rel_tol);
    }
    const double mass_surface = y[0];

    // Inward: z = (M / M_sun, P / (G M^2 / R^4)), from P(1) = 0, down to the
    // innermost sample above x0. Below it P(0) = P(x_min) + Q(x_min).
    auto inward = [&](double x, const OdeState<2>& z) {
      const double rho = rho_hat(x);
      return OdeState<2>{3.0 * x * x * rho, -3.0 / (4.0 * std::numbers::pi) * z[0] * rho / (x * x)};
    };
    OdeState<2> z{mass_surface, 0.0};
    double from = 1.0;
    double drop_at_from = 0.0;
    std::vector<double> pres_o(grid.size());
    std::vector<double> mass_in(grid.size());
    for (std::size_t idx = grid.size(); idx-- > 0;) {
      const double target = grid[idx];
      if (target <= x0) {
        pres_o[idx] = z[1] + drop_at_from;
        continue;
      }
      if (target < from) {
        z = detail::integrate_segment<2>(inward, from, target, z, options.ode_rel_tol);
        from = target;
        drop_at_from = drop_o[idx];
      }
      pres_o[idx] = z[1];
      mass_in[idx] = z[0];
    }

    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double x = grid[i];
      report.mass_error =
          std::max(report.mass_error, detail::relative_deviation(scaled::mass(p, x), mass_o[i]));
      report.pressure_error = std::max(
          report.pressure_error, detail::relative_deviation(scaled::pressure(p, x), pres_o[i]));
      report.luminosity_error =
          std::max(report.luminosity_error,
                   detail::relative_deviation(static_cast<double>(scaled_luminosity(expansion, x)),
                                              lum_o[i]));
      if (x > 0.0 && x < 1.0) {
        // T = (4pi/3) P / rho, differentiated with the oracle's P and dP/dx
        // and a finite-difference drho/dx.
        const double rho = rho_hat(x);
        const double h = 1e-3 * std::min(x, 1.0 - x);
        const double drho = detail::central_derivative(rho_hat, x, h);
        const double dp = -3.0 / (4.0 * std::numbers::pi) * mass_in[i] * rho / (x * x);
        const double grad_o = 4.0 * std::numbers::pi / 3.0 * (dp / rho - pres_o[i] * drho / (rho * rho));
        report.gradient_error = std::max(
            report.gradient_error,
            detail::relative_deviation(scaled::temperature_gradient(p, x), grad_o));
      }
    }
    report.pass = report.mass_error < report.structure_threshold &&
                  report.pressure_error < report.structure_threshold &&
                  report.luminosity_error < report.structure_threshold &&
                  report.gradient_error < report.gradient_threshold;
  } catch (const QuadratureError& err) {
    report.pass = false;
    report.failure = err.what();
  } catch (const OdeError& err) {
    report.pass = false;
    report.failure = err.what();
  }
  return report;
}

}  // namespace solar
