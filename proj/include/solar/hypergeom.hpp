#pragma once

// Terminating Gauss hypergeometric series, Pochhammer symbols and the
// polynomial algebra over u = (r/R)^delta shared by the closed-form profiles.
//
// Every routine is templated on the scalar so the same code runs in double
// and in an extended-precision type (see energy.hpp).

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

namespace solar {

/// Largest gamma accepted by the terminating series.
inline constexpr int max_series_gamma = 64;

namespace detail {

inline void check_gamma(int gamma) {
  if (gamma < 0) {
    throw std::domain_error("terminating series needs gamma >= 0");
  }
  if (gamma > max_series_gamma) {
    throw std::domain_error("gamma above 64 is not supported by the terminating series");
  }
}

template <typename Real>
bool is_nonpositive_integer(const Real& c) {
  using std::floor;
  return c <= Real(0) && floor(c) == c;
}

}  // namespace detail

/// Rising factorial (a)_k = a (a+1) ... (a+k-1), with (a)_0 = 1.
template <typename Real>
Real pochhammer(const Real& a, int k) {
  if (k < 0) {
    throw std::domain_error("pochhammer: k must be nonnegative");
  }
  Real out(1);
  for (int i = 0; i < k; ++i) {
    out *= a + Real(i);
  }
  return out;
}

/// (a)_s / s!, the s-th coefficient of (1-u)^(-a).
template <typename Real>
Real binomial_series_coeff(const Real& a, int s) {
  if (s < 0) {
    throw std::domain_error("binomial_series_coeff: s must be nonnegative");
  }
  Real out(1);
  for (int i = 0; i < s; ++i) {
    out *= (a + Real(i)) / Real(i + 1);
  }
  return out;
}

/// 2F1(-gamma, b; c; z), summed term by term. The series has gamma+1 terms.
///
/// Terms follow t_{k+1} = t_k (k-gamma)(b+k) z / ((c+k)(k+1)), so no
/// factorial-sized intermediates appear. For z > 1/2 with c > b > 0 the
/// alternating terms cancel badly near z = 1 (by ~1e9 at gamma = 12), so the
/// Pfaff form
///   sum_k C(gamma,k) (c-b)_k/(c)_k z^k (1-z)^(gamma-k)
/// is summed instead; its terms are all positive.
template <typename Real>
Real gauss2f1_terminating(int gamma, const Real& b, const Real& c, const Real& z) {
  detail::check_gamma(gamma);
  if (detail::is_nonpositive_integer(c)) {
    throw std::domain_error("gauss2f1_terminating: c is a nonpositive integer");
  }
  if (z > Real(0.5) && c > b && b > Real(0)) {
    const Real w = Real(1) - z;
    std::vector<Real> w_pow(static_cast<std::size_t>(gamma) + 1, Real(1));
    for (int k = 1; k <= gamma; ++k) {
      w_pow[static_cast<std::size_t>(k)] = w_pow[static_cast<std::size_t>(k - 1)] * w;
    }
    Real term(1);  // C(gamma,k) (c-b)_k/(c)_k z^k
    Real sum = w_pow[static_cast<std::size_t>(gamma)];
    for (int k = 0; k < gamma; ++k) {
      term *= Real(gamma - k) * (c - b + Real(k)) * z / ((c + Real(k)) * Real(k + 1));
      sum += term * w_pow[static_cast<std::size_t>(gamma - k - 1)];
    }
    return sum;
  }
  Real term(1);
  Real sum(1);
  for (int k = 0; k < gamma; ++k) {
    term *= Real(k - gamma) * (b + Real(k)) * z / ((c + Real(k)) * Real(k + 1));
    sum += term;
  }
  return sum;
}

/// 2F1(-gamma, b; c; 1) from the Gauss summation theorem,
/// Gamma(c) Gamma(c+gamma-b) / (Gamma(c+gamma) Gamma(c-b)).
///
/// With a negative-integer first argument this ratio is the finite product
/// (c-b)_gamma / (c)_gamma, which for c = b+1 is gamma! / prod_{i=1..gamma}(b+i).
template <typename Real>
Real gauss2f1_unit(int gamma, const Real& b, const Real& c) {
  detail::check_gamma(gamma);
  if (detail::is_nonpositive_integer(c)) {
    throw std::domain_error("gauss2f1_unit: Gamma(c) has a pole");
  }
  if (!(c + Real(gamma) - b > Real(0))) {
    throw std::domain_error("gauss2f1_unit: requires c + gamma - b > 0");
  }
  if (c == b + Real(1)) {
    Real out(1);
    for (int i = 1; i <= gamma; ++i) {
      out *= Real(i) / (b + Real(i));
    }
    return out;
  }
  // The poles of Gamma(c - b) and Gamma(c + gamma - b) cancel when c - b is a
  // nonpositive integer larger than -gamma; the product form handles both.
  Real out(1);
  for (int i = 0; i < gamma; ++i) {
    out *= (c - b + Real(i)) / (c + Real(i));
  }
  return out;
}

/// Integral of s^(b-1) (1-s)^gamma over [1-w, 1], for b > 0 and 0 <= w < 1.
///
/// This is the surface-side complement of the terminating series. Near the
/// surface (w small) the difference b * [B(b, gamma+1) - integral over
/// [0, 1-w]] loses every digit; here the integral is evaluated directly as
///   w^(gamma+1) (1-w)^b / (gamma+1) * 2F1(gamma+1+b, 1; gamma+2; w),
/// the Euler transform of w^(gamma+1)/(gamma+1) 2F1(1-b, gamma+1; gamma+2; w),
/// whose terms are all positive.
template <typename Real>
Real beta_tail(const Real& b, int gamma, const Real& w) {
  using std::pow;
  detail::check_gamma(gamma);
  if (!(b > Real(0))) {
    throw std::domain_error("beta_tail: b must be positive");
  }
  if (w < Real(0) || !(w < Real(1))) {
    throw std::domain_error("beta_tail: w must lie in [0, 1)");
  }
  if (w == Real(0)) {
    return Real(0);
  }
  Real lead = pow(Real(1) - w, b) / Real(gamma + 1);
  for (int i = 0; i <= gamma; ++i) {
    lead *= w;
  }
  const Real eps = std::numeric_limits<Real>::epsilon();
  Real term(1);
  Real sum(1);
  for (int k = 0; k < 100000; ++k) {
    term *= (Real(gamma + 1) + b + Real(k)) * w / Real(gamma + 2 + k);
    sum += term;
    // terms decay geometrically once (gamma+1+b+k) w < gamma+2+k
    if (term <= sum * eps && (Real(gamma + 1) + b + Real(k)) * w < Real(gamma + 2 + k)) {
      break;
    }
  }
  return lead * sum;
}

/// Polynomial c_0 + c_1 u + ... + c_d u^d in u = (r/R)^delta.
template <typename Real>
class PolynomialU {
 public:
  PolynomialU() : coeffs_{Real(0)} {}
  explicit PolynomialU(std::vector<Real> coeffs) : coeffs_(std::move(coeffs)) {
    if (coeffs_.empty()) {
      coeffs_.push_back(Real(0));
    }
    check_finite();
  }
  PolynomialU(std::initializer_list<Real> coeffs) : PolynomialU(std::vector<Real>(coeffs)) {}

  static PolynomialU constant(const Real& c) { return PolynomialU(std::vector<Real>{c}); }

  /// (1 - u)^n expanded by the binomial theorem.
  static PolynomialU one_minus_u_pow(int n) {
    std::vector<Real> c(static_cast<std::size_t>(n) + 1);
    Real b(1);
    for (int k = 0; k <= n; ++k) {
      c[static_cast<std::size_t>(k)] = (k % 2 == 0) ? b : -b;
      b = b * Real(n - k) / Real(k + 1);
    }
    return PolynomialU(std::move(c));
  }

  std::size_t degree() const { return coeffs_.size() - 1; }
  const std::vector<Real>& coeffs() const { return coeffs_; }
  const Real& operator[](std::size_t k) const { return coeffs_[k]; }

  /// Horner evaluation.
  Real operator()(const Real& u) const {
    Real acc = coeffs_.back();
    for (std::size_t k = coeffs_.size() - 1; k-- > 0;) {
      acc = acc * u + coeffs_[k];
    }
    return acc;
  }

  template <typename Other>
  PolynomialU<Other> cast() const {
    std::vector<Other> c;
    c.reserve(coeffs_.size());
    for (const auto& v : coeffs_) {
      c.push_back(static_cast<Other>(v));
    }
    return PolynomialU<Other>(std::move(c));
  }

 private:
  void check_finite() const {
    using std::isfinite;
    for (const auto& c : coeffs_) {
      if (!isfinite(c)) {
        throw std::domain_error("PolynomialU: coefficients must be finite");
      }
    }
  }

  std::vector<Real> coeffs_;
};

/// Convolution product; degree(p*q) = degree(p) + degree(q).
template <typename Real>
PolynomialU<Real> poly_mul(const PolynomialU<Real>& p, const PolynomialU<Real>& q) {
  std::vector<Real> out(p.degree() + q.degree() + 1, Real(0));
  for (std::size_t i = 0; i <= p.degree(); ++i) {
    for (std::size_t j = 0; j <= q.degree(); ++j) {
      out[i + j] += p[i] * q[j];
    }
  }
  return PolynomialU<Real>(std::move(out));
}

template <typename Real>
Real poly_eval(const PolynomialU<Real>& p, const Real& u) {
  return p(u);
}

/// p^k by repeated multiplication; p^0 is the constant 1.
template <typename Real>
PolynomialU<Real> poly_pow(const PolynomialU<Real>& p, int k) {
  auto out = PolynomialU<Real>::constant(Real(1));
  for (int i = 0; i < k; ++i) {
    out = poly_mul(out, p);
  }
  return out;
}

}  // namespace solar
