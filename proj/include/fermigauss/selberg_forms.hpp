#pragma once

// Closed-form constants for the radial and angular integrals, all in natural-log form.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <sstream>

#include "fermigauss/errors.hpp"

namespace fermigauss {

/// prod_{i<j} (lambda_i - lambda_j); 1 for fewer than two values.
inline double vandermonde(std::span<const double> lam) {
  double out = 1.0;
  for (std::size_t i = 0; i < lam.size(); ++i)
    for (std::size_t j = i + 1; j < lam.size(); ++j) out *= lam[i] - lam[j];
  return out;
}

/// Selberg's integral
///   int_{[0,inf)^n} |Delta(x)|^{2g} prod x_j^{a-1} (1 + x_j)^{-a-b-2g(n-1)} dx
/// as prod_{j<n} G(1+g+jg) G(a+jg) G(b+jg) / [G(1+g) G(a+b+(n+j-1)g)].
inline double selberg_integral_log(double a, double b, double g, int n) {
  if (n < 1) throw DomainError("selberg_integral_log: n must be >= 1");
  if (!(a > 0.0)) {
    std::ostringstream msg;
    msg << "selberg_integral_log: requires a > 0, got a = " << a;
    throw DomainError(msg.str());
  }
  if (!(b > 0.0)) {
    std::ostringstream msg;
    msg << "selberg_integral_log: requires b > 0, got b = " << b;
    throw DomainError(msg.str());
  }
  double bound = 1.0 / n;
  if (n > 1) bound = std::min({bound, a / (n - 1), b / (n - 1)});
  if (!(g > -bound)) {
    std::ostringstream msg;
    msg << "selberg_integral_log: requires g > -min(1/n, a/(n-1), b/(n-1)) = " << -bound
        << ", got g = " << g;
    throw DomainError(msg.str());
  }
  double out = 0.0;
  for (int j = 0; j < n; ++j) {
    out += std::lgamma(1.0 + g + j * g) + std::lgamma(a + j * g) + std::lgamma(b + j * g) -
           std::lgamma(1.0 + g) - std::lgamma(a + b + (n + j - 1) * g);
  }
  return out;
}

/// Laguerre-type Selberg integral over R^n:
///   int |Delta(x^2)|^{2g} prod |x_j|^{2 at - 1} exp(-x_j^2 / 2) dx
///   = 2^{at n + g n (n-1)} prod_{j=1..n} G(1+jg) G(at + g(j-1)) / G(1+g).
inline double laguerre_selberg_log(double atilde, double g, int n) {
  if (n < 1) throw DomainError("laguerre_selberg_log: n must be >= 1");
  if (!(atilde > 0.0)) {
    std::ostringstream msg;
    msg << "laguerre_selberg_log: requires atilde > 0, got " << atilde;
    throw DomainError(msg.str());
  }
  if (!(g >= 0.0)) {
    std::ostringstream msg;
    msg << "laguerre_selberg_log: requires g >= 0, got " << g;
    throw DomainError(msg.str());
  }
  double out = (atilde * n + g * n * (n - 1.0)) * std::numbers::ln2;
  for (int j = 1; j <= n; ++j) {
    out += std::lgamma(1.0 + j * g) + std::lgamma(atilde + g * (j - 1)) - std::lgamma(1.0 + g);
  }
  return out;
}

/// Which power of 2p multiplies the radial Gaussian integral. Two candidate
/// prefactors are in circulation; only the first survives a quadrature check.
enum class RadialPrefactor {
  half_integer,  // (2p)^{-M(M-1/2)}
  integer,       // (2p)^{-M(M-1)}, kept for diagnostics
};

inline void require_positive_p(double p, const char* who) {
  if (!(p > 0.0)) {
    std::ostringstream msg;
    msg << who << ": requires p > 0, got p = " << p;
    throw DomainError(msg.str());
  }
}

/// log int_{R^M} Delta^2(lambda^2) exp(-2p sum lambda_j^2) dlambda.
inline double radial_gaussian_integral_log(int modes, double p,
                                           RadialPrefactor prefactor = RadialPrefactor::half_integer) {
  require_positive_p(p, "radial_gaussian_integral_log");
  if (modes < 1) throw DomainError("radial_gaussian_integral_log: modes must be >= 1");
  const double m = modes;
  const double power = prefactor == RadialPrefactor::half_integer ? m * (m - 0.5) : m * (m - 1.0);
  double out = -power * std::log(2.0 * p);
  for (int j = 1; j <= modes; ++j) out += std::lgamma(1.0 + j) + std::lgamma(j - 0.5);
  return out;
}

/// log int dH exp(-p Tr H^2) over class-D matrices = (pi/2p)^{M(2M-1)/2} 2^{-M(M-1)}.
inline double cartesian_gaussian_integral_log(int modes, double p) {
  require_positive_p(p, "cartesian_gaussian_integral_log");
  if (modes < 1) throw DomainError("cartesian_gaussian_integral_log: modes must be >= 1");
  const double m = modes;
  return 0.5 * m * (2.0 * m - 1.0) * std::log(std::numbers::pi / (2.0 * p)) -
         m * (m - 1.0) * std::numbers::ln2;
}

/// log of the class-D angular volume
///   pi^{M(M-1/2)} 2^{-M(M-1)} prod_{j<M} 1 / [G(2+j) G(j+1/2)].
inline double angular_volume_log(int modes) {
  if (modes < 1) throw DomainError("angular_volume_log: modes must be >= 1");
  const double m = modes;
  double out = m * (m - 0.5) * std::log(std::numbers::pi) - m * (m - 1.0) * std::numbers::ln2;
  for (int j = 0; j < modes; ++j) out -= std::lgamma(2.0 + j) + std::lgamma(j + 0.5);
  return out;
}

/// log C1 for P1 = C1 det[1 + H^2]^{-p}; requires p > M - 3/4.
inline double norm_const_det_log(int modes, double p) {
  if (modes < 1) throw DomainError("norm_const_det_log: modes must be >= 1");
  if (!(p > modes - 0.75)) {
    std::ostringstream msg;
    msg << "norm_const_det_log: requires p > M - 3/4 = " << (modes - 0.75) << ", got p = " << p;
    throw DomainError(msg.str());
  }
  const double m = modes;
  double out = m * m * std::numbers::ln2 - m * (m - 0.5) * std::log(std::numbers::pi);
  for (int j = 0; j < modes; ++j) {
    out += std::lgamma(-m + 2.0 * p + j + 1.0) - std::lgamma(-2.0 * m + 2.0 * p + j + 1.5);
  }
  return out;
}

/// log C2 = M^2 log 2 + M(M-1/2) log(2p/pi) for P2 = C2 exp(-p Tr H^2).
inline double norm_const_gauss_log(int modes, double p) {
  require_positive_p(p, "norm_const_gauss_log");
  if (modes < 1) throw DomainError("norm_const_gauss_log: modes must be >= 1");
  const double m = modes;
  return m * m * std::numbers::ln2 + m * (m - 0.5) * std::log(2.0 * p / std::numbers::pi);
}

/// log int_{R^M} Delta^2(lambda^2) prod (1 + lambda_j^2)^{-2p} dlambda, the
/// Selberg integral at a = 1/2, g = 1, b = 2p - 2M + 3/2.
inline double radial_determinant_integral_log(int modes, double p) {
  return selberg_integral_log(0.5, 2.0 * p - 2.0 * modes + 1.5, 1.0, modes);
}

/// exp(x) when |x| < 300, otherwise a DomainError; linear values are only
/// materialized inside that window.
inline double exp_checked(double log_value) {
  if (!(std::abs(log_value) < 300.0)) {
    std::ostringstream msg;
    msg << "exp_checked: |log value| = " << std::abs(log_value) << " exceeds the linear range";
    throw DomainError(msg.str());
  }
  return std::exp(log_value);
}

}  // namespace fermigauss
