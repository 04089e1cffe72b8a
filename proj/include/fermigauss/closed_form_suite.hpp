#pragma once

// Consistency sweeps over the closed-form constants, plus the quadrature
// verdict on the two candidate radial prefactors.

#include <cmath>
#include <string>
#include <vector>

#include "fermigauss/estimator.hpp"
#include "fermigauss/quadrature.hpp"
#include "fermigauss/selberg_forms.hpp"

namespace fermigauss {

/// log int Delta^2(lambda^2) exp(-2p sum lambda^2) by tensor Gauss-Hermite.
/// The integrand is polynomial times Gaussian, so the rule is exact once
/// order > 2M - 1.
inline double radial_gaussian_integral_by_quadrature(int modes, double p, int order = 60) {
  const QuadratureRule gh = gauss_hermite(order);
  const double s = 1.0 / std::sqrt(2.0 * p);
  std::vector<std::size_t> idx(modes, 0);
  std::vector<double> sq(modes);
  double total = 0.0;
  for (;;) {
    double w = 1.0;
    for (int j = 0; j < modes; ++j) {
      const double l = gh.nodes[idx[j]] * s;
      sq[j] = l * l;
      w *= gh.weights[idx[j]] * s;
    }
    const double v = vandermonde(sq);
    total += w * v * v;
    int j = 0;
    while (j < modes && ++idx[j] == gh.size()) idx[j++] = 0;
    if (j == modes) break;
  }
  return std::log(total);
}

/// angular + radial = cartesian in log space, over M = 1..max_modes and the given p.
inline Check check_triple_consistency(int max_modes, const std::vector<double>& p_values) {
  double worst = 0.0;
  for (int m = 1; m <= max_modes; ++m) {
    for (double p : p_values) {
      const double lhs = angular_volume_log(m) + radial_gaussian_integral_log(m, p);
      worst = std::max(worst, std::abs(lhs - cartesian_gaussian_integral_log(m, p)));
    }
  }
  return make_check("angular_plus_radial_equals_cartesian", worst, "<=", 1e-10);
}

/// 2^{-M} C^U C2 * radial = 1 and 2^{-M} C^U C1 * Selberg = 1.
inline std::vector<Check> check_normalization_constants(int max_modes, const std::vector<double>& p_values) {
  double gauss = 0.0;
  double det = 0.0;
  for (int m = 1; m <= max_modes; ++m) {
    for (double p : p_values) {
      const double base = -m * std::log(2.0) + angular_volume_log(m);
      gauss = std::max(gauss, std::abs(base + norm_const_gauss_log(m, p) + radial_gaussian_integral_log(m, p)));
      const double pd = p + m;  // keep p > M - 3/4
      det = std::max(det, std::abs(base + norm_const_det_log(m, pd) + radial_determinant_integral_log(m, pd)));
    }
  }
  return {make_check("gaussian_weight_normalization_log_error", gauss, "<=", 1e-10),
          make_check("determinant_weight_normalization_log_error", det, "<=", 1e-10)};
}

struct PrefactorVerdict {
  int modes;
  double p;
  double quadrature_log;
  double half_integer_relative_error;
  double integer_relative_error;
};

inline std::vector<PrefactorVerdict> radial_prefactor_verdicts(const std::vector<int>& modes,
                                                               const std::vector<double>& p_values) {
  std::vector<PrefactorVerdict> out;
  for (int m : modes) {
    for (double p : p_values) {
      PrefactorVerdict v{m, p, radial_gaussian_integral_by_quadrature(m, p), 0.0, 0.0};
      v.half_integer_relative_error =
          std::abs(std::expm1(radial_gaussian_integral_log(m, p, RadialPrefactor::half_integer) - v.quadrature_log));
      v.integer_relative_error =
          std::abs(std::expm1(radial_gaussian_integral_log(m, p, RadialPrefactor::integer) - v.quadrature_log));
      out.push_back(v);
    }
  }
  return out;
}

}  // namespace fermigauss
