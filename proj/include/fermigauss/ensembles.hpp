#pragma once

// Random-matrix sampling: the class-D Cartesian Gaussian ensemble, Haar
// unitaries, and Metropolis sampling of radial (eigenvalue) densities.

#include <cmath>
#include <limits>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "fermigauss/bdg_matrix.hpp"
#include "fermigauss/errors.hpp"
#include "fermigauss/rng.hpp"

namespace fermigauss {

enum class ClassLabel { D, C, DIII, CI };

/// Nonstandard symmetry class with its Jacobian exponents:
/// dH ~ Delta^beta(lambda^2) prod |lambda_j|^alpha.
struct SymmetryClass {
  ClassLabel label;
  int beta;
  int alpha;

  std::string_view name() const {
    switch (label) {
      case ClassLabel::D: return "D";
      case ClassLabel::C: return "C";
      case ClassLabel::DIII: return "DIII";
      case ClassLabel::CI: return "CI";
    }
    return "?";
  }
};

inline SymmetryClass symmetry_class(ClassLabel label) {
  switch (label) {
    case ClassLabel::D: return {label, 2, 0};
    case ClassLabel::C: return {label, 2, 2};
    case ClassLabel::DIII: return {label, 4, 1};
    case ClassLabel::CI: return {label, 1, 1};
  }
  throw ContractError("symmetry_class: unknown label");
}

inline SymmetryClass parse_symmetry_class(std::string_view text) {
  if (text == "D") return symmetry_class(ClassLabel::D);
  if (text == "C") return symmetry_class(ClassLabel::C);
  if (text == "DIII") return symmetry_class(ClassLabel::DIII);
  if (text == "CI" || text == "C1") return symmetry_class(ClassLabel::CI);
  throw ContractError("unknown symmetry class '" + std::string(text) + "' (expected D, C, DIII or CI)");
}

enum class WeightKind {
  determinant,       // prod_j (1 + lambda_j^2)^{-2p} = det[1 + H^2]^{-p}
  gaussian,          // exp(-2p sum lambda_j^2) = exp(-p Tr H^2)
  nc_even,           // exp(-p sum lambda_j^2) with the hermitian Vandermonde Jacobian
  nc_modified,       // prod_{i<j} (lambda_i + lambda_j)^2 exp(-p sum lambda_j^2), same Jacobian
  shifted_gaussian,  // exp(-p sum (lambda_j - shift)^2); not even, diagnostic only
};

struct WeightSpec {
  WeightKind kind = WeightKind::gaussian;
  double p = 1.0;
  double shift = 0.0;

  static WeightSpec determinant(double p) { return {WeightKind::determinant, p, 0.0}; }
  static WeightSpec gaussian(double p) { return {WeightKind::gaussian, p, 0.0}; }
  static WeightSpec nc_even(double p) { return {WeightKind::nc_even, p, 0.0}; }
  static WeightSpec nc_modified(double p) { return {WeightKind::nc_modified, p, 0.0}; }
  static WeightSpec shifted_gaussian(double p, double shift) {
    return {WeightKind::shifted_gaussian, p, shift};
  }

  /// Weight times Jacobian is even in every lambda_j separately.
  bool is_even() const {
    return kind != WeightKind::shifted_gaussian && kind != WeightKind::nc_even;
  }

  /// Uses the hermitian-matrix Jacobian Delta^2(lambda) instead of the class one.
  bool hermitian_jacobian() const {
    return kind == WeightKind::nc_even || kind == WeightKind::nc_modified;
  }

  std::string_view name() const {
    switch (kind) {
      case WeightKind::determinant: return "determinant";
      case WeightKind::gaussian: return "gaussian";
      case WeightKind::nc_even: return "nc_even";
      case WeightKind::nc_modified: return "nc_modified";
      case WeightKind::shifted_gaussian: return "shifted_gaussian";
    }
    return "?";
  }

  void validate(int modes) const {
    if (!(p > 0.0)) {
      std::ostringstream msg;
      msg << "weight " << name() << ": stiffness p must be > 0, got " << p;
      throw DomainError(msg.str());
    }
    if (kind == WeightKind::determinant && !(p > modes - 0.75)) {
      std::ostringstream msg;
      msg << "determinant weight is not integrable: requires p > M - 3/4 = " << (modes - 0.75)
          << ", got p = " << p;
      throw DomainError(msg.str());
    }
  }
};

inline WeightKind parse_weight_kind(std::string_view text) {
  if (text == "determinant") return WeightKind::determinant;
  if (text == "gaussian") return WeightKind::gaussian;
  if (text == "nc_even") return WeightKind::nc_even;
  if (text == "nc_modified") return WeightKind::nc_modified;
  if (text == "shifted_gaussian") return WeightKind::shifted_gaussian;
  throw ContractError("unknown weight kind '" + std::string(text) + "'");
}

/// Factors smaller than this count as exact zeros of the density.
inline constexpr double kDensityZero = 1e-300;

/// log of the weight alone (no Jacobian).
inline double log_weight(const WeightSpec& w, std::span<const double> lam) {
  double out = 0.0;
  switch (w.kind) {
    case WeightKind::determinant:
      for (double l : lam) out -= 2.0 * w.p * std::log1p(l * l);
      return out;
    case WeightKind::gaussian:
      for (double l : lam) out -= 2.0 * w.p * l * l;
      return out;
    case WeightKind::nc_even:
      for (double l : lam) out -= w.p * l * l;
      return out;
    case WeightKind::nc_modified:
      for (std::size_t i = 0; i < lam.size(); ++i) {
        out -= w.p * lam[i] * lam[i];
        for (std::size_t j = i + 1; j < lam.size(); ++j) {
          const double s = std::abs(lam[i] + lam[j]);
          if (s < kDensityZero) return -std::numeric_limits<double>::infinity();
          out += 2.0 * std::log(s);
        }
      }
      return out;
    case WeightKind::shifted_gaussian:
      for (double l : lam) out -= w.p * (l - w.shift) * (l - w.shift);
      return out;
  }
  return out;
}

/// log of the Jacobian factor: Delta^beta(lambda^2) prod |lambda|^alpha for
/// the class measure, Delta^2(lambda) for the hermitian one.
inline double log_jacobian(const SymmetryClass& cls, bool hermitian, std::span<const double> lam) {
  const double ninf = -std::numeric_limits<double>::infinity();
  double out = 0.0;
  for (std::size_t i = 0; i < lam.size(); ++i) {
    if (!hermitian && cls.alpha != 0) {
      const double a = std::abs(lam[i]);
      if (a < kDensityZero) return ninf;
      out += cls.alpha * std::log(a);
    }
    for (std::size_t j = i + 1; j < lam.size(); ++j) {
      const double diff = hermitian ? std::abs(lam[i] - lam[j])
                                    : std::abs(lam[i] * lam[i] - lam[j] * lam[j]);
      if (diff < kDensityZero) return ninf;
      out += (hermitian ? 2.0 : cls.beta) * std::log(diff);
    }
  }
  return out;
}

/// Unnormalized log radial density on R^M.
inline double log_radial_density(const SymmetryClass& cls, const WeightSpec& w,
                                 std::span<const double> lam) {
  const double jac = log_jacobian(cls, w.hermitian_jacobian(), lam);
  if (!std::isfinite(jac)) return jac;
  return jac + log_weight(w, lam);
}

/// Draws H with density proportional to exp(-p Tr H^2): diagonal h_ii have
/// variance 1/(4p), every off-diagonal real component variance 1/(8p).
inline BdgMatrix sample_class_d(int modes, double p, Engine& rng) {
  if (!(p > 0.0)) throw DomainError("sample_class_d: p must be > 0");
  if (modes < 1) throw ContractError("sample_class_d: modes must be >= 1");
  std::normal_distribution<double> normal(0.0, 1.0);
  const double sd_diag = std::sqrt(1.0 / (4.0 * p));
  const double sd_off = std::sqrt(1.0 / (8.0 * p));
  CMatrix h = CMatrix::Zero(modes, modes);
  CMatrix delta = CMatrix::Zero(modes, modes);
  for (int i = 0; i < modes; ++i) h(i, i) = sd_diag * normal(rng);
  for (int i = 0; i < modes; ++i) {
    for (int j = i + 1; j < modes; ++j) {
      const double hx = sd_off * normal(rng);
      const double hy = sd_off * normal(rng);
      const double dx = sd_off * normal(rng);
      const double dy = sd_off * normal(rng);
      h(i, j) = Complex(hx, hy);
      h(j, i) = Complex(hx, -hy);
      delta(i, j) = Complex(dx, dy);
      delta(j, i) = -Complex(dx, dy);
    }
  }
  return make_bdg(h, delta);
}

/// Haar-distributed M x M unitary: QR of a complex Ginibre matrix with the
/// phases of R's diagonal moved into Q.
inline CMatrix sample_haar_unitary(int modes, Engine& rng) {
  if (modes < 1) throw ContractError("sample_haar_unitary: modes must be >= 1");
  std::normal_distribution<double> normal(0.0, 1.0);
  CMatrix z(modes, modes);
  for (int j = 0; j < modes; ++j)
    for (int i = 0; i < modes; ++i) z(i, j) = Complex(normal(rng), normal(rng)) / std::sqrt(2.0);
  Eigen::HouseholderQR<CMatrix> qr(z);
  CMatrix q = qr.householderQ() * CMatrix::Identity(modes, modes);
  const CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < modes; ++j) {
    const Complex d = r(j, j);
    const double a = std::abs(d);
    q.col(j) *= (a > 0.0 ? d / a : Complex(1.0));
  }
  return q;
}

struct McmcConfig {
  int burn_in = 10000;
  int thin = 10;
  double initial_step = 0.5;
  double target_acceptance = 0.4;
};

struct RadialChain {
  Eigen::MatrixXd samples;  // one row per retained sample, M columns
  double acceptance_rate = 0.0;
  double step = 0.0;
  std::string warning;
};

/// Metropolis random walk on R^M targeting the radial density. The step is
/// tuned towards the target acceptance during burn-in and then frozen.
inline RadialChain sample_radial_mcmc(const SymmetryClass& cls, const WeightSpec& w, int modes,
                                      int n_samples, Engine& rng, const McmcConfig& cfg = {}) {
  if (modes < 1) throw ContractError("sample_radial_mcmc: modes must be >= 1");
  if (n_samples < 0) throw ContractError("sample_radial_mcmc: negative sample count");
  if (cfg.thin < 1 || cfg.burn_in < 0) throw ContractError("sample_radial_mcmc: bad thinning");
  w.validate(modes);

  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  const double scale = 1.0 / std::sqrt(w.p);

  std::vector<double> cur(modes), prop(modes);
  for (int j = 0; j < modes; ++j) cur[j] = 0.35 * (j + 1) * scale + w.shift;
  double cur_log = log_radial_density(cls, w, cur);
  if (!std::isfinite(cur_log)) throw ContractError("sample_radial_mcmc: bad starting point");

  double step = cfg.initial_step * scale;
  auto propose = [&]() {
    for (int j = 0; j < modes; ++j) prop[j] = cur[j] + step * normal(rng);
    const double lp = log_radial_density(cls, w, prop);
    if (!std::isfinite(lp)) return false;
    if (lp >= cur_log || uniform(rng) < std::exp(lp - cur_log)) {
      cur.swap(prop);
      cur_log = lp;
      return true;
    }
    return false;
  };

  constexpr int kWindow = 100;
  int window_accepts = 0;
  for (int it = 1; it <= cfg.burn_in; ++it) {
    window_accepts += propose() ? 1 : 0;
    if (it % kWindow == 0) {
      const double rate = static_cast<double>(window_accepts) / kWindow;
      step *= std::exp(2.0 * (rate - cfg.target_acceptance));
      window_accepts = 0;
    }
  }

  RadialChain out;
  out.samples.resize(n_samples, modes);
  long accepts = 0;
  long total = 0;
  for (int s = 0; s < n_samples; ++s) {
    for (int t = 0; t < cfg.thin; ++t) {
      accepts += propose() ? 1 : 0;
      ++total;
    }
    for (int j = 0; j < modes; ++j) out.samples(s, j) = cur[j];
  }
  out.acceptance_rate = total ? static_cast<double>(accepts) / total : 0.0;
  out.step = step;
  if (total && (out.acceptance_rate < 0.1 || out.acceptance_rate > 0.9)) {
    std::ostringstream msg;
    msg << "acceptance rate " << out.acceptance_rate << " outside [0.1, 0.9]; step needs tuning";
    out.warning = msg.str();
  }
  return out;
}

}  // namespace fermigauss
