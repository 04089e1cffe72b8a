#pragma once

// Executable checks of the resolution of unity: radial quadrature over the
// polar form, Monte Carlo over the Cartesian class-D ensemble, the
// canonical-ensemble average, and the number-conserving dichotomy.

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fermigauss/bdg_matrix.hpp"
#include "fermigauss/ensembles.hpp"
#include "fermigauss/errors.hpp"
#include "fermigauss/estimator.hpp"
#include "fermigauss/fock_kernel.hpp"
#include "fermigauss/gaussian_ops.hpp"
#include "fermigauss/quadrature.hpp"
#include "fermigauss/rng.hpp"
#include "fermigauss/selberg_forms.hpp"

namespace fermigauss {

inline constexpr double kQuadratureTolerance = 1e-8;
inline constexpr double kSeMultiplier = 5.0;

struct QuadratureOptions {
  int order = 60;
  double convergence_tolerance = 1e-9;
  bool allow_non_even = false;  // diagnostic runs of the parity hypothesis only
};

struct RadialAverage {
  CMatrix q;           // int rho(lambda) O(lambda) / int rho
  double mass = 0.0;   // int rho(lambda) dlambda
  double convergence_delta = 0.0;
  int order = 0;
};

using RadialOperator = std::function<CMatrix(const std::vector<double>&)>;

namespace detail {

struct AxisRule {
  QuadratureRule rule;
  double absorbed_coefficient = 0.0;  // c in exp(-c lambda^2) folded into the weights
};

/// Gauss-Hermite when the weight is Gaussian and the Jacobian is smooth in
/// each lambda_j; mirrored tan-mapped Gauss-Legendre otherwise.
inline AxisRule axis_rule(const SymmetryClass& cls, const WeightSpec& w, int order) {
  double c = 0.0;
  if (w.kind == WeightKind::gaussian) c = 2.0 * w.p;
  if (w.kind == WeightKind::nc_even || w.kind == WeightKind::nc_modified) c = w.p;
  const bool smooth_jacobian = w.hermitian_jacobian() || cls.alpha % 2 == 0;
  AxisRule out;
  if (c > 0.0 && smooth_jacobian) {
    const QuadratureRule gh = gauss_hermite(order);
    const double s = 1.0 / std::sqrt(c);
    for (std::size_t k = 0; k < gh.size(); ++k) {
      out.rule.nodes.push_back(gh.nodes[k] * s);
      out.rule.weights.push_back(gh.weights[k] * s);
    }
    out.absorbed_coefficient = c;
    return out;
  }
  const double scale = w.kind == WeightKind::determinant ? 1.0 : 1.0 / std::sqrt(2.0 * w.p);
  out.rule = mirrored_tan_legendre(order, scale);
  return out;
}

struct TensorSums {
  CMatrix numerator;
  double mass = 0.0;
  std::vector<double> odd_moments;  // int rho tanh(lambda_j / 2)
};

/// Two modes with an odd Vandermonde power: |lambda_1^2 - lambda_2^2| has
/// kinks on both diagonals, which tensor rules resolve poorly. The density is
/// invariant under sign flips and the swap, so integrate the smooth wedge
/// 0 < lambda_2 < lambda_1 (lambda = (r, r s)) and sum op over the 8 images.
inline TensorSums wedge_sum(const SymmetryClass& cls, const WeightSpec& w, int order,
                            const RadialOperator& op) {
  const double scale = w.kind == WeightKind::determinant ? 1.0 : 1.0 / std::sqrt(2.0 * w.p);
  const QuadratureRule radial = mirrored_tan_legendre(order, scale);
  const QuadratureRule gl = gauss_legendre(order);
  TensorSums out;
  out.odd_moments.assign(2, 0.0);
  bool first = true;
  std::vector<double> lam(2);
  for (std::size_t i = 0; i < radial.size(); ++i) {
    const double r = radial.nodes[i];
    if (r <= 0.0) continue;
    for (std::size_t k = 0; k < gl.size(); ++k) {
      const double s = 0.5 * (1.0 + gl.nodes[k]);
      const double base = radial.weights[i] * 0.5 * gl.weights[k] * r;
      for (int image = 0; image < 8; ++image) {
        const double a = (image & 1) ? -r : r;
        const double b = (image & 2) ? -r * s : r * s;
        lam[0] = (image & 4) ? b : a;
        lam[1] = (image & 4) ? a : b;
        const double logd = log_radial_density(cls, w, lam);
        if (!std::isfinite(logd)) continue;
        const double f = base * std::exp(logd);
        if (f == 0.0) continue;
        const CMatrix o = op(lam);
        if (first) {
          out.numerator = CMatrix::Zero(o.rows(), o.cols());
          first = false;
        }
        out.numerator += f * o;
        out.mass += f;
        for (int j = 0; j < 2; ++j) out.odd_moments[j] += f * std::tanh(0.5 * lam[j]);
      }
    }
  }
  if (first) throw QuadratureError("radial quadrature: density vanished on every node");
  return out;
}

inline TensorSums tensor_sum(const SymmetryClass& cls, const WeightSpec& w, int modes, int order,
                             const RadialOperator& op) {
  if (modes == 2 && cls.beta % 2 == 1 && !w.hermitian_jacobian() && w.is_even()) {
    return wedge_sum(cls, w, order, op);
  }
  const AxisRule axis = axis_rule(cls, w, order);
  const std::size_t n = axis.rule.size();
  std::vector<std::size_t> idx(modes, 0);
  std::vector<double> lam(modes);
  TensorSums out;
  out.odd_moments.assign(modes, 0.0);
  bool first = true;
  for (;;) {
    double weight = 1.0;
    double absorbed = 0.0;
    for (int j = 0; j < modes; ++j) {
      lam[j] = axis.rule.nodes[idx[j]];
      weight *= axis.rule.weights[idx[j]];
      absorbed += axis.absorbed_coefficient * lam[j] * lam[j];
    }
    const double logd = log_radial_density(cls, w, lam) + absorbed;
    if (std::isfinite(logd)) {
      const double f = weight * std::exp(logd);
      if (f != 0.0) {
        const CMatrix o = op(lam);
        if (first) {
          out.numerator = CMatrix::Zero(o.rows(), o.cols());
          first = false;
        }
        out.numerator += f * o;
        out.mass += f;
        for (int j = 0; j < modes; ++j) out.odd_moments[j] += f * std::tanh(0.5 * lam[j]);
      }
    }
    int j = 0;
    while (j < modes && ++idx[j] == n) idx[j++] = 0;
    if (j == modes) break;
  }
  if (first) throw QuadratureError("radial quadrature: density vanished on every node");
  return out;
}

}  // namespace detail

/// Tensor-product radial average of op(lambda), at `order` and at twice the
/// order; the two must agree to the convergence tolerance.
inline RadialAverage radial_quadrature_average(const SymmetryClass& cls, const WeightSpec& w,
                                               int modes, const RadialOperator& op,
                                               const QuadratureOptions& opts = {},
                                               std::vector<double>* odd_moments = nullptr) {
  w.validate(modes);
  const detail::TensorSums lo = detail::tensor_sum(cls, w, modes, opts.order, op);
  const detail::TensorSums hi = detail::tensor_sum(cls, w, modes, 2 * opts.order, op);
  RadialAverage out;
  const CMatrix qlo = lo.numerator / lo.mass;
  out.q = hi.numerator / hi.mass;
  out.mass = hi.mass;
  out.order = 2 * opts.order;
  out.convergence_delta = std::max(max_abs(out.q - qlo), std::abs(hi.mass - lo.mass) / hi.mass);
  if (out.convergence_delta > opts.convergence_tolerance) {
    std::ostringstream msg;
    msg << "radial quadrature did not converge: orders " << opts.order << " and " << 2 * opts.order
        << " differ by " << out.convergence_delta << " (tolerance " << opts.convergence_tolerance
        << ")";
    throw QuadratureError(msg.str());
  }
  if (odd_moments) {
    odd_moments->clear();
    for (double v : hi.odd_moments) odd_moments->push_back(v / hi.mass);
  }
  return out;
}

/// Deterministic class-D rotation from the polar form of a seeded draw.
inline PolarForm fixed_class_d_rotation(int modes, const RngSpec& spec) {
  Engine rng = make_engine(spec);
  for (int attempt = 0; attempt < 100; ++attempt) {
    try {
      return polar_decompose(sample_class_d(modes, 1.0, rng));
    } catch (const DegenerateSpectrumError&) {
    }
  }
  throw DegenerateSpectrumError("fixed_class_d_rotation: could not draw a nondegenerate matrix");
}

inline CMatrix fixed_haar_rotation(int modes, const RngSpec& spec) {
  Engine rng = make_engine(spec);
  return sample_haar_unitary(modes, rng);
}

/// Lambda for H = U^{-1} diag(lambda, -lambda) U.
inline FockOperator rotated_gaussian(const CMatrix& bogoliubov, const std::vector<double>& lam) {
  const int m = static_cast<int>(lam.size());
  Eigen::VectorXcd d(2 * m);
  for (int j = 0; j < m; ++j) {
    d(j) = lam[j];
    d(m + j) = -lam[j];
  }
  const CMatrix h = bogoliubov.adjoint() * d.asDiagonal() * bogoliubov;
  CMatrix hb = h.topLeftCorner(m, m);
  CMatrix db = h.topRightCorner(m, m);
  hb = 0.5 * (hb + hb.adjoint()).eval();
  db = 0.5 * (db - db.transpose()).eval();
  return gaussian_normalized(make_bdg(hb, db));
}

/// Lambda_N for h = U diag(lambda) U^dagger.
inline FockOperator rotated_number_conserving(const CMatrix& unitary, const std::vector<double>& lam) {
  const int m = static_cast<int>(lam.size());
  Eigen::VectorXcd d(m);
  for (int j = 0; j < m; ++j) d(j) = lam[j];
  CMatrix h = unitary * d.asDiagonal() * unitary.adjoint();
  h = 0.5 * (h + h.adjoint()).eval();
  return gaussian_number_conserving(h);
}

inline CMatrix identity_target(int modes) {
  const Eigen::Index dim = Eigen::Index{1} << modes;
  return CMatrix::Identity(dim, dim) / static_cast<double>(dim);
}

/// min over real c of max |Q - c I| (entrywise).
inline double distance_from_identity_multiple(const CMatrix& q) {
  double off = 0.0;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  double imag = 0.0;
  for (Eigen::Index i = 0; i < q.rows(); ++i) {
    for (Eigen::Index j = 0; j < q.cols(); ++j) {
      if (i == j) {
        lo = std::min(lo, q(i, i).real());
        hi = std::max(hi, q(i, i).real());
        imag = std::max(imag, std::abs(q(i, i).imag()));
      } else {
        off = std::max(off, std::abs(q(i, j)));
      }
    }
  }
  const double spread = 0.5 * (hi - lo);
  return std::max({off, std::hypot(spread, imag)});
}

/// Closed-form mass of the class-D radial integral, when one exists.
inline std::optional<double> class_d_closed_form_mass_log(const SymmetryClass& cls,
                                                          const WeightSpec& w, int modes) {
  if (cls.label != ClassLabel::D) return std::nullopt;
  if (w.kind == WeightKind::gaussian) return radial_gaussian_integral_log(modes, w.p);
  if (w.kind == WeightKind::determinant) return radial_determinant_integral_log(modes, w.p);
  return std::nullopt;
}

/// log of the constant C in P = C * weight, when one exists.
inline std::optional<double> class_d_norm_const_log(const SymmetryClass& cls, const WeightSpec& w,
                                                    int modes) {
  if (cls.label != ClassLabel::D) return std::nullopt;
  if (w.kind == WeightKind::gaussian) return norm_const_gauss_log(modes, w.p);
  if (w.kind == WeightKind::determinant) return norm_const_det_log(modes, w.p);
  return std::nullopt;
}

/// Radial quadrature of the rotated normalized Gaussian operator against the
/// normalized class density. Target 2^{-M} I to kQuadratureTolerance, with
/// the same result required for a second, independent rotation.
inline EstimatorReport verify_resolution_quadrature(int modes, const SymmetryClass& cls,
                                                    const WeightSpec& w,
                                                    const std::optional<PolarForm>& rotation,
                                                    const QuadratureOptions& opts = {},
                                                    const RngSpec& second_rotation = {20240601, 1}) {
  if (modes < 1 || modes > 2) throw ContractError("verify_resolution_quadrature: requires 1 <= M <= 2");
  if (w.hermitian_jacobian()) {
    throw ContractError("verify_resolution_quadrature: number-conserving weights use verify_nc_*");
  }
  if (!w.is_even() && !opts.allow_non_even) {
    throw ContractError(
        "verify_resolution_quadrature: the weight must be an even function of every eigenvalue");
  }
  w.validate(modes);

  const CMatrix first_u =
      rotation ? rotation->bogoliubov : CMatrix(CMatrix::Identity(2 * modes, 2 * modes));
  const PolarForm second = fixed_class_d_rotation(modes, second_rotation);

  std::vector<double> odd;
  const RadialAverage a = radial_quadrature_average(
      cls, w, modes, [&](const std::vector<double>& l) { return rotated_gaussian(first_u, l).matrix(); },
      opts, &odd);
  const RadialAverage b = radial_quadrature_average(
      cls, w, modes,
      [&](const std::vector<double>& l) { return rotated_gaussian(second.bogoliubov, l).matrix(); },
      opts);

  EstimatorReport r;
  r.name = "resolution_quadrature";
  r.modes = modes;
  r.target = identity_target(modes);
  r.mean = a.q;
  r.max_abs_deviation = max_abs(a.q - r.target);
  r.frobenius_deviation = (a.q - r.target).norm();
  r.tolerance = kQuadratureTolerance;
  r.checks.push_back(make_check("rotation_independence", max_abs(a.q - b.q), "<=", kQuadratureTolerance));
  r.checks.push_back(make_check("quadrature_convergence", std::max(a.convergence_delta, b.convergence_delta),
                                "<=", opts.convergence_tolerance));
  double odd_max = 0.0;
  for (double v : odd) odd_max = std::max(odd_max, std::abs(v));
  r.checks.push_back(make_check("odd_moments_vanish", odd_max, "<=", 1e-10));
  if (auto mass_log = class_d_closed_form_mass_log(cls, w, modes)) {
    const double c_log = *class_d_norm_const_log(cls, w, modes);
    const double total = std::exp(-modes * std::log(2.0) + angular_volume_log(modes) + c_log +
                                  std::log(a.mass));
    r.checks.push_back(make_check("closed_form_normalization", std::abs(total - 1.0), "<=", 1e-8));
    r.checks.push_back(make_check("radial_mass_vs_closed_form",
                                  std::abs(a.mass / std::exp(*mass_log) - 1.0), "<=", 1e-8));
  }
  std::ostringstream crit;
  crit << "max |Q - 2^-M I| <= " << kQuadratureTolerance << " with class " << cls.name() << ", weight "
       << w.name() << "(p=" << w.p << "), order " << a.order;
  r.criterion = crit.str();
  if (!w.is_even()) r.warnings.push_back("weight is not even: the identity is not expected to hold");
  r.passed = r.max_abs_deviation <= kQuadratureTolerance;
  for (const auto& c : r.checks) r.passed = r.passed && c.passed;
  return r;
}

/// Number-conserving even weight: the average misses every multiple of the
/// identity by at least failure_floor.
inline EstimatorReport verify_nc_failure(int modes, double p, double failure_floor,
                                         const QuadratureOptions& opts = {},
                                         const RngSpec& rotation_seed = {20240601, 7}) {
  if (modes < 1 || modes > 2) throw ContractError("verify_nc_failure: requires 1 <= M <= 2");
  const WeightSpec w = WeightSpec::nc_even(p);
  w.validate(modes);
  const CMatrix u = fixed_haar_rotation(modes, rotation_seed);
  const RadialAverage a = radial_quadrature_average(
      symmetry_class(ClassLabel::D), w, modes,
      [&](const std::vector<double>& l) { return rotated_number_conserving(u, l).matrix(); }, opts);

  const CMatrix basis = bogoliubov_fock_basis(number_conserving_bogoliubov(u));
  const CMatrix in_b = basis.adjoint() * a.q * basis;
  const CMatrix off = in_b - CMatrix(in_b.diagonal().asDiagonal());

  EstimatorReport r;
  r.name = "nc_failure";
  r.modes = modes;
  r.target = identity_target(modes);
  r.mean = a.q;
  r.max_abs_deviation = distance_from_identity_multiple(a.q);
  r.frobenius_deviation = (a.q - r.target).norm();
  r.tolerance = failure_floor;
  r.checks.push_back(make_check("quadrature_convergence", a.convergence_delta, "<=", opts.convergence_tolerance));
  r.checks.push_back(make_check("residual_in_number_sector", max_abs(off), "<=", 1e-9));
  std::ostringstream crit;
  crit << "min_c max|Q - cI| >= failure_floor = " << failure_floor;
  r.criterion = crit.str();
  r.passed = r.max_abs_deviation >= failure_floor;
  for (const auto& c : r.checks) r.passed = r.passed && c.passed;
  return r;
}

struct McOptions {
  int workers = 1;
  long chunk = 8192;
  bool dump_eigenvalues = false;
};

namespace detail {

struct McChunk {
  MatrixAccumulator acc;
  std::vector<RVector> lambdas;
  std::vector<std::string> warnings;

  void merge(const McChunk& o) {
    acc.merge(o.acc);
    lambdas.insert(lambdas.end(), o.lambdas.begin(), o.lambdas.end());
    warnings.insert(warnings.end(), o.warnings.begin(), o.warnings.end());
  }
};

inline Eigen::MatrixXd stack_rows(const std::vector<RVector>& rows, int modes) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), modes);
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = rows[i].transpose();
  return out;
}

inline void finish_mc_report(EstimatorReport& r, const MatrixAccumulator& acc) {
  r.mean = acc.mean();
  r.per_entry_se = acc.standard_error();
  const SeGate gate = standard_error_gate(r.mean, r.target, r.per_entry_se);
  r.max_abs_deviation = gate.max_abs_deviation;
  r.frobenius_deviation = (r.mean - r.target).norm();
  r.band_count = gate.band_3_to_5se;
  r.tolerance = kSeMultiplier;
  r.checks.push_back(make_check("entries_outside_5se", gate.outside_5se, "<=", 0));
  r.checks.push_back(make_check("entries_in_3_to_5se_band", gate.band_3_to_5se, "<=", 0.01 * gate.entries));
  r.criterion = "every entry within 5 SE of 2^-M I, at most 1% of entries between 3 and 5 SE";
  r.passed = gate.passed;
}

}  // namespace detail

/// Monte Carlo average of Lambda(H) for H drawn from the class-D Gaussian ensemble.
inline EstimatorReport verify_resolution_mc(int modes, double p, long n_samples, const RngSpec& rng,
                                            const McOptions& opts = {}) {
  if (n_samples <= 0) throw ContractError("verify_resolution_mc: sample count must be positive");
  if (!(p > 0.0)) throw DomainError("verify_resolution_mc: p must be > 0");
  detail::check_mode_cap(modes, kDefaultModeCap);
  const Eigen::Index dim = Eigen::Index{1} << modes;

  auto chunk = [&](long c, long count) {
    detail::McChunk out{MatrixAccumulator(dim), {}, {}};
    Engine eng = make_engine(rng.substream(static_cast<std::uint64_t>(c)));
    for (long s = 0; s < count; ++s) {
      const BdgMatrix h = sample_class_d(modes, p, eng);
      out.acc.add(gaussian_normalized(h).matrix());
      if (opts.dump_eigenvalues) out.lambdas.push_back(paired_spectrum(h));
    }
    return out;
  };
  const detail::McChunk all = run_chunked<detail::McChunk>(n_samples, opts.chunk, opts.workers, chunk);

  EstimatorReport r;
  r.name = "resolution_mc";
  r.modes = modes;
  r.target = identity_target(modes);
  r.samples = n_samples;
  r.seed = rng;
  detail::finish_mc_report(r, all.acc);
  if (opts.dump_eigenvalues) r.eigenvalue_dump = detail::stack_rows(all.lambdas, modes);
  return r;
}

struct CanonicalResult {
  std::vector<double> betas;
  std::vector<EstimatorReport> reports;
  std::vector<Check> pairwise;
  bool passed = false;
};

/// rho(beta) = E[exp(-beta H_hat)] / E[Tr exp(-beta H_hat)] over the class-D
/// Gaussian ensemble, one independent stream family per beta.
inline CanonicalResult verify_canonical_triviality(int modes, double p, const std::vector<double>& betas,
                                                   long n_samples, const RngSpec& rng,
                                                   const McOptions& opts = {}) {
  if (n_samples <= 0) throw ContractError("verify_canonical_triviality: sample count must be positive");
  if (!(p > 0.0)) throw DomainError("verify_canonical_triviality: p must be > 0");
  detail::check_mode_cap(modes, kDefaultModeCap);
  const Eigen::Index dim = Eigen::Index{1} << modes;

  struct Chunk {
    RatioAccumulator acc;
    std::vector<RVector> lambdas;
    void merge(const Chunk& o) {
      acc.merge(o.acc);
      lambdas.insert(lambdas.end(), o.lambdas.begin(), o.lambdas.end());
    }
  };

  CanonicalResult out;
  out.betas = betas;
  out.passed = true;
  const long chunks_per_beta = (n_samples + opts.chunk - 1) / opts.chunk;
  for (std::size_t b = 0; b < betas.size(); ++b) {
    const double beta = betas[b];
    const RngSpec base = rng.substream(static_cast<std::uint64_t>(b * chunks_per_beta));
    auto chunk = [&](long c, long count) {
      Chunk part{RatioAccumulator(dim), {}};
      Engine eng = make_engine(base.substream(static_cast<std::uint64_t>(c)));
      for (long s = 0; s < count; ++s) {
        const BdgMatrix h = sample_class_d(modes, p, eng);
        const FockOperator e = op_exp(quadratic_hamiltonian(h), -beta);
        part.acc.add(e.matrix(), e.trace().real());
        if (opts.dump_eigenvalues && b == 0) part.lambdas.push_back(paired_spectrum(h));
      }
      return part;
    };
    const Chunk all = run_chunked<Chunk>(n_samples, opts.chunk, opts.workers, chunk);

    EstimatorReport r;
    std::ostringstream name;
    name << "canonical_beta_" << beta;
    r.name = name.str();
    r.modes = modes;
    r.target = identity_target(modes);
    r.samples = n_samples;
    r.seed = base;
    r.mean = all.acc.ratio();
    r.per_entry_se = all.acc.standard_error();
    const SeGate gate = standard_error_gate(r.mean, r.target, r.per_entry_se);
    r.max_abs_deviation = gate.max_abs_deviation;
    r.frobenius_deviation = (r.mean - r.target).norm();
    r.band_count = gate.band_3_to_5se;
    r.tolerance = kSeMultiplier;
    r.checks.push_back(make_check("entries_outside_5se", gate.outside_5se, "<=", 0));
    r.checks.push_back(make_check("entries_in_3_to_5se_band", gate.band_3_to_5se, "<=", 0.01 * gate.entries));
    r.passed = gate.passed;
    r.criterion = "every entry within 5 SE of 2^-M I, at most 1% of entries between 3 and 5 SE";
    if (beta == 0.0) {
      const Check exact = make_check("beta_zero_exact", r.max_abs_deviation, "<=", 1e-12);
      r.checks.push_back(exact);
      r.passed = r.passed && exact.passed;
    }
    if (opts.dump_eigenvalues && b == 0) r.eigenvalue_dump = detail::stack_rows(all.lambdas, modes);
    out.passed = out.passed && r.passed;
    out.reports.push_back(std::move(r));
  }

  for (std::size_t i = 0; i < out.reports.size(); ++i) {
    for (std::size_t j = i + 1; j < out.reports.size(); ++j) {
      const auto& a = out.reports[i];
      const auto& b = out.reports[j];
      const Eigen::MatrixXd se =
          (a.per_entry_se.array().square() + b.per_entry_se.array().square()).sqrt().matrix();
      const SeGate gate = standard_error_gate(a.mean, b.mean, se);
      std::ostringstream name;
      name << "consistent_beta_" << betas[i] << "_vs_" << betas[j];
      Check c = make_check(name.str(), gate.max_z, "<=", kSeMultiplier);
      c.passed = gate.passed;
      out.passed = out.passed && c.passed;
      out.pairwise.push_back(c);
    }
  }
  return out;
}

struct NcModifiedOptions {
  McOptions mc{1, 5000, false};
  McmcConfig mcmc{};
  int batch = 20;                     // thinned samples per batch mean
  std::uint64_t haar_stream_offset = 1u << 20;
};

/// Number-conserving operators with the modified (parity-restoring) weight:
/// lambda from MCMC, rotation from Haar, target 2^{-M} I.
inline EstimatorReport verify_nc_modified(int modes, double p, long n_samples, const RngSpec& rng,
                                          const NcModifiedOptions& opts = {}) {
  if (n_samples <= 0) throw ContractError("verify_nc_modified: sample count must be positive");
  const WeightSpec w = WeightSpec::nc_modified(p);
  w.validate(modes);
  detail::check_mode_cap(modes, kDefaultModeCap);
  const Eigen::Index dim = Eigen::Index{1} << modes;
  const SymmetryClass cls = symmetry_class(ClassLabel::D);

  auto chunk = [&](long c, long count) {
    detail::McChunk out{MatrixAccumulator(dim), {}, {}};
    Engine chain_rng = make_engine(rng.substream(static_cast<std::uint64_t>(c)));
    Engine haar_rng = make_engine(rng.substream(opts.haar_stream_offset + static_cast<std::uint64_t>(c)));
    const RadialChain chain = sample_radial_mcmc(cls, w, modes, static_cast<int>(count), chain_rng, opts.mcmc);
    if (!chain.warning.empty()) out.warnings.push_back(chain.warning);
    CMatrix batch_sum = CMatrix::Zero(dim, dim);
    int in_batch = 0;
    std::vector<double> lam(modes);
    for (long s = 0; s < count; ++s) {
      for (int j = 0; j < modes; ++j) lam[j] = chain.samples(s, j);
      const CMatrix u = sample_haar_unitary(modes, haar_rng);
      batch_sum += rotated_number_conserving(u, lam).matrix();
      if (opts.mc.dump_eigenvalues) out.lambdas.push_back(chain.samples.row(s).transpose());
      if (++in_batch == opts.batch) {
        out.acc.add(batch_sum / static_cast<double>(in_batch));
        batch_sum.setZero();
        in_batch = 0;
      }
    }
    if (in_batch > 0 && out.acc.count() == 0) out.acc.add(batch_sum / static_cast<double>(in_batch));
    return out;
  };
  const detail::McChunk all = run_chunked<detail::McChunk>(n_samples, opts.mc.chunk, opts.mc.workers, chunk);

  EstimatorReport r;
  r.name = "nc_modified";
  r.modes = modes;
  r.target = identity_target(modes);
  r.samples = n_samples;
  r.seed = rng;
  r.warnings = all.warnings;
  detail::finish_mc_report(r, all.acc);
  r.criterion += " (batch-means SE)";
  if (opts.mc.dump_eigenvalues) r.eigenvalue_dump = detail::stack_rows(all.lambdas, modes);
  return r;
}

}  // namespace fermigauss
