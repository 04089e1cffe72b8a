#pragma once

// Randomized operator-identity sweeps. Each returns the worst observed
// error as a Check against its pinned tolerance.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fermigauss/ensembles.hpp"
#include "fermigauss/estimator.hpp"
#include "fermigauss/fock_kernel.hpp"
#include "fermigauss/gaussian_ops.hpp"
#include "fermigauss/rng.hpp"

namespace fermigauss {

/// Hermitian matrix with independent unit-variance complex entries.
inline CMatrix random_hermitian(int m, Engine& rng, double scale = 1.0) {
  std::normal_distribution<double> normal(0.0, 1.0);
  CMatrix a(m, m);
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < m; ++i) a(i, j) = Complex(normal(rng), normal(rng));
  return scale * 0.5 * (a + a.adjoint());
}

/// Rescales to a spectral norm drawn uniformly from [lo, hi].
inline CMatrix with_spectral_norm(const CMatrix& a, Engine& rng, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  Eigen::JacobiSVD<CMatrix> svd(a);
  const double n = svd.singularValues()(0);
  return a * (u(rng) / n);
}

inline BdgMatrix small_norm_bdg(int m, Engine& rng) {
  const BdgMatrix h = sample_class_d(m, 1.0, rng);
  Eigen::JacobiSVD<CMatrix> svd(h.assembled());
  std::uniform_real_distribution<double> u(0.2, 1.4);
  const double s = u(rng) / svd.singularValues()(0);
  return make_bdg(s * h.h(), s * h.delta());
}

inline Check check_anticommutation(int max_modes) {
  double worst = 0.0;
  for (int m = 1; m <= max_modes; ++m) {
    const auto ops = build_mode_operators(m);
    const Eigen::Index dim = Eigen::Index{1} << m;
    const CMatrix id = CMatrix::Identity(dim, dim);
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < m; ++j) {
        const CMatrix& ai = ops[i].matrix();
        const CMatrix& aj = ops[j].matrix();
        const CMatrix mixed = anticommutator(ai, aj.adjoint()) - (i == j ? id : CMatrix::Zero(dim, dim));
        worst = std::max({worst, max_abs(mixed), max_abs(anticommutator(ai, aj))});
      }
    }
  }
  return make_check("anticommutation_max_error", worst, "<=", 1e-13);
}

/// exp(a^dag h a) against :exp[a^dag (e^h - I) a]: for random hermitian h.
inline Check check_normal_ordering(int trials, int max_modes, Engine& rng) {
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    const int m = 1 + t % std::min(max_modes, 3);
    const CMatrix h = random_hermitian(m, rng, 0.7);
    const FockOperator bil = number_bilinear(h);
    const CMatrix herm = 0.5 * (bil.matrix() + bil.matrix().adjoint());
    const FockOperator lhs = op_exp(FockOperator(m, herm, true), 1.0);
    const CMatrix b = h.exp() - CMatrix::Identity(m, m);
    const FockOperator rhs = normal_ordered_exp(b);
    worst = std::max(worst, max_abs(lhs.matrix() - rhs.matrix()));
  }
  return make_check("normal_ordering_max_error", worst, "<=", 1e-9);
}

/// Fock trace of exp(H_hat), prod 2cosh(lambda/2) and sqrt(det[2cosh(H/2)]).
inline Check check_trace_formula(int trials, int max_modes, Engine& rng) {
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    const int m = 1 + t % max_modes;
    const BdgMatrix h = sample_class_d(m, 0.5, rng);
    const double fock = op_exp(quadratic_hamiltonian(h), 1.0).trace().real();
    const double formula = trace_formula(h);
    const double det_root = std::sqrt(cosh_determinant(h));
    worst = std::max({worst, std::abs(formula / fock - 1.0), std::abs(det_root / fock - 1.0),
                      std::abs(det_root / formula - 1.0)});
  }
  return make_check("trace_formula_max_relative_error", worst, "<=", 1e-9);
}

inline std::vector<Check> check_positivity_and_trace(int trials, int max_modes, Engine& rng) {
  double min_eig = std::numeric_limits<double>::infinity();
  double trace_err = 0.0;
  for (int t = 0; t < trials; ++t) {
    const int m = 1 + t % max_modes;
    const FockOperator lam = gaussian_normalized(sample_class_d(m, 0.5, rng));
    Eigen::SelfAdjointEigenSolver<CMatrix> eig(lam.matrix(), Eigen::EigenvaluesOnly);
    min_eig = std::min(min_eig, eig.eigenvalues().minCoeff());
    trace_err = std::max(trace_err, std::abs(lam.trace() - 1.0));
  }
  return {make_check("normalized_min_eigenvalue", min_eig, ">=", -1e-12),
          make_check("normalized_trace_error", trace_err, "<=", 1e-12)};
}

/// exp(H_hat) = exp(H1_hat) exp(H2_hat) for H = log(e^{H1} e^{H2}).
inline Check check_composition_general(int trials, int max_modes, Engine& rng) {
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    const int m = 1 + t % max_modes;
    const BdgMatrix h1 = small_norm_bdg(m, rng);
    const BdgMatrix h2 = small_norm_bdg(m, rng);
    const ComposedGenerator c = compose_general(h1, h2);
    const FockOperator lhs = op_exp_general(quadratic_form(c.matrix));
    const FockOperator rhs = op_exp(quadratic_hamiltonian(h1), 1.0) * op_exp(quadratic_hamiltonian(h2), 1.0);
    const CMatrix group = c.matrix.exp() - h1.assembled().exp() * h2.assembled().exp();
    worst = std::max({worst, max_abs(lhs.matrix() - rhs.matrix()), max_abs(group)});
  }
  return make_check("composition_general_max_error", worst, "<=", 1e-9);
}

/// G_N(h) = G_N(h1) G_N(h2) for e^h = e^{h1} e^{h2}.
inline Check check_composition_number_conserving(int trials, int max_modes, Engine& rng) {
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    const int m = 1 + t % max_modes;
    const CMatrix h1 = with_spectral_norm(random_hermitian(m, rng), rng, 0.2, 1.4);
    const CMatrix h2 = with_spectral_norm(random_hermitian(m, rng), rng, 0.2, 1.4);
    const ComposedGenerator c = compose_number_conserving(h1, h2);
    const FockOperator lhs = number_conserving_gaussian(c.matrix);
    const FockOperator rhs = number_conserving_gaussian(h1) * number_conserving_gaussian(h2);
    worst = std::max(worst, max_abs(lhs.matrix() - rhs.matrix()));
  }
  return make_check("composition_number_conserving_max_error", worst, "<=", 1e-9);
}

inline Check check_embedding(int trials, int max_modes, Engine& rng) {
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    const int m = 1 + t % max_modes;
    const CMatrix h = random_hermitian(m, rng);
    const FockOperator a = gaussian_number_conserving(h);
    const FockOperator b = gaussian_normalized(make_bdg(h, CMatrix::Zero(m, m)));
    worst = std::max(worst, max_abs(a.matrix() - b.matrix()));
  }
  return make_check("number_conserving_embedding_max_error", worst, "<=", 1e-12);
}

inline Check check_greens(int trials, int max_modes, Engine& rng) {
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    const int m = 1 + t % std::min(max_modes, 3);
    const CMatrix h = random_hermitian(m, rng);
    const FockOperator rebuilt = greens_operator(greens_parameterization(h));
    worst = std::max(worst, max_abs(rebuilt.matrix() - gaussian_number_conserving(h).matrix()));
  }
  return make_check("greens_function_form_max_error", worst, "<=", 1e-9);
}

/// Lambda(H) in the Bogoliubov occupation basis is diagonal with the
/// product weights of the polar eigenvalues.
inline Check check_diagonal_form(int trials, int max_modes, Engine& rng) {
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    const int m = 1 + t % max_modes;
    const PolarForm polar = polar_decompose(sample_class_d(m, 0.5, rng));
    const BdgMatrix h = make_bdg(polar.reconstruct().topLeftCorner(m, m),
                                 polar.reconstruct().topRightCorner(m, m));
    const CMatrix basis = bogoliubov_fock_basis(polar.bogoliubov);
    const CMatrix in_b = basis.adjoint() * gaussian_normalized(h).matrix() * basis;
    const RVector expected = diagonal_form_weights(polar.lambdas);
    const CMatrix diff = in_b - CMatrix(expected.cast<Complex>().asDiagonal());
    worst = std::max(worst, max_abs(diff));
  }
  return make_check("diagonal_form_max_error", worst, "<=", 1e-9);
}

struct IdentitySuiteOptions {
  int modes = 3;
  int identity_trials = 50;
  int trace_trials = 100;
};

/// Everything above, with the trial counts of the acceptance gate.
inline std::vector<Check> run_identity_suite(const IdentitySuiteOptions& opts, const RngSpec& seed) {
  Engine rng = make_engine(seed);
  std::vector<Check> out;
  out.push_back(check_anticommutation(std::max(opts.modes, 4)));
  out.push_back(check_normal_ordering(opts.identity_trials, opts.modes, rng));
  out.push_back(check_trace_formula(opts.trace_trials, opts.modes, rng));
  for (auto& c : check_positivity_and_trace(opts.trace_trials, opts.modes, rng)) out.push_back(c);
  out.push_back(check_composition_general(opts.identity_trials, opts.modes, rng));
  out.push_back(check_composition_number_conserving(opts.identity_trials, opts.modes, rng));
  out.push_back(check_embedding(opts.identity_trials, opts.modes, rng));
  out.push_back(check_greens(opts.identity_trials, opts.modes, rng));
  out.push_back(check_diagonal_form(opts.identity_trials, opts.modes, rng));
  return out;
}

}  // namespace fermigauss
