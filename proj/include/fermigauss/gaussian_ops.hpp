#pragma once

// Hermitian fermionic Gaussian operators: normalization, polar form,
// number-conserving subgroup, Green's-function parameterization and the
// group composition laws.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "fermigauss/bdg_matrix.hpp"
#include "fermigauss/errors.hpp"
#include "fermigauss/fock_kernel.hpp"

namespace fermigauss {

inline constexpr double kDefaultPairTolerance = 1e-8;

/// Radial/angular decomposition H = U^{-1} diag(lambda, -lambda) U, with
/// (b, b^dagger) = U (a, a^dagger). lambdas are nonnegative and ascending.
struct PolarForm {
  RVector lambdas;
  CMatrix bogoliubov;
  double pair_tolerance = kDefaultPairTolerance;

  int modes() const { return static_cast<int>(lambdas.size()); }

  /// U^{-1} diag(lambda, -lambda) U.
  CMatrix reconstruct() const {
    const int m = modes();
    Eigen::VectorXcd d(2 * m);
    d.head(m) = lambdas.cast<Complex>();
    d.tail(m) = -lambdas.cast<Complex>();
    return bogoliubov.adjoint() * d.asDiagonal() * bogoliubov;
  }
};

struct GreensPair {
  CMatrix n;
  CMatrix n_tilde;
};

/// Result of composing two generators. For non-commuting hermitian inputs
/// the logarithm of the product is generally not hermitian; that is flagged,
/// not rejected.
struct ComposedGenerator {
  CMatrix matrix;
  bool hermitian = false;
  double hermiticity_defect = 0.0;
};

/// The M nonnegative members of the +/- eigenvalue pairs, ascending.
inline RVector paired_spectrum(const BdgMatrix& h) {
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(h.assembled(), Eigen::EigenvaluesOnly);
  const int m = h.modes();
  RVector out = eig.eigenvalues().tail(m).cwiseAbs();
  std::sort(out.data(), out.data() + m);
  return out;
}

/// Diagonalizes the assembled matrix into +/- pairs with a Bogoliubov
/// transformation that preserves the canonical anticommutators.
inline PolarForm polar_decompose(const BdgMatrix& h, double pair_tolerance = kDefaultPairTolerance) {
  const int m = h.modes();
  const CMatrix assembled = h.assembled();
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(assembled);
  const RVector& ev = eig.eigenvalues();

  for (int k = 0; k + 1 < 2 * m; ++k) {
    if (ev(k + 1) - ev(k) < pair_tolerance) {
      std::ostringstream msg;
      msg << "polar_decompose: eigenvalues " << ev(k) << " and " << ev(k + 1)
          << " are closer than the pair tolerance " << pair_tolerance
          << "; the +/- pairing is ambiguous, perturb the matrix";
      throw DegenerateSpectrumError(msg.str());
    }
  }
  for (int j = 0; j < m; ++j) {
    const double mismatch = std::abs(ev(m + j) + ev(m - 1 - j));
    if (mismatch > pair_tolerance) {
      std::ostringstream msg;
      msg << "polar_decompose: spectrum is not symmetric (" << ev(m + j) << " vs " << ev(m - 1 - j)
          << ")";
      throw DegenerateSpectrumError(msg.str());
    }
  }

  // Columns: positive-eigenvalue eigenvectors w_j, then their particle-hole
  // partners sigma w_j^*, which carry -lambda_j.
  const CMatrix s = sigma_x(m);
  CMatrix w(2 * m, 2 * m);
  PolarForm out;
  out.pair_tolerance = pair_tolerance;
  out.lambdas.resize(m);
  for (int j = 0; j < m; ++j) {
    const Eigen::VectorXcd col = eig.eigenvectors().col(m + j);
    w.col(j) = col;
    w.col(m + j) = s * col.conjugate();
    out.lambdas(j) = ev(m + j);
  }
  out.bogoliubov = w.adjoint();
  return out;
}

/// Lambda(H) = exp(H_hat) / Tr exp(H_hat); the divisor is the exact Fock trace.
inline FockOperator gaussian_normalized(const BdgMatrix& h, int cap = kDefaultModeCap) {
  const FockOperator hop = quadratic_hamiltonian(h, cap);
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(hop.matrix());
  const RVector& d = eig.eigenvalues();
  RVector w = (d.array() - d.maxCoeff()).exp().matrix();
  w /= w.sum();
  const CMatrix& v = eig.eigenvectors();
  CMatrix out = v * w.cast<Complex>().asDiagonal() * v.adjoint();
  out = 0.5 * (out + out.adjoint()).eval();
  return FockOperator(h.modes(), std::move(out), true);
}

/// prod_j 2 cosh(lambda_j / 2), the Fock trace of exp(H_hat).
inline double trace_formula(const BdgMatrix& h) {
  const RVector lam = paired_spectrum(h);
  double out = 1.0;
  for (Eigen::Index j = 0; j < lam.size(); ++j) out *= 2.0 * std::cosh(0.5 * lam(j));
  return out;
}

/// det[2 cosh(H/2)] over the full 2M x 2M matrix, through the matrix cosh.
/// Its square root equals trace_formula.
inline double cosh_determinant(const BdgMatrix& h) {
  const CMatrix c = (0.5 * h.assembled()).cosh();
  return (2.0 * c).determinant().real();
}

/// exp(a^dag h a - Tr(h)/2) for an arbitrary complex M x M matrix h.
inline FockOperator number_conserving_gaussian(const CMatrix& h, int cap = kDefaultModeCap) {
  const int m = static_cast<int>(h.rows());
  const FockOperator bil = number_bilinear(h, cap);
  const Complex shift = 0.5 * h.trace();
  CMatrix gen = bil.matrix() - shift * CMatrix::Identity(bil.dim(), bil.dim());
  return op_exp_general(FockOperator(m, std::move(gen)));
}

/// Normalized number-conserving operator e^{-Tr h/2} exp(a^dag h a) / det[2 cosh(h/2)].
inline FockOperator gaussian_number_conserving(const CMatrix& h, int cap = kDefaultModeCap) {
  if (h.rows() != h.cols() || h.rows() == 0) {
    throw StructuralError("gaussian_number_conserving: h must be square and nonempty");
  }
  const double herm = max_abs(h - h.adjoint());
  if (herm > kStructureTolerance) {
    std::ostringstream msg;
    msg << "gaussian_number_conserving: h is not hermitian (max |h - h^dagger| = " << herm << ")";
    throw StructuralError(msg.str());
  }
  const int m = static_cast<int>(h.rows());
  const FockOperator bil = number_bilinear(h, cap);
  const double half_trace = 0.5 * h.trace().real();
  CMatrix gen = bil.matrix() - half_trace * CMatrix::Identity(bil.dim(), bil.dim());
  gen = 0.5 * (gen + gen.adjoint()).eval();
  const FockOperator e = op_exp(FockOperator(m, std::move(gen), true), 1.0);

  Eigen::SelfAdjointEigenSolver<CMatrix> eig(h, Eigen::EigenvaluesOnly);
  double divisor = 1.0;
  for (Eigen::Index k = 0; k < m; ++k) divisor *= 2.0 * std::cosh(0.5 * eig.eigenvalues()(k));
  return (1.0 / divisor) * e;
}

/// n_tilde = (I + e^{h^T})^{-1}, n = I - n_tilde.
inline GreensPair greens_parameterization(const CMatrix& h) {
  const double herm = max_abs(h - h.adjoint());
  if (herm > kStructureTolerance) {
    throw StructuralError("greens_parameterization: h is not hermitian");
  }
  const Eigen::Index m = h.rows();
  const CMatrix id = CMatrix::Identity(m, m);
  GreensPair out;
  out.n_tilde = (id + CMatrix(h.transpose()).exp()).inverse();
  out.n = id - out.n_tilde;
  return out;
}

/// det[n_tilde] :exp[a^dag (n_tilde^{-1} - 2I)^T a]:, built from the normal-ordered sum.
inline FockOperator greens_operator(const GreensPair& g, int cap = kDefaultModeCap) {
  const Eigen::Index m = g.n_tilde.rows();
  const CMatrix inv = g.n_tilde.inverse();
  const CMatrix b = (inv - 2.0 * CMatrix::Identity(m, m)).transpose();
  const Complex det = g.n_tilde.determinant();
  return det * normal_ordered_exp(b, cap);
}

namespace detail {

inline double spectral_norm(const CMatrix& a) {
  Eigen::JacobiSVD<CMatrix> svd(a);
  return svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
}

inline CMatrix principal_log_of_product(const CMatrix& x1, const CMatrix& x2, const char* who) {
  const double norm = spectral_norm(x1) + spectral_norm(x2);
  if (norm >= std::numbers::pi) {
    std::ostringstream msg;
    msg << who << ": spectral norms sum to " << norm
        << " >= pi; composition is restricted to the principal-branch region";
    throw BranchError(msg.str());
  }
  const CMatrix g = x1.exp() * x2.exp();
  Eigen::ComplexEigenSolver<CMatrix> eig(g, false);
  for (Eigen::Index k = 0; k < eig.eigenvalues().size(); ++k) {
    const Complex z = eig.eigenvalues()(k);
    if (std::abs(std::arg(z)) > std::numbers::pi - 1e-8 || std::abs(z) < 1e-300) {
      std::ostringstream msg;
      msg << who << ": product has eigenvalue " << z << " on the branch cut";
      throw BranchError(msg.str());
    }
  }
  return g.log();
}

inline ComposedGenerator flag_hermitian(CMatrix m) {
  ComposedGenerator out;
  out.hermiticity_defect = max_abs(m - m.adjoint());
  out.hermitian = out.hermiticity_defect <= kStructureTolerance;
  out.matrix = std::move(m);
  return out;
}

}  // namespace detail

/// H with exp(H) = exp(H1) exp(H2), principal branch.
inline ComposedGenerator compose_general(const BdgMatrix& h1, const BdgMatrix& h2) {
  if (h1.modes() != h2.modes()) throw ContractError("compose_general: mode counts differ");
  return detail::flag_hermitian(
      detail::principal_log_of_product(h1.assembled(), h2.assembled(), "compose_general"));
}

/// h with e^h = e^{h1} e^{h2}, principal branch.
inline ComposedGenerator compose_number_conserving(const CMatrix& h1, const CMatrix& h2) {
  if (h1.rows() != h2.rows() || h1.rows() != h1.cols() || h2.rows() != h2.cols()) {
    throw ContractError("compose_number_conserving: shapes differ");
  }
  return detail::flag_hermitian(
      detail::principal_log_of_product(h1, h2, "compose_number_conserving"));
}

/// Unitary whose columns are the b-occupation states |n>_b, in the same
/// bitstring order as the a-basis, for (b, b^dagger) = U (a, a^dagger).
inline CMatrix bogoliubov_fock_basis(const CMatrix& u, int cap = kDefaultModeCap) {
  const int m = static_cast<int>(u.rows() / 2);
  const auto alg = mode_algebra(m, cap);
  const Eigen::Index dim = alg->dim();
  std::vector<CMatrix> b(m, CMatrix::Zero(dim, dim));
  for (int j = 0; j < m; ++j) {
    for (int k = 0; k < m; ++k) {
      b[j] += u(j, k) * alg->annihilators[k] + u(j, m + k) * alg->creators[k];
    }
  }
  CMatrix number = CMatrix::Zero(dim, dim);
  for (int j = 0; j < m; ++j) number += b[j].adjoint() * b[j];
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(0.5 * (number + number.adjoint()));
  const Eigen::VectorXcd vacuum = eig.eigenvectors().col(0);

  CMatrix basis(dim, dim);
  for (Eigen::Index n = 0; n < dim; ++n) {
    Eigen::VectorXcd state = vacuum;
    for (int j = m - 1; j >= 0; --j) {
      if ((n >> j) & 1) state = b[j].adjoint() * state;
    }
    basis.col(n) = state / state.norm();
  }
  return basis;
}

/// 2M x 2M Bogoliubov matrix for the number-conserving rotation b = U^dagger a.
inline CMatrix number_conserving_bogoliubov(const CMatrix& unitary) {
  const Eigen::Index m = unitary.rows();
  CMatrix out = CMatrix::Zero(2 * m, 2 * m);
  out.topLeftCorner(m, m) = unitary.adjoint();
  out.bottomRightCorner(m, m) = unitary.transpose();
  return out;
}

/// Eigenvalues of Lambda in the b-basis: prod_j e^{+-lambda_j/2} / (2 cosh(lambda_j/2)).
inline RVector diagonal_form_weights(const RVector& lambdas) {
  const Eigen::Index m = lambdas.size();
  const Eigen::Index dim = Eigen::Index{1} << m;
  RVector out(dim);
  for (Eigen::Index n = 0; n < dim; ++n) {
    double v = 1.0;
    for (Eigen::Index j = 0; j < m; ++j) {
      const double l = lambdas(j);
      const double num = ((n >> j) & 1) ? std::exp(0.5 * l) : std::exp(-0.5 * l);
      v *= num / (2.0 * std::cosh(0.5 * l));
    }
    out(n) = v;
  }
  return out;
}

}  // namespace fermigauss
