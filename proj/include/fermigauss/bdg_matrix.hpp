#pragma once

#include <complex>
#include <sstream>
#include <string>
#include <utility>

#include <Eigen/Dense>

#include "fermigauss/errors.hpp"

namespace fermigauss {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;

/// Tolerance used when validating block structure of user-supplied matrices.
inline constexpr double kStructureTolerance = 1e-10;

inline double max_abs(const CMatrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

/// The 2M x 2M matrix [[0, I], [I, 0]].
inline CMatrix sigma_x(int modes) {
  CMatrix s = CMatrix::Zero(2 * modes, 2 * modes);
  s.topRightCorner(modes, modes).setIdentity();
  s.bottomLeftCorner(modes, modes).setIdentity();
  return s;
}

/// Largest violation of -X^dagger = X = -Sigma_x X^T Sigma_x for X = iH.
inline double class_d_violation(const CMatrix& assembled) {
  const int modes = static_cast<int>(assembled.rows() / 2);
  const CMatrix x = Complex(0.0, 1.0) * assembled;
  const CMatrix s = sigma_x(modes);
  const double anti_hermitian = max_abs(x + x.adjoint());
  const double particle_hole = max_abs(x + s * x.transpose() * s);
  return std::max(anti_hermitian, particle_hole);
}

/// Hermitian Bogoliubov-de Gennes matrix H = [[h, D], [-D*, -h^T]] with
/// h hermitian and D skew-symmetric. Only constructible through make_bdg.
class BdgMatrix {
 public:
  int modes() const { return static_cast<int>(h_.rows()); }
  const CMatrix& h() const { return h_; }
  const CMatrix& delta() const { return delta_; }

  CMatrix assembled() const {
    const int m = modes();
    CMatrix out(2 * m, 2 * m);
    out.topLeftCorner(m, m) = h_;
    out.topRightCorner(m, m) = delta_;
    out.bottomLeftCorner(m, m) = -delta_.conjugate();
    out.bottomRightCorner(m, m) = -h_.transpose();
    return out;
  }

 private:
  BdgMatrix(CMatrix h, CMatrix delta) : h_(std::move(h)), delta_(std::move(delta)) {}

  friend BdgMatrix make_bdg(const CMatrix& h, const CMatrix& delta);

  CMatrix h_;
  CMatrix delta_;
};

/// Validates (h, delta) and packs them. Nothing is symmetrized: inputs that
/// miss hermiticity or skew-symmetry by more than kStructureTolerance throw.
inline BdgMatrix make_bdg(const CMatrix& h, const CMatrix& delta) {
  if (h.rows() != h.cols() || delta.rows() != delta.cols() || h.rows() != delta.rows() ||
      h.rows() == 0) {
    std::ostringstream msg;
    msg << "make_bdg: blocks must be square and equal-sized, got h " << h.rows() << "x" << h.cols()
        << " and delta " << delta.rows() << "x" << delta.cols();
    throw StructuralError(msg.str());
  }
  const double herm = max_abs(h - h.adjoint());
  if (herm > kStructureTolerance) {
    std::ostringstream msg;
    msg << "make_bdg: block h is not hermitian (max |h - h^dagger| = " << herm << ")";
    throw StructuralError(msg.str());
  }
  const double skew = max_abs(delta + delta.transpose());
  if (skew > kStructureTolerance) {
    std::ostringstream msg;
    msg << "make_bdg: block delta is not skew-symmetric (max |delta + delta^T| = " << skew << ")";
    throw StructuralError(msg.str());
  }
  BdgMatrix out(h, delta);
  const double violation = class_d_violation(out.assembled());
  if (violation > kStructureTolerance) {
    std::ostringstream msg;
    msg << "make_bdg: assembled matrix violates the class-D constraint by " << violation;
    throw StructuralError(msg.str());
  }
  return out;
}

/// Builds H = sigma R from an antisymmetric 2M x 2M matrix R.
inline BdgMatrix make_bdg_from_r(const CMatrix& r) {
  if (r.rows() != r.cols() || r.rows() == 0 || r.rows() % 2 != 0) {
    throw StructuralError("make_bdg_from_r: R must be square with even, nonzero dimension");
  }
  const double anti = max_abs(r + r.transpose());
  if (anti > kStructureTolerance) {
    std::ostringstream msg;
    msg << "make_bdg_from_r: R is not antisymmetric (max |R + R^T| = " << anti << ")";
    throw StructuralError(msg.str());
  }
  const int m = static_cast<int>(r.rows() / 2);
  const CMatrix hm = sigma_x(m) * r;
  const CMatrix h = hm.topLeftCorner(m, m);
  const CMatrix delta = hm.topRightCorner(m, m);
  const double lower_left = max_abs(hm.bottomLeftCorner(m, m) + delta.conjugate());
  const double lower_right = max_abs(hm.bottomRightCorner(m, m) + h.transpose());
  const double herm = max_abs(hm - hm.adjoint());
  if (lower_left > kStructureTolerance || lower_right > kStructureTolerance ||
      herm > kStructureTolerance) {
    std::ostringstream msg;
    msg << "make_bdg_from_r: sigma R is not hermitian (max |H - H^dagger| = " << herm
        << ", lower-left block mismatch " << lower_left << ", lower-right block mismatch "
        << lower_right << ")";
    throw StructuralError(msg.str());
  }
  return make_bdg(h, delta);
}

}  // namespace fermigauss
