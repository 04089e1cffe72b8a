#pragma once

// One-dimensional Gauss rules used by the tensor-product radial integrals.

#include <cmath>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "fermigauss/errors.hpp"

namespace fermigauss {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;

  std::size_t size() const { return nodes.size(); }
};

/// Nodes and weights for int exp(-x^2) f(x) dx, via Golub-Welsch.
inline QuadratureRule gauss_hermite(int order) {
  if (order < 1) throw ContractError("gauss_hermite: order must be >= 1");
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(order);
  Eigen::VectorXd sub(order > 1 ? order - 1 : 0);
  for (int k = 1; k < order; ++k) sub(k - 1) = std::sqrt(0.5 * k);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig;
  eig.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
  QuadratureRule out;
  out.nodes.resize(order);
  out.weights.resize(order);
  const double mu0 = std::sqrt(std::numbers::pi);
  for (int k = 0; k < order; ++k) {
    out.nodes[k] = eig.eigenvalues()(k);
    const double v = eig.eigenvectors()(0, k);
    out.weights[k] = mu0 * v * v;
  }
  // Symmetrize so that odd integrands cancel to rounding.
  for (int k = 0; k < order / 2; ++k) {
    const int r = order - 1 - k;
    const double x = 0.5 * (out.nodes[r] - out.nodes[k]);
    const double w = 0.5 * (out.weights[r] + out.weights[k]);
    out.nodes[k] = -x;
    out.nodes[r] = x;
    out.weights[k] = out.weights[r] = w;
  }
  if (order % 2 == 1) out.nodes[order / 2] = 0.0;
  return out;
}

/// Gauss-Legendre nodes and weights on [-1, 1] (Newton on P_n).
inline QuadratureRule gauss_legendre(int order) {
  if (order < 1) throw ContractError("gauss_legendre: order must be >= 1");
  QuadratureRule out;
  out.nodes.resize(order);
  out.weights.resize(order);
  const int half = (order + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = 0.0;
      for (int k = 1; k <= order; ++k) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p2) / k;
      }
      dp = order * (x * p0 - p1) / (x * x - 1.0);
      const double dx = p0 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    double p0 = 1.0, p1 = 0.0;
    for (int k = 1; k <= order; ++k) {
      const double p2 = p1;
      p1 = p0;
      p0 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p2) / k;
    }
    dp = order * (x * p0 - p1) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    out.nodes[i] = -x;
    out.nodes[order - 1 - i] = x;
    out.weights[i] = out.weights[order - 1 - i] = w;
  }
  return out;
}

/// Rule for int_R f(lambda) dlambda built from two mirrored copies of
/// lambda = scale * tan(theta), theta in (0, pi/2), Gauss-Legendre in theta.
/// Nodes come in exact +/- pairs with equal weights.
inline QuadratureRule mirrored_tan_legendre(int half_order, double scale) {
  const QuadratureRule gl = gauss_legendre(half_order);
  QuadratureRule out;
  out.nodes.reserve(2 * gl.size());
  out.weights.reserve(2 * gl.size());
  const double q = 0.25 * std::numbers::pi;
  for (std::size_t k = 0; k < gl.size(); ++k) {
    const double theta = q * (1.0 + gl.nodes[k]);
    const double c = std::cos(theta);
    const double lam = scale * std::tan(theta);
    const double w = gl.weights[k] * q * scale / (c * c);
    out.nodes.push_back(-lam);
    out.weights.push_back(w);
    out.nodes.push_back(lam);
    out.weights.push_back(w);
  }
  return out;
}

}  // namespace fermigauss
