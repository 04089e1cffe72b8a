#pragma once

// Independent constructions used only as test oracles.

#include <cmath>
#include <fstream>
#include <string>

#include <Eigen/Dense>
#include <json.hpp>

#include "fermigauss/bdg_matrix.hpp"

namespace oracle {

using fermigauss::CMatrix;
using fermigauss::Complex;

inline CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

/// Jordan-Wigner by tensor products: mode 0 is the rightmost factor.
inline CMatrix jw_annihilator(int modes, int j) {
  CMatrix lower(2, 2), z(2, 2), id = CMatrix::Identity(2, 2);
  lower << 0, 1, 0, 0;
  z << 1, 0, 0, -1;
  CMatrix out = CMatrix::Identity(1, 1);
  for (int k = modes - 1; k >= 0; --k) out = kron(out, k > j ? id : (k == j ? lower : z));
  return out;
}

/// 1/2 sum_kl gamma_k^dag H_kl gamma_l from the tensor-product operators.
inline CMatrix quadratic(const CMatrix& h2m) {
  const int m = static_cast<int>(h2m.rows() / 2);
  const Eigen::Index dim = Eigen::Index{1} << m;
  CMatrix out = CMatrix::Zero(dim, dim);
  auto g = [&](int k) -> CMatrix {
    return k < m ? jw_annihilator(m, k) : CMatrix(jw_annihilator(m, k - m).adjoint());
  };
  for (int k = 0; k < 2 * m; ++k)
    for (int l = 0; l < 2 * m; ++l) out += 0.5 * h2m(k, l) * g(k).adjoint() * g(l);
  return out;
}

inline nlohmann::json load_golden(const std::string& name) {
  std::ifstream f(std::string(FERMIGAUSS_GOLDEN_DIR) + "/" + name);
  return nlohmann::json::parse(f);
}

}  // namespace oracle
