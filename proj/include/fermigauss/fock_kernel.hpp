#pragma once

// Dense second-quantized machinery on the 2^M-dimensional Fock space.
//
// Basis states are occupation bitstrings in ascending order with mode j on
// bit j. The Jordan-Wigner sign string of a_j counts occupied modes with a
// lower index.

#include <bit>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "fermigauss/bdg_matrix.hpp"
#include "fermigauss/errors.hpp"

namespace fermigauss {

inline constexpr int kDefaultModeCap = 6;

/// Tolerance attached to the hermiticity flag of a FockOperator.
inline constexpr double kHermitianFlagTolerance = 1e-12;

class FockOperator {
 public:
  FockOperator(int modes, CMatrix entries, bool hermitian = false)
      : modes_(modes), entries_(std::move(entries)), hermitian_(hermitian) {
    if (modes < 1 || modes > 30) {
      throw ContractError("FockOperator: mode count must be in [1, 30]");
    }
    const Eigen::Index dim = Eigen::Index{1} << modes;
    if (entries_.rows() != dim || entries_.cols() != dim) {
      std::ostringstream msg;
      msg << "FockOperator: expected " << dim << "x" << dim << " entries for " << modes
          << " modes, got " << entries_.rows() << "x" << entries_.cols();
      throw StructuralError(msg.str());
    }
    if (hermitian_) {
      const double err = max_abs(entries_ - entries_.adjoint());
      if (err > kHermitianFlagTolerance) {
        std::ostringstream msg;
        msg << "FockOperator: hermitian flag set but max |A - A^dagger| = " << err;
        throw StructuralError(msg.str());
      }
    }
  }

  static FockOperator identity(int modes) {
    const Eigen::Index dim = Eigen::Index{1} << modes;
    return FockOperator(modes, CMatrix::Identity(dim, dim), true);
  }

  static FockOperator zero(int modes) {
    const Eigen::Index dim = Eigen::Index{1} << modes;
    return FockOperator(modes, CMatrix::Zero(dim, dim), true);
  }

  int modes() const { return modes_; }
  Eigen::Index dim() const { return entries_.rows(); }
  const CMatrix& matrix() const { return entries_; }
  bool is_hermitian() const { return hermitian_; }

  Complex trace() const { return entries_.trace(); }
  FockOperator adjoint() const { return FockOperator(modes_, entries_.adjoint(), hermitian_); }

  friend FockOperator operator+(const FockOperator& a, const FockOperator& b) {
    check_same_space(a, b);
    return FockOperator(a.modes_, a.entries_ + b.entries_, a.hermitian_ && b.hermitian_);
  }
  friend FockOperator operator-(const FockOperator& a, const FockOperator& b) {
    check_same_space(a, b);
    return FockOperator(a.modes_, a.entries_ - b.entries_, a.hermitian_ && b.hermitian_);
  }
  friend FockOperator operator*(const FockOperator& a, const FockOperator& b) {
    check_same_space(a, b);
    return FockOperator(a.modes_, a.entries_ * b.entries_);
  }
  friend FockOperator operator*(double s, const FockOperator& a) {
    return FockOperator(a.modes_, s * a.entries_, a.hermitian_);
  }
  friend FockOperator operator*(Complex s, const FockOperator& a) {
    return FockOperator(a.modes_, s * a.entries_);
  }

 private:
  static void check_same_space(const FockOperator& a, const FockOperator& b) {
    if (a.modes_ != b.modes_) throw ContractError("FockOperator: mode counts differ");
  }

  int modes_;
  CMatrix entries_;
  bool hermitian_;
};

inline double max_abs(const FockOperator& op) { return max_abs(op.matrix()); }

/// {A, B} = AB + BA.
inline CMatrix anticommutator(const CMatrix& a, const CMatrix& b) { return a * b + b * a; }

namespace detail {

inline void check_mode_cap(int modes, int cap) {
  if (modes < 1 || modes > cap) {
    std::ostringstream msg;
    msg << "mode count " << modes << " outside [1, " << cap
        << "]; the Fock-space dimension cap is " << cap << " modes";
    throw CapacityError(msg.str());
  }
}

inline CMatrix annihilator_matrix(int modes, int j) {
  const Eigen::Index dim = Eigen::Index{1} << modes;
  CMatrix a = CMatrix::Zero(dim, dim);
  const std::uint64_t bit = std::uint64_t{1} << j;
  const std::uint64_t lower = bit - 1;
  for (std::uint64_t n = 0; n < static_cast<std::uint64_t>(dim); ++n) {
    if ((n & bit) == 0) continue;
    const double sign = (std::popcount(n & lower) % 2 == 0) ? 1.0 : -1.0;
    a(static_cast<Eigen::Index>(n ^ bit), static_cast<Eigen::Index>(n)) = sign;
  }
  return a;
}

}  // namespace detail

/// Annihilation operators together with the bilinears gamma^dagger_k gamma_l
/// for gamma = (a_1..a_M, a_1^dagger..a_M^dagger).
struct ModeAlgebra {
  int modes;
  std::vector<CMatrix> annihilators;
  std::vector<CMatrix> creators;
  // Row-major over (k, l), k, l in [0, 2M).
  std::vector<CMatrix> gamma_bilinears;

  explicit ModeAlgebra(int m) : modes(m) {
    for (int j = 0; j < m; ++j) {
      annihilators.push_back(detail::annihilator_matrix(m, j));
      creators.push_back(annihilators.back().transpose());
    }
    auto gamma = [&](int k) -> const CMatrix& {
      return k < m ? annihilators[k] : creators[k - m];
    };
    auto gamma_dag = [&](int k) -> const CMatrix& {
      return k < m ? creators[k] : annihilators[k - m];
    };
    gamma_bilinears.reserve(4 * m * m);
    for (int k = 0; k < 2 * m; ++k) {
      for (int l = 0; l < 2 * m; ++l) gamma_bilinears.push_back(gamma_dag(k) * gamma(l));
    }
  }

  const CMatrix& bilinear(int k, int l) const { return gamma_bilinears[k * 2 * modes + l]; }
  Eigen::Index dim() const { return Eigen::Index{1} << modes; }
};

/// Shared, lazily built algebra for M modes. Thread-safe.
inline std::shared_ptr<const ModeAlgebra> mode_algebra(int modes, int cap = kDefaultModeCap) {
  detail::check_mode_cap(modes, cap);
  static std::mutex mutex;
  static std::map<int, std::shared_ptr<const ModeAlgebra>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto& slot = cache[modes];
  if (!slot) slot = std::make_shared<const ModeAlgebra>(modes);
  return slot;
}

/// The M annihilation operators a_1..a_M.
inline std::vector<FockOperator> build_mode_operators(int modes, int cap = kDefaultModeCap) {
  detail::check_mode_cap(modes, cap);
  std::vector<FockOperator> out;
  out.reserve(modes);
  for (int j = 0; j < modes; ++j) out.emplace_back(modes, detail::annihilator_matrix(modes, j));
  return out;
}

/// 1/2 gamma^dagger H gamma for an arbitrary 2M x 2M matrix H.
inline FockOperator quadratic_form(const CMatrix& h2m, int cap = kDefaultModeCap) {
  if (h2m.rows() != h2m.cols() || h2m.rows() % 2 != 0 || h2m.rows() == 0) {
    throw StructuralError("quadratic_form: expected a square matrix of even dimension");
  }
  const int m = static_cast<int>(h2m.rows() / 2);
  const auto alg = mode_algebra(m, cap);
  CMatrix out = CMatrix::Zero(alg->dim(), alg->dim());
  for (int k = 0; k < 2 * m; ++k) {
    for (int l = 0; l < 2 * m; ++l) {
      const Complex c = h2m(k, l);
      if (c != Complex(0.0)) out += (0.5 * c) * alg->bilinear(k, l);
    }
  }
  return FockOperator(m, std::move(out));
}

/// The quadratic Hamiltonian 1/2 (a^dag h a - a h^T a^dag + a^dag D a^dag - a D* a).
inline FockOperator quadratic_hamiltonian(const BdgMatrix& h, int cap = kDefaultModeCap) {
  const FockOperator raw = quadratic_form(h.assembled(), cap);
  const CMatrix& e = raw.matrix();
  CMatrix herm = 0.5 * (e + e.adjoint());
  if (max_abs(e - herm) > 1e-10) {
    throw StructuralError("quadratic_hamiltonian: constructed operator is not hermitian");
  }
  return FockOperator(h.modes(), std::move(herm), true);
}

/// exp(scale * A) for hermitian A via its spectral decomposition.
inline FockOperator op_exp(const FockOperator& a, double scale) {
  const CMatrix& e = a.matrix();
  if (!a.is_hermitian()) {
    const double err = max_abs(e - e.adjoint());
    if (err > kHermitianFlagTolerance) {
      std::ostringstream msg;
      msg << "op_exp: operator is not hermitian (max |A - A^dagger| = " << err << ")";
      throw ContractError(msg.str());
    }
  }
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(0.5 * (e + e.adjoint()));
  const RVector w = (scale * eig.eigenvalues().array()).exp().matrix();
  const CMatrix& v = eig.eigenvectors();
  CMatrix out = v * w.cast<Complex>().asDiagonal() * v.adjoint();
  out = 0.5 * (out + out.adjoint()).eval();
  return FockOperator(a.modes(), std::move(out), true);
}

/// exp(A) for a general (not necessarily hermitian) operator.
inline FockOperator op_exp_general(const FockOperator& a) {
  return FockOperator(a.modes(), a.matrix().exp());
}

/// :exp[a^dagger B a]: as the explicit finite sum over k <= M creation and
/// annihilation strings. Exponential in M; meant as an independent oracle.
inline FockOperator normal_ordered_exp(const CMatrix& b, int cap = kDefaultModeCap) {
  if (b.rows() != b.cols() || b.rows() == 0) {
    throw StructuralError("normal_ordered_exp: B must be square and nonempty");
  }
  const int m = static_cast<int>(b.rows());
  const auto alg = mode_algebra(m, cap);
  const Eigen::Index dim = alg->dim();
  CMatrix result = CMatrix::Identity(dim, dim);

  double factorial = 1.0;
  for (int k = 1; k <= m; ++k) {
    factorial *= k;
    std::size_t count = 1;
    for (int i = 0; i < k; ++i) count *= static_cast<std::size_t>(m);

    auto tuple = [&](std::size_t code) {
      std::vector<int> idx(k);
      for (int i = 0; i < k; ++i) {
        idx[i] = static_cast<int>(code % m);
        code /= m;
      }
      return idx;
    };
    auto has_repeat = [](const std::vector<int>& idx) {
      for (std::size_t i = 0; i < idx.size(); ++i)
        for (std::size_t j = i + 1; j < idx.size(); ++j)
          if (idx[i] == idx[j]) return true;
      return false;
    };

    // a_{j_k} ... a_{j_1}; strings with a repeated index vanish identically.
    std::vector<CMatrix> ann(count);
    std::vector<bool> ann_live(count, false);
    for (std::size_t code = 0; code < count; ++code) {
      const auto js = tuple(code);
      if (has_repeat(js)) continue;
      CMatrix prod = CMatrix::Identity(dim, dim);
      for (int i = k - 1; i >= 0; --i) prod = prod * alg->annihilators[js[i]];
      ann[code] = std::move(prod);
      ann_live[code] = true;
    }

    for (std::size_t icode = 0; icode < count; ++icode) {
      const auto is = tuple(icode);
      if (has_repeat(is)) continue;
      CMatrix cre = CMatrix::Identity(dim, dim);
      for (int i = 0; i < k; ++i) cre = cre * alg->creators[is[i]];
      CMatrix inner = CMatrix::Zero(dim, dim);
      for (std::size_t jcode = 0; jcode < count; ++jcode) {
        if (!ann_live[jcode]) continue;
        const auto js = tuple(jcode);
        Complex coeff(1.0);
        for (int i = 0; i < k; ++i) coeff *= b(is[i], js[i]);
        if (coeff != Complex(0.0)) inner += coeff * ann[jcode];
      }
      result += (1.0 / factorial) * (cre * inner);
    }
  }
  return FockOperator(m, std::move(result));
}

/// Number operator sum_j a_j^dagger B_jk a_k for an M x M matrix B.
inline FockOperator number_bilinear(const CMatrix& b, int cap = kDefaultModeCap) {
  const int m = static_cast<int>(b.rows());
  const auto alg = mode_algebra(m, cap);
  CMatrix out = CMatrix::Zero(alg->dim(), alg->dim());
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      if (b(i, j) != Complex(0.0)) out += b(i, j) * alg->bilinear(i, j);
  return FockOperator(m, std::move(out));
}

}  // namespace fermigauss
