#pragma once

// Monte Carlo reduction: compensated accumulators, the entrywise standard
// error gate, and a chunked fan-out whose result does not depend on the
// number of workers.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <limits>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Dense>

#include "fermigauss/bdg_matrix.hpp"
#include "fermigauss/errors.hpp"
#include "fermigauss/rng.hpp"

namespace fermigauss {

/// Elementwise Kahan-compensated sum.
class CompensatedArray {
 public:
  CompensatedArray() = default;
  explicit CompensatedArray(Eigen::Index n) : sum_(Eigen::ArrayXd::Zero(n)), comp_(Eigen::ArrayXd::Zero(n)) {}

  void add(const Eigen::ArrayXd& x) {
    const Eigen::ArrayXd y = x - comp_;
    const Eigen::ArrayXd t = sum_ + y;
    comp_ = (t - sum_) - y;
    sum_ = t;
  }

  void merge(const CompensatedArray& other) { add(other.value()); }

  Eigen::ArrayXd value() const { return sum_ - comp_; }

 private:
  Eigen::ArrayXd sum_;
  Eigen::ArrayXd comp_;
};

/// Sample mean and standard error of complex matrices, real and imaginary
/// parts tracked separately.
class MatrixAccumulator {
 public:
  MatrixAccumulator() = default;
  explicit MatrixAccumulator(Eigen::Index dim)
      : dim_(dim), re_(dim * dim), im_(dim * dim), re2_(dim * dim), im2_(dim * dim) {}

  void add(const CMatrix& x) {
    const Eigen::ArrayXd re = Eigen::Map<const Eigen::ArrayXcd>(x.data(), x.size()).real();
    const Eigen::ArrayXd im = Eigen::Map<const Eigen::ArrayXcd>(x.data(), x.size()).imag();
    re_.add(re);
    im_.add(im);
    re2_.add(re.square());
    im2_.add(im.square());
    ++n_;
  }

  void merge(const MatrixAccumulator& o) {
    if (o.n_ == 0) return;
    if (n_ == 0) {
      *this = o;
      return;
    }
    re_.merge(o.re_);
    im_.merge(o.im_);
    re2_.merge(o.re2_);
    im2_.merge(o.im2_);
    n_ += o.n_;
  }

  long count() const { return n_; }

  CMatrix mean() const {
    CMatrix out(dim_, dim_);
    const Eigen::ArrayXd re = re_.value() / n_;
    const Eigen::ArrayXd im = im_.value() / n_;
    for (Eigen::Index k = 0; k < dim_ * dim_; ++k) out.data()[k] = Complex(re(k), im(k));
    return out;
  }

  /// sqrt(se_re^2 + se_im^2) per entry.
  Eigen::MatrixXd standard_error() const {
    Eigen::MatrixXd out(dim_, dim_);
    if (n_ < 2) {
      out.setConstant(std::numeric_limits<double>::infinity());
      return out;
    }
    const double n = static_cast<double>(n_);
    const Eigen::ArrayXd mre = re_.value() / n, mim = im_.value() / n;
    const Eigen::ArrayXd vre = ((re2_.value() / n - mre.square()) * n / (n - 1.0)).max(0.0);
    const Eigen::ArrayXd vim = ((im2_.value() / n - mim.square()) * n / (n - 1.0)).max(0.0);
    const Eigen::ArrayXd se = ((vre + vim) / n).sqrt();
    for (Eigen::Index k = 0; k < dim_ * dim_; ++k) out.data()[k] = se(k);
    return out;
  }

 private:
  Eigen::Index dim_ = 0;
  long n_ = 0;
  CompensatedArray re_, im_, re2_, im2_;
};

/// Ratio estimator mean(X) / mean(y) for matrix X and scalar y, with a
/// delta-method standard error.
class RatioAccumulator {
 public:
  RatioAccumulator() = default;
  explicit RatioAccumulator(Eigen::Index dim)
      : dim_(dim), x_re_(dim * dim), x_im_(dim * dim), x2_re_(dim * dim), x2_im_(dim * dim),
        xy_re_(dim * dim), xy_im_(dim * dim), y_(1), y2_(1) {}

  void add(const CMatrix& x, double y) {
    const Eigen::ArrayXd re = Eigen::Map<const Eigen::ArrayXcd>(x.data(), x.size()).real();
    const Eigen::ArrayXd im = Eigen::Map<const Eigen::ArrayXcd>(x.data(), x.size()).imag();
    x_re_.add(re);
    x_im_.add(im);
    x2_re_.add(re.square());
    x2_im_.add(im.square());
    xy_re_.add(re * y);
    xy_im_.add(im * y);
    y_.add(Eigen::ArrayXd::Constant(1, y));
    y2_.add(Eigen::ArrayXd::Constant(1, y * y));
    ++n_;
  }

  void merge(const RatioAccumulator& o) {
    if (o.n_ == 0) return;
    if (n_ == 0) {
      *this = o;
      return;
    }
    x_re_.merge(o.x_re_);
    x_im_.merge(o.x_im_);
    x2_re_.merge(o.x2_re_);
    x2_im_.merge(o.x2_im_);
    xy_re_.merge(o.xy_re_);
    xy_im_.merge(o.xy_im_);
    y_.merge(o.y_);
    y2_.merge(o.y2_);
    n_ += o.n_;
  }

  long count() const { return n_; }

  CMatrix ratio() const {
    const double ysum = y_.value()(0);
    const Eigen::ArrayXd re = x_re_.value() / ysum, im = x_im_.value() / ysum;
    CMatrix out(dim_, dim_);
    for (Eigen::Index k = 0; k < dim_ * dim_; ++k) out.data()[k] = Complex(re(k), im(k));
    return out;
  }

  Eigen::MatrixXd standard_error() const {
    Eigen::MatrixXd out(dim_, dim_);
    if (n_ < 2) {
      out.setConstant(std::numeric_limits<double>::infinity());
      return out;
    }
    const double n = static_cast<double>(n_);
    const double ym = y_.value()(0) / n;
    const double vy = y2_.value()(0) / n - ym * ym;
    auto part = [&](const CompensatedArray& xs, const CompensatedArray& x2s,
                    const CompensatedArray& xys) {
      const Eigen::ArrayXd xm = xs.value() / n;
      const Eigen::ArrayXd vx = x2s.value() / n - xm.square();
      const Eigen::ArrayXd cxy = xys.value() / n - xm * ym;
      const Eigen::ArrayXd r = xm / ym;
      const Eigen::ArrayXd var = (vx - 2.0 * r * cxy + r.square() * vy).max(0.0) * n / (n - 1.0);
      return Eigen::ArrayXd(var / (n * ym * ym));
    };
    const Eigen::ArrayXd se =
        (part(x_re_, x2_re_, xy_re_) + part(x_im_, x2_im_, xy_im_)).sqrt();
    for (Eigen::Index k = 0; k < dim_ * dim_; ++k) out.data()[k] = se(k);
    return out;
  }

 private:
  Eigen::Index dim_ = 0;
  long n_ = 0;
  CompensatedArray x_re_, x_im_, x2_re_, x2_im_, xy_re_, xy_im_, y_, y2_;
};

/// Absolute slack added to every standard-error gate: entries that vanish
/// identically have zero variance and rounding-level means.
inline constexpr double kStandardErrorFloor = 1e-12;

struct SeGate {
  double max_abs_deviation = 0.0;
  double max_z = 0.0;
  int outside_5se = 0;
  int band_3_to_5se = 0;
  int entries = 0;
  bool passed = false;
};

/// Every entry within 5 SE; at most 1% of entries between 3 and 5 SE.
inline SeGate standard_error_gate(const CMatrix& measured, const CMatrix& target,
                                  const Eigen::MatrixXd& se) {
  SeGate g;
  g.entries = static_cast<int>(measured.size());
  for (Eigen::Index k = 0; k < measured.size(); ++k) {
    const double dev = std::abs(measured.data()[k] - target.data()[k]);
    const double s = se.data()[k];
    g.max_abs_deviation = std::max(g.max_abs_deviation, dev);
    if (s > 0.0) g.max_z = std::max(g.max_z, dev / s);
    if (dev > 5.0 * s + kStandardErrorFloor) {
      ++g.outside_5se;
    } else if (dev > 3.0 * s + kStandardErrorFloor) {
      ++g.band_3_to_5se;
    }
  }
  g.passed = g.outside_5se == 0 && g.band_3_to_5se <= 0.01 * g.entries;
  return g;
}

/// A named scalar check carried alongside an estimator report.
struct Check {
  std::string name;
  double measured = 0.0;
  double threshold = 0.0;
  std::string relation;  // "<=" or ">="
  bool passed = false;
};

inline Check make_check(std::string name, double measured, std::string relation, double threshold) {
  Check c{std::move(name), measured, threshold, std::move(relation), false};
  c.passed = c.relation == ">=" ? measured >= threshold : measured <= threshold;
  return c;
}

struct EstimatorReport {
  std::string name;
  int modes = 0;
  CMatrix target;
  CMatrix mean;
  double max_abs_deviation = 0.0;
  double frobenius_deviation = 0.0;
  Eigen::MatrixXd per_entry_se;  // empty for deterministic quadrature
  long samples = 0;
  std::optional<RngSpec> seed;
  double tolerance = 0.0;  // absolute tolerance (quadrature) or SE multiplier (MC)
  int band_count = 0;
  std::vector<Check> checks;
  std::vector<std::string> warnings;
  bool passed = false;
  std::string criterion;
  Eigen::MatrixXd eigenvalue_dump;  // optional per-sample lambdas for CSV output
};

/// Runs fn(chunk_index, count) over ceil(n / chunk) chunks on `workers`
/// threads and merges the partial results in chunk order.
template <class Acc, class Fn>
Acc run_chunked(long n, long chunk, int workers, Fn&& fn) {
  if (chunk < 1) throw ContractError("run_chunked: chunk size must be >= 1");
  const long chunks = (n + chunk - 1) / chunk;
  std::vector<std::optional<Acc>> parts(static_cast<std::size_t>(chunks));
  std::atomic<long> next{0};
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(std::max(workers, 1)));
  auto work = [&](int w) {
    try {
      for (long c = next++; c < chunks; c = next++) {
        const long count = std::min(chunk, n - c * chunk);
        parts[static_cast<std::size_t>(c)].emplace(fn(c, count));
      }
    } catch (...) {
      errors[static_cast<std::size_t>(w)] = std::current_exception();
      next = chunks;
    }
  };
  const int nthreads = std::max(1, std::min<int>(workers, static_cast<int>(std::max<long>(chunks, 1))));
  if (nthreads == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < nthreads; ++w) pool.emplace_back(work, w);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  Acc out = parts.empty() ? Acc{} : std::move(*parts.front());
  for (std::size_t c = 1; c < parts.size(); ++c) out.merge(*parts[c]);
  return out;
}

}  // namespace fermigauss
