#include <catch_amalgamated.hpp>

#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "fermigauss/closed_form_suite.hpp"
#include "fermigauss/ensembles.hpp"
#include "fermigauss/selberg_forms.hpp"
#include "selberg_oracle.hpp"

using namespace fermigauss;
using oracle::half_line;
using oracle::laguerre_direct;
using oracle::quarter_plane;
using oracle::selberg_direct;
using oracle::xlog;
using boost::math::quadrature::gauss_kronrod;

namespace {

constexpr double kPi = std::numbers::pi;

double rel(double a, double b) { return std::abs(a / b - 1.0); }

double gk_2d(const std::function<double(double, double)>& f, double lim) {
  return gauss_kronrod<double, 61>::integrate(
      [&](double x) {
        return gauss_kronrod<double, 61>::integrate([&](double y) { return f(x, y); }, -lim, lim, 10, 1e-13);
      },
      -lim, lim, 10, 1e-13);
}

}  // namespace

TEST_CASE("vandermonde") {
  const double three[] = {1, 2, 3};
  CHECK(vandermonde(three) == -2.0);
  const double one[] = {4.2};
  CHECK(vandermonde(one) == 1.0);
  const double rep[] = {0.5, 1.5, 0.5};
  CHECK(vandermonde(rep) == 0.0);
}

TEST_CASE("Selberg integral") {
  SECTION("n = 1 is the beta function") {
    for (double a : {0.5, 1.0, 2.3})
      for (double b : {0.7, 3.0})
        CHECK(selberg_integral_log(a, b, 1.0, 1) ==
              Catch::Approx(std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b)).epsilon(1e-13));
  }
  SECTION("matches direct quadrature") {
    const double sets[][3] = {{1, 1, 1}, {0.5, 1.5, 1}, {2, 3, 0.5}, {1.5, 2.5, 2}, {0.7, 1.2, 1.5}};
    for (const auto& s : sets) {
      for (int n : {1, 2}) {
        INFO("a=" << s[0] << " b=" << s[1] << " g=" << s[2] << " n=" << n);
        CHECK(rel(std::exp(selberg_integral_log(s[0], s[1], s[2], n)), selberg_direct(s[0], s[1], s[2], n)) < 1e-6);
      }
    }
  }
  SECTION("domain errors") {
    CHECK_THROWS_AS(selberg_integral_log(-1.0, 1.0, 1.0, 2), DomainError);
    CHECK_THROWS_AS(selberg_integral_log(1.0, 0.0, 1.0, 2), DomainError);
    CHECK_THROWS_AS(selberg_integral_log(1.0, 1.0, -0.6, 2), DomainError);
    CHECK_THROWS_AS(selberg_integral_log(1.0, 1.0, 1.0, 0), DomainError);
  }
}

TEST_CASE("Laguerre Selberg integral") {
  CHECK(std::exp(laguerre_selberg_log(0.5, 1.0, 1)) == Catch::Approx(std::sqrt(2 * kPi)).epsilon(1e-14));
  const double sets[][2] = {{0.5, 1}, {1, 1}, {1.5, 0.5}, {0.75, 2}};
  for (const auto& s : sets) {
    for (int n : {1, 2}) {
      INFO("at=" << s[0] << " g=" << s[1] << " n=" << n);
      CHECK(rel(std::exp(laguerre_selberg_log(s[0], s[1], n)), laguerre_direct(s[0], s[1], n)) < 1e-6);
    }
  }
  double prev = laguerre_selberg_log(0.6, 1.0, 2);
  for (double at = 0.8; at < 4.0; at += 0.2) {
    const double v = laguerre_selberg_log(at, 1.0, 2);
    CHECK(v > prev);
    prev = v;
  }
  CHECK_THROWS_AS(laguerre_selberg_log(0.0, 1.0, 1), DomainError);
}

TEST_CASE("radial Gaussian integral") {
  CHECK(std::exp(radial_gaussian_integral_log(1, 1.0)) == Catch::Approx(std::sqrt(kPi / 2)).epsilon(1e-14));
  for (double p : {0.5, 1.0, 2.0}) {
    const double direct = gk_2d(
        [&](double x, double y) {
          const double v = x * x - y * y;
          return v * v * std::exp(-2 * p * (x * x + y * y));
        },
        12.0 / std::sqrt(p));
    CHECK(rel(std::exp(radial_gaussian_integral_log(2, p)), direct) < 1e-8);
  }
  for (int m = 1; m <= 6; ++m) {
    const double shift = radial_gaussian_integral_log(m, 3.0) - radial_gaussian_integral_log(m, 1.0);
    CHECK(std::abs(shift + m * (m - 0.5) * std::log(3.0)) < 1e-12);
  }
}

TEST_CASE("radial prefactor verdict") {
  // The (2p)^{-M(M-1)} variant agrees with quadrature only where 2p = 1.
  const auto v = radial_prefactor_verdicts({1, 2}, {1.0, 2.0});
  for (const auto& x : v) {
    INFO("M=" << x.modes << " p=" << x.p);
    CHECK(x.half_integer_relative_error < 1e-8);
    CHECK(x.integer_relative_error > 0.1);
  }
  CHECK(std::abs(radial_gaussian_integral_by_quadrature(1, 1.0) - 0.5 * std::log(kPi / 2)) < 1e-12);
}

TEST_CASE("Cartesian Gaussian integral") {
  CHECK(std::exp(cartesian_gaussian_integral_log(1, 1.0)) == Catch::Approx(std::sqrt(kPi / 2)).epsilon(1e-14));
  for (int m = 1; m <= 6; ++m) {
    const double shift = cartesian_gaussian_integral_log(m, 2.0) - cartesian_gaussian_integral_log(m, 1.0);
    CHECK(std::abs(shift + 0.5 * m * (2.0 * m - 1.0) * std::log(2.0)) < 1e-12);
  }
  SECTION("M = 2 by importance sampling over the independent coordinates") {
    // h11, h22, Re h12, Im h12, Re d, Im d under a Gaussian proposal of
    // standard deviation s; the integrand is exp(-p Tr H^2).
    const double p = 1.0, s = 0.6;
    Engine rng = make_engine({61, 0});
    std::normal_distribution<double> normal(0.0, s);
    const int n = 200000;
    double sum = 0.0, sum2 = 0.0;
    for (int i = 0; i < n; ++i) {
      double x[6], q = 1.0;
      for (double& v : x) {
        v = normal(rng);
        q *= std::exp(-v * v / (2 * s * s)) / (s * std::sqrt(2 * kPi));
      }
      CMatrix h(2, 2), d = CMatrix::Zero(2, 2);
      h << x[0], Complex(x[2], x[3]), Complex(x[2], -x[3]), x[1];
      d(0, 1) = Complex(x[4], x[5]);
      d(1, 0) = -d(0, 1);
      const CMatrix hh = make_bdg(h, d).assembled();
      const double w = std::exp(-p * (hh * hh).trace().real()) / q;
      sum += w;
      sum2 += w * w;
    }
    const double mean = sum / n;
    const double se = std::sqrt((sum2 / n - mean * mean) / (n - 1));
    CHECK(std::abs(mean - std::exp(cartesian_gaussian_integral_log(2, p))) < 5 * se);
  }
}

TEST_CASE("angular volume") {
  CHECK(std::abs(angular_volume_log(1)) < 1e-14);
  for (int m = 1; m <= 6; ++m) {
    for (double p : {1.0, 3.0}) {
      const double ratio = cartesian_gaussian_integral_log(m, p) - radial_gaussian_integral_log(m, p);
      CHECK(std::abs(ratio - angular_volume_log(m)) < 1e-10);
    }
  }
}

TEST_CASE("normalization constants") {
  SECTION("determinant weight") {
    CHECK(std::exp(norm_const_det_log(1, 1.0)) == Catch::Approx(4.0 / kPi).epsilon(1e-14));
    for (double p : {0.5, 1.0, 2.5}) {
      const double c = std::exp(norm_const_det_log(1, p));
      const double integral = 2.0 * half_line([&](double x) { return std::exp(-2 * p * std::log1p(x * x)); });
      CHECK(std::abs(0.5 * c * integral - 1.0) < 1e-10);
    }
    const double total = -2 * std::log(2.0) + angular_volume_log(2) + norm_const_det_log(2, 2.0) +
                         radial_determinant_integral_log(2, 2.0);
    CHECK(std::abs(std::exp(total) - 1.0) < 1e-8);
    const double direct = 4.0 * quarter_plane([](double x, double y) {
      const double v = x * x - y * y;
      return std::exp(xlog(2.0, std::abs(v)) - 4.0 * (std::log1p(x * x) + std::log1p(y * y)));
    });
    CHECK(rel(std::exp(radial_determinant_integral_log(2, 2.0)), direct) < 1e-8);
    CHECK_THROWS_AS(norm_const_det_log(2, 1.25), DomainError);
  }
  SECTION("Gaussian weight") {
    CHECK(std::exp(norm_const_gauss_log(1, 1.0)) == Catch::Approx(2.0 * std::sqrt(2.0 / kPi)).epsilon(1e-14));
    const double c = std::exp(norm_const_gauss_log(1, 1.0));
    const double integral = 2.0 * half_line([](double x) { return std::exp(-2 * x * x); });
    CHECK(std::abs(0.5 * c * integral - 1.0) < 1e-12);
    for (int m = 1; m <= 4; ++m) {
      for (double p : {0.5, 1.0, 3.0}) {
        const double total = -m * std::log(2.0) + angular_volume_log(m) + norm_const_gauss_log(m, p) +
                             radial_gaussian_integral_log(m, p);
        CHECK(std::abs(total) < 1e-10);
      }
      const double shift = norm_const_gauss_log(m, 2.0) - norm_const_gauss_log(m, 1.0);
      CHECK(std::abs(shift - m * (m - 0.5) * std::log(2.0)) < 1e-12);
    }
  }
  SECTION("sweeps") {
    CHECK(check_triple_consistency(6, {0.5, 1.0, 3.0}).passed);
    for (const auto& c : check_normalization_constants(6, {0.5, 1.0, 3.0})) CHECK(c.passed);
  }
  CHECK(exp_checked(1.0) == Catch::Approx(std::exp(1.0)));
  CHECK_THROWS_AS(exp_checked(400.0), DomainError);
  CHECK_THROWS_AS(radial_gaussian_integral_log(2, -1.0), DomainError);
}
