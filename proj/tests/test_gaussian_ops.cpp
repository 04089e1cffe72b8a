#include <catch_amalgamated.hpp>

#include <cmath>

#include "fermigauss/ensembles.hpp"
#include "fermigauss/gaussian_ops.hpp"
#include "fermigauss/identity_suite.hpp"
#include "oracles.hpp"

using namespace fermigauss;

namespace {

CMatrix scalar(double v) { return CMatrix::Constant(1, 1, Complex(v)); }

CMatrix zero(int m) { return CMatrix::Zero(m, m); }

}  // namespace

TEST_CASE("make_bdg validation") {
  CHECK_NOTHROW(make_bdg(CMatrix::Identity(2, 2), zero(2)));
  CMatrix sym = zero(2);
  sym(0, 1) = 1.0;
  sym(1, 0) = 1.0;
  CHECK_THROWS_AS(make_bdg(zero(2), sym), StructuralError);
  CHECK_THROWS_AS(make_bdg(scalar(0.0), scalar(1.0)), StructuralError);
  CMatrix nonherm = zero(2);
  nonherm(0, 1) = 1.0;
  CHECK_THROWS_AS(make_bdg(nonherm, zero(2)), StructuralError);
  CHECK_THROWS_AS(make_bdg(zero(2), zero(3)), StructuralError);
}

TEST_CASE("make_bdg_from_r") {
  CHECK(max_abs(make_bdg_from_r(zero(4)).assembled()) == 0.0);

  // sigma R = [[0,1],[1,0]] [[0,r],[-r,0]] = diag(-r, r), so h = -r.
  const double r = 0.9;
  CMatrix rr(2, 2);
  rr << 0, r, -r, 0;
  const BdgMatrix h = make_bdg_from_r(rr);
  CHECK(std::abs(h.h()(0, 0) - Complex(-r)) < 1e-15);
  CHECK(std::abs(h.delta()(0, 0)) == 0.0);

  Engine rng = make_engine({21, 0});
  const BdgMatrix d = sample_class_d(3, 1.0, rng);
  const CMatrix r3 = sigma_x(3) * d.assembled();
  CHECK(max_abs(r3 + r3.transpose()) < 1e-12);
  CHECK(max_abs(sigma_x(3) * make_bdg_from_r(r3).assembled() - r3) < 1e-12);
}

TEST_CASE("gaussian_normalized") {
  SECTION("H = 0 gives I / 2^M") {
    const FockOperator l = gaussian_normalized(make_bdg(zero(2), zero(2)));
    CHECK(max_abs(l.matrix() - CMatrix::Identity(4, 4) / 4.0) < 1e-15);
  }
  SECTION("single mode") {
    const double lam = 1.7;
    const FockOperator l = gaussian_normalized(make_bdg(scalar(lam), zero(1)));
    const double z = 2.0 * std::cosh(lam / 2);
    CHECK(std::abs(l.matrix()(0, 0) - std::exp(-lam / 2) / z) < 1e-15);
    CHECK(std::abs(l.matrix()(1, 1) - std::exp(lam / 2) / z) < 1e-15);
    CHECK(std::abs(l.matrix()(0, 1)) == 0.0);
  }
  SECTION("positive definite with unit trace at three modes") {
    Engine rng = make_engine({22, 0});
    for (int t = 0; t < 10; ++t) {
      const FockOperator l = gaussian_normalized(sample_class_d(3, 0.3, rng));
      Eigen::SelfAdjointEigenSolver<CMatrix> eig(l.matrix());
      CHECK(eig.eigenvalues().minCoeff() > 0.0);
      CHECK(std::abs(l.trace() - 1.0) < 1e-12);
    }
  }
}

TEST_CASE("trace formula") {
  CHECK(trace_formula(make_bdg(zero(3), zero(3))) == Catch::Approx(8.0).epsilon(1e-15));
  CHECK(std::abs(trace_formula(make_bdg(scalar(2.0), zero(1))) - 3.0861612696304874) < 1e-14);
  Engine rng = make_engine({23, 0});
  for (int t = 0; t < 10; ++t) {
    const BdgMatrix h = sample_class_d(2, 0.5, rng);
    const CMatrix fock = oracle::quadratic(h.assembled()).exp();
    const double tr = fock.trace().real();
    CHECK(std::abs(trace_formula(h) / tr - 1.0) < 1e-9);
    CHECK(std::abs(std::sqrt(cosh_determinant(h)) / tr - 1.0) < 1e-9);
  }
}

TEST_CASE("polar decomposition") {
  SECTION("diagonal input") {
    const PolarForm p = polar_decompose(make_bdg(scalar(0.8), zero(1)));
    CHECK(p.lambdas(0) == Catch::Approx(0.8).epsilon(1e-14));
    CHECK(std::abs(std::abs(p.bogoliubov(0, 0)) - 1.0) < 1e-14);
  }
  SECTION("random round trip and canonical transformation") {
    Engine rng = make_engine({24, 0});
    for (int t = 0; t < 10; ++t) {
      const BdgMatrix h = sample_class_d(3, 1.0, rng);
      const PolarForm p = polar_decompose(h);
      CHECK(max_abs(p.reconstruct() - h.assembled()) < 1e-9);
      CHECK(max_abs(p.bogoliubov * p.bogoliubov.adjoint() - CMatrix::Identity(6, 6)) < 1e-12);
      // (b, b^dag) = U (a, a^dag) requires U = sigma U^* sigma.
      CHECK(max_abs(p.bogoliubov - sigma_x(3) * p.bogoliubov.conjugate() * sigma_x(3)) < 1e-12);
      Eigen::SelfAdjointEigenSolver<CMatrix> eig(h.assembled(), Eigen::EigenvaluesOnly);
      for (int j = 0; j < 3; ++j) CHECK(std::abs(eig.eigenvalues()(j) + eig.eigenvalues()(5 - j)) < 1e-12);
    }
  }
  SECTION("degenerate spectrum is rejected") {
    CHECK_THROWS_AS(polar_decompose(make_bdg(zero(2), zero(2))), DegenerateSpectrumError);
  }
}

TEST_CASE("number-conserving normalized operator") {
  CHECK(max_abs(gaussian_number_conserving(zero(2)).matrix() - CMatrix::Identity(4, 4) / 4.0) < 1e-15);
  const double lam = -0.45;
  CHECK(max_abs(gaussian_number_conserving(scalar(lam)).matrix() -
                gaussian_normalized(make_bdg(scalar(lam), zero(1))).matrix()) < 1e-12);
  Engine rng = make_engine({25, 0});
  for (int t = 0; t < 5; ++t) {
    const CMatrix h = random_hermitian(3, rng);
    CHECK(std::abs(gaussian_number_conserving(h).trace() - 1.0) < 1e-12);
  }
  CMatrix nonherm = zero(2);
  nonherm(0, 1) = 1.0;
  CHECK_THROWS_AS(gaussian_number_conserving(nonherm), StructuralError);
}

TEST_CASE("Green's function parameterization") {
  const GreensPair g0 = greens_parameterization(zero(2));
  CHECK(max_abs(g0.n - CMatrix::Identity(2, 2) / 2.0) < 1e-15);
  CHECK(max_abs(g0.n_tilde - CMatrix::Identity(2, 2) / 2.0) < 1e-15);
  Engine rng = make_engine({26, 0});
  for (int t = 0; t < 5; ++t) {
    const CMatrix h = random_hermitian(2, rng);
    const GreensPair g = greens_parameterization(h);
    CHECK(max_abs(g.n + g.n_tilde - CMatrix::Identity(2, 2)) == 0.0);
    CHECK(max_abs(greens_operator(g).matrix() - gaussian_number_conserving(h).matrix()) < 1e-9);
  }
}

TEST_CASE("composition of general generators") {
  Engine rng = make_engine({27, 0});
  const BdgMatrix h1 = small_norm_bdg(2, rng);
  SECTION("identity element") {
    const ComposedGenerator c = compose_general(h1, make_bdg(zero(2), zero(2)));
    CHECK(max_abs(c.matrix - h1.assembled()) < 1e-12);
    CHECK(c.hermitian);
  }
  SECTION("commuting diagonal pair adds") {
    CMatrix a = zero(2), b = zero(2);
    a(0, 0) = 0.3;
    a(1, 1) = -0.2;
    b(0, 0) = 0.5;
    b(1, 1) = 0.1;
    const ComposedGenerator c = compose_general(make_bdg(a, zero(2)), make_bdg(b, zero(2)));
    CHECK(max_abs(c.matrix - make_bdg(a + b, zero(2)).assembled()) < 1e-12);
  }
  SECTION("Fock product identity on random pairs") {
    for (int t = 0; t < 5; ++t) {
      const BdgMatrix a = small_norm_bdg(2, rng);
      const BdgMatrix b = small_norm_bdg(2, rng);
      const ComposedGenerator c = compose_general(a, b);
      const CMatrix lhs = oracle::quadratic(c.matrix).exp();
      const CMatrix rhs = oracle::quadratic(a.assembled()).exp() * oracle::quadratic(b.assembled()).exp();
      CHECK(max_abs(lhs - rhs) < 1e-9);
      const CMatrix s = sigma_x(2);
      CHECK(max_abs(s * c.matrix.transpose() * s + c.matrix) < 1e-9);
    }
  }
  SECTION("branch cut is rejected") {
    CMatrix big = zero(1);
    big(0, 0) = 2.0;
    CHECK_THROWS_AS(compose_general(make_bdg(big, zero(1)), make_bdg(big, zero(1))), BranchError);
  }
}

TEST_CASE("composition of number-conserving generators") {
  Engine rng = make_engine({28, 0});
  const CMatrix h1 = with_spectral_norm(random_hermitian(2, rng), rng, 0.3, 1.0);
  CHECK(max_abs(compose_number_conserving(h1, -h1).matrix) < 1e-12);
  CMatrix d1 = zero(2), d2 = zero(2);
  d1(0, 0) = 0.4;
  d2(0, 0) = -0.1;
  d2(1, 1) = 0.7;
  CHECK(max_abs(compose_number_conserving(d1, d2).matrix - (d1 + d2)) < 1e-12);
  for (int t = 0; t < 5; ++t) {
    const CMatrix a = with_spectral_norm(random_hermitian(2, rng), rng, 0.2, 1.4);
    const CMatrix b = with_spectral_norm(random_hermitian(2, rng), rng, 0.2, 1.4);
    const ComposedGenerator c = compose_number_conserving(a, b);
    const CMatrix lhs = number_conserving_gaussian(c.matrix).matrix();
    const CMatrix rhs = (number_conserving_gaussian(a) * number_conserving_gaussian(b)).matrix();
    CHECK(max_abs(lhs - rhs) < 1e-9);
  }
}

TEST_CASE("diagonal form in the Bogoliubov basis") {
  Engine rng = make_engine({29, 0});
  const BdgMatrix h = sample_class_d(2, 0.5, rng);
  const PolarForm p = polar_decompose(h);
  const CMatrix basis = bogoliubov_fock_basis(p.bogoliubov);
  CHECK(max_abs(basis.adjoint() * basis - CMatrix::Identity(4, 4)) < 1e-12);
  const CMatrix in_b = basis.adjoint() * gaussian_normalized(h).matrix() * basis;
  const RVector w = diagonal_form_weights(p.lambdas);
  CHECK(max_abs(in_b - CMatrix(w.cast<Complex>().asDiagonal())) < 1e-9);
  CHECK(w.sum() == Catch::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("identity suite passes at three modes") {
  const auto checks = run_identity_suite({3, 10, 20}, {31, 0});
  for (const auto& c : checks) {
    INFO(c.name << " measured " << c.measured);
    CHECK(c.passed);
  }
}
