// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "fermigauss/closed_form_suite.hpp"
#include "fermigauss/identity_suite.hpp"
#include "fermigauss/resolution_verifier.hpp"
#include "fermigauss/selberg_forms.hpp"
#include "oracles.hpp"
#include "selberg_oracle.hpp"

using namespace fermigauss;

namespace {

struct Outcome {
  bool passed = true;
  std::string detail;
};

int failures = 0;

void criterion(int id, const std::string& title, double limit_seconds, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o.passed = false;
    o.detail = std::string("exception: ") + e.what();
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool in_time = secs < limit_seconds;
  const bool ok = o.passed && in_time;
  if (!ok) ++failures;
  std::printf("criterion %d: %s  %s  [%.2f s of %.0f s]  %s\n", id, ok ? "PASS" : "FAIL", title.c_str(), secs,
              limit_seconds, o.detail.c_str());
  std::fflush(stdout);
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(3);
  os << v;
  return os.str();
}

void fold(Outcome& o, const EstimatorReport& r, const std::string& label) {
  o.passed = o.passed && r.passed;
  o.detail += label + " dev=" + fmt(r.max_abs_deviation) + (r.passed ? "" : " (failed)") + "; ";
  for (const auto& c : r.checks)
    if (!c.passed) o.detail += label + "." + c.name + "=" + fmt(c.measured) + " failed; ";
}

}  // namespace

int main() {
  const SymmetryClass d = symmetry_class(ClassLabel::D);

  criterion(1, "quadrature resolution of unity, class D, both weights, M = 1, 2", 10.0, [&] {
    Outcome o;
    for (int m : {1, 2}) {
      const PolarForm rot = fixed_class_d_rotation(m, {20240601, 100});
      fold(o, verify_resolution_quadrature(m, d, WeightSpec::determinant(2.0), rot), "M" + std::to_string(m) + "/det(p=2)");
      fold(o, verify_resolution_quadrature(m, d, WeightSpec::gaussian(1.0), rot), "M" + std::to_string(m) + "/gauss(p=1)");
    }
    return o;
  });

  criterion(2, "Monte Carlo resolution of unity, M = 1, 2, 3, 2e5 samples, one worker", 120.0, [&] {
    Outcome o;
    for (int m : {1, 2, 3}) {
      const EstimatorReport r = verify_resolution_mc(m, 1.0, 200000, {20240601, static_cast<std::uint64_t>(m) << 32});
      fold(o, r, "M" + std::to_string(m));
      o.detail.pop_back();
      o.detail.pop_back();
      o.detail += " band=" + std::to_string(r.band_count) + "; ";
    }
    return o;
  });

  criterion(3, "closed-form consistency M = 1..6 and radial prefactor verdict", 1.0, [&] {
    Outcome o;
    const Check triple = check_triple_consistency(6, {0.5, 1.0, 3.0});
    o.passed = triple.passed;
    o.detail = "max log error " + fmt(triple.measured) + "; ";
    for (const auto& v : radial_prefactor_verdicts({1, 2}, {1.0, 2.0})) {
      o.passed = o.passed && v.half_integer_relative_error <= 1e-8;
      o.detail += "M" + std::to_string(v.modes) + " p=" + fmt(v.p) + " half-integer " +
                  fmt(v.half_integer_relative_error) + " vs integer " + fmt(v.integer_relative_error) + "; ";
    }
    return o;
  });

  criterion(4, "Selberg and Laguerre closed forms against direct quadrature", 30.0, [&] {
    Outcome o;
    double worst = 0.0;
    const double sets[][3] = {{1, 1, 1}, {0.5, 1.5, 1}, {2, 3, 0.5}, {1.5, 2.5, 2}, {0.7, 1.2, 1.5}};
    for (const auto& s : sets)
      for (int n : {1, 2})
        worst = std::max(worst, std::abs(std::exp(selberg_integral_log(s[0], s[1], s[2], n)) /
                                             oracle::selberg_direct(s[0], s[1], s[2], n) - 1.0));
    const double lag[][2] = {{0.5, 1}, {1, 1}, {1.5, 0.5}, {0.75, 2}};
    for (const auto& s : lag)
      for (int n : {1, 2})
        worst = std::max(worst, std::abs(std::exp(laguerre_selberg_log(s[0], s[1], n)) /
                                             oracle::laguerre_direct(s[0], s[1], n) - 1.0));
    o.passed = worst <= 1e-6;
    o.detail = "max relative error " + fmt(worst);
    return o;
  });

  criterion(5, "operator identities", 60.0, [&] {
    Outcome o;
    for (const auto& c : run_identity_suite({3, 50, 100}, {20240601, 5})) {
      o.passed = o.passed && c.passed;
      o.detail += c.name + "=" + fmt(c.measured) + (c.passed ? "" : " FAILED") + "; ";
    }
    return o;
  });

  criterion(6, "canonical-ensemble triviality, M = 2, four temperatures, 2e5 samples", 180.0, [&] {
    Outcome o;
    const CanonicalResult r = verify_canonical_triviality(2, 1.0, {0.0, 0.3, 0.7, 1.5}, 200000, {20240601, 6ull << 32});
    for (const auto& x : r.reports) fold(o, x, x.name);
    for (const auto& c : r.pairwise) {
      o.passed = o.passed && c.passed;
      if (!c.passed) o.detail += c.name + " failed; ";
    }
    o.passed = o.passed && r.passed;
    return o;
  });

  criterion(7, "number-conserving dichotomy at M = 2", 120.0, [&] {
    Outcome o;
    const auto golden = oracle::load_golden("nc_failure_floor.json");
    const double floor = golden["failure_floor"].get<double>();
    const EstimatorReport fail = verify_nc_failure(2, golden["p"].get<double>(), floor);
    fold(o, fail, "even-weight residual (floor " + fmt(floor) + ")");
    o.detail.insert(o.detail.size() - 2, " residual=" + fmt(fail.max_abs_deviation));
    fold(o, verify_nc_modified(2, 1.0, 100000, {20240601, 7ull << 32}), "modified weight");
    return o;
  });

  criterion(8, "a weight that is not even breaks the quadrature identity by >= 10x tolerance", 10.0, [&] {
    Outcome o;
    QuadratureOptions opts;
    opts.allow_non_even = true;
    for (int m : {1, 2}) {
      const EstimatorReport r = verify_resolution_quadrature(m, d, WeightSpec::shifted_gaussian(1.0, 0.5),
                                                             fixed_class_d_rotation(m, {20240601, 100}), opts);
      const bool broken = r.max_abs_deviation >= 10.0 * kQuadratureTolerance && !r.passed;
      o.passed = o.passed && broken;
      o.detail += "M" + std::to_string(m) + " dev=" + fmt(r.max_abs_deviation) + "; ";
    }
    return o;
  });

  std::printf("acceptance: %s (%d failing)\n", failures == 0 ? "PASS" : "FAIL", failures);
  return failures == 0 ? 0 : 1;
}
