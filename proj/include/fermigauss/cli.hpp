#pragma once

// Command-line driver. Every subcommand produces one RunReport; the exit
// code is 0 when every criterion passed, 1 when one failed, 2 on usage,
// configuration or domain errors.

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fermigauss/closed_form_suite.hpp"
#include "fermigauss/ensembles.hpp"
#include "fermigauss/errors.hpp"
#include "fermigauss/identity_suite.hpp"
#include "fermigauss/report.hpp"
#include "fermigauss/resolution_verifier.hpp"
#include "fermigauss/selberg_forms.hpp"

namespace fermigauss::cli {

inline constexpr int kExitPass = 0;
inline constexpr int kExitFail = 1;
inline constexpr int kExitUsage = 2;

inline constexpr const char* kReportDirEnv = "FERMIGAUSS_REPORT_DIR";
inline constexpr double kDefaultFailureFloor = 0.025;

struct CommonOptions {
  std::uint64_t seed = 42;
  std::string out;
  std::string csv;
  int workers = 1;
};

struct Settings {
  CommonOptions common;
  int modes = 2;
  double p = 1.0;
  long samples = 200000;
  std::string mode = "quad";
  std::string cls = "D";
  std::string weight = "gaussian";
  double shift = 0.5;
  bool allow_non_even = false;
  int order = 60;
  std::vector<double> betas{0.0, 0.3, 0.7, 1.5};
  std::string variant = "failure";
  double failure_floor = kDefaultFailureFloor;
  int identity_trials = 50;
  int trace_trials = 100;
  bool consistency = false;
  bool prefactor = false;
  int max_modes = 6;
  std::vector<double> p_values{0.5, 1.0, 3.0};
  std::string sampler = "auto";
  bool dump_eigenvalues = false;
};

namespace detail {

inline void add_check(RunReport& rep, const std::string& prefix, const Check& c) {
  json j = check_to_criterion(c);
  if (!prefix.empty()) j["name"] = prefix + "." + c.name;
  rep.criteria.push_back(std::move(j));
}

inline void add_estimator(RunReport& rep, const EstimatorReport& r) {
  rep.criteria.push_back(estimator_criterion(r));
  for (const auto& c : r.checks) add_check(rep, r.name, c);
  json d{{"criterion", r.criterion},
         {"max_abs_deviation", r.max_abs_deviation},
         {"frobenius_deviation", r.frobenius_deviation},
         {"samples", r.samples},
         {"band_count", r.band_count},
         {"warnings", r.warnings}};
  d["seed"] = r.seed ? rng_to_json(*r.seed) : json(nullptr);
  rep.details[r.name] = std::move(d);
}

inline std::string criteria_csv(const RunReport& rep) {
  std::ostringstream os;
  os << "name,measured,tolerance_or_se,passed\n" << std::setprecision(17);
  for (const auto& c : rep.criteria) {
    os << c["name"].get<std::string>() << ",";
    if (c["measured"].is_number()) os << c["measured"].get<double>();
    os << ",";
    if (c["tolerance_or_se"].is_number()) os << c["tolerance_or_se"].get<double>();
    os << "," << (c["passed"].get<bool>() ? 1 : 0) << "\n";
  }
  return os.str();
}

/// --out, else $FERMIGAUSS_REPORT_DIR/<command>.json, else no file.
inline std::optional<std::string> report_path(const CommonOptions& o, const std::string& command) {
  if (!o.out.empty()) return o.out;
  if (const char* dir = std::getenv(kReportDirEnv); dir && *dir) {
    std::filesystem::create_directories(dir);
    return (std::filesystem::path(dir) / (command + ".json")).string();
  }
  return std::nullopt;
}

inline void print_summary(const RunReport& rep, std::ostream& os) {
  for (const auto& c : rep.criteria) {
    os << (c["passed"].get<bool>() ? "PASS " : "FAIL ") << c["name"].get<std::string>();
    if (c["measured"].is_number()) os << "  measured=" << c["measured"].get<double>();
    if (c["tolerance_or_se"].is_number()) os << "  tol=" << c["tolerance_or_se"].get<double>();
    os << "\n";
  }
  os << rep.command << ": " << (rep.passed() ? "passed" : "FAILED") << "\n";
}

inline WeightSpec weight_from(const Settings& s) {
  const WeightKind k = parse_weight_kind(s.weight);
  return WeightSpec{k, s.p, k == WeightKind::shifted_gaussian ? s.shift : 0.0};
}

inline void require_positive(long v, const char* what) {
  if (v <= 0) throw DomainError(std::string(what) + " must be positive");
}

/// E[sum_j tanh^2(lambda_j / 2)] by radial quadrature (bounded for every weight).
inline double tanh_moment_by_quadrature(const SymmetryClass& cls, const WeightSpec& w, int modes) {
  const RadialAverage a = radial_quadrature_average(cls, w, modes, [](const std::vector<double>& l) {
    double t = 0.0;
    for (double x : l) t += std::tanh(0.5 * x) * std::tanh(0.5 * x);
    return CMatrix(CMatrix::Constant(1, 1, Complex(t)));
  });
  return a.q(0, 0).real();
}

}  // namespace detail

inline RunReport run_identities(const Settings& s) {
  RunReport rep;
  rep.command = "identities";
  rep.parameters = {{"modes", s.modes}, {"identity_trials", s.identity_trials}, {"trace_trials", s.trace_trials}};
  const RngSpec seed{s.common.seed, 0};
  rep.seed = rng_to_json(seed);
  fermigauss::detail::check_mode_cap(s.modes, kDefaultModeCap);
  detail::require_positive(s.identity_trials, "--identity-trials");
  detail::require_positive(s.trace_trials, "--trace-trials");
  const IdentitySuiteOptions opts{s.modes, s.identity_trials, s.trace_trials};
  for (const auto& c : run_identity_suite(opts, seed)) detail::add_check(rep, "", c);
  return rep;
}

inline RunReport run_resolution(const Settings& s, Eigen::MatrixXd* dump) {
  RunReport rep;
  rep.command = "resolution";
  const RngSpec seed{s.common.seed, 0};
  rep.seed = rng_to_json(seed);
  if (s.mode == "quad") {
    const SymmetryClass cls = parse_symmetry_class(s.cls);
    const WeightSpec w = detail::weight_from(s);
    rep.parameters = {{"mode", s.mode}, {"modes", s.modes},   {"p", s.p},
                      {"class", cls.name()}, {"weight", w.name()}, {"shift", w.shift},
                      {"order", s.order}, {"allow_non_even", s.allow_non_even}};
    if (s.modes < 1 || s.modes > 2) throw DomainError("resolution --mode quad supports --modes 1 or 2");
    QuadratureOptions q;
    q.order = s.order;
    q.allow_non_even = s.allow_non_even;
    const PolarForm rot = fixed_class_d_rotation(s.modes, seed);
    detail::add_estimator(rep, verify_resolution_quadrature(s.modes, cls, w, rot, q, seed.substream(1)));
  } else if (s.mode == "mc") {
    detail::require_positive(s.samples, "--samples");
    if (!(s.p > 0.0)) throw DomainError("-p must be > 0");
    rep.parameters = {{"mode", s.mode}, {"modes", s.modes}, {"p", s.p}, {"samples", s.samples},
                      {"workers", s.common.workers}};
    McOptions mc;
    mc.workers = s.common.workers;
    mc.dump_eigenvalues = dump != nullptr;
    const EstimatorReport r = verify_resolution_mc(s.modes, s.p, s.samples, seed, mc);
    if (dump) *dump = r.eigenvalue_dump;
    detail::add_estimator(rep, r);
  } else {
    throw DomainError("--mode must be quad or mc");
  }
  return rep;
}

inline RunReport run_canonical(const Settings& s, Eigen::MatrixXd* dump) {
  RunReport rep;
  rep.command = "canonical";
  detail::require_positive(s.samples, "--samples");
  rep.parameters = {{"modes", s.modes}, {"p", s.p},   {"betas", s.betas},
                    {"samples", s.samples}, {"workers", s.common.workers}};
  const RngSpec seed{s.common.seed, 0};
  rep.seed = rng_to_json(seed);
  McOptions mc;
  mc.workers = s.common.workers;
  mc.dump_eigenvalues = dump != nullptr;
  const CanonicalResult res = verify_canonical_triviality(s.modes, s.p, s.betas, s.samples, seed, mc);
  for (const auto& r : res.reports) detail::add_estimator(rep, r);
  for (const auto& c : res.pairwise) detail::add_check(rep, "pairwise", c);
  if (dump && !res.reports.empty()) *dump = res.reports.front().eigenvalue_dump;
  return rep;
}

inline RunReport run_number_conserving(const Settings& s, Eigen::MatrixXd* dump) {
  RunReport rep;
  rep.command = "number-conserving";
  const RngSpec seed{s.common.seed, 0};
  rep.seed = rng_to_json(seed);
  if (s.variant == "failure") {
    rep.parameters = {{"variant", s.variant}, {"modes", s.modes}, {"p", s.p},
                      {"failure_floor", s.failure_floor}, {"order", s.order}};
    if (s.modes < 1 || s.modes > 2) throw DomainError("number-conserving failure supports --modes 1 or 2");
    QuadratureOptions q;
    q.order = s.order;
    detail::add_estimator(rep, verify_nc_failure(s.modes, s.p, s.failure_floor, q, seed.substream(7)));
  } else if (s.variant == "modified") {
    detail::require_positive(s.samples, "--samples");
    rep.parameters = {{"variant", s.variant}, {"modes", s.modes}, {"p", s.p}, {"samples", s.samples},
                      {"workers", s.common.workers}};
    NcModifiedOptions o;
    o.mc.workers = s.common.workers;
    o.mc.dump_eigenvalues = dump != nullptr;
    const EstimatorReport r = verify_nc_modified(s.modes, s.p, s.samples, seed, o);
    if (dump) *dump = r.eigenvalue_dump;
    detail::add_estimator(rep, r);
  } else {
    throw DomainError("--variant must be failure or modified");
  }
  return rep;
}

inline RunReport run_selberg(const Settings& s, std::vector<std::vector<double>>* table) {
  RunReport rep;
  rep.command = "selberg";
  if (s.max_modes < 1) throw DomainError("--max-modes must be >= 1");
  for (double p : s.p_values)
    if (!(p > 0.0)) throw DomainError("--p-values must all be > 0");
  const bool both = !s.consistency && !s.prefactor;
  rep.parameters = {{"max_modes", s.max_modes}, {"p_values", s.p_values},
                    {"consistency", s.consistency || both}, {"prefactor", s.prefactor || both}};
  if (s.consistency || both) {
    detail::add_check(rep, "", check_triple_consistency(s.max_modes, s.p_values));
    for (const auto& c : check_normalization_constants(s.max_modes, s.p_values)) detail::add_check(rep, "", c);
    if (table) {
      for (int m = 1; m <= s.max_modes; ++m)
        for (double p : s.p_values)
          table->push_back({static_cast<double>(m), p, angular_volume_log(m),
                            radial_gaussian_integral_log(m, p), cartesian_gaussian_integral_log(m, p)});
    }
  }
  if (s.prefactor || both) {
    json verdicts = json::array();
    for (const auto& v : radial_prefactor_verdicts({1, 2}, {1.0, 2.0})) {
      std::ostringstream name;
      name << "radial_prefactor_M" << v.modes << "_p" << v.p;
      detail::add_check(rep, "", make_check(name.str(), v.half_integer_relative_error, "<=", 1e-8));
      verdicts.push_back({{"modes", v.modes},
                          {"p", v.p},
                          {"quadrature_log", v.quadrature_log},
                          {"half_integer_exponent_relative_error", v.half_integer_relative_error},
                          {"integer_exponent_relative_error", v.integer_relative_error}});
    }
    rep.details["radial_prefactor"] = std::move(verdicts);
  }
  return rep;
}

inline RunReport run_ensembles(const Settings& s, Eigen::MatrixXd* dump) {
  RunReport rep;
  rep.command = "ensembles";
  detail::require_positive(s.samples, "--samples");
  const SymmetryClass cls = parse_symmetry_class(s.cls);
  const WeightSpec w = detail::weight_from(s);
  w.validate(s.modes);
  fermigauss::detail::check_mode_cap(s.modes, kDefaultModeCap);
  const bool direct_ok = cls.label == ClassLabel::D && w.kind == WeightKind::gaussian;
  std::string sampler = s.sampler == "auto" ? (direct_ok ? "direct" : "mcmc") : s.sampler;
  if (sampler == "direct" && !direct_ok)
    throw DomainError("--sampler direct is only available for class D with the gaussian weight");
  if (sampler != "direct" && sampler != "mcmc") throw DomainError("--sampler must be auto, direct or mcmc");
  rep.parameters = {{"class", cls.name()}, {"weight", w.name()}, {"modes", s.modes}, {"p", s.p},
                    {"shift", w.shift},    {"samples", s.samples}, {"sampler", sampler},
                    {"workers", s.common.workers}};
  const RngSpec seed{s.common.seed, 0};
  rep.seed = rng_to_json(seed);

  // 2x2 accumulator: (0,0) = sum tanh^2(lambda/2), (1,1) = sum lambda^2.
  constexpr long kChunk = 5000;
  constexpr int kBatch = 20;
  struct Part {
    MatrixAccumulator acc{2};
    std::vector<RVector> lambdas;
    std::vector<std::string> warnings;
    void merge(const Part& o) {
      acc.merge(o.acc);
      lambdas.insert(lambdas.end(), o.lambdas.begin(), o.lambdas.end());
      warnings.insert(warnings.end(), o.warnings.begin(), o.warnings.end());
    }
  };
  auto stat = [](const RVector& l) {
    CMatrix x = CMatrix::Zero(2, 2);
    for (Eigen::Index j = 0; j < l.size(); ++j) {
      const double t = std::tanh(0.5 * l(j));
      x(0, 0) += t * t;
      x(1, 1) += l(j) * l(j);
    }
    return x;
  };
  auto chunk = [&](long c, long count) {
    Part out;
    Engine eng = make_engine(seed.substream(static_cast<std::uint64_t>(c)));
    if (sampler == "direct") {
      for (long i = 0; i < count; ++i) {
        const RVector l = paired_spectrum(sample_class_d(s.modes, s.p, eng));
        out.acc.add(stat(l));
        if (dump) out.lambdas.push_back(l);
      }
      return out;
    }
    const RadialChain chain = sample_radial_mcmc(cls, w, s.modes, static_cast<int>(count), eng);
    if (!chain.warning.empty()) out.warnings.push_back(chain.warning);
    CMatrix batch = CMatrix::Zero(2, 2);
    int in_batch = 0;
    for (long i = 0; i < count; ++i) {
      const RVector l = chain.samples.row(i).transpose();
      batch += stat(l);
      if (dump) out.lambdas.push_back(l);
      if (++in_batch == kBatch) {
        out.acc.add(batch / static_cast<double>(in_batch));
        batch.setZero();
        in_batch = 0;
      }
    }
    if (in_batch > 0 && out.acc.count() == 0) out.acc.add(batch / static_cast<double>(in_batch));
    return out;
  };
  const Part all = run_chunked<Part>(s.samples, kChunk, s.common.workers, chunk);
  const CMatrix mean = all.acc.mean();
  const Eigen::MatrixXd se = all.acc.standard_error();
  rep.details["warnings"] = all.warnings;
  rep.details["mean_sum_lambda_squared"] = mean(1, 1).real();
  rep.details["mean_sum_tanh_squared"] = mean(0, 0).real();

  auto moment_check = [&](const std::string& name, double measured, double target, double err) {
    json j{{"name", name}, {"target", target}, {"measured", measured}, {"tolerance_or_se", err}};
    j["passed"] = std::abs(measured - target) <= kSeMultiplier * err + kStandardErrorFloor;
    rep.criteria.push_back(std::move(j));
  };
  if (sampler == "direct") {
    // Tr H^2 = 2 sum lambda^2 is a sum of M(2M-1) independent squared
    // Gaussian coordinates under exp(-p Tr H^2).
    const double target = s.modes * (2.0 * s.modes - 1.0) / (4.0 * s.p);
    moment_check("mean_sum_lambda_squared", mean(1, 1).real(), target, se(1, 1));
  }
  if (s.modes <= 2) {
    moment_check("mean_sum_tanh_squared_vs_quadrature", mean(0, 0).real(),
                 detail::tanh_moment_by_quadrature(cls, w, s.modes), se(0, 0));
  }
  if (dump) *dump = fermigauss::detail::stack_rows(all.lambdas, s.modes);
  return rep;
}

inline void add_common(CLI::App* sub, CommonOptions& o) {
  sub->add_option("--seed", o.seed, "RNG seed")->capture_default_str();
  sub->add_option("--out", o.out, "structured report path (default $" + std::string(kReportDirEnv) + "/<command>.json)");
  sub->add_option("--csv", o.csv, "flat CSV dump path");
  sub->add_option("--workers", o.workers, "Monte Carlo worker threads")->capture_default_str()->check(CLI::PositiveNumber);
}

/// Parses argv, runs one subcommand, writes its report and returns the exit code.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  Settings s;
  CLI::App app{"fermigauss: exact Fock-space fermionic Gaussian operators and resolution-of-unity checks"};
  app.set_config("--config", "", "key-value (TOML/INI) file supplying any flag; command-line flags win");
  app.require_subcommand(1);

  auto* ids = app.add_subcommand("identities", "operator identity suite");
  add_common(ids, s.common);
  ids->add_option("--modes", s.modes, "largest mode count")->capture_default_str();
  ids->add_option("--identity-trials", s.identity_trials)->capture_default_str();
  ids->add_option("--trace-trials", s.trace_trials)->capture_default_str();

  auto* res = app.add_subcommand("resolution", "resolution of unity by quadrature or Monte Carlo");
  add_common(res, s.common);
  res->add_option("--mode", s.mode, "quad or mc")->check(CLI::IsMember({"quad", "mc"}))->capture_default_str();
  res->add_option("--modes", s.modes)->capture_default_str();
  res->add_option("-p", s.p, "weight stiffness")->capture_default_str();
  res->add_option("--samples", s.samples)->capture_default_str();
  res->add_option("--class", s.cls, "D, C, DIII or CI")->capture_default_str();
  res->add_option("--weight", s.weight, "gaussian, determinant or shifted_gaussian")->capture_default_str();
  res->add_option("--shift", s.shift, "centre of shifted_gaussian")->capture_default_str();
  res->add_flag("--allow-non-even", s.allow_non_even, "run quadrature with a weight that is not even");
  res->add_option("--order", s.order, "quadrature order per axis")->capture_default_str();

  auto* can = app.add_subcommand("canonical", "canonical-ensemble average");
  add_common(can, s.common);
  can->add_option("--modes", s.modes)->capture_default_str();
  can->add_option("-p", s.p)->capture_default_str();
  can->add_option("--betas", s.betas)->delimiter(',')->capture_default_str();
  can->add_option("--samples", s.samples)->capture_default_str();

  auto* nc = app.add_subcommand("number-conserving", "number-conserving failure and modified weight");
  add_common(nc, s.common);
  nc->add_option("--variant", s.variant)->check(CLI::IsMember({"failure", "modified"}))->capture_default_str();
  nc->add_option("--modes", s.modes)->capture_default_str();
  nc->add_option("-p", s.p)->capture_default_str();
  nc->add_option("--samples", s.samples)->capture_default_str();
  nc->add_option("--failure-floor", s.failure_floor)->capture_default_str();
  nc->add_option("--order", s.order)->capture_default_str();

  auto* sel = app.add_subcommand("selberg", "closed-form constants");
  add_common(sel, s.common);
  sel->add_flag("--consistency", s.consistency, "angular + radial = cartesian sweep");
  sel->add_flag("--prefactor", s.prefactor, "quadrature verdict on the radial prefactor");
  sel->add_option("--max-modes", s.max_modes)->capture_default_str();
  sel->add_option("--p-values", s.p_values)->delimiter(',')->capture_default_str();

  auto* ens = app.add_subcommand("ensembles", "sample eigenvalue ensembles");
  add_common(ens, s.common);
  ens->add_option("--class", s.cls)->capture_default_str();
  ens->add_option("--weight", s.weight)->capture_default_str();
  ens->add_option("--shift", s.shift)->capture_default_str();
  ens->add_option("--modes", s.modes)->capture_default_str();
  ens->add_option("-p", s.p)->capture_default_str();
  ens->add_option("--samples", s.samples)->capture_default_str();
  ens->add_option("--sampler", s.sampler, "auto, direct or mcmc")->capture_default_str();
  ens->add_flag("--dump-eigenvalues", s.dump_eigenvalues, "write per-sample eigenvalues to --csv");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return kExitPass;
  } catch (const CLI::CallForAllHelp& e) {
    app.exit(e, out, err);
    return kExitPass;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  CLI::App* sub = app.get_subcommands().front();
  const std::string name = sub->get_name();
  try {
    const bool want_csv = !s.common.csv.empty();
    Eigen::MatrixXd dump;
    Eigen::MatrixXd* dump_ptr = want_csv ? &dump : nullptr;
    std::vector<std::vector<double>> table;
    RunReport rep;
    if (name == "identities") rep = run_identities(s);
    else if (name == "resolution") rep = run_resolution(s, dump_ptr);
    else if (name == "canonical") rep = run_canonical(s, dump_ptr);
    else if (name == "number-conserving") rep = run_number_conserving(s, dump_ptr);
    else if (name == "selberg") rep = run_selberg(s, want_csv ? &table : nullptr);
    else rep = run_ensembles(s, (want_csv && s.dump_eigenvalues) ? dump_ptr : nullptr);

    if (auto path = detail::report_path(s.common, name)) write_text(*path, rep.to_json().dump(2) + "\n");
    if (want_csv) {
      if (dump.size() > 0) {
        write_text(s.common.csv, eigenvalue_csv(dump));
      } else if (!table.empty()) {
        write_text(s.common.csv, table_csv({"modes", "p", "angular_log", "radial_log", "cartesian_log"}, table));
      } else {
        write_text(s.common.csv, detail::criteria_csv(rep));
      }
    }
    detail::print_summary(rep, out);
    return rep.passed() ? kExitPass : kExitFail;
  } catch (const CapacityError& e) {
    err << name << ": " << e.what() << "\n";
    return kExitUsage;
  } catch (const DomainError& e) {
    err << name << ": " << e.what() << "\n";
    return kExitUsage;
  } catch (const ContractError& e) {
    err << name << ": " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << name << ": verification error: " << e.what() << "\n";
    return kExitFail;
  }
}

}  // namespace fermigauss::cli
