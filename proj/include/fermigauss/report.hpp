#pragma once

// Structured run reports (JSON) and flat CSV dumps.

#include <chrono>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "fermigauss/errors.hpp"
#include "fermigauss/estimator.hpp"

#ifndef FERMIGAUSS_GIT_DESCRIBE
#define FERMIGAUSS_GIT_DESCRIBE "unknown"
#endif

namespace fermigauss {

using json = nlohmann::ordered_json;

/// Row-major [re, im] pairs with the mode count and dimension declared.
inline json matrix_to_json(const CMatrix& m, int modes) {
  json data = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) data.push_back({m(i, j).real(), m(i, j).imag()});
  return json{{"modes", modes}, {"dimension", m.rows()}, {"data", std::move(data)}};
}

inline json real_matrix_to_json(const Eigen::MatrixXd& m) {
  json data = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) data.push_back(m(i, j));
  return json{{"dimension", m.rows()}, {"data", std::move(data)}};
}

inline json rng_to_json(const RngSpec& s) { return json{{"seed", s.seed}, {"stream", s.stream}}; }

inline json check_to_criterion(const Check& c) {
  return json{{"name", c.name},
              {"target", c.relation + " " + [&] {
                 std::ostringstream os;
                 os << std::setprecision(17) << c.threshold;
                 return os.str();
               }()},
              {"measured", c.measured},
              {"tolerance_or_se", c.threshold},
              {"passed", c.passed}};
}

inline json estimator_to_json(const EstimatorReport& r) {
  json out{{"name", r.name},
           {"modes", r.modes},
           {"criterion", r.criterion},
           {"passed", r.passed},
           {"samples", r.samples},
           {"max_abs_deviation", r.max_abs_deviation},
           {"frobenius_deviation", r.frobenius_deviation},
           {"tolerance", r.tolerance},
           {"band_count", r.band_count},
           {"target", matrix_to_json(r.target, r.modes)},
           {"mean", matrix_to_json(r.mean, r.modes)}};
  out["seed"] = r.seed ? rng_to_json(*r.seed) : json(nullptr);
  if (r.per_entry_se.size()) out["per_entry_se"] = real_matrix_to_json(r.per_entry_se);
  json checks = json::array();
  for (const auto& c : r.checks) checks.push_back(check_to_criterion(c));
  out["checks"] = std::move(checks);
  out["warnings"] = r.warnings;
  return out;
}

/// Criterion line for an estimator: the headline deviation against its rule.
inline json estimator_criterion(const EstimatorReport& r) {
  const bool mc = r.per_entry_se.size() > 0;
  return json{{"name", r.name},
              {"target", matrix_to_json(r.target, r.modes)},
              {"measured", matrix_to_json(r.mean, r.modes)},
              {"tolerance_or_se", mc ? json(real_matrix_to_json(r.per_entry_se)) : json(r.tolerance)},
              {"passed", r.passed}};
}

inline std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

struct RunReport {
  std::string command;
  json parameters = json::object();
  json seed = nullptr;
  json criteria = json::array();
  json details = json::object();

  bool passed() const {
    for (const auto& c : criteria)
      if (!c.value("passed", false)) return false;
    return true;
  }

  json to_json() const {
    return json{{"command", command},       {"parameters", parameters},
                {"seed", seed},             {"git_describe", FERMIGAUSS_GIT_DESCRIBE},
                {"criteria", criteria},     {"details", details},
                {"passed", passed()},       {"timestamp", utc_timestamp()}};
  }
};

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) throw ContractError("cannot open '" + path + "' for writing");
  f << text;
}

/// One row per sample, columns lambda_1..lambda_M, 17 significant digits.
inline std::string eigenvalue_csv(const Eigen::MatrixXd& rows) {
  std::ostringstream os;
  for (Eigen::Index j = 0; j < rows.cols(); ++j) os << (j ? "," : "") << "lambda_" << (j + 1);
  os << "\n" << std::setprecision(17);
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    for (Eigen::Index j = 0; j < rows.cols(); ++j) os << (j ? "," : "") << rows(i, j);
    os << "\n";
  }
  return os.str();
}

/// Generic table with a mandatory header row.
inline std::string table_csv(const std::vector<std::string>& header,
                             const std::vector<std::vector<double>>& rows) {
  std::ostringstream os;
  for (std::size_t j = 0; j < header.size(); ++j) os << (j ? "," : "") << header[j];
  os << "\n" << std::setprecision(17);
  for (const auto& r : rows) {
    for (std::size_t j = 0; j < r.size(); ++j) os << (j ? "," : "") << r[j];
    os << "\n";
  }
  return os.str();
}

}  // namespace fermigauss
