#pragma once

#include <Eigen/Dense>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "phifam/family.hpp"

namespace phifam::cli {

using nlohmann::json;

// Bad flags, unreadable files, malformed or unknown keys: exit code 1.
struct SchemaError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

Deformer parse_deformer(const json& j);
MeasureSpace parse_measure(const json& j, int panels);
RandomVariable parse_variable(const json& j);
PhiFamily parse_family(const json& j, int panels);

// Thresholds used to judge checks in reports. Only these keys may be
// overridden from a config.
struct Tolerances {
  std::map<std::string, double> values{
      {"normalization", 1e-7}, {"escort", 2e-5},  {"projection", 2e-5},
      {"legendre", 2e-5},      {"duality", 1e-4}, {"maxent", 1e-7},
  };
  double operator[](const std::string& key) const { return values.at(key); }
};

struct RunConfig {
  std::optional<json> family;
  std::optional<std::string> fixture;
  std::optional<json> deformer;
  std::optional<json> measure;
  std::vector<Eigen::VectorXd> thetas;  // theta or theta_grid
  bool grid = false;
  std::optional<Eigen::VectorXd> theta_prime;
  std::vector<double> u, v, y, points;
  std::optional<std::vector<double>> p, p_prime;
  std::optional<json> estimator;
  std::optional<json> variable;
  std::optional<double> q;
  int trials = 50;
  std::uint64_t seed = 20070601;
  std::string route = "moment";
  std::optional<std::string> output;
  int panels = kDefaultPanels;
  Tolerances tolerances;
};

// Fills `cfg` from a config document; rejects unknown keys and requires
// "version": 1.
void apply_config(const json& doc, RunConfig& cfg);

std::vector<double> number_list(const json& j, const char* what);
Eigen::VectorXd vector_of(const json& j, const char* what);
// "1,2.5" or "[1, 2.5]" or "3".
std::vector<double> parse_list_flag(const std::string& text, const char* what);

}  // namespace phifam::cli
