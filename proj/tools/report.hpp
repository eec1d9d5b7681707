#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <functional>
#include <optional>
#include <ostream>
#include <string>

#include "config.hpp"
#include "phifam/family.hpp"

namespace phifam::cli {

// 9 significant digits; non-finite values become "inf", "-inf" or "nan".
json num(double x);
json num(const Eigen::VectorXd& v);
json num(const Eigen::MatrixXd& m);
// Plain-text form of num(), always with a decimal point or exponent.
std::string text(double x);

json check(double value, double tolerance);

// lhs >= rhs up to quadrature error; attained bounds sit right at equality.
inline bool bound_holds(double lhs, double rhs) { return lhs >= rhs - 2e-5 * std::max(1.0, rhs); }

// Name of the library exception type, for structured findings.
std::string error_kind(const std::exception& e);

// What a command operates on: a φ-exponential family (with its canonical
// escort pair) or, for Example 1, a bare escort pair with its base family.
struct Model {
  std::string name;
  std::optional<PhiFamily> family;
  std::optional<EscortPair> pair;
  PdfFamily densities;
  std::vector<RandomVariable> statistics;

  int dimension() const { return pair->dimension(); }
  const PhiFamily& phi_family(const char* command) const;
};

Model resolve_model(const RunConfig& cfg);
Model fixture_model(const std::string& name, int panels, std::optional<double> q = std::nullopt);

}  // namespace phifam::cli
