#include "report.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "phifam/errors.hpp"
#include "phifam/fixtures.hpp"
#include "phifam/geometry.hpp"

namespace phifam::cli {

json num(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", x);
  return std::strtod(buf, nullptr);
}

json num(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(num(v[i]));
  return out;
}

json num(const Eigen::MatrixXd& m) {
  json out = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) out.push_back(num(Eigen::VectorXd(m.row(i).transpose())));
  return out;
}

std::string text(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", x);
  std::string s = buf;
  if (s.find_first_of(".e") == std::string::npos) s += ".0";
  return s;
}

json check(double value, double tolerance) {
  return {{"value", num(value)}, {"tolerance", tolerance}, {"pass", std::abs(value) <= tolerance}};
}

std::string error_kind(const std::exception& e) {
  if (dynamic_cast<const NonPositiveInput*>(&e)) return "NonPositiveInput";
  if (dynamic_cast<const DivergentMoment*>(&e)) return "DivergentMoment";
  if (dynamic_cast<const DivergentIntegral*>(&e)) return "DivergentIntegral";
  if (dynamic_cast<const OutsideDomain*>(&e)) return "OutsideDomain";
  if (dynamic_cast<const SupportMismatch*>(&e)) return "SupportMismatch";
  if (dynamic_cast<const ZeroDenominator*>(&e)) return "ZeroDenominator";
  if (dynamic_cast<const SingularMetric*>(&e)) return "SingularMetric";
  if (dynamic_cast<const SpaceMismatch*>(&e)) return "SpaceMismatch";
  return "Error";
}

const PhiFamily& Model::phi_family(const char* command) const {
  if (!family) throw SchemaError(std::string(command) + " needs a phi-exponential family; " + name + " is a bare escort pair");
  return *family;
}

namespace {

Model from_family(std::string name, PhiFamily fam) {
  Model m;
  m.name = std::move(name);
  m.pair = EscortPair::canonical(fam);
  m.densities = densities(fam);
  m.statistics = fam.statistics();
  m.family = std::move(fam);
  return m;
}

PhiFamily scalar_family(const Deformer& d, int panels) {
  return PhiFamily(DeformedCalculus(d), MeasureSpace::lebesgue(0.0, kInf, panels), {RandomVariable::monomial(1.0, 1.0)});
}

}  // namespace

Model fixture_model(const std::string& name, int panels, std::optional<double> q) {
  if (q && name != "example2" && name != "example4") throw SchemaError("q only applies to example2 and example4");
  try {
    if (name == "example1") {
      Model m;
      m.name = name;
      m.pair = fixtures::example1_pair(panels);
      m.densities = fixtures::triangular(panels);
      m.statistics = m.pair->statistics();
      return m;
    }
    if (name == "example1c") return from_family(name, fixtures::example1c(panels));
    if (name == "example2") return from_family(name, scalar_family(Deformer::power(q.value_or(0.5)), panels));
    if (name == "example3") return from_family(name, scalar_family(Deformer::ceiling(), panels));
    if (name == "example4") return from_family(name, scalar_family(Deformer::scaled_power(q.value_or(1.5)), panels));
  } catch (const InvalidArgument& e) {
    throw SchemaError(name + ": " + e.what());
  }
  throw SchemaError("unknown fixture \"" + name + "\" (expected example1, example1c, example2, example3 or example4)");
}

Model resolve_model(const RunConfig& cfg) {
  if (cfg.family && cfg.fixture) throw SchemaError("give either family or fixture, not both");
  if (cfg.fixture) return fixture_model(*cfg.fixture, cfg.panels, cfg.q);
  if (cfg.q) throw SchemaError("q only applies to the example2 and example4 fixtures");
  if (cfg.family) return from_family("family", parse_family(*cfg.family, cfg.panels));
  throw SchemaError("no family given (use --family, --fixture or a config)");
}

}  // namespace phifam::cli
