#include "config.hpp"

#include <cmath>
#include <set>
#include <sstream>

#include "phifam/errors.hpp"

namespace phifam::cli {

namespace {

void only_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!j.is_object()) throw SchemaError(where + " must be a JSON object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, value] : j.items())
    if (!ok.count(key)) throw SchemaError("unknown key \"" + key + "\" in " + where);
}

const json& need(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw SchemaError(where + " is missing \"" + key + "\"");
  return j.at(key);
}

double number(const json& j, const std::string& what) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return kInf;
    if (s == "-inf") return -kInf;
  }
  throw SchemaError(what + " must be a number");
}

std::string kind_of(const json& j, const std::string& where) {
  const json& k = need(j, "kind", where);
  if (!k.is_string()) throw SchemaError(where + " \"kind\" must be a string");
  return k.get<std::string>();
}

}  // namespace

std::vector<double> number_list(const json& j, const char* what) {
  if (j.is_number()) return {j.get<double>()};
  if (!j.is_array()) throw SchemaError(std::string(what) + " must be a number or an array of numbers");
  std::vector<double> out;
  for (const auto& e : j) out.push_back(number(e, what));
  return out;
}

Eigen::VectorXd vector_of(const json& j, const char* what) {
  const auto v = number_list(j, what);
  if (v.empty()) throw SchemaError(std::string(what) + " must not be empty");
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

std::vector<double> parse_list_flag(const std::string& text, const char* what) {
  try {
    if (!text.empty() && text.front() == '[') return number_list(json::parse(text), what);
  } catch (const json::exception& e) {
    throw SchemaError(std::string(what) + ": " + e.what());
  }
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw SchemaError(std::string(what) + ": cannot read \"" + item + "\" as a number");
    }
  }
  if (out.empty()) throw SchemaError(std::string(what) + " is empty");
  return out;
}

Deformer parse_deformer(const json& j) {
  const std::string kind = kind_of(j, "deformer");
  try {
    if (kind == "power" || kind == "scaled_power") {
      only_keys(j, {"kind", "q"}, "deformer");
      const double q = number(need(j, "q", "deformer"), "deformer q");
      return kind == "power" ? Deformer::power(q) : Deformer::scaled_power(q);
    }
    if (kind == "constant" || kind == "ceiling") {
      only_keys(j, {"kind"}, "deformer");
      return kind == "constant" ? Deformer::constant() : Deformer::ceiling();
    }
    if (kind == "table") {
      only_keys(j, {"kind", "knots"}, "deformer");
      const json& k = need(j, "knots", "deformer");
      if (!k.is_array()) throw SchemaError("deformer knots must be an array of [u, phi] pairs");
      std::vector<std::pair<double, double>> knots;
      for (const auto& e : k) {
        if (!e.is_array() || e.size() != 2) throw SchemaError("each deformer knot must be [u, phi]");
        knots.emplace_back(number(e[0], "knot u"), number(e[1], "knot phi"));
      }
      return Deformer::table(std::move(knots));
    }
  } catch (const InvalidArgument& e) {
    throw SchemaError(std::string("deformer: ") + e.what());
  }
  throw SchemaError("unknown deformer kind \"" + kind + "\"");
}

MeasureSpace parse_measure(const json& j, int panels) {
  const std::string kind = kind_of(j, "measure");
  try {
    if (kind == "discrete") {
      only_keys(j, {"kind", "points", "weights"}, "measure");
      const auto pts = number_list(need(j, "points", "measure"), "measure points");
      std::vector<double> w(pts.size(), 1.0);
      if (j.contains("weights")) w = number_list(j.at("weights"), "measure weights");
      return MeasureSpace::discrete(pts, w);
    }
    if (kind == "lebesgue") {
      only_keys(j, {"kind", "a", "b"}, "measure");
      return MeasureSpace::lebesgue(number(need(j, "a", "measure"), "measure a"),
                                    number(need(j, "b", "measure"), "measure b"), panels);
    }
  } catch (const InvalidArgument& e) {
    throw SchemaError(std::string("measure: ") + e.what());
  }
  throw SchemaError("unknown measure kind \"" + kind + "\"");
}

RandomVariable parse_variable(const json& j) {
  const std::string kind = kind_of(j, "random variable");
  try {
    if (kind == "monomial") {
      only_keys(j, {"kind", "scale", "degree"}, "random variable");
      const double s = j.contains("scale") ? number(j.at("scale"), "scale") : 1.0;
      return RandomVariable::monomial(s, number(need(j, "degree", "random variable"), "degree"));
    }
    if (kind == "table") {
      only_keys(j, {"kind", "points", "values"}, "random variable");
      return RandomVariable::table(number_list(need(j, "points", "random variable"), "points"),
                                   number_list(need(j, "values", "random variable"), "values"));
    }
  } catch (const InvalidArgument& e) {
    throw SchemaError(std::string("random variable: ") + e.what());
  }
  throw SchemaError("unknown random variable kind \"" + kind + "\"");
}

PhiFamily parse_family(const json& j, int panels) {
  only_keys(j, {"deformer", "measure", "statistics"}, "family");
  const json& stats = need(j, "statistics", "family");
  if (!stats.is_array() || stats.empty()) throw SchemaError("family statistics must be a nonempty array");
  std::vector<RandomVariable> c;
  for (const auto& s : stats) c.push_back(parse_variable(s));
  return PhiFamily(DeformedCalculus(parse_deformer(need(j, "deformer", "family"))),
                   parse_measure(need(j, "measure", "family"), panels), std::move(c));
}

void apply_config(const json& doc, RunConfig& cfg) {
  only_keys(doc,
            {"version", "family", "fixture", "deformer", "measure", "theta", "theta_grid", "theta_prime", "u", "v",
             "y", "points", "p", "p_prime", "estimator", "variable", "q", "trials", "seed", "route", "output",
             "panels", "tolerances"},
            "config");
  if (!doc.contains("version") || doc.at("version") != 1) throw SchemaError("config must declare \"version\": 1");
  if (doc.contains("family")) cfg.family = doc.at("family");
  if (doc.contains("fixture")) {
    if (!doc.at("fixture").is_string()) throw SchemaError("fixture must be a string");
    cfg.fixture = doc.at("fixture").get<std::string>();
  }
  if (doc.contains("deformer")) cfg.deformer = doc.at("deformer");
  if (doc.contains("measure")) cfg.measure = doc.at("measure");
  if (doc.contains("theta") && doc.contains("theta_grid")) throw SchemaError("give either theta or theta_grid");
  if (doc.contains("theta")) cfg.thetas = {vector_of(doc.at("theta"), "theta")};
  if (doc.contains("theta_grid")) {
    const json& g = doc.at("theta_grid");
    if (!g.is_array()) throw SchemaError("theta_grid must be an array");
    cfg.thetas.clear();
    for (const auto& t : g) cfg.thetas.push_back(vector_of(t, "theta_grid entry"));
    cfg.grid = true;
  }
  if (doc.contains("theta_prime")) cfg.theta_prime = vector_of(doc.at("theta_prime"), "theta_prime");
  if (doc.contains("u")) cfg.u = number_list(doc.at("u"), "u");
  if (doc.contains("v")) cfg.v = number_list(doc.at("v"), "v");
  if (doc.contains("y")) cfg.y = number_list(doc.at("y"), "y");
  if (doc.contains("points")) cfg.points = number_list(doc.at("points"), "points");
  if (doc.contains("p")) cfg.p = number_list(doc.at("p"), "p");
  if (doc.contains("p_prime")) cfg.p_prime = number_list(doc.at("p_prime"), "p_prime");
  if (doc.contains("estimator")) cfg.estimator = doc.at("estimator");
  if (doc.contains("variable")) cfg.variable = doc.at("variable");
  if (doc.contains("q")) cfg.q = number(doc.at("q"), "q");
  if (doc.contains("trials")) {
    if (!doc.at("trials").is_number_integer() || doc.at("trials").get<int>() < 0)
      throw SchemaError("trials must be a nonnegative integer");
    cfg.trials = doc.at("trials").get<int>();
  }
  if (doc.contains("seed")) {
    if (!doc.at("seed").is_number_unsigned()) throw SchemaError("seed must be a nonnegative integer");
    cfg.seed = doc.at("seed").get<std::uint64_t>();
  }
  if (doc.contains("route")) {
    const json& r = doc.at("route");
    if (r != "moment" && r != "direct") throw SchemaError("route must be \"moment\" or \"direct\"");
    cfg.route = r.get<std::string>();
  }
  if (doc.contains("output")) {
    if (!doc.at("output").is_string()) throw SchemaError("output must be a path string");
    cfg.output = doc.at("output").get<std::string>();
  }
  if (doc.contains("panels")) {
    if (!doc.at("panels").is_number_integer() || doc.at("panels").get<int>() < 1)
      throw SchemaError("panels must be a positive integer");
    cfg.panels = doc.at("panels").get<int>();
  }
  if (doc.contains("tolerances")) {
    const json& t = doc.at("tolerances");
    if (!t.is_object()) throw SchemaError("tolerances must be an object");
    for (const auto& [key, value] : t.items()) {
      if (!cfg.tolerances.values.count(key)) throw SchemaError("unknown tolerance \"" + key + "\"");
      const double x = number(value, "tolerance " + key);
      if (!(x > 0.0)) throw SchemaError("tolerance " + key + " must be positive");
      cfg.tolerances.values[key] = x;
    }
  }
}

}  // namespace phifam::cli
