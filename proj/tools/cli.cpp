#include "cli.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "phifam/entropy.hpp"
#include "phifam/errors.hpp"
#include "phifam/geometry.hpp"
#include "report.hpp"

namespace phifam::cli {

namespace {

json parse_json_flag(const std::string& text, const char* what) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw SchemaError(std::string(what) + " is not valid JSON: " + e.what());
  }
}

int env_panels() {
  const char* env = std::getenv("PHIFAM_PANELS");
  if (!env || !*env) return kDefaultPanels;
  char* end = nullptr;
  const long n = std::strtol(env, &end, 10);
  if (*end != '\0' || n < 1 || n > 1 << 20) throw SchemaError(std::string("PHIFAM_PANELS must be a positive integer, got ") + env);
  return static_cast<int>(n);
}

json base_report(const std::string& command, const RunConfig& cfg) {
  return {{"command", command}, {"panels", cfg.panels}, {"tolerances", cfg.tolerances.values}};
}

json judged(double value, double tolerance, bool pass) {
  return {{"value", num(value)}, {"tolerance", tolerance}, {"pass", pass}};
}

bool has_failure(const json& j) {
  if (j.is_object()) {
    if (j.contains("pass") && j.at("pass") == false) return true;
    if (j.contains("status") && j.at("status") == "error") return true;
    for (const auto& [k, v] : j.items())
      if (has_failure(v)) return true;
  } else if (j.is_array()) {
    for (const auto& v : j)
      if (has_failure(v)) return true;
  }
  return false;
}

void write_text(const RunConfig& cfg, std::ostream& out, const std::string& body) {
  if (!cfg.output) {
    out << body;
    return;
  }
  std::ofstream f(*cfg.output, std::ios::binary);
  if (!f) throw SchemaError("cannot write output file " + *cfg.output);
  f << body;
}

int emit(const RunConfig& cfg, std::ostream& out, json report) {
  const bool failed = has_failure(report);
  report["status"] = failed ? "findings" : "ok";
  write_text(cfg, out, report.dump(2) + "\n");
  return failed ? 2 : 0;
}

json error_record(const Eigen::VectorXd& theta, const std::exception& e) {
  return {{"theta", num(theta)}, {"status", "error"}, {"error", error_kind(e)}, {"message", e.what()}};
}

// Evaluates `fn` at every θ of the config, grid points in parallel. Domain
// errors become per-record findings; anything else is rethrown.
std::vector<json> per_theta(const RunConfig& cfg, int dimension,
                            const std::function<json(const Eigen::VectorXd&)>& fn) {
  if (cfg.thetas.empty()) throw SchemaError("theta is required (--theta or \"theta\"/\"theta_grid\")");
  for (const auto& t : cfg.thetas)
    if (t.size() != dimension)
      throw SchemaError("theta has " + std::to_string(t.size()) + " entries, the family has " +
                        std::to_string(dimension) + " parameters");
  const std::size_t n = cfg.thetas.size();
  std::vector<json> rows(n);
  std::vector<std::exception_ptr> fatal(n);
  std::atomic<std::size_t> next{0};
  const auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        rows[i] = fn(cfg.thetas[i]);
      } catch (const Error& e) {
        rows[i] = error_record(cfg.thetas[i], e);
      } catch (...) {
        fatal[i] = std::current_exception();
      }
    }
  };
  const std::size_t workers = std::min<std::size_t>(n, std::max(1u, std::thread::hardware_concurrency()));
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  for (const auto& e : fatal)
    if (e) std::rethrow_exception(e);
  return rows;
}

json records_report(const std::string& command, const RunConfig& cfg, const Model& m, std::vector<json> rows) {
  json r = base_report(command, cfg);
  r["model"] = m.name;
  r["records"] = std::move(rows);
  return r;
}

Pdf pair_pdf(const EscortPair& pair, const PairPoint& pt, bool escort) {
  return Pdf{pair.space(), escort ? pt.escort : pt.base, pt.breakpoints};
}

// ---- kernel -----------------------------------------------------------

int cmd_kernel(const std::string& command, const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  if (!cfg.deformer) throw SchemaError(command + " needs --deformer");
  const DeformedCalculus calc(parse_deformer(*cfg.deformer));
  const bool ln = command == "lnphi";
  const std::vector<double>& args = ln ? cfg.u : cfg.y;
  if (args.empty()) throw SchemaError(command + (ln ? " needs --u" : " needs --y"));
  json values = json::array();
  std::string lines;
  for (double a : args) {
    try {
      const double r = ln ? calc.ln_phi(a) : calc.exp_phi(a);
      lines += text(r) + "\n";
      values.push_back({{ln ? "u" : "y", num(a)}, {ln ? "ln_phi" : "exp_phi", num(r)}});
    } catch (const Error& e) {
      err << command << ": " << error_kind(e) << ": " << e.what() << "\n";
      return 2;
    }
  }
  out << lines;
  if (cfg.output) {
    json r = base_report(command, cfg);
    r["deformer"] = *cfg.deformer;
    r["values"] = values;
    return emit(cfg, out, r);
  }
  return 0;
}

// ---- family -----------------------------------------------------------

json normalize_record(const Model& m, const RunConfig& cfg, const Eigen::VectorXd& theta) {
  const double tol = cfg.tolerances["normalization"];
  json r = {{"theta", num(theta)}};
  if (m.family) {
    const FamilyMember mem = m.family->at(theta);
    r["G"] = num(mem.G());
    r["Z"] = num(mem.Z());
    r["normalization_residual"] = check(normalization_residual(mem.density()), tol);
    r["escort_normalization_residual"] = check(normalization_residual(mem.escort_density()), tol);
  } else {
    const PairPoint pt = m.pair->at(theta);
    r["normalization_residual"] = check(normalization_residual(pair_pdf(*m.pair, pt, false)), tol);
    r["escort_normalization_residual"] = check(normalization_residual(pair_pdf(*m.pair, pt, true)), tol);
  }
  return r;
}

json escort_record(const Model& m, const RunConfig& cfg, const Eigen::VectorXd& theta) {
  const PairPoint pt = m.pair->at(theta);
  json r = {{"theta", num(theta)}};
  if (pt.G) r["G"] = num(*pt.G);
  if (pt.Z) r["Z"] = num(*pt.Z);
  json pts = json::array();
  for (double x : cfg.points) pts.push_back({{"x", num(x)}, {"p", num(pt.base(x))}, {"P", num(pt.escort(x))}});
  r["points"] = pts;
  json cond = json::array();
  for (int k = 0; k < m.dimension(); ++k)
    cond.push_back(check(escort_condition_residual(*m.pair, theta, k), cfg.tolerances["escort"]));
  r["escort_condition"] = cond;
  return r;
}

json fisher_json(const InfoMatrix& I) {
  if (I.divergent) return "divergent";
  return num(I.entries);
}

json fisher_record(const Model& m, const Eigen::VectorXd& theta) {
  const InfoMatrix I = fisher_matrix(m.densities, theta);
  json r = {{"theta", num(theta)}, {"fisher", fisher_json(I)}};
  if (!I.note.empty()) r["note"] = I.note;
  return r;
}

json metric_record(const Model& m, const Eigen::VectorXd& theta) {
  const InfoMatrix g = g_matrix(*m.pair, theta);
  json r = {{"theta", num(theta)}, {"g", g.divergent ? json("divergent") : num(g.entries)}};
  if (!g.divergent) r["condition_number"] = num(g.condition_number());
  if (!g.note.empty()) r["note"] = g.note;
  const Eigen::VectorXd reg = regularity_residual(*m.pair, theta);
  r["regularity_residual"] = num(reg);
  if (m.family && !g.divergent) r["g_over_Z"] = num(Eigen::MatrixXd(g.entries / m.family->at(theta).Z()));
  return r;
}

Estimator estimator_of(const Model& m, const RunConfig& cfg) {
  Estimator est;
  if (cfg.estimator) {
    const json& e = *cfg.estimator;
    if (!e.is_array() || e.empty()) throw SchemaError("estimator must be a nonempty array of random variables");
    for (const auto& c : e) est.components.push_back(parse_variable(c));
  } else {
    est.components = m.statistics;
  }
  if (est.components.empty()) throw SchemaError("no estimator given and the model has no statistics");
  return est;
}

Eigen::VectorXd direction(const std::vector<double>& given, int size, const char* what) {
  if (given.empty()) return Eigen::VectorXd::Ones(size);
  if (static_cast<int>(given.size()) != size)
    throw SchemaError(std::string(what) + " needs " + std::to_string(size) + " entries");
  return Eigen::Map<const Eigen::VectorXd>(given.data(), size);
}

json bound_record(const Model& m, const RunConfig& cfg, const Eigen::VectorXd& theta) {
  const Estimator est = estimator_of(m, cfg);
  const Eigen::VectorXd u = direction(cfg.u, est.dimension(), "u");
  const Eigen::VectorXd v = direction(cfg.v, m.dimension(), "v");
  const BoundSides b = crb_sides(*m.pair, est, theta, u, v);
  json r = {{"theta", num(theta)},
            {"crb",
             {{"lhs", num(b.lhs)},
              {"rhs", num(b.rhs)},
              {"regularity", num(b.regularity)},
              {"advisory", b.advisory},
              {"holds", bound_holds(b.lhs, b.rhs)}}}};
  try {
    const BoundSides c = classical_crb_sides(m.densities, est, theta, u, v);
    r["classical"] = {{"lhs", num(c.lhs)}, {"rhs", num(c.rhs)}};
    r["fisher"] = "finite";
  } catch (const DivergentIntegral& e) {
    r["classical"] = "divergent";
    r["fisher"] = "divergent";
    r["fisher_note"] = e.what();
  }
  return r;
}

json project_record(const Model& m, const RunConfig& cfg, const Eigen::VectorXd& theta) {
  if (!cfg.variable) throw SchemaError("project needs --variable");
  const RandomVariable A = parse_variable(*cfg.variable);
  const RandomVariable pA = project(*m.pair, theta, A);
  const double tol = cfg.tolerances["projection"];
  json r = {{"theta", num(theta)}};
  r["mean"] = check(inner(*m.pair, theta, pA, RandomVariable::constant(1.0)), tol);
  json tangent = json::array();
  for (int k = 0; k < m.dimension(); ++k) tangent.push_back(check(inner(*m.pair, theta, score(*m.pair, theta, k), pA), tol));
  r["inner_with_scores"] = tangent;
  json pts = json::array();
  for (double x : cfg.points) pts.push_back({{"x", num(x)}, {"value", num(pA(x))}});
  r["points"] = pts;
  return r;
}

json duality_record(const PhiFamily& fam, const RunConfig& cfg, const Eigen::VectorXd& theta) {
  const DualPoint d = dual_coordinates(fam, theta);
  const DualityResiduals res = duality_residuals(fam, theta);
  const double tol = cfg.tolerances["duality"];
  return {{"theta", num(theta)},
          {"eta", num(d.eta)},
          {"F", num(d.F)},
          {"E", num(d.E)},
          {"legendre", check(d.legendre_residual(), cfg.tolerances["legendre"])},
          {"grad_F", check(res.grad_F.cwiseAbs().maxCoeff(), tol)},
          {"grad_I", check(res.grad_I.cwiseAbs().maxCoeff(), tol)},
          {"jacobian", check(res.jacobian.cwiseAbs().maxCoeff(), tol)}};
}

// ---- entropy ----------------------------------------------------------

json divergence_json(const DivergenceValue& d) {
  json r = {{"value", num(d.value)}};
  if (d.decomposition)
    r["decomposition"] = {{"I_p", num(d.decomposition->I_p)},
                          {"I_p_prime", num(d.decomposition->I_p_prime)},
                          {"linear_term", num(d.decomposition->linear_term)}};
  return r;
}

json maxent_json(const MaxentReport& r, double tol) {
  return {{"trials", r.trials},
          {"seed", r.seed},
          {"violations", r.violations},
          {"free_energy_violations", r.free_energy_violations},
          {"I_theta", num(r.I_theta)},
          {"F", num(r.F)},
          {"max_excess", judged(r.max_excess, tol, r.max_excess <= tol)},
          {"min_gap", judged(r.min_gap, tol, r.min_gap >= -tol)},
          {"max_constraint_residual", num(r.max_constraint_residual)}};
}

InformationRoute route_of(const RunConfig& cfg) {
  return cfg.route == "direct" ? InformationRoute::direct : InformationRoute::moment;
}

// A discrete pdf given pointwise on the measure's atoms.
Pdf discrete_pdf(const RunConfig& cfg, const std::vector<double>& values, const char* what) {
  if (!cfg.measure) throw SchemaError(std::string(what) + " needs a discrete --measure");
  const MeasureSpace space = parse_measure(*cfg.measure, cfg.panels);
  if (!space.is_discrete()) throw SchemaError(std::string(what) + " needs a discrete measure");
  const std::vector<double>& points = space.points();
  if (points.size() != values.size())
    throw SchemaError(std::string(what) + " must have one value per measure point");
  for (double v : values)
    if (!(v >= 0.0) || !std::isfinite(v)) throw SchemaError(std::string(what) + " values must be finite and >= 0");
  const RandomVariable lookup = RandomVariable::table(points, values);
  return Pdf{space, [lookup](double x) { return lookup(x); }, {}};
}

bool discrete_mode(const RunConfig& cfg) { return cfg.p.has_value(); }

int cmd_entropy(const std::string& command, const RunConfig& cfg, std::ostream& out) {
  json r = base_report(command, cfg);
  if (discrete_mode(cfg)) {
    if (!cfg.deformer) throw SchemaError(command + " on a pointwise pdf needs --deformer");
    const DeformedCalculus calc(parse_deformer(*cfg.deformer));
    const Pdf p = discrete_pdf(cfg, *cfg.p, "p");
    try {
      if (command == "entropy") r["I_phi"] = num(information_content(calc, p, route_of(cfg)));
      if (cfg.p_prime) r["divergence"] = divergence_json(divergence(calc, p, discrete_pdf(cfg, *cfg.p_prime, "p_prime")));
      else if (command == "divergence") throw SchemaError("divergence needs --p-prime");
    } catch (const Error& e) {
      r["error"] = error_kind(e);
      r["message"] = e.what();
      r["status"] = "error";
      write_text(cfg, out, r.dump(2) + "\n");
      return 2;
    }
    return emit(cfg, out, r);
  }

  const Model m = resolve_model(cfg);
  const PhiFamily& fam = m.phi_family(command.c_str());
  if (command == "divergence" && !cfg.theta_prime) throw SchemaError("divergence needs --theta-prime");
  if (cfg.theta_prime && cfg.theta_prime->size() != fam.dimension()) throw SchemaError("theta_prime has the wrong size");
  const double tol = cfg.tolerances["maxent"];
  auto rows = per_theta(cfg, fam.dimension(), [&](const Eigen::VectorXd& theta) {
    json row = {{"theta", num(theta)}};
    const FamilyMember mem = fam.at(theta);
    if (command == "entropy") row["I_phi"] = num(information_content(fam.calculus(), mem.density(), route_of(cfg)));
    if (cfg.theta_prime) {
      row["theta_prime"] = num(*cfg.theta_prime);
      const Pdf other = fam.at(*cfg.theta_prime).density();
      row["divergence"] = divergence_json(divergence(fam.calculus(), mem.density(), other));
    }
    if (command == "entropy" || command == "maxent") row["maxent"] = maxent_json(maxent_check(fam, theta, cfg.trials, cfg.seed), tol);
    return row;
  });
  return emit(cfg, out, records_report(command, cfg, m, std::move(rows)));
}

// ---- report grid ------------------------------------------------------

std::string csv(double x) { return text(x); }

int cmd_report(const RunConfig& cfg, std::ostream& out) {
  const Model m = resolve_model(cfg);
  const PhiFamily& fam = m.phi_family("report");
  const int n = fam.dimension();
  std::vector<std::string> cols{"status"};
  for (int k = 0; k < n; ++k) cols.push_back("theta_" + std::to_string(k + 1));
  cols.insert(cols.end(), {"G", "Z"});
  for (int k = 0; k < n; ++k) cols.push_back("eta_" + std::to_string(k + 1));
  cols.insert(cols.end(), {"F", "E", "legendre_residual"});
  for (int k = 0; k < n; ++k)
    for (int l = 0; l < n; ++l) cols.push_back("g_" + std::to_string(k + 1) + std::to_string(l + 1));
  cols.insert(cols.end(), {"crb_lhs", "crb_rhs"});

  std::string body = "# phifam report: " + m.name + ", panels " + std::to_string(cfg.panels) +
                     ", legendre tolerance " + text(cfg.tolerances["legendre"]) +
                     "; columns: status (ok or the error kind), theta, G, Z, eta = E_theta c, F, E = I_phi, "
                     "F + E - theta.eta, g (row-major), generalized CRB sides at u = v = 1\n";
  for (std::size_t i = 0; i < cols.size(); ++i) body += (i ? "," : "") + cols[i];
  body += "\n";
  if (cfg.thetas.empty()) {
    write_text(cfg, out, body);
    return 1;
  }

  const Estimator est{fam.statistics()};
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
  const auto rows = per_theta(cfg, n, [&](const Eigen::VectorXd& theta) {
    const FamilyMember mem = fam.at(theta);
    const DualPoint d = dual_coordinates(fam, theta);
    const InfoMatrix g = g_matrix(*m.pair, theta);
    const BoundSides b = crb_sides(*m.pair, est, theta, ones, ones);
    json row = json::array({"ok"});
    for (int k = 0; k < n; ++k) row.push_back(csv(theta[k]));
    row.push_back(csv(mem.G()));
    row.push_back(csv(mem.Z()));
    for (int k = 0; k < n; ++k) row.push_back(csv(d.eta[k]));
    row.push_back(csv(d.F));
    row.push_back(csv(d.E));
    row.push_back(csv(d.legendre_residual()));
    for (int k = 0; k < n; ++k)
      for (int l = 0; l < n; ++l) row.push_back(csv(g.entries(k, l)));
    row.push_back(csv(b.lhs));
    row.push_back(csv(b.rhs));
    return row;
  });
  bool failed = false;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::vector<std::string> cells(cols.size());
    if (rows[i].is_object()) {
      failed = true;
      cells[0] = rows[i].at("error").get<std::string>();
      for (int k = 0; k < n; ++k) cells[1 + k] = csv(cfg.thetas[i][k]);
    } else {
      for (std::size_t c = 0; c < cols.size(); ++c) cells[c] = rows[i][c].get<std::string>();
    }
    for (std::size_t c = 0; c < cells.size(); ++c) body += (c ? "," : "") + cells[c];
    body += "\n";
  }
  write_text(cfg, out, body);
  return failed ? 2 : 0;
}

int dispatch(const std::string& command, const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  if (command == "lnphi" || command == "expphi") return cmd_kernel(command, cfg, out, err);
  if (command == "entropy" || command == "divergence" || command == "maxent") return cmd_entropy(command, cfg, out);
  if (command == "report") return cmd_report(cfg, out);

  const Model m = resolve_model(cfg);
  std::function<json(const Eigen::VectorXd&)> fn;
  if (command == "normalize") fn = [&](const Eigen::VectorXd& t) { return normalize_record(m, cfg, t); };
  else if (command == "escort") fn = [&](const Eigen::VectorXd& t) { return escort_record(m, cfg, t); };
  else if (command == "fisher") fn = [&](const Eigen::VectorXd& t) { return fisher_record(m, t); };
  else if (command == "metric") fn = [&](const Eigen::VectorXd& t) { return metric_record(m, t); };
  else if (command == "bound") fn = [&](const Eigen::VectorXd& t) { return bound_record(m, cfg, t); };
  else if (command == "project") fn = [&](const Eigen::VectorXd& t) { return project_record(m, cfg, t); };
  else if (command == "duality") {
    const PhiFamily& fam = m.phi_family("duality");
    fn = [&](const Eigen::VectorXd& t) { return duality_record(fam, cfg, t); };
  } else {
    throw SchemaError("unknown command " + command);
  }
  return emit(cfg, out, records_report(command, cfg, m, per_theta(cfg, m.dimension(), fn)));
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"phi-deformed exponential families: kernels, geometry, entropy and duality"};
  app.name("phifam");
  app.require_subcommand(1);

  std::string config, deformer, family, measure, fixture, theta, theta_prime, u, v, y, x, p, p_prime, estimator,
      variable, route, output;
  double q = 0.0;
  int trials = 0, panels = 0;
  std::uint64_t seed = 0;
  std::map<std::string, CLI::Option*> opt;
  opt["config"] = app.add_option("--config", config, "JSON run config (\"version\": 1)");
  opt["deformer"] = app.add_option("--deformer", deformer, "deformer JSON, e.g. {\"kind\":\"power\",\"q\":0.5}");
  opt["family"] = app.add_option("--family", family, "family JSON {deformer, measure, statistics}");
  opt["measure"] = app.add_option("--measure", measure, "measure JSON (pointwise pdfs need a discrete one)");
  opt["fixture"] = app.add_option("--fixture", fixture, "example1, example1c, example2, example3 or example4");
  opt["theta"] = app.add_option("--theta", theta, "parameter vector, comma separated");
  opt["theta_prime"] = app.add_option("--theta-prime", theta_prime, "second parameter (divergence)");
  opt["u"] = app.add_option("--u", u, "lnphi arguments, or the bound's u direction");
  opt["v"] = app.add_option("--v", v, "the bound's v direction");
  opt["y"] = app.add_option("--y", y, "expphi arguments");
  opt["x"] = app.add_option("--x", x, "sample points for escort and project");
  opt["p"] = app.add_option("--p", p, "pdf values on the discrete measure's points");
  opt["p_prime"] = app.add_option("--p-prime", p_prime, "second pdf for divergence");
  opt["estimator"] = app.add_option("--estimator", estimator, "JSON array of random variables");
  opt["variable"] = app.add_option("--variable", variable, "random variable JSON to project");
  opt["q"] = app.add_option("--q", q, "deformer parameter for example2 and example4");
  opt["trials"] = app.add_option("--trials", trials, "maxent perturbation trials")->check(CLI::NonNegativeNumber);
  opt["seed"] = app.add_option("--seed", seed, "maxent seed");
  opt["route"] = app.add_option("--route", route, "information route")->check(CLI::IsMember({"moment", "direct"}));
  opt["output"] = app.add_option("--output", output, "write the report here instead of stdout");
  opt["panels"] = app.add_option("--panels", panels, "quadrature panels (overrides PHIFAM_PANELS)")->check(CLI::PositiveNumber);

  std::string fixture_name;
  for (const char* name : {"lnphi", "expphi", "normalize", "escort", "fisher", "metric", "bound", "project", "duality",
                           "entropy", "divergence", "maxent", "report"})
    app.add_subcommand(name)->fallthrough();
  app.add_subcommand("fixture", "run a worked example against its published values")
      ->fallthrough()
      ->add_option("name", fixture_name, "example1, example1c, example2, example3 or example4")
      ->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "phifam: " << e.what() << "\n";
    return 1;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  const auto given = [&](const char* key) { return opt.at(key)->count() > 0; };
  try {
    RunConfig cfg;
    cfg.panels = env_panels();
    if (given("config")) {
      std::ifstream f(config);
      if (!f) throw SchemaError("cannot open config file " + config);
      json doc;
      try {
        doc = json::parse(f);
      } catch (const json::exception& e) {
        throw SchemaError("config " + config + " is not valid JSON: " + e.what());
      }
      apply_config(doc, cfg);
    }
    if (given("deformer")) cfg.deformer = parse_json_flag(deformer, "--deformer");
    if (given("family")) cfg.family = parse_json_flag(family, "--family");
    if (given("measure")) cfg.measure = parse_json_flag(measure, "--measure");
    if (given("fixture")) cfg.fixture = fixture;
    if (given("theta")) {
      const auto t = parse_list_flag(theta, "--theta");
      cfg.thetas = {Eigen::Map<const Eigen::VectorXd>(t.data(), static_cast<Eigen::Index>(t.size()))};
      cfg.grid = false;
    }
    if (given("theta_prime")) {
      const auto t = parse_list_flag(theta_prime, "--theta-prime");
      cfg.theta_prime = Eigen::Map<const Eigen::VectorXd>(t.data(), static_cast<Eigen::Index>(t.size()));
    }
    if (given("u")) cfg.u = parse_list_flag(u, "--u");
    if (given("v")) cfg.v = parse_list_flag(v, "--v");
    if (given("y")) cfg.y = parse_list_flag(y, "--y");
    if (given("x")) cfg.points = parse_list_flag(x, "--x");
    if (given("p")) cfg.p = parse_list_flag(p, "--p");
    if (given("p_prime")) cfg.p_prime = parse_list_flag(p_prime, "--p-prime");
    if (given("estimator")) cfg.estimator = parse_json_flag(estimator, "--estimator");
    if (given("variable")) cfg.variable = parse_json_flag(variable, "--variable");
    if (given("q")) cfg.q = q;
    if (given("trials")) cfg.trials = trials;
    if (given("seed")) cfg.seed = seed;
    if (given("route")) cfg.route = route;
    if (given("output")) cfg.output = output;
    if (given("panels")) cfg.panels = panels;

    if (command == "fixture") return run_fixture(fixture_name, cfg, out);
    return dispatch(command, cfg, out, err);
  } catch (const SchemaError& e) {
    err << "phifam: schema error: " << e.what() << "\n";
    return 1;
  } catch (const InvalidArgument& e) {
    err << "phifam: invalid argument: " << e.what() << "\n";
    return 1;
  } catch (const Error& e) {
    err << "phifam: " << error_kind(e) << ": " << e.what() << "\n";
    return 2;
  }
}

}  // namespace phifam::cli
