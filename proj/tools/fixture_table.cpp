#include <cmath>
#include <cstdio>
#include <fstream>

#include "cli.hpp"
#include "phifam/entropy.hpp"
#include "phifam/errors.hpp"
#include "phifam/fixtures.hpp"
#include "phifam/geometry.hpp"
#include "report.hpp"

namespace phifam::cli {

namespace {

struct Row {
  std::string check;
  std::string at;
  std::string computed;
  std::string expected;
  std::string tolerance;
  bool pass = false;
  // Printed for reference; not part of the verdict.
  bool info = false;
};

class Table {
 public:
  void compare(std::string check, std::string at, double computed, double expected, double tol, bool relative = false) {
    const double scale = relative ? std::max(std::abs(expected), 1e-300) : 1.0;
    const double err = std::abs(computed - expected) / scale;
    rows.push_back({std::move(check), std::move(at), text(computed), text(expected),
                    text(tol) + (relative ? " rel" : " abs"), err <= tol});
  }
  void verdict(std::string check, std::string at, std::string computed, std::string expected, bool pass) {
    rows.push_back({std::move(check), std::move(at), std::move(computed), std::move(expected), "-", pass});
  }
  void note(std::string check, std::string at, double computed, double expected) {
    rows.push_back({std::move(check), std::move(at), text(computed), text(expected), "-", false, true});
  }

  std::vector<Row> rows;
};

std::string at_theta(const char* name, double t) { return std::string(name) + "=" + text(t); }

DeformedCalculus numeric(const Deformer& d) {
  DeformedCalculus::Options o;
  o.closed_forms = false;
  return DeformedCalculus(d, o);
}

Pdf discrete(const std::vector<double>& p) {
  std::vector<double> pts(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) pts[i] = static_cast<double>(i);
  const RandomVariable lookup = RandomVariable::table(pts, p);
  return Pdf{MeasureSpace::discrete(pts, std::vector<double>(p.size(), 1.0)), [lookup](double x) { return lookup(x); },
             {}};
}

Eigen::VectorXd one(double t) { return Eigen::VectorXd::Constant(1, t); }

void example1(Table& tab, int panels) {
  const EscortPair pair = fixtures::example1_pair(panels);
  const PdfFamily tri = fixtures::triangular(panels);
  const Estimator est{{RandomVariable::monomial(3.0, 1.0)}};
  const double k = 5.0 * std::exp(1.0) - 13.0;
  for (double t : {0.5, 1.0, 2.0}) {
    const auto theta = one(t);
    const double g = g_matrix(pair, theta).entries(0, 0);
    tab.compare("g*theta^2/4 = 5e-13", at_theta("theta", t), g * t * t / 4.0, k, 1e-4);
    const BoundSides b = crb_sides(pair, est, theta, one(1.0), one(1.0));
    tab.compare("bound lhs / theta^2 = 9", at_theta("theta", t), b.lhs / (t * t), 9.0, 1e-4, true);
    tab.compare("bound rhs / theta^2 = 1/(4(5e-13))", at_theta("theta", t), b.rhs / (t * t), 1.0 / (4.0 * k), 1e-4, true);
    tab.verdict("bound holds", at_theta("theta", t), text(b.lhs) + " >= " + text(b.rhs), "lhs >= rhs", bound_holds(b.lhs, b.rhs));
    std::string fisher = "finite";
    try {
      classical_crb_sides(tri, est, theta, one(1.0), one(1.0));
    } catch (const DivergentIntegral&) {
      fisher = "divergent";
    }
    tab.verdict("Fisher information", at_theta("theta", t), fisher, "divergent", fisher == "divergent");
  }
}

void example1c(Table& tab, int panels) {
  const PhiFamily fam = fixtures::example1c(panels);
  const EscortPair pair = EscortPair::canonical(fam);
  const RandomVariable c = fam.statistics()[0];
  for (double T : {0.25, 1.0, 4.0}) {
    const std::string at = at_theta("Theta", T);
    const double t = 1.0 / std::sqrt(T);
    const auto theta = one(T);
    const FamilyMember m = fam.at(theta);
    // p = exp_φ(2/θ − 1 − 2x/θ²) normalizes with G = 2√Θ − 1.
    tab.compare("G = 2 sqrt(Theta) - 1", at, m.G(), 2.0 * std::sqrt(T) - 1.0, 1e-7);
    tab.compare("g = theta^4/3", at, g_matrix(pair, theta).entries(0, 0), std::pow(t, 4) / 3.0, 1e-5);
    const Pdf P = m.escort_density();
    tab.compare("escort mean of c = theta", at, expectation(P, c), t, 1e-5);
    tab.compare("escort mean of c^2 = 4 theta^2/3", at, expectation(P, c * c), 4.0 * t * t / 3.0, 1e-5);
    tab.compare("eta = 2/(3 sqrt(Theta))", at, expectation(m.density(), c), 2.0 / (3.0 * std::sqrt(T)), 1e-5);
    tab.compare("escort P(theta/2) = 1/theta", at, m.escort(t / 2.0), 1.0 / t, 1e-7);
    const BoundSides b = crb_sides(pair, Estimator{{c}}, theta, one(1.0), one(1.0));
    tab.compare("bound is tight: lhs - rhs", at, b.lhs - b.rhs, 0.0, 2e-5);
  }
}

void example2(Table& tab, int panels, double q) {
  if (!(q > 0.0) || q == 1.0) throw SchemaError("example2 needs q > 0, q != 1");
  const Deformer d = Deformer::power(q);
  const DeformedCalculus num_calc = numeric(d);
  const std::string at_q = " (q=" + text(q) + ")";
  for (double u : {0.1, 0.5, 2.0, 4.0, 10.0})
    tab.compare("ln_q(u) = (u^(1-q) - 1)/(1-q)" + at_q, at_theta("u", u), num_calc.ln_phi(u),
                (std::pow(u, 1.0 - q) - 1.0) / (1.0 - q), 1e-8);
  const auto base = [&](double y) { return std::max(0.0, 1.0 + (1.0 - q) * y); };
  for (double y : {-1.5, -0.5, 0.5, 1.5}) {
    if (q > 1.0 && y >= 1.0 / (q - 1.0)) continue;
    const double e = std::pow(base(y), 1.0 / (1.0 - q));
    tab.compare("exp_q(y) = [1+(1-q)y]_+^(1/(1-q))" + at_q, at_theta("y", y), num_calc.exp_phi(y), e,
                1e-8 * std::max(1.0, e));
    const double s = std::pow(base(y), q / (1.0 - q));
    tab.compare("psi(y) = [1+(1-q)y]_+^(q/(1-q))" + at_q, at_theta("y", y), d(num_calc.exp_phi(y)), s,
                1e-8 * std::max(1.0, s));
  }
  const PhiFamily fam(DeformedCalculus(d), MeasureSpace::lebesgue(0.0, kInf, panels), {RandomVariable::monomial(1.0, 1.0)});
  const FamilyMember m = fam.at(one(1.0));
  for (double x : {0.25, 1.0, 2.0}) {
    const double arg = 1.0 + (1.0 - q) * (m.G() - x);
    tab.compare("p_theta(x) closed form" + at_q, at_theta("x", x), m.pdf(x),
                arg > 0.0 ? std::pow(arg, 1.0 / (1.0 - q)) : 0.0, 1e-9);
    tab.compare("P_theta(x) closed form" + at_q, at_theta("x", x), m.escort(x),
                arg > 0.0 ? std::pow(arg, q / (1.0 - q)) / m.Z() : 0.0, 1e-9);
  }
  tab.compare("normalization of p_theta" + at_q, "theta=1.0", normalization_residual(m.density()), 0.0, 1e-7);
  tab.compare("normalization of P_theta" + at_q, "theta=1.0", normalization_residual(m.escort_density()), 0.0, 1e-7);
  const double alpha = 2.0 * q - 1.0;
  tab.compare("alpha-family exponent 2/(1-alpha) = 1/(1-q)", "alpha=" + text(alpha), 2.0 / (1.0 - alpha),
              1.0 / (1.0 - q), 1e-12);
}

double ceiling_ln(double u) {
  if (u <= 1.0) return u - 1.0;
  double acc = 0.0, k = 1.0;
  while (u > k + 1.0) {
    acc += 1.0 / (k + 1.0);
    k += 1.0;
  }
  return acc + (u - k) / (k + 1.0);
}

void example3(Table& tab, int panels) {
  const Deformer d = Deformer::ceiling();
  const DeformedCalculus calc(d);
  const DeformedCalculus num_calc = numeric(d);
  for (double u : {0.5, 1.5, 2.5, 3.25, 7.5})
    tab.compare("ln_phi piecewise linear", at_theta("u", u), num_calc.ln_phi(u), ceiling_ln(u), 1e-9);
  for (double x : {-1.0, -2.0}) {
    tab.compare("exp_phi(x) = 0 for x <= -1", at_theta("x", x), calc.exp_phi(x), 0.0, 0.0);
    tab.compare("psi(x) = 0 for x <= -1", at_theta("x", x), calc.psi(x), 0.0, 0.0);
  }
  for (double x : {-0.5, 0.0, 0.25, 0.5})
    tab.compare("psi(x) = phi(1+x)", at_theta("x", x), calc.psi(x), d(1.0 + x), 0.0);
  // Past x = 1/2, exp_φ(x) = 2 + 3(x − 1/2) and ψ = 3 while φ(1+x) = 2.
  tab.note("psi(x) vs phi(1+x) beyond x = 1/2", "x=0.75", calc.psi(0.75), d(1.75));

  const PhiFamily fam(calc, MeasureSpace::lebesgue(0.0, kInf, panels), {RandomVariable::monomial(1.0, 1.0)});
  const FamilyMember m = fam.at(one(1.0));
  tab.compare("normalization of p_theta", "theta=1.0", normalization_residual(m.density()), 0.0, 1e-7);
  tab.compare("normalization of P_theta", "theta=1.0", normalization_residual(m.escort_density()), 0.0, 1e-7);
}

void example4(Table& tab, int panels, double q) {
  if (!(q > 0.0 && q < 2.0) || q == 1.0) throw SchemaError("example4 needs 0 < q < 2, q != 1");
  const Deformer d = Deformer::scaled_power(q);
  const DeformedCalculus calc(d);
  const DeformedCalculus num_calc = numeric(d);
  const std::string at_q = " (q=" + text(q) + ")";
  for (double u : {0.25, 0.5, 2.0, 5.0})
    tab.compare("ln_phi(u) = q/(q-1) (u^(q-1) - 1)" + at_q, at_theta("u", u), num_calc.ln_phi(u),
                q / (q - 1.0) * (std::pow(u, q - 1.0) - 1.0), 1e-8);
  for (double v : {0.5, 2.0, 3.0})
    tab.compare("chi(v) = v^q" + at_q, at_theta("v", v), num_calc.chi(v), std::pow(v, q), 1e-8, true);

  const std::vector<double> p{0.1, 0.2, 0.3, 0.4}, p2{0.25, 0.25, 0.25, 0.25};
  double tsallis = 0.0, div = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    tsallis += p[i] * (1.0 - std::pow(p[i], q - 1.0)) / (q - 1.0);
    div += p[i] * (std::pow(p[i], q - 1.0) - std::pow(p2[i], q - 1.0)) / (q - 1.0) -
           (p[i] - p2[i]) * std::pow(p2[i], q - 1.0);
  }
  tab.compare("I_phi = sum p (1 - p^(q-1))/(q-1)" + at_q, "p=(.1,.2,.3,.4)", information_content(calc, discrete(p)),
              tsallis, 1e-8);
  tab.compare("D_phi(p, p') Tsallis form" + at_q, "p'=uniform", divergence(calc, discrete(p), discrete(p2)).value, div,
              1e-8);

  const PhiFamily fam(calc, MeasureSpace::lebesgue(0.0, kInf, panels), {RandomVariable::monomial(1.0, 1.0)});
  const FamilyMember m = fam.at(one(1.0));
  const Pdf pt = m.density();
  const double direct = integrate(pt.space, [&](double x) {
    const double v = pt(x);
    return v * (1.0 - std::pow(v, q - 1.0)) / (q - 1.0);
  }, pt.breakpoints);
  tab.compare("I_phi(p_theta) Tsallis form" + at_q, "theta=1.0", information_content(calc, pt), direct, 1e-6);
}

}  // namespace

int run_fixture(const std::string& name, const RunConfig& cfg, std::ostream& out) {
  if (cfg.q && name != "example2" && name != "example4") throw SchemaError("q only applies to example2 and example4");
  Table tab;
  std::string title;
  if (name == "example1") {
    title = "triangular pdfs (2/theta)[1 - x/theta]_+ with exponential escort, c = 3x, u = v = 1";
    example1(tab, cfg.panels);
  } else if (name == "example1c") {
    title = "constant deformer, c = 2x, Theta = 1/theta^2";
    example1c(tab, cfg.panels);
  } else if (name == "example2") {
    title = "power deformer phi(u) = u^q, c = x";
    example2(tab, cfg.panels, cfg.q.value_or(0.5));
  } else if (name == "example3") {
    title = "ceiling deformer phi(u) = ceil(u), c = x";
    example3(tab, cfg.panels);
  } else if (name == "example4") {
    title = "scaled power deformer phi(u) = u^(2-q)/q, c = x";
    example4(tab, cfg.panels, cfg.q.value_or(1.5));
  } else {
    throw SchemaError("unknown fixture \"" + name + "\" (expected example1, example1c, example2, example3 or example4)");
  }

  std::size_t w0 = 5, w1 = 2, w2 = 8, w3 = 8, w4 = 9;
  for (const Row& r : tab.rows) {
    w0 = std::max(w0, r.check.size());
    w1 = std::max(w1, r.at.size());
    w2 = std::max(w2, r.computed.size());
    w3 = std::max(w3, r.expected.size());
    w4 = std::max(w4, r.tolerance.size());
  }
  const auto line = [&](const std::string& a, const std::string& b, const std::string& c, const std::string& d,
                        const std::string& e, const std::string& f) {
    char buf[1024];
    std::snprintf(buf, sizeof buf, "%-*s  %-*s  %-*s  %-*s  %-*s  %s\n", int(w0), a.c_str(), int(w1), b.c_str(),
                  int(w2), c.c_str(), int(w3), d.c_str(), int(w4), e.c_str(), f.c_str());
    return std::string(buf);
  };
  std::string body = name + ": " + title + " (panels " + std::to_string(cfg.panels) + ")\n";
  body += line("check", "at", "computed", "expected", "tolerance", "result");
  int failed = 0;
  json rows = json::array();
  for (const Row& r : tab.rows) {
    const std::string verdict = r.info ? "note" : (r.pass ? "pass" : "FAIL");
    if (!r.info && !r.pass) ++failed;
    body += line(r.check, r.at, r.computed, r.expected, r.tolerance, verdict);
    rows.push_back({{"check", r.check}, {"at", r.at}, {"computed", r.computed}, {"expected", r.expected},
                    {"tolerance", r.tolerance}, {"result", verdict}});
  }
  body += std::to_string(tab.rows.size()) + " rows, " + std::to_string(failed) + " failed\n";
  out << body;
  if (cfg.output) {
    std::ofstream f(*cfg.output, std::ios::binary);
    if (!f) throw SchemaError("cannot write output file " + *cfg.output);
    json r = {{"command", "fixture"}, {"fixture", name}, {"panels", cfg.panels}, {"rows", rows},
              {"status", failed ? "findings" : "ok"}};
    f << r.dump(2) << "\n";
  }
  return failed ? 2 : 0;
}

}  // namespace phifam::cli
