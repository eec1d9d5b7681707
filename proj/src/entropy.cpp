#include "phifam/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "phifam/errors.hpp"
#include "phifam/finite_difference.hpp"
#include "phifam/geometry.hpp"
#include "phifam/quadrature.hpp"

namespace phifam {

namespace {

std::vector<double> merged_breakpoints(const Pdf& a, const Pdf& b) {
  std::vector<double> out = a.breakpoints;
  out.insert(out.end(), b.breakpoints.begin(), b.breakpoints.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// ln_φ(0+) = m, the lower range bound.
double ln_phi_at(const DeformedCalculus& calc, double u) {
  return u > 0.0 ? calc.ln_phi(u) : calc.range_bounds().lower;
}

}  // namespace

double divergence_density(const DeformedCalculus& calc, double a, double b) {
  if (a == b) return 0.0;
  if (b <= 0.0) {
    const double m = calc.range_bounds().lower;
    if (std::isinf(m)) return kInf;
    // ∫_0^a [ln_φ(u) − m] du
    return calc.ln_phi_antiderivative(a) - a * m;
  }
  if (a <= 0.0) return calc.partial_moment(b);  // b ln_φ(b) − Λ(b) = K(b)
  const double lb = calc.ln_phi(b);
  if (std::abs(a - b) <= 0.5 * std::max(a, b)) {
    // Nearby arguments: integrate the small difference directly instead of
    // subtracting antiderivatives.
    const auto f = [&](double u) { return calc.ln_phi(u) - lb; };
    const auto cuts = calc.deformer().kinks(std::min(a, b), std::max(a, b));
    const double floor = 1e-16 * std::abs(a - b) * std::max(1.0, std::abs(lb));
    return quadrature::adaptive_split(f, b, a, cuts, 1e-12, floor);
  }
  return calc.ln_phi_antiderivative(a) - calc.ln_phi_antiderivative(b) - (a - b) * lb;
}

DivergenceValue divergence(const DeformedCalculus& calc, const Pdf& p, const Pdf& p2) {
  if (!(p.space == p2.space)) throw SpaceMismatch("divergence needs both densities on the same measure space");
  const auto bps = merged_breakpoints(p, p2);
  const Nodes n = p.space.nodes(bps);
  const bool split = calc.has_moment();

  DivergenceValue out;
  double value = 0.0, lam_p = 0.0, lam_q = 0.0, linear = 0.0;
  for (Eigen::Index i = 0; i < n.size(); ++i) {
    const double a = p(n.x[i]), b = p2(n.x[i]);
    const double w = n.w[i];
    value += w * divergence_density(calc, a, b);
    if (split) {
      lam_p += w * calc.ln_phi_antiderivative(a);
      lam_q += w * calc.ln_phi_antiderivative(b);
      if (a != b) linear += w * (a - b) * ln_phi_at(calc, b);
    }
  }
  out.value = value;
  if (split && std::isfinite(linear)) {
    DivergenceValue::Decomposition d;
    d.I_p = -calc.moment() - lam_p;
    d.I_p_prime = -calc.moment() - lam_q;
    d.linear_term = linear;
    out.decomposition = d;
  }
  return out;
}

double information_content(const DeformedCalculus& calc, const Pdf& p, InformationRoute route) {
  const double K1 = calc.moment();  // throws DivergentMoment
  if (route == InformationRoute::moment) {
    const double s = integrate(
        p.space, [&](double x) { return calc.ln_phi_antiderivative(p(x)); }, p.breakpoints, DivergenceCheck::on,
        "information content");
    return -K1 - s;
  }
  return integrate(
      p.space,
      [&](double x) {
        const double v = p(x);
        // v ln_χ(1/v) → 0 as v → 0 whenever χ is defined.
        if (!(v > 0.0) || !std::isfinite(1.0 / v)) return 0.0;
        return v * calc.ln_chi(1.0 / v);
      },
      p.breakpoints, DivergenceCheck::on, "information content");
}

double chi_derivative_residual(const DeformedCalculus& calc, double v) {
  if (!(v > 0.0)) throw NonPositiveInput("chi_derivative_residual needs v > 0");
  const double K1 = calc.moment();
  const auto f = [&](double t) { return t * calc.ln_chi(1.0 / t); };
  const double h = 1e-5 * v;
  const double d = (f(v + h) - f(v - h)) / (2.0 * h);
  return std::abs(d + calc.ln_phi(v) + K1);
}

MaxentReport maxent_check(const PhiFamily& fam, const Eigen::VectorXd& theta, int trials, std::uint64_t seed) {
  if (trials < 0) throw InvalidArgument("trials must be >= 0");
  const FamilyMember m = fam.at(theta);
  const Nodes n = m.density().nodes();
  const DeformedCalculus& calc = fam.calculus();
  const Eigen::Index N = n.size();

  Eigen::VectorXd p(N), s(N);
  for (Eigen::Index i = 0; i < N; ++i) {
    p[i] = m.pdf(n.x[i]);
    s[i] = fam.contraction(theta, n.x[i]);
  }
  // Everything below lives on the node set, where the quadrature is exact.
  const double K1 = calc.moment();
  const auto info = [&](const Eigen::VectorXd& q) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < N; ++i) acc += n.w[i] * calc.ln_phi_antiderivative(q[i]);
    return -K1 - acc;
  };
  const auto energy = [&](const Eigen::VectorXd& q) { return (n.w.array() * q.array() * s.array()).sum(); };
  const double mass = (n.w.array() * p.array()).sum();

  MaxentReport r;
  r.trials = trials;
  r.seed = seed;
  r.I_theta = info(p);
  r.F = energy(p) - r.I_theta;
  r.max_excess = -kInf;
  r.min_gap = kInf;

  Eigen::MatrixXd A(N, 2);
  A.col(0) = n.w.array() * p.array();
  A.col(1) = n.w.array() * p.array() * s.array();
  const auto project_out = [](Eigen::VectorXd& h, const Eigen::MatrixXd& C) {
    h -= C * (C.transpose() * C).ldlt().solve(C.transpose() * h);
  };

  for (int t = 0; t < trials; ++t) {
    std::mt19937_64 rng(seed + static_cast<std::uint64_t>(t));
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    const double eps = (t % 2 == 0) ? 1e-2 : 1e-1;
    for (int constrained = 1; constrained >= 0; --constrained) {
      Eigen::VectorXd h(N);
      for (Eigen::Index i = 0; i < N; ++i) h[i] = U(rng);
      if (constrained) project_out(h, A);
      else project_out(h, A.leftCols(1));
      const double top = h.cwiseAbs().maxCoeff();
      if (top > 0.0) h /= top;
      const Eigen::VectorXd q = p.array() * (1.0 + eps * h.array());

      const double mass_err = std::abs((n.w.array() * q.array()).sum() - mass);
      r.max_constraint_residual = std::max(r.max_constraint_residual, mass_err);
      if (constrained) {
        r.max_constraint_residual = std::max(r.max_constraint_residual, std::abs(energy(q) - energy(p)));
        const double excess = info(q) - r.I_theta;
        r.max_excess = std::max(r.max_excess, excess);
        if (excess > 1e-7) ++r.violations;
      } else {
        const double gap = energy(q) - info(q) - r.F;
        r.min_gap = std::min(r.min_gap, gap);
        if (gap < -1e-7) ++r.free_energy_violations;
      }
    }
  }
  return r;
}

double DivergenceMetric::max_relative_error() const {
  double worst = 0.0;
  const double scale = target.cwiseAbs().maxCoeff();
  for (const Eigen::MatrixXd* M : {&theta_theta, &theta_eta, &eta_eta})
    worst = std::max(worst, (*M - target).cwiseAbs().maxCoeff() / scale);
  return worst;
}

double DivergenceMetric::max_first_derivative() const {
  return std::max(first_theta.cwiseAbs().maxCoeff(), first_eta.cwiseAbs().maxCoeff());
}

DivergenceMetric metric_from_divergence(const PhiFamily& fam, const Eigen::VectorXd& theta) {
  const int n = fam.dimension();
  Eigen::VectorXd h(n);
  for (int k = 0; k < n; ++k) h[k] = fd::step(theta[k], kDivergenceStep);

  // Stencil points are θ + Σ (offset_k h_k) e_k with small integer offsets.
  std::map<std::vector<int>, Pdf> cache;
  const auto member = [&](const std::vector<int>& off) -> const Pdf& {
    auto it = cache.find(off);
    if (it == cache.end()) {
      Eigen::VectorXd t = theta;
      for (int k = 0; k < n; ++k) t[k] += off[k] * h[k];
      it = cache.emplace(off, fam.at(t).density()).first;
    }
    return it->second;
  };
  const auto D = [&](const std::vector<int>& a, const std::vector<int>& b) {
    if (a == b) return 0.0;
    return divergence(fam.calculus(), member(a), member(b)).value;
  };
  const std::vector<int> zero(n, 0);
  const auto off = [&](std::initializer_list<std::pair<int, int>> moves) {
    std::vector<int> o = zero;
    for (auto [k, d] : moves) o[k] += d;
    return o;
  };

  DivergenceMetric out;
  out.theta_theta.resize(n, n);
  out.theta_eta.resize(n, n);
  out.eta_eta.resize(n, n);
  out.first_theta.resize(n);
  out.first_eta.resize(n);
  for (int k = 0; k < n; ++k) {
    out.first_theta[k] = (D(off({{k, 1}}), zero) - D(off({{k, -1}}), zero)) / (2.0 * h[k]);
    out.first_eta[k] = (D(zero, off({{k, 1}})) - D(zero, off({{k, -1}}))) / (2.0 * h[k]);
    for (int l = 0; l < n; ++l) {
      const double hh = 4.0 * h[k] * h[l];
      // ∂²/∂θ′_k∂θ′_l with η′ = θ
      out.theta_theta(k, l) = (D(off({{k, 1}, {l, 1}}), zero) - D(off({{k, 1}, {l, -1}}), zero) -
                               D(off({{k, -1}, {l, 1}}), zero) + D(off({{k, -1}, {l, -1}}), zero)) /
                              hh;
      out.eta_eta(k, l) = (D(zero, off({{k, 1}, {l, 1}})) - D(zero, off({{k, 1}, {l, -1}})) -
                           D(zero, off({{k, -1}, {l, 1}})) + D(zero, off({{k, -1}, {l, -1}}))) /
                          hh;
      out.theta_eta(k, l) = -(D(off({{k, 1}}), off({{l, 1}})) - D(off({{k, 1}}), off({{l, -1}})) -
                              D(off({{k, -1}}), off({{l, 1}})) + D(off({{k, -1}}), off({{l, -1}}))) /
                            hh;
    }
  }
  const InfoMatrix g = g_matrix(EscortPair::canonical(fam), theta);
  out.target = g.entries / fam.at(theta).Z();
  return out;
}

}  // namespace phifam
