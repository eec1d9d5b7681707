#include "phifam/family.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <string>

#include "phifam/errors.hpp"
#include "phifam/finite_difference.hpp"

namespace phifam {

namespace {

std::string theta_string(const Eigen::VectorXd& theta) {
  std::string s = "[";
  for (Eigen::Index i = 0; i < theta.size(); ++i) {
    if (i) s += ", ";
    s += std::to_string(theta[i]);
  }
  return s + "]";
}

std::string fmt_g(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

}  // namespace

PhiFamily::PhiFamily(DeformedCalculus calculus, MeasureSpace space, std::vector<RandomVariable> statistics) {
  if (statistics.empty()) throw InvalidArgument("a family needs at least one statistic");
  auto scan = space.scan_grid();
  impl_ = std::make_shared<const Impl>(
      Impl{std::move(calculus), std::move(space), std::move(statistics), std::move(scan)});
}

PhiFamily PhiFamily::with_space(MeasureSpace space) const {
  return PhiFamily(impl_->calculus, std::move(space), impl_->statistics);
}

double PhiFamily::contraction(const Eigen::VectorXd& theta, double x) const {
  double s = 0.0;
  for (int k = 0; k < dimension(); ++k)
    if (theta[k] != 0.0) s += theta[k] * impl_->statistics[k](x);
  return s;
}

FamilyMember PhiFamily::at(const Eigen::VectorXd& theta) const {
  if (theta.size() != dimension())
    throw InvalidArgument("theta has " + std::to_string(theta.size()) + " components, family has " +
                          std::to_string(dimension()));
  if (!theta.allFinite()) throw OutsideDomain("theta must be finite");

  const Impl& d = *impl_;
  const DeformedCalculus& calc = d.calculus;
  const MeasureSpace& space = d.space;

  std::vector<double> scan_s(d.scan.size());
  for (std::size_t i = 0; i < d.scan.size(); ++i) scan_s[i] = contraction(theta, d.scan[i]);

  // Where G − θ·c(x) crosses a kink level of exp_φ (the support cutoff m
  // among them).
  const auto breakpoints_for = [&](double G) {
    std::vector<double> out;
    if (space.is_discrete()) return out;
    double lo = kInf, hi = -kInf;
    for (double s : scan_s) {
      const double a = G - s;
      if (!std::isfinite(a)) continue;
      lo = std::min(lo, a);
      hi = std::max(hi, a);
    }
    if (!(lo < hi)) return out;
    for (double level : calc.kink_levels(lo, hi)) {
      const auto roots = find_crossings(
          space, [&](double x) { return G - contraction(theta, x) - level; }, d.scan);
      out.insert(out.end(), roots.begin(), roots.end());
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  };

  const auto mass = [&](double G, int refinement = 1) {
    const auto bps = breakpoints_for(G);
    const Nodes n = space.nodes(bps, refinement);
    double sum = 0.0;
    for (Eigen::Index i = 0; i < n.size(); ++i) {
      const double p = calc.exp_phi(G - contraction(theta, n.x[i]));
      if (std::isinf(p)) return kInf;
      sum += n.w[i] * p;
    }
    return sum;
  };

  double G0 = 0.0;
  if (space.is_discrete()) {
    G0 = calc.ln_phi(1.0 / std::accumulate(space.weights().begin(), space.weights().end(), 0.0));
  } else if (!space.is_semi_infinite()) {
    G0 = calc.ln_phi(1.0 / (space.upper() - space.lower()));
  }
  const auto& bounds = calc.range_bounds();
  if (G0 >= bounds.upper) G0 = 0.0;

  // Bracket: mass(lo) < 1 ≤ mass(hi), the map G ↦ mass(G) being non-decreasing.
  double lo = G0, hi = G0, mlo = 0.0, mhi = 0.0;
  const double m0 = mass(G0);
  double step = 1.0;
  constexpr int kMaxExpansions = 200;
  if (m0 < 1.0) {
    lo = G0;
    mlo = m0;
    int it = 0;
    for (;; ++it) {
      if (it >= kMaxExpansions)
        throw OutsideDomain("no normalizing G for theta = " + theta_string(theta) +
                            ": total mass stays below 1");
      hi = lo + step;
      mhi = mass(hi);
      if (mhi >= 1.0) break;
      lo = hi;
      mlo = mhi;
      step *= 2.0;
    }
  } else {
    hi = G0;
    mhi = m0;
    int it = 0;
    for (;; ++it) {
      if (it >= kMaxExpansions)
        throw OutsideDomain("no normalizing G for theta = " + theta_string(theta) +
                            ": total mass stays above 1");
      lo = hi - step;
      mlo = mass(lo);
      if (mlo < 1.0) break;
      hi = lo;
      mhi = mlo;
      step *= 2.0;
    }
  }

  // Illinois-modified regula falsi, with bisection whenever a side is infinite.
  double G = 0.5 * (lo + hi), mG = kInf;
  int same_side = 0;
  double flo = mlo - 1.0, fhi = mhi - 1.0;
  for (int it = 0; it < 300; ++it) {
    if (std::isfinite(fhi) && fhi - flo > 0.0) {
      G = (lo * fhi - hi * flo) / (fhi - flo);
      if (!(G > lo && G < hi)) G = 0.5 * (lo + hi);
    } else {
      G = 0.5 * (lo + hi);
    }
    mG = mass(G);
    const double f = mG - 1.0;
    if (std::abs(f) <= 1e-13) break;
    if (f < 0.0) {
      lo = G;
      flo = f;
      if (same_side == -1) fhi *= 0.5;
      same_side = -1;
    } else {
      hi = G;
      fhi = f;
      if (same_side == 1) flo *= 0.5;
      same_side = 1;
    }
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(G))) {
      // Resolution exhausted; keep the better end.
      const double mlo_now = mass(lo);
      if (std::abs(mlo_now - 1.0) < std::abs(mG - 1.0)) {
        G = lo;
        mG = mlo_now;
      }
      break;
    }
  }
  if (!(std::abs(mG - 1.0) <= 1e-10)) {
    if (!space.is_discrete() && refinement_diverges(mass(hi), mass(hi, 2), mass(hi, 4)))
      throw OutsideDomain("no normalizing G for theta = " + theta_string(theta) +
                          ": total mass diverges (exp_phi(G - theta.c) is not integrable)");
    throw OutsideDomain("no normalizing G for theta = " + theta_string(theta) +
                        ": total mass jumps across 1 (residual " + fmt_g(mG - 1.0) + ")");
  }
  if (!space.is_discrete() && refinement_diverges(mG, mass(G, 2), mass(G, 4)))
    throw OutsideDomain("theta = " + theta_string(theta) + " is outside the domain: the mass integral diverges");

  FamilyMember member(*this, theta);
  member.G_ = G;
  member.breakpoints_ = breakpoints_for(G);
  try {
    member.Z_ = integrate(
        space, [&](double x) { return calc.psi(G - contraction(theta, x)); }, member.breakpoints_,
        DivergenceCheck::on, "escort normalization Z");
    if (!(member.Z_ > 0.0)) {
      member.z_error_ = "escort normalization Z is not positive";
      member.Z_ = kInf;
    }
  } catch (const DivergentIntegral& e) {
    member.Z_ = kInf;
    member.z_error_ = e.what();
  }
  return member;
}

double FamilyMember::Z() const {
  if (!has_Z()) throw DivergentIntegral(z_error_.empty() ? "escort normalization Z diverges" : z_error_);
  return Z_;
}

double FamilyMember::argument(double x) const { return G_ - family_.contraction(theta_, x); }

double FamilyMember::pdf(double x) const { return family_.calculus().exp_phi(argument(x)); }

double FamilyMember::escort(double x) const {
  const double a = argument(x);
  const auto& calc = family_.calculus();
  if (!(calc.exp_phi(a) > 0.0)) return 0.0;
  return calc.psi(a) / Z();
}

Pdf FamilyMember::density() const {
  return Pdf{family_.space(), [m = *this](double x) { return m.pdf(x); }, breakpoints_};
}

Pdf FamilyMember::escort_density() const {
  Z();
  return Pdf{family_.space(), [m = *this](double x) { return m.escort(x); }, breakpoints_};
}

double solve_G(const PhiFamily& fam, const Eigen::VectorXd& theta) { return fam.at(theta).G(); }

double pdf_at(const PhiFamily& fam, const Eigen::VectorXd& theta, double x) {
  return fam.at(theta).pdf(x);
}

double escort_at(const PhiFamily& fam, const Eigen::VectorXd& theta, double x) {
  return fam.at(theta).escort(x);
}

double zet(const PhiFamily& fam, const Eigen::VectorXd& theta) { return fam.at(theta).Z(); }

EscortPair::EscortPair(MeasureSpace space, int dimension, Builder builder,
                       std::vector<RandomVariable> statistics)
    : space_(std::move(space)),
      dimension_(dimension),
      builder_(std::move(builder)),
      statistics_(std::move(statistics)) {
  if (dimension_ < 1) throw InvalidArgument("escort pair dimension must be >= 1");
  if (!statistics_.empty() && static_cast<int>(statistics_.size()) != dimension_)
    throw InvalidArgument("escort pair statistics must match its dimension");
}

EscortPair EscortPair::canonical(const PhiFamily& fam) {
  return EscortPair(
      fam.space(), fam.dimension(),
      [fam](const Eigen::VectorXd& theta) {
        const FamilyMember m = fam.at(theta);
        PairPoint pt;
        pt.base = [m](double x) { return m.pdf(x); };
        pt.escort = [m](double x) { return m.escort(x); };
        pt.breakpoints = m.breakpoints();
        pt.G = m.G();
        pt.Z = m.Z();
        return pt;
      },
      fam.statistics());
}

EscortPair EscortPair::self_paired(MeasureSpace space, int dimension,
                                   std::function<Pdf(const Eigen::VectorXd&)> family,
                                   std::vector<RandomVariable> statistics) {
  return EscortPair(
      std::move(space), dimension,
      [family = std::move(family)](const Eigen::VectorXd& theta) {
        Pdf p = family(theta);
        PairPoint pt;
        pt.base = p.density;
        pt.escort = p.density;
        pt.breakpoints = p.breakpoints;
        pt.Z = 1.0;
        return pt;
      },
      std::move(statistics));
}

double escort_condition_residual(const EscortPair& pair, const Eigen::VectorXd& theta, int k) {
  if (pair.statistics().empty())
    throw InvalidArgument("escort condition needs the pair's statistics c_k");
  if (k < 0 || k >= pair.dimension()) throw InvalidArgument("parameter index out of range");
  const double h = fd::step(theta[k]);
  const PairPoint mid = pair.at(theta);
  const PairPoint plus = pair.at(fd::shifted(theta, k, h));
  const PairPoint minus = pair.at(fd::shifted(theta, k, -h));
  const Nodes n = pair.space().nodes(mid.breakpoints);
  const RandomVariable& ck = pair.statistics()[k];

  Eigen::VectorXd dp(n.size()), P(n.size()), c(n.size());
  for (Eigen::Index i = 0; i < n.size(); ++i) {
    const double x = n.x[i];
    dp[i] = (plus.base(x) - minus.base(x)) / (2.0 * h);
    P[i] = mid.escort(x);
    c[i] = ck(x);
  }

  double dG;
  if (plus.G && minus.G) {
    dG = (*plus.G - *minus.G) / (2.0 * h);
  } else {
    dG = (n.w.array() * P.array() * c.array()).sum();
  }
  const Eigen::ArrayXd y = dG - c.array();
  double Z;
  if (mid.Z && plus.G) {
    Z = *mid.Z;
  } else {
    const double den = (n.w.array() * P.array() * y.square()).sum();
    Z = den > 0.0 ? (n.w.array() * dp.array() * y).sum() / den : 0.0;
  }
  return (dp.array() - Z * P.array() * y).abs().maxCoeff();
}

}  // namespace phifam
