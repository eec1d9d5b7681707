#include "phifam/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "phifam/entropy.hpp"
#include "phifam/errors.hpp"
#include "phifam/finite_difference.hpp"

namespace phifam {

namespace {

// The pair evaluated at θ and θ ± h_k e_k.
struct Stencil {
  PairPoint mid;
  std::vector<PairPoint> plus, minus;
  Eigen::VectorXd h;

  double dp(int k, double x) const { return (plus[k].base(x) - minus[k].base(x)) / (2.0 * h[k]); }
};

std::shared_ptr<const Stencil> stencil(const EscortPair& pair, const Eigen::VectorXd& theta) {
  if (theta.size() != pair.dimension())
    throw InvalidArgument("theta has " + std::to_string(theta.size()) + " components, pair has " +
                          std::to_string(pair.dimension()));
  auto s = std::make_shared<Stencil>();
  s->mid = pair.at(theta);
  s->h.resize(theta.size());
  for (int k = 0; k < theta.size(); ++k) {
    s->h[k] = fd::step(theta[k]);
    s->plus.push_back(pair.at(fd::shifted(theta, k, s->h[k])));
    s->minus.push_back(pair.at(fd::shifted(theta, k, -s->h[k])));
  }
  return s;
}

// P, p and ∂_k p on a node set.
struct Samples {
  Nodes nodes;
  Eigen::VectorXd P;
  Eigen::MatrixXd dp;
};

Samples sample(const Stencil& s, const MeasureSpace& space, int refinement = 1) {
  Samples out;
  out.nodes = space.nodes(s.mid.breakpoints, refinement);
  const Eigen::Index n = out.nodes.size();
  const int dim = static_cast<int>(s.h.size());
  out.P.resize(n);
  out.dp.resize(n, dim);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double x = out.nodes.x[i];
    out.P[i] = s.mid.escort(x);
    for (int k = 0; k < dim; ++k) out.dp(i, k) = s.dp(k, x);
  }
  return out;
}

[[noreturn]] void support_mismatch(double dp, double x) {
  throw SupportMismatch("dp/dtheta = " + std::to_string(dp) + " at x = " + std::to_string(x) +
                        " where the escort vanishes (tolerance " + std::to_string(kSupportTol) + ")");
}

// dp/P, with the support convention: 0 where P underflows and |dp| is
// negligible, SupportMismatch where it is not.
double score_value(double dp, double P, double x) {
  const double X = P > 0.0 ? dp / P : kInf;
  if (std::isfinite(X)) return X;
  if (std::abs(dp) > kSupportTol) support_mismatch(dp, x);
  return 0.0;
}

Eigen::MatrixXd quadratic_form(const Samples& s) {
  const Eigen::Index dim = s.dp.cols();
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(dim, dim);
  Eigen::VectorXd X(dim);
  for (Eigen::Index i = 0; i < s.nodes.size(); ++i) {
    const double P = s.P[i];
    for (Eigen::Index k = 0; k < dim; ++k) X[k] = score_value(s.dp(i, k), P, s.nodes.x[i]);
    if (!(P > 0.0)) continue;
    g.noalias() += (s.nodes.w[i] * P) * X * X.transpose();
  }
  return 0.5 * (g + g.transpose());
}

InfoMatrix info_matrix(const EscortPair& pair, const Eigen::VectorXd& theta, InfoMatrix::Kind kind) {
  const auto s = stencil(pair, theta);
  InfoMatrix out;
  out.kind = kind;
  out.entries = quadratic_form(sample(*s, pair.space()));
  if (pair.space().is_discrete()) {
    if (!out.entries.allFinite()) {
      out.divergent = true;
      out.note = "information matrix is not finite";
    }
    return out;
  }
  const Eigen::MatrixXd mid = quadratic_form(sample(*s, pair.space(), 2));
  const Eigen::MatrixXd fine = quadratic_form(sample(*s, pair.space(), 4));
  for (Eigen::Index i = 0; i < out.entries.size(); ++i) {
    if (refinement_diverges(out.entries(i), mid(i), fine(i))) {
      out.divergent = true;
      out.note = (kind == InfoMatrix::Kind::fisher ? std::string("Fisher information")
                                                   : std::string("generalized information")) +
                 " grows without bound under panel refinement";
      break;
    }
  }
  return out;
}

EscortPair self_pair(const PdfFamily& family, const Eigen::VectorXd& theta) {
  const Pdf p = family(theta);
  return EscortPair::self_paired(p.space, static_cast<int>(theta.size()), family);
}

// 𝔼 c_k under the base density of a pair point.
Eigen::VectorXd base_means(const PairPoint& pt, const MeasureSpace& space, const Estimator& est) {
  const Nodes n = space.nodes(pt.breakpoints);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(est.dimension());
  for (Eigen::Index i = 0; i < n.size(); ++i) {
    const double p = pt.base(n.x[i]);
    if (p == 0.0) continue;
    for (int k = 0; k < est.dimension(); ++k) out[k] += n.w[i] * p * est.components[k](n.x[i]);
  }
  return out;
}

// ∂(𝔼_θ c_k)/∂θ^l, column l.
Eigen::MatrixXd scale_hessian(const Stencil& s, const MeasureSpace& space, const Estimator& est) {
  const int dim = static_cast<int>(s.h.size());
  Eigen::MatrixXd H(est.dimension(), dim);
  for (int l = 0; l < dim; ++l)
    H.col(l) = (base_means(s.plus[l], space, est) - base_means(s.minus[l], space, est)) / (2.0 * s.h[l]);
  return H;
}

void check_bound_args(int dim, const Estimator& est, const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
  if (est.dimension() != dim) throw InvalidArgument("estimator dimension differs from the parameter dimension");
  if (u.size() != dim || v.size() != dim) throw InvalidArgument("u and v must have the parameter dimension");
}

BoundSides bound_from(const Eigen::MatrixXd& cov, const Eigen::MatrixXd& hess, const Eigen::MatrixXd& metric,
                      const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
  const double den_l = u.dot(hess * v);
  const double den_r = v.dot(metric * v);
  const double scale_l = hess.cwiseAbs().maxCoeff() * u.cwiseAbs().maxCoeff() * v.cwiseAbs().maxCoeff();
  const double scale_r = metric.cwiseAbs().maxCoeff() * v.squaredNorm();
  if (std::abs(den_l) <= 1e-14 * std::max(1.0, scale_l))
    throw ZeroDenominator("u^k v^l d2F/dtheta^k dtheta^l vanishes (" + std::to_string(den_l) + ")");
  if (std::abs(den_r) <= 1e-14 * std::max(1.0, scale_r))
    throw ZeroDenominator("v^k v^l g_kl vanishes (" + std::to_string(den_r) + ")");
  BoundSides out;
  out.lhs = u.dot(cov * u) / (den_l * den_l);
  out.rhs = 1.0 / den_r;
  return out;
}

}  // namespace

double InfoMatrix::condition_number() const {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(entries);
  const Eigen::VectorXd ev = es.eigenvalues().cwiseAbs();
  if (ev.minCoeff() == 0.0) return kInf;
  return ev.maxCoeff() / ev.minCoeff();
}

Eigen::MatrixXd InfoMatrix::inverse() const {
  if (divergent) throw DivergentIntegral(note.empty() ? "information matrix diverges" : note);
  const double cond = condition_number();
  if (!(cond <= kMaxCondition))
    throw SingularMetric("metric condition number " + std::to_string(cond) + " exceeds " +
                         std::to_string(kMaxCondition));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(entries);
  const Eigen::VectorXd& ev = es.eigenvalues();
  const double cut = ev.cwiseAbs().maxCoeff() / kMaxCondition;
  Eigen::VectorXd inv(ev.size());
  for (Eigen::Index i = 0; i < ev.size(); ++i) inv[i] = std::abs(ev[i]) > cut ? 1.0 / ev[i] : 0.0;
  return es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose();
}

InfoMatrix fisher_matrix(const PdfFamily& family, const Eigen::VectorXd& theta) {
  return info_matrix(self_pair(family, theta), theta, InfoMatrix::Kind::fisher);
}

InfoMatrix fisher_matrix(const PhiFamily& fam, const Eigen::VectorXd& theta) {
  return fisher_matrix(densities(fam), theta);
}

InfoMatrix g_matrix(const EscortPair& pair, const Eigen::VectorXd& theta) {
  return info_matrix(pair, theta, InfoMatrix::Kind::generalized);
}

RandomVariable score(const EscortPair& pair, const Eigen::VectorXd& theta, int k) {
  if (k < 0 || k >= pair.dimension()) throw InvalidArgument("parameter index out of range");
  const auto s = stencil(pair, theta);
  return RandomVariable(
      [s, k](double x) { return score_value(s->dp(k, x), s->mid.escort(x), x); },
      "X_" + std::to_string(k));
}

Eigen::VectorXd regularity_residual(const EscortPair& pair, const Eigen::VectorXd& theta) {
  const auto s = stencil(pair, theta);
  const Samples smp = sample(*s, pair.space());
  Eigen::VectorXd out = Eigen::VectorXd::Zero(pair.dimension());
  for (Eigen::Index i = 0; i < smp.nodes.size(); ++i)
    if (smp.P[i] > 0.0) out += smp.nodes.w[i] * smp.dp.row(i).transpose();
  return out;
}

double inner(const EscortPair& pair, const Eigen::VectorXd& theta, const RandomVariable& a,
             const RandomVariable& b) {
  const PairPoint pt = pair.at(theta);
  const Nodes n = pair.space().nodes(pt.breakpoints);
  double s = 0.0;
  for (Eigen::Index i = 0; i < n.size(); ++i) {
    const double P = pt.escort(n.x[i]);
    if (P > 0.0) s += n.w[i] * P * a(n.x[i]) * b(n.x[i]);
  }
  return s;
}

PdfFamily densities(const PhiFamily& fam) {
  return [fam](const Eigen::VectorXd& theta) { return fam.at(theta).density(); };
}

BoundSides crb_sides(const EscortPair& pair, const Estimator& est, const Eigen::VectorXd& theta,
                     const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
  check_bound_args(pair.dimension(), est, u, v);
  const auto s = stencil(pair, theta);
  const Samples smp = sample(*s, pair.space());
  const int n = est.dimension();

  // Escort moments.
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(n);
  Eigen::MatrixXd second = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd reg = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd c(n);
  for (Eigen::Index i = 0; i < smp.nodes.size(); ++i) {
    const double P = smp.P[i];
    if (!(P > 0.0)) continue;
    const double wP = smp.nodes.w[i] * P;
    for (int k = 0; k < n; ++k) c[k] = est.components[k](smp.nodes.x[i]);
    mean += wP * c;
    second.noalias() += wP * c * c.transpose();
    reg += smp.nodes.w[i] * smp.dp.row(i).transpose();
  }
  const Eigen::MatrixXd cov = second - mean * mean.transpose();
  const Eigen::MatrixXd metric = quadratic_form(smp);
  BoundSides out = bound_from(cov, scale_hessian(*s, pair.space(), est), metric, u, v);
  out.regularity = reg.cwiseAbs().maxCoeff();
  out.advisory = out.regularity > 2e-5;
  return out;
}

BoundSides classical_crb_sides(const PdfFamily& family, const Estimator& est, const Eigen::VectorXd& theta,
                               const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
  check_bound_args(static_cast<int>(theta.size()), est, u, v);
  const InfoMatrix I = fisher_matrix(family, theta);
  if (I.divergent) throw DivergentIntegral(I.note + "; the classical bound degenerates to rhs = 0");

  const EscortPair pair = self_pair(family, theta);
  const auto s = stencil(pair, theta);
  const Nodes nodes = pair.space().nodes(s->mid.breakpoints);
  const int n = est.dimension();
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(n);
  Eigen::MatrixXd second = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd c(n);
  for (Eigen::Index i = 0; i < nodes.size(); ++i) {
    const double p = s->mid.base(nodes.x[i]);
    if (p == 0.0) continue;
    for (int k = 0; k < n; ++k) c[k] = est.components[k](nodes.x[i]);
    mean += nodes.w[i] * p * c;
    second.noalias() += nodes.w[i] * p * c * c.transpose();
  }
  return bound_from(second - mean * mean.transpose(), scale_hessian(*s, pair.space(), est), I.entries, u, v);
}

RandomVariable project(const EscortPair& pair, const Eigen::VectorXd& theta, const RandomVariable& a) {
  const auto s = stencil(pair, theta);
  const Samples smp = sample(*s, pair.space());
  InfoMatrix g;
  g.entries = quadratic_form(smp);
  const Eigen::MatrixXd ginv = g.inverse();

  const int dim = pair.dimension();
  double mean = 0.0;
  Eigen::VectorXd ip = Eigen::VectorXd::Zero(dim);
  for (Eigen::Index i = 0; i < smp.nodes.size(); ++i) {
    const double P = smp.P[i];
    if (!(P > 0.0)) continue;
    const double av = a(smp.nodes.x[i]);
    mean += smp.nodes.w[i] * P * av;
    ip += smp.nodes.w[i] * av * smp.dp.row(i).transpose();  // P · X_k · A
  }
  const Eigen::VectorXd coeff = ginv * ip;
  return RandomVariable(
      [s, a, coeff, mean](double x) {
        double out = a(x) - mean;
        const double P = s->mid.escort(x);
        for (Eigen::Index l = 0; l < coeff.size(); ++l)
          out -= coeff[l] * score_value(s->dp(static_cast<int>(l), x), P, x);
        return out;
      },
      "pi(" + a.label() + ")");
}

DualPoint dual_coordinates(const PhiFamily& fam, const Eigen::VectorXd& theta) {
  const FamilyMember m = fam.at(theta);
  const Pdf p = m.density();
  DualPoint out;
  out.theta = theta;
  out.eta.resize(fam.dimension());
  for (int k = 0; k < fam.dimension(); ++k) out.eta[k] = expectation(p, fam.statistics()[k]);
  const double I = information_content(fam.calculus(), p, InformationRoute::moment);
  out.F = theta.dot(out.eta) - I;
  out.E = information_content(fam.calculus(), p, InformationRoute::direct);
  return out;
}

double DualityResiduals::max_norm() const {
  return std::max({grad_F.cwiseAbs().maxCoeff(), grad_I.cwiseAbs().maxCoeff(), jacobian.cwiseAbs().maxCoeff()});
}

DualityResiduals duality_residuals(const PhiFamily& fam, const Eigen::VectorXd& theta) {
  const int n = fam.dimension();
  const DualPoint mid = dual_coordinates(fam, theta);
  Eigen::VectorXd dF(n), dI(n);
  Eigen::MatrixXd J(n, n);  // J(k, l) = ∂η_k/∂θ^l
  for (int l = 0; l < n; ++l) {
    const double h = fd::step(theta[l]);
    const DualPoint plus = dual_coordinates(fam, fd::shifted(theta, l, h));
    const DualPoint minus = dual_coordinates(fam, fd::shifted(theta, l, -h));
    dF[l] = (plus.F - minus.F) / (2.0 * h);
    // I_φ(p_θ) = θ·η − F.
    const double Ip = plus.theta.dot(plus.eta) - plus.F;
    const double Im = minus.theta.dot(minus.eta) - minus.F;
    dI[l] = (Ip - Im) / (2.0 * h);
    J.col(l) = (plus.eta - minus.eta) / (2.0 * h);
  }
  DualityResiduals out;
  out.grad_F = dF - mid.eta;
  // ∂I/∂η_k = Σ_l ∂I/∂θ^l ∂θ^l/∂η_k with ∂θ/∂η = J^{-1}.
  const Eigen::VectorXd dI_deta = J.transpose().fullPivLu().solve(dI);
  out.grad_I = dI_deta - theta;
  const FamilyMember m = fam.at(theta);
  const InfoMatrix g = g_matrix(EscortPair::canonical(fam), theta);
  out.jacobian = J + g.entries / m.Z();
  out.legendre = mid.legendre_residual();
  return out;
}

}  // namespace phifam
