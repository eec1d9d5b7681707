#include <doctest.h>

#include <cmath>
#include <random>

#include "phifam/errors.hpp"
#include "phifam/finite_difference.hpp"
#include "phifam/fixtures.hpp"
#include "phifam/geometry.hpp"

using namespace phifam;

namespace {

Eigen::VectorXd vec(double a) { return Eigen::VectorXd::Constant(1, a); }
Eigen::VectorXd vec(double a, double b) {
  Eigen::VectorXd v(2);
  v << a, b;
  return v;
}

const double kE = std::exp(1.0);

Estimator single(double scale) { return Estimator{{RandomVariable::monomial(scale, 1.0)}}; }

// Largest |A(x)| over the escort support at θ.
double sup_on_support(const EscortPair& pair, const Eigen::VectorXd& theta, const RandomVariable& a) {
  const PairPoint pt = pair.at(theta);
  const Nodes n = pair.space().nodes(pt.breakpoints);
  double worst = 0.0;
  for (Eigen::Index i = 0; i < n.size(); ++i)
    if (pt.escort(n.x[i]) > 0.0) worst = std::max(worst, std::abs(a(n.x[i])));
  return worst;
}

}  // namespace

TEST_CASE("Fisher information") {
  const InfoMatrix tri = fisher_matrix(fixtures::triangular(), vec(1.0));
  CHECK(tri.divergent);
  CHECK(tri.kind == InfoMatrix::Kind::fisher);

  const InfoMatrix ex = fisher_matrix(fixtures::exponential_mean(), vec(2.0));
  CHECK_FALSE(ex.divergent);
  CHECK(ex.entries(0, 0) == doctest::Approx(0.25).epsilon(1e-7));

  const InfoMatrix bern = fisher_matrix(fixtures::bernoulli(), vec(0.5));
  CHECK(bern.entries(0, 0) == doctest::Approx(4.0).epsilon(1e-8));

  // Classical exponential family with rate θ: I = 1/θ².
  CHECK(fisher_matrix(fixtures::identity_family(), vec(2.0)).entries(0, 0) == doctest::Approx(0.25).epsilon(1e-7));
}

TEST_CASE("generalized metric") {
  for (double t : {0.5, 1.0, 2.0}) {
    const InfoMatrix g = g_matrix(fixtures::example1_pair(), vec(t));
    CAPTURE(t);
    CHECK_FALSE(g.divergent);
    CHECK(std::abs(g.entries(0, 0) * t * t / 4.0 - (5.0 * kE - 13.0)) <= 1e-6);
  }

  const EscortPair c1 = EscortPair::canonical(fixtures::example1c());
  for (double Theta : {0.25, 1.0, 4.0}) {
    const double theta = 1.0 / std::sqrt(Theta);
    CHECK(g_matrix(c1, vec(Theta)).entries(0, 0) == doctest::Approx(std::pow(theta, 4) / 3.0).epsilon(1e-7));
  }

  const PhiFamily id = fixtures::identity_family();
  CHECK(g_matrix(EscortPair::canonical(id), vec(1.5)).entries(0, 0) ==
        doctest::Approx(fisher_matrix(id, vec(1.5)).entries(0, 0)).epsilon(1e-9));
}

TEST_CASE("metric is symmetric positive semidefinite") {
  for (const auto& d : {Deformer::power(0.5), Deformer::constant(), Deformer::power(1.5), Deformer::ceiling()}) {
    const EscortPair pair = EscortPair::canonical(fixtures::two_parameter(d));
    for (const Eigen::VectorXd& theta : {vec(0.5, 1.0), vec(-1.0, 2.0), vec(1.0, -1.5)}) {
      const InfoMatrix g = g_matrix(pair, theta);
      CHECK((g.entries - g.entries.transpose()).cwiseAbs().maxCoeff() == 0.0);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g.entries);
      CHECK(es.eigenvalues().minCoeff() >= -1e-9);
    }
  }
}

TEST_CASE("support mismatch") {
  // Escort supported on [0, θ/2] while the triangular base moves on [0, θ].
  const auto tri = fixtures::triangular();
  const EscortPair bad(MeasureSpace::lebesgue(0.0, kInf), 1, [tri](const Eigen::VectorXd& theta) {
    const Pdf p = tri(theta);
    const double t = theta[0];
    PairPoint pt;
    pt.base = p.density;
    pt.escort = [t](double x) { return x < 0.5 * t ? 2.0 / t : 0.0; };
    pt.breakpoints = {0.5 * t, t};
    return pt;
  });
  CHECK_THROWS_AS(g_matrix(bad, vec(1.0)), SupportMismatch);
  CHECK_THROWS_AS(score(bad, vec(1.0), 0)(0.75), SupportMismatch);
  CHECK(std::abs(regularity_residual(bad, vec(1.0))[0]) > 0.1);
  CHECK(std::abs(regularity_residual(fixtures::example1_pair(), vec(1.0))[0]) <= 2e-5);
}

TEST_CASE("score variables") {
  SUBCASE("canonical pairs: X_k = Z (𝔽 c_k − c_k)") {
    const PhiFamily fam = fixtures::power_family(0.5);
    const EscortPair pair = EscortPair::canonical(fam);
    const Eigen::VectorXd theta = vec(1.0);
    const FamilyMember m = fam.at(theta);
    const double Fc = expectation(m.escort_density(), fam.statistics()[0]);
    const RandomVariable X = score(pair, theta, 0);
    for (double x : {0.0, 0.3, 1.0, 2.0})
      CHECK(std::abs(X(x) - m.Z() * (Fc - x)) <= 2e-5);
    CHECK(std::abs(regularity_residual(pair, theta)[0]) <= 2e-5);
    CHECK(inner(pair, theta, X, X) == doctest::Approx(g_matrix(pair, theta).entries(0, 0)).epsilon(2e-5));
  }
  SUBCASE("identity deformer: X = ∂ log p/∂θ") {
    const PhiFamily id = fixtures::identity_family();
    const RandomVariable X = score(EscortPair::canonical(id), vec(2.0), 0);
    for (double x : {0.0, 0.5, 3.0}) CHECK(std::abs(X(x) - (0.5 - x)) <= 1e-6);
  }
}

TEST_CASE("regularity residual vanishes for canonical pairs") {
  for (const auto& fam : {fixtures::two_parameter(Deformer::power(0.5)), fixtures::two_parameter(Deformer::ceiling()),
                          fixtures::two_parameter(Deformer::constant())}) {
    const Eigen::VectorXd r = regularity_residual(EscortPair::canonical(fam), vec(0.7, -0.4));
    CHECK(r.cwiseAbs().maxCoeff() <= 2e-5);
  }
}

TEST_CASE("Cramér-Rao sides") {
  SUBCASE("triangular base with exponential escort") {
    for (double t : {0.5, 1.0, 2.0}) {
      const BoundSides b = crb_sides(fixtures::example1_pair(), single(3.0), vec(t), vec(1.0), vec(1.0));
      CHECK(b.lhs == doctest::Approx(9.0 * t * t).epsilon(1e-4));
      CHECK(b.rhs == doctest::Approx(t * t / (4.0 * (5.0 * kE - 13.0))).epsilon(1e-4));
      CHECK(b.lhs >= b.rhs);
      CHECK_FALSE(b.advisory);
    }
    CHECK_THROWS_AS(classical_crb_sides(fixtures::triangular(), single(3.0), vec(1.0), vec(1.0), vec(1.0)),
                    DivergentIntegral);
  }
  SUBCASE("constant deformer: the bound is attained") {
    const EscortPair pair = EscortPair::canonical(fixtures::example1c());
    for (double Theta : {0.25, 1.0, 4.0}) {
      const BoundSides b = crb_sides(pair, single(2.0), vec(Theta), vec(1.0), vec(1.0));
      const double theta = 1.0 / std::sqrt(Theta);
      CHECK(b.rhs == doctest::Approx(3.0 / std::pow(theta, 4)).epsilon(1e-6));
      CHECK(std::abs(b.lhs - b.rhs) <= 2e-5 * std::max(1.0, b.rhs));
    }
  }
  SUBCASE("classical cases") {
    const BoundSides e = classical_crb_sides(fixtures::exponential_mean(), single(1.0), vec(1.0), vec(1.0), vec(1.0));
    CHECK(e.lhs == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(e.rhs == doctest::Approx(1.0).epsilon(1e-6));
    const BoundSides b = classical_crb_sides(fixtures::bernoulli(), single(1.0), vec(0.5), vec(1.0), vec(1.0));
    CHECK(b.lhs == doctest::Approx(0.25).epsilon(1e-8));
    CHECK(b.rhs == doctest::Approx(0.25).epsilon(1e-8));

    const PhiFamily id = fixtures::identity_family();
    const BoundSides i = crb_sides(EscortPair::canonical(id), single(1.0), vec(1.3), vec(1.0), vec(1.0));
    CHECK(std::abs(i.lhs - i.rhs) <= 2e-5 * std::max(1.0, i.rhs));
  }
  SUBCASE("zero denominators") {
    const EscortPair pair = EscortPair::canonical(fixtures::two_parameter(Deformer::power(0.5)));
    const Estimator est{fixtures::two_parameter(Deformer::power(0.5)).statistics()};
    CHECK_THROWS_AS(crb_sides(pair, est, vec(0.5, 0.5), vec(1.0, 0.0), vec(0.0, 0.0)), ZeroDenominator);
  }
}

TEST_CASE("bound validity and tightness on random fixtures") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> U(-2.0, 2.0);
  const std::vector<PhiFamily> fams = {fixtures::two_parameter(Deformer::power(0.5)),
                                       fixtures::two_parameter(Deformer::power(1.0)),
                                       fixtures::two_parameter(Deformer::constant()),
                                       fixtures::two_parameter(Deformer::power(1.5))};
  int checked = 0;
  for (int t = 0; t < 40; ++t) {
    const PhiFamily& fam = fams[t % fams.size()];
    const EscortPair pair = EscortPair::canonical(fam);
    const Estimator est{fam.statistics()};
    const Eigen::VectorXd theta = vec(U(rng), U(rng));
    for (int r = 0; r < 5; ++r) {
      const Eigen::VectorXd u = vec(U(rng), U(rng)), v = vec(U(rng), U(rng));
      const BoundSides b = crb_sides(pair, est, theta, u, v);
      if (b.advisory) continue;
      ++checked;
      CHECK(b.lhs >= b.rhs - 2e-5 * std::max(1.0, b.rhs));
    }
    const BoundSides eq = crb_sides(pair, est, theta, theta.normalized() + vec(0.1, 0.2), theta.normalized() + vec(0.1, 0.2));
    CHECK(std::abs(eq.lhs - eq.rhs) <= 2e-5 * std::max(1.0, eq.rhs));
  }
  CHECK(checked == 200);
}

TEST_CASE("covariance of the escort equals g/Z²") {
  for (const auto& fam : {fixtures::two_parameter(Deformer::power(0.5)), fixtures::two_parameter(Deformer::constant())}) {
    const Eigen::VectorXd theta = vec(0.3, 0.8);
    const FamilyMember m = fam.at(theta);
    const Pdf P = m.escort_density();
    const auto& c = fam.statistics();
    Eigen::Matrix2d cov;
    for (int k = 0; k < 2; ++k)
      for (int l = 0; l < 2; ++l)
        cov(k, l) = expectation(P, c[k] * c[l]) - expectation(P, c[k]) * expectation(P, c[l]);
    const Eigen::MatrixXd g = g_matrix(EscortPair::canonical(fam), theta).entries;
    const Eigen::Vector2d u(0.6, -1.1);
    CHECK(std::abs(u.dot(cov * u) - u.dot(g * u) / (m.Z() * m.Z())) <= 2e-5);

    // ∂²F = ∂η/∂θ = −Z Cov_𝔽(c), and so negative semidefinite.
    const Eigen::MatrixXd H = fd::jacobian(
        [&](const Eigen::VectorXd& t) {
          const Pdf p = fam.at(t).density();
          return Eigen::Vector2d(expectation(p, c[0]), expectation(p, c[1])).eval();
        },
        theta);
    CHECK((H + m.Z() * cov).cwiseAbs().maxCoeff() <= 1e-4);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (H + H.transpose()));
    CHECK(es.eigenvalues().maxCoeff() <= 1e-9);
  }
}

TEST_CASE("projection") {
  const PhiFamily fam = fixtures::two_parameter(Deformer::power(0.5));
  const EscortPair pair = EscortPair::canonical(fam);
  const Eigen::VectorXd theta = vec(0.4, -0.6);

  const RandomVariable one = RandomVariable::constant(1.0);
  CHECK(sup_on_support(pair, theta, project(pair, theta, one)) <= 2e-5);
  for (int k = 0; k < 2; ++k) {
    const RandomVariable X = score(pair, theta, k);
    CHECK(sup_on_support(pair, theta, project(pair, theta, X)) <= 2e-5);
  }

  const RandomVariable A([](double x) { return std::sin(3.0 * x); });
  const RandomVariable pA = project(pair, theta, A);
  CHECK(std::abs(inner(pair, theta, pA, one)) <= 2e-5);
  for (int k = 0; k < 2; ++k) CHECK(std::abs(inner(pair, theta, score(pair, theta, k), pA)) <= 2e-5);

  // Derivatives of the tangent vectors stay in the tangent plane plus constants.
  const double h = 1e-3;
  for (int k = 0; k < 2; ++k)
    for (int l = 0; l < 2; ++l) {
      Eigen::VectorXd up = theta, dn = theta;
      up[l] += h;
      dn[l] -= h;
      const RandomVariable Xu = score(pair, up, k), Xd = score(pair, dn, k);
      const RandomVariable dX([=](double x) { return (Xu(x) - Xd(x)) / (2.0 * h); });
      CAPTURE(k);
      CAPTURE(l);
      CHECK(sup_on_support(pair, theta, project(pair, theta, dX)) <= 1e-4);
    }

  // Singular metric: two identical statistics.
  const PhiFamily twin(DeformedCalculus(Deformer::power(0.5)), MeasureSpace::lebesgue(0.0, 1.0),
                       {RandomVariable::monomial(1.0, 1.0), RandomVariable::monomial(1.0, 1.0)});
  CHECK_THROWS_AS(project(EscortPair::canonical(twin), theta, A), SingularMetric);
}

TEST_CASE("dual coordinates") {
  const DualPoint c1 = dual_coordinates(fixtures::example1c(), vec(1.0));
  CHECK(c1.eta[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-9));
  CHECK(std::abs(c1.legendre_residual()) <= 2e-5);

  const DualPoint id = dual_coordinates(fixtures::identity_family(), vec(2.0));
  CHECK(id.eta[0] == doctest::Approx(0.5).epsilon(1e-9));
  // Shannon entropy of the exponential distribution with rate 2.
  CHECK(id.E == doctest::Approx(1.0 - std::log(2.0)).epsilon(1e-8));
  CHECK(std::abs(id.legendre_residual()) <= 2e-5);
}

TEST_CASE("duality residuals") {
  for (const auto& [fam, theta] : std::vector<std::pair<PhiFamily, Eigen::VectorXd>>{
           {fixtures::example1c(), vec(1.0)},
           {fixtures::identity_family(), vec(1.0)},
           {fixtures::power_family(0.5), vec(1.0)},
           {fixtures::two_parameter(Deformer::power(0.5)), vec(0.5, -0.5)},
       }) {
    const DualityResiduals r = duality_residuals(fam, theta);
    CHECK(r.max_norm() <= 1e-4);
    CHECK(std::abs(r.legendre) <= 2e-5);
  }
}
