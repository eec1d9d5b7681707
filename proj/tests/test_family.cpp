#include <doctest.h>

#include <cmath>
#include <random>

#include "phifam/errors.hpp"
#include "phifam/finite_difference.hpp"
#include "phifam/fixtures.hpp"

using namespace phifam;

namespace {

Eigen::VectorXd vec(double a) { return Eigen::VectorXd::Constant(1, a); }
Eigen::VectorXd vec(double a, double b) {
  Eigen::VectorXd v(2);
  v << a, b;
  return v;
}

// 𝔽_θ c_k through the escort density.
Eigen::VectorXd escort_means(const PhiFamily& fam, const Eigen::VectorXd& theta) {
  const FamilyMember m = fam.at(theta);
  const Pdf P = m.escort_density();
  Eigen::VectorXd out(fam.dimension());
  for (int k = 0; k < fam.dimension(); ++k) out[k] = expectation(P, fam.statistics()[k]);
  return out;
}

Eigen::VectorXd means(const PhiFamily& fam, const Eigen::VectorXd& theta) {
  const Pdf p = fam.at(theta).density();
  Eigen::VectorXd out(fam.dimension());
  for (int k = 0; k < fam.dimension(); ++k) out[k] = expectation(p, fam.statistics()[k]);
  return out;
}

}  // namespace

TEST_CASE("solve_G worked values") {
  // Constant deformer, c = 2x: ∫_0^∞ [1 + G − 2Θx]_+ dx = (1 + G)²/(4Θ), so G = 2√Θ − 1.
  const PhiFamily c1 = fixtures::example1c();
  CHECK(solve_G(c1, vec(1.0)) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(solve_G(c1, vec(4.0)) == doctest::Approx(3.0).epsilon(1e-10));
  CHECK(solve_G(c1, vec(0.25)) == doctest::Approx(0.0).epsilon(1e-10));

  CHECK(solve_G(fixtures::identity_family(), vec(2.0)) == doctest::Approx(std::log(2.0)).epsilon(1e-10));

  const PhiFamily two_point(DeformedCalculus(Deformer::power(1.0)), MeasureSpace::discrete({0.0, 1.0}, {1.0, 1.0}),
                            {RandomVariable::monomial(1.0, 1.0)});
  CHECK(solve_G(two_point, vec(0.0)) == doctest::Approx(-std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("solve_G normalizes") {
  for (const auto& [fam, theta] : std::vector<std::pair<PhiFamily, Eigen::VectorXd>>{
           {fixtures::example1c(), vec(0.7)},
           {fixtures::power_family(0.5), vec(1.0)},
           {fixtures::power_family(1.5), vec(2.0)},
           {fixtures::power_family(0.9), vec(0.3)},
           {fixtures::two_parameter(Deformer::power(0.5)), vec(-2.0, 3.0)},
           {fixtures::two_parameter(Deformer::ceiling()), vec(1.0, -1.0)},
           {PhiFamily(DeformedCalculus(Deformer::ceiling()), MeasureSpace::lebesgue(0.0, kInf),
                      {RandomVariable::monomial(1.0, 1.0)}),
            vec(2.0)},
       }) {
    const FamilyMember m = fam.at(theta);
    CHECK(std::abs(normalization_residual(m.density())) <= 1e-10);
    CHECK(std::abs(normalization_residual(m.escort_density())) <= 1e-7);
  }
}

TEST_CASE("pdf_at worked values") {
  const PhiFamily c1 = fixtures::example1c();
  CHECK(pdf_at(c1, vec(1.0), 0.0) == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(pdf_at(c1, vec(1.0), 2.0) == 0.0);
  CHECK(pdf_at(fixtures::identity_family(), vec(1.0), 0.0) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("outside the domain") {
  const PhiFamily id = fixtures::identity_family();
  CHECK_THROWS_AS(id.at(vec(-1.0)), OutsideDomain);
  CHECK_THROWS_AS(id.at(vec(0.0)), OutsideDomain);
  CHECK_THROWS_AS(id.at(vec(kInf)), OutsideDomain);
  CHECK_THROWS_AS(fixtures::example1c().at(vec(-0.5)), OutsideDomain);
  CHECK_THROWS_AS(id.at(vec(1.0, 2.0)), InvalidArgument);
}

TEST_CASE("escorts") {
  SUBCASE("identity deformer: escort equals base, Z = 1") {
    const PhiFamily id = fixtures::identity_family();
    for (double t : {0.5, 1.0, 3.0}) {
      CHECK(zet(id, vec(t)) == doctest::Approx(1.0).epsilon(1e-10));
      for (double x : {0.0, 0.3, 2.0})
        CHECK(escort_at(id, vec(t), x) == doctest::Approx(pdf_at(id, vec(t), x)).epsilon(1e-9));
    }
  }
  SUBCASE("constant deformer: uniform escort on [0, θ]") {
    const PhiFamily c1 = fixtures::example1c();
    for (double Theta : {0.25, 1.0, 4.0}) {
      const double theta = 1.0 / std::sqrt(Theta);
      const FamilyMember m = c1.at(vec(Theta));
      CHECK(m.Z() == doctest::Approx(theta).epsilon(1e-10));
      CHECK(m.escort(0.5 * theta) == doctest::Approx(1.0 / theta).epsilon(1e-10));
      CHECK(m.escort(1.5 * theta) == 0.0);
    }
  }
  SUBCASE("power deformer: escort ∝ [1 + (1−q)(G − θx)]_+^{q/(1−q)}") {
    const double q = 0.5;
    const FamilyMember m = fixtures::power_family(q).at(vec(1.0));
    CHECK(std::abs(normalization_residual(m.escort_density())) <= 1e-7);
    for (double x : {0.0, 0.5, 1.0}) {
      const double b = 1.0 + (1.0 - q) * (m.G() - x);
      CHECK(m.escort(x) == doctest::Approx(std::pow(b, q / (1.0 - q)) / m.Z()).epsilon(1e-12));
    }
  }
}

TEST_CASE("heavy tails leave the domain") {
  // q = 3 gives p ∝ (a + x)^{-1/2} on [0, ∞), which has infinite mass for every G.
  const PhiFamily steep = fixtures::power_family(3.0);
  CHECK_THROWS_AS(steep.at(vec(1.0)), OutsideDomain);
}

TEST_CASE("escort condition residual") {
  for (const auto& [fam, theta] : std::vector<std::pair<PhiFamily, Eigen::VectorXd>>{
           {fixtures::example1c(), vec(1.0)},
           {fixtures::power_family(0.5), vec(1.0)},
           {fixtures::identity_family(), vec(2.0)},
           {fixtures::two_parameter(Deformer::power(0.5)), vec(0.5, 1.0)},
       }) {
    const EscortPair pair = EscortPair::canonical(fam);
    for (int k = 0; k < fam.dimension(); ++k) CHECK(escort_condition_residual(pair, theta, k) <= 2e-5);
  }

  CHECK(escort_condition_residual(fixtures::example1_pair(), vec(1.0), 0) > 0.1);

  const PhiFamily id = fixtures::identity_family();
  const EscortPair self = EscortPair::self_paired(
      id.space(), 1, [id](const Eigen::VectorXd& t) { return id.at(t).density(); }, id.statistics());
  CHECK(escort_condition_residual(self, vec(1.0), 0) <= 2e-5);
}

TEST_CASE("G is concave") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U(-3.0, 3.0), P(0.2, 5.0);
  const std::vector<PhiFamily> two_d = {fixtures::two_parameter(Deformer::power(0.5)),
                                        fixtures::two_parameter(Deformer::constant()),
                                        fixtures::two_parameter(Deformer::power(1.0))};
  for (const auto& fam : two_d) {
    for (int t = 0; t < 10; ++t) {
      const Eigen::VectorXd a = vec(U(rng), U(rng)), b = vec(U(rng), U(rng));
      for (double lam : {0.25, 0.5, 0.75})
        CHECK(lam * solve_G(fam, a) + (1 - lam) * solve_G(fam, b) <= solve_G(fam, lam * a + (1 - lam) * b) + 1e-8);
    }
  }
  for (const auto& fam : {fixtures::power_family(0.5), fixtures::example1c()}) {
    for (int t = 0; t < 10; ++t) {
      const Eigen::VectorXd a = vec(P(rng)), b = vec(P(rng));
      for (double lam : {0.25, 0.5, 0.75})
        CHECK(lam * solve_G(fam, a) + (1 - lam) * solve_G(fam, b) <= solve_G(fam, lam * a + (1 - lam) * b) + 1e-8);
    }
  }
}

TEST_CASE("escort means are the gradient of G") {
  for (const auto& [fam, theta] : std::vector<std::pair<PhiFamily, Eigen::VectorXd>>{
           {fixtures::example1c(), vec(1.0)},
           {fixtures::power_family(0.5), vec(1.5)},
           {fixtures::two_parameter(Deformer::power(0.5)), vec(0.5, -1.0)},
           {fixtures::two_parameter(Deformer::ceiling()), vec(2.0, 1.0)},
       }) {
    const Eigen::VectorXd dG = fd::gradient([&](const Eigen::VectorXd& t) { return solve_G(fam, t); }, theta);
    const Eigen::VectorXd F = escort_means(fam, theta);
    for (int k = 0; k < fam.dimension(); ++k) CHECK(std::abs(dG[k] - F[k]) <= 2e-5);
  }
}

TEST_CASE("curl test: the means are a gradient field") {
  for (const auto& d : {Deformer::power(0.5), Deformer::power(1.0), Deformer::constant(), Deformer::power(2.0)}) {
    const PhiFamily fam = fixtures::two_parameter(d);
    for (const Eigen::VectorXd& theta : {vec(0.5, 1.0), vec(-1.0, 2.0), vec(1.5, -0.5)}) {
      const Eigen::MatrixXd J = fd::jacobian([&](const Eigen::VectorXd& t) { return means(fam, t); }, theta);
      CHECK(std::abs(J(0, 1) - J(1, 0)) <= 2e-5);
    }
  }
}

TEST_CASE("power family in the alpha parametrization") {
  // α = 2q − 1 turns [1 + (1−q) y]^{1/(1−q)} into [1 + ((1−α)/2) y]^{2/(1−α)}.
  for (double q : {0.5, 0.8, 1.4}) {
    const double alpha = 2.0 * q - 1.0;
    const PhiFamily fam = fixtures::power_family(q);
    const FamilyMember m = fam.at(vec(1.2));
    for (double x = 0.0; x < 5.0; x += 0.37) {
      const double b = 1.0 + 0.5 * (1.0 - alpha) * (m.G() - 1.2 * x);
      const double expected = b > 0.0 ? std::pow(b, 2.0 / (1.0 - alpha)) : 0.0;
      CHECK(std::abs(m.pdf(x) - expected) <= 1e-9);
    }
  }
}
