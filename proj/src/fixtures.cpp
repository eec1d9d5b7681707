#include "phifam/fixtures.hpp"

#include <cmath>

#include "phifam/errors.hpp"

namespace phifam::fixtures {

namespace {

double positive_scale(const Eigen::VectorXd& theta) {
  if (theta.size() != 1) throw InvalidArgument("this family has one parameter");
  if (!(theta[0] > 0.0) || !std::isfinite(theta[0])) throw OutsideDomain("theta must be > 0");
  return theta[0];
}

}  // namespace

PdfFamily triangular(int panels) {
  return [panels](const Eigen::VectorXd& theta) {
    const double t = positive_scale(theta);
    return Pdf{MeasureSpace::lebesgue(0.0, kInf, panels),
               [t](double x) { return x < t ? (2.0 / t) * (1.0 - x / t) : 0.0; },
               {t}};
  };
}

PdfFamily exponential_mean(int panels) {
  return [panels](const Eigen::VectorXd& theta) {
    const double t = positive_scale(theta);
    return Pdf{MeasureSpace::lebesgue(0.0, kInf, panels), [t](double x) { return std::exp(-x / t) / t; }, {}};
  };
}

PdfFamily bernoulli() {
  return [](const Eigen::VectorXd& theta) {
    if (theta.size() != 1) throw InvalidArgument("this family has one parameter");
    const double t = theta[0];
    if (!(t > 0.0 && t < 1.0)) throw OutsideDomain("Bernoulli parameter must lie in (0, 1)");
    return Pdf{MeasureSpace::discrete({0.0, 1.0}, {1.0, 1.0}),
               [t](double x) { return x == 1.0 ? t : 1.0 - t; },
               {}};
  };
}

EscortPair example1_pair(int panels) {
  const auto base = triangular(panels);
  const auto escort = exponential_mean(panels);
  return EscortPair(
      MeasureSpace::lebesgue(0.0, kInf, panels), 1,
      [base, escort](const Eigen::VectorXd& theta) {
        const Pdf p = base(theta);
        const Pdf P = escort(theta);
        PairPoint pt;
        pt.base = p.density;
        pt.escort = P.density;
        pt.breakpoints = p.breakpoints;
        return pt;
      },
      {RandomVariable::monomial(3.0, 1.0)});
}

PhiFamily example1c(int panels) {
  return PhiFamily(DeformedCalculus(Deformer::constant()), MeasureSpace::lebesgue(0.0, kInf, panels),
                   {RandomVariable::monomial(2.0, 1.0)});
}

PhiFamily power_family(double q, int panels) {
  return PhiFamily(DeformedCalculus(Deformer::power(q)), MeasureSpace::lebesgue(0.0, kInf, panels),
                   {RandomVariable::monomial(1.0, 1.0)});
}

PhiFamily identity_family(int panels) { return power_family(1.0, panels); }

PhiFamily two_parameter(const Deformer& deformer) {
  return PhiFamily(DeformedCalculus(deformer), MeasureSpace::lebesgue(0.0, 1.0),
                   {RandomVariable::monomial(1.0, 1.0), RandomVariable::monomial(1.0, 2.0)});
}

}  // namespace phifam::fixtures
