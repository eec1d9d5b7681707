#pragma once

#include <utility>
#include <vector>

namespace phifam {

// The function φ that generates a deformed calculus: strictly positive and
// non-decreasing on (0, ∞).
class Deformer {
 public:
  enum class Kind { power, scaled_power, constant, ceiling, table };

  /// φ(u) = u^q, q > 0.
  static Deformer power(double q);
  /// φ(u) = u^(2-q) / q, 0 < q ≤ 2.
  static Deformer scaled_power(double q);
  /// φ(u) = 1.
  static Deformer constant();
  /// φ(u) = ⌈u⌉.
  static Deformer ceiling();
  /// Piecewise-linear through sorted (u, φ(u)) knots. Constant below the
  /// first knot, extended with the last segment's slope beyond the final one.
  static Deformer table(std::vector<std::pair<double, double>> knots);

  double operator()(double u) const;

  Kind kind() const { return kind_; }
  double q() const { return q_; }
  const std::vector<std::pair<double, double>>& knots() const { return knots_; }

  // Points in (lo, hi) where φ is not smooth.
  std::vector<double> kinks(double lo, double hi) const;

 private:
  Deformer(Kind kind, double q) : kind_(kind), q_(q) {}

  Kind kind_;
  double q_ = 0.0;
  std::vector<std::pair<double, double>> knots_;
  double tail_slope_ = 0.0;
};

const char* to_string(Deformer::Kind kind);

}  // namespace phifam
