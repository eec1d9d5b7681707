#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace phifam {

inline constexpr int kDefaultPanels = 256;

/// Quadrature nodes and weights realizing ∫ dμ on a MeasureSpace.
struct Nodes {
  Eigen::VectorXd x;
  Eigen::VectorXd w;

  Eigen::Index size() const { return x.size(); }

  template <class F>
  Eigen::VectorXd eval(F&& f) const {
    return x.unaryExpr([&](double v) { return static_cast<double>(f(v)); });
  }
};

/// The measure space (Ω, μ): either finitely many weighted points or the
/// Lebesgue measure on [a, b] with b possibly +∞.
///
/// Lebesgue integrals use composite 10-point Gauss-Legendre panels. On a
/// semi-infinite interval the variable is mapped as x = a + t/(1−t) and the
/// panels are laid out uniformly in t ∈ [0, 1). Callers pass the points where
/// their integrand has a kink; the panels are split exactly there.
class MeasureSpace {
 public:
  static MeasureSpace discrete(std::vector<double> points, std::vector<double> weights);
  static MeasureSpace lebesgue(double a, double b, int panels = kDefaultPanels);

  bool is_discrete() const { return discrete_; }
  bool is_semi_infinite() const { return !discrete_ && std::isinf(b_); }
  double lower() const { return a_; }
  double upper() const { return b_; }
  int panels() const { return panels_; }
  const std::vector<double>& points() const { return points_; }
  const std::vector<double>& weights() const { return weights_; }

  MeasureSpace with_panels(int panels) const;

  /// Node set with panels split at `breakpoints`; `refinement` multiplies the
  /// panel count (used by divergence detection).
  Nodes nodes(std::span<const double> breakpoints = {}, int refinement = 1) const;

  /// Evenly spaced sample of Ω used to locate sign changes (breakpoints).
  std::vector<double> scan_grid(int count = 4097) const;

  bool operator==(const MeasureSpace& other) const;

 private:
  MeasureSpace() = default;
  double to_t(double x) const;
  double from_t(double t) const;

  bool discrete_ = false;
  std::vector<double> points_;
  std::vector<double> weights_;
  double a_ = 0.0;
  double b_ = 1.0;
  int panels_ = kDefaultPanels;
};

/// A real function on Ω (an estimator component, a score variable, ...).
class RandomVariable {
 public:
  using Fn = std::function<double(double)>;

  RandomVariable() : fn_([](double) { return 0.0; }) {}
  RandomVariable(Fn fn, std::string label = "") : fn_(std::move(fn)), label_(std::move(label)) {}

  /// scale · x^degree.
  static RandomVariable monomial(double scale, double degree);
  static RandomVariable constant(double value);
  /// Values attached to the points of a discrete space; evaluation elsewhere throws.
  static RandomVariable table(std::vector<double> points, std::vector<double> values);

  double operator()(double x) const { return fn_(x); }
  const std::string& label() const { return label_; }

 private:
  Fn fn_;
  std::string label_;
};

RandomVariable operator+(const RandomVariable& a, const RandomVariable& b);
RandomVariable operator-(const RandomVariable& a, const RandomVariable& b);
RandomVariable operator*(double s, const RandomVariable& a);
RandomVariable operator*(const RandomVariable& a, const RandomVariable& b);

/// A density on a MeasureSpace with the points where it has kinks or a
/// support cutoff.
struct Pdf {
  MeasureSpace space;
  std::function<double(double)> density;
  std::vector<double> breakpoints;

  double operator()(double x) const { return density(x); }
  Nodes nodes(int refinement = 1) const { return space.nodes(breakpoints, refinement); }
};

/// A θ-indexed family of densities, θ ↦ p_θ.
using PdfFamily = std::function<Pdf(const Eigen::VectorXd&)>;

enum class DivergenceCheck { off, on };

/// ∫ dμ f over `space`, cut at `breakpoints`. With the check on, the sum is
/// repeated at 2× and 4× the panel count; an increment that fails to shrink
/// (or a non-finite value) raises DivergentIntegral. The base-resolution
/// value is returned.
double integrate(const MeasureSpace& space, const std::function<double(double)>& f,
                 std::span<const double> breakpoints = {},
                 DivergenceCheck check = DivergenceCheck::on, const char* what = "integral");

/// Verdict on a refinement sequence I(N), I(2N), I(4N).
bool refinement_diverges(double coarse, double mid, double fine);

/// 𝔼_p f.
double expectation(const Pdf& p, const RandomVariable& f,
                   DivergenceCheck check = DivergenceCheck::on);

/// ∫ dμ p − 1.
double normalization_residual(const Pdf& p);

/// Roots of g on the space's scan grid refined by bisection; `g` is sampled
/// at the grid, sign changes are bracketed and each root is resolved to
/// near machine precision.
std::vector<double> find_crossings(const MeasureSpace& space, const std::function<double(double)>& g,
                                   std::span<const double> grid);

}  // namespace phifam
