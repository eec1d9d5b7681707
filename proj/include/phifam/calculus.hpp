#pragma once

#include <limits>
#include <vector>

#include "phifam/deformer.hpp"

namespace phifam {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Infimum and supremum of ln_φ over (0, ∞); either may be infinite.
struct RangeBounds {
  double lower = -kInf;
  double upper = kInf;
};

/// Deformed logarithm and exponential generated by a Deformer, plus the
/// derived functions ψ = φ∘exp_φ and χ(v) = 1 / ∫_0^{1/v} u/φ(u) du.
///
/// Each function has a closed form for the power, scaled_power, constant and
/// ceiling kinds. Tables (and every kind, when `closed_forms` is off) go
/// through adaptive Gauss-Legendre quadrature cut at the deformer's kinks,
/// and exp_φ through bracketing bisection with a Newton polish.
///
/// Immutable after construction; all members are safe to call concurrently.
class DeformedCalculus {
 public:
  struct Options {
    double quadrature_tol = 1e-9;
    double inversion_tol = 1e-10;
    bool closed_forms = true;
  };

  explicit DeformedCalculus(Deformer deformer);
  DeformedCalculus(Deformer deformer, Options options);

  const Deformer& deformer() const { return deformer_; }
  const Options& options() const { return options_; }
  bool closed_form() const;

  double phi(double u) const { return deformer_(u); }

  /// ∫_1^u dv/φ(v). Throws NonPositiveInput for u ≤ 0.
  double ln_phi(double u) const;
  /// Inverse of ln_phi, 0 at or below the range, +∞ at or above it.
  double exp_phi(double y) const;
  /// φ(exp_φ(y)), 0 below the range, +∞ above it.
  double psi(double y) const;
  /// [∫_0^{1/v} u/φ(u) du]^{-1}. Throws DivergentMoment when ∫_0^1 u/φ diverges.
  double chi(double v) const;
  /// ∫_1^w du/χ(u).
  double ln_chi(double w) const;

  RangeBounds range_bounds() const { return bounds_; }

  /// ∫_0^1 u/φ(u) du, i.e. 1/χ(1). Throws DivergentMoment if infinite.
  double moment() const;
  bool has_moment() const { return moment_ < kInf; }
  /// K(s) = ∫_0^s u/φ(u) du; +∞ when the moment diverges.
  double partial_moment(double s) const;
  /// Λ(s) = ∫_0^s ln_φ(u) du = s·ln_φ(s) − K(s), with Λ(0) = 0.
  double ln_phi_antiderivative(double s) const;

  /// Arguments y in (lo, hi) where exp_φ has a kink: the finite lower range
  /// bound and ln_φ of every deformer kink. At most `limit` values.
  std::vector<double> kink_levels(double lo, double hi, std::size_t limit = 4096) const;

 private:
  double ln_phi_numeric(double u) const;
  double exp_phi_numeric(double y) const;
  double partial_moment_numeric(double s) const;
  double ln_chi_numeric(double w) const;
  void compute_bounds();
  void compute_moment();

  Deformer deformer_;
  Options options_;
  RangeBounds bounds_;
  double moment_ = kInf;
};

// Free-function spelling of the kernel operations.
inline double ln_phi(const DeformedCalculus& c, double u) { return c.ln_phi(u); }
inline double exp_phi(const DeformedCalculus& c, double y) { return c.exp_phi(y); }
inline double psi(const DeformedCalculus& c, double y) { return c.psi(y); }
inline double chi(const DeformedCalculus& c, double v) { return c.chi(v); }
inline RangeBounds range_bounds(const DeformedCalculus& c) { return c.range_bounds(); }

/// H_n, exact summation for small n and the asymptotic series above.
double harmonic_number(double n);

}  // namespace phifam
