#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>

#include "phifam/family.hpp"

namespace phifam {

/// D_φ(p‖p′) and the split D = I(p′) − I(p) − ∫(p − p′) ln_φ(p′). The split
/// is absent when the deformer has no finite moment (I_φ undefined) or the
/// linear term is infinite.
struct DivergenceValue {
  struct Decomposition {
    double I_p = 0.0;
    double I_p_prime = 0.0;
    double linear_term = 0.0;
  };

  double value = 0.0;
  std::optional<Decomposition> decomposition;
};

/// ∫ dμ ∫_{p′}^{p} [ln_φ(u) − ln_φ(p′)] du, on the nodes of the common space
/// cut at both densities' breakpoints. +∞ when p′ vanishes where p does not
/// and ln_φ(0+) = −∞. Throws SpaceMismatch.
DivergenceValue divergence(const DeformedCalculus& calc, const Pdf& p, const Pdf& p2);

/// The inner integral ∫_{b}^{a} [ln_φ(u) − ln_φ(b)] du for a, b ≥ 0.
double divergence_density(const DeformedCalculus& calc, double a, double b);

enum class InformationRoute {
  /// −1/χ(1) − ∫ dμ ∫_0^p ln_φ(u) du
  moment,
  /// ∫ dμ p ln_χ(1/p), with 0·ln_χ(∞) = 0
  direct,
};

/// I_φ(p). Throws DivergentMoment (χ undefined) or DivergentIntegral.
double information_content(const DeformedCalculus& calc, const Pdf& p,
                           InformationRoute route = InformationRoute::moment);

/// |d/dv[v ln_χ(1/v)] + ln_φ(v) + ∫_0^1 u/φ(u) du| with the derivative by
/// central differences.
double chi_derivative_residual(const DeformedCalculus& calc, double v);

struct MaxentReport {
  int trials = 0;
  std::uint64_t seed = 0;
  /// Constrained trials with I_φ(p̃) > I_φ(p_θ) + 1e-7.
  int violations = 0;
  /// Unconstrained trials with 𝔼_p̃ θ·c − I_φ(p̃) < F(θ) − 1e-7.
  int free_energy_violations = 0;
  double I_theta = 0.0;
  double F = 0.0;
  /// max over constrained trials of I_φ(p̃) − I_φ(p_θ).
  double max_excess = 0.0;
  /// min over unconstrained trials of 𝔼_p̃ θ·c − I_φ(p̃) − F.
  double min_gap = 0.0;
  /// Largest deviation of ∫p̃ or 𝔼_p̃ θ·c from its target.
  double max_constraint_residual = 0.0;

  bool passed() const { return violations == 0 && free_energy_violations == 0; }
};

inline constexpr std::uint64_t kDefaultSeed = 20070601;

/// Samples p̃ = p_θ(1 + ε h) on the quadrature nodes of p_θ, with h bounded
/// by 1 and projected so that ∫p̃ and 𝔼_p̃ θ·c match p_θ exactly on the
/// nodes (ε alternates between 1e-2 and 1e-1). Each trial constructs
/// one constrained and one normalization-only perturbation; trial t draws from
/// its own stream seeded with seed + t.
MaxentReport maxent_check(const PhiFamily& fam, const Eigen::VectorXd& theta, int trials,
                          std::uint64_t seed = kDefaultSeed);

/// Second derivatives of D(θ′, η′) = D_φ(p_θ′‖p_η′) at θ′ = η′ = θ, by
/// nested central differences, against g/Z.
struct DivergenceMetric {
  Eigen::MatrixXd theta_theta;
  /// −∂²D/∂θ′∂η′.
  Eigen::MatrixXd theta_eta;
  Eigen::MatrixXd eta_eta;
  /// g/Z of the canonical pair.
  Eigen::MatrixXd target;
  Eigen::VectorXd first_theta;
  Eigen::VectorXd first_eta;

  double max_relative_error() const;
  double max_first_derivative() const;
  bool passed(double rel_tol = 1e-3, double first_tol = 1e-5) const {
    return max_relative_error() <= rel_tol && max_first_derivative() <= first_tol;
  }
};

/// Step of the divergence second derivatives, relative to max(1, |θ^k|).
inline constexpr double kDivergenceStep = 1e-4;

DivergenceMetric metric_from_divergence(const PhiFamily& fam, const Eigen::VectorXd& theta);

}  // namespace phifam
