#pragma once

#include <Eigen/Dense>
#include <string>

#include "phifam/family.hpp"

namespace phifam {

/// Fisher information I_kl or the escort-weighted metric g_kl at one θ.
///
/// A divergent Fisher information is a result, not an error: `divergent` is
/// set and `entries` hold the base-resolution sums.
struct InfoMatrix {
  enum class Kind { fisher, generalized };

  Eigen::MatrixXd entries;
  Kind kind = Kind::generalized;
  bool divergent = false;
  std::string note;

  double condition_number() const;
  /// Pseudo-inverse through the symmetric eigendecomposition. Throws
  /// SingularMetric when the condition number exceeds 1e12 and
  /// DivergentIntegral when the matrix is divergent.
  Eigen::MatrixXd inverse() const;
};

inline constexpr double kMaxCondition = 1e12;
/// |∂p| above which a node outside the escort support is a SupportMismatch.
inline constexpr double kSupportTol = 1e-9;

/// I_kl = ∫ dμ (1/p)(∂_k p)(∂_l p) with ∂p by central differences.
InfoMatrix fisher_matrix(const PdfFamily& family, const Eigen::VectorXd& theta);
InfoMatrix fisher_matrix(const PhiFamily& fam, const Eigen::VectorXd& theta);

/// g_kl = ∫ dμ (1/P)(∂_k p)(∂_l p). Nodes with P = 0 contribute nothing as
/// long as |∂p| ≤ kSupportTol there; otherwise SupportMismatch.
InfoMatrix g_matrix(const EscortPair& pair, const Eigen::VectorXd& theta);

/// X_k = (1/P_θ) ∂p_θ/∂θ^k on the escort support, 0 outside.
RandomVariable score(const EscortPair& pair, const Eigen::VectorXd& theta, int k);

/// Component k is 𝔽_θ X_k, i.e. ∫ ∂_k p over the escort support. Never throws
/// on a support mismatch: the part of ∂p outside the escort support is what
/// makes the residual nonzero.
Eigen::VectorXd regularity_residual(const EscortPair& pair, const Eigen::VectorXd& theta);

/// ⟨A, B⟩_θ = 𝔽_θ AB.
double inner(const EscortPair& pair, const Eigen::VectorXd& theta, const RandomVariable& a,
             const RandomVariable& b);

/// Base-family θ ↦ p_θ of a φ-exponential family.
PdfFamily densities(const PhiFamily& fam);

struct BoundSides {
  double lhs = 0.0;
  double rhs = 0.0;
  /// max_k |𝔽_θ X_k|; the bound is only guaranteed when this is small.
  double regularity = 0.0;
  bool advisory = false;
};

/// Both sides of the generalized Cramér-Rao bound
///   u^k u^l Cov_𝔽(c)_kl / [u^k v^l ∂_k∂_l F]²  ≥  1 / (v^k v^l g_kl),
/// with ∂_k∂_l F = ∂(𝔼_θ c_k)/∂θ^l. Throws ZeroDenominator.
BoundSides crb_sides(const EscortPair& pair, const Estimator& est, const Eigen::VectorXd& theta,
                     const Eigen::VectorXd& u, const Eigen::VectorXd& v);

/// The classical bound: 𝔼_θ covariance and the Fisher information. Throws
/// DivergentIntegral when the Fisher information diverges (rhs = 0).
BoundSides classical_crb_sides(const PdfFamily& family, const Estimator& est, const Eigen::VectorXd& theta,
                               const Eigen::VectorXd& u, const Eigen::VectorXd& v);

/// π_θ A = A − g^{kl} ⟨X_k, A⟩_θ X_l − 𝔽_θ A.
RandomVariable project(const EscortPair& pair, const Eigen::VectorXd& theta, const RandomVariable& a);

/// (θ, η) with η_k = 𝔼_θ c_k, F = 𝔼_θ θ^k c_k − I_φ(p_θ) (F₀ = 0) and E the
/// information content evaluated through the direct p·ln_χ(1/p) route.
/// Because F uses the other route, F + E − θ·η measures how well the two
/// agree rather than vanishing by construction.
struct DualPoint {
  Eigen::VectorXd theta;
  Eigen::VectorXd eta;
  double F = 0.0;
  double E = 0.0;

  double legendre_residual() const { return F + E - theta.dot(eta); }
};

DualPoint dual_coordinates(const PhiFamily& fam, const Eigen::VectorXd& theta);

/// grad_F_k = ∂F/∂θ^k − η_k
/// grad_I_k = ∂I_φ/∂η_k − θ^k, with ∂θ/∂η the inverse of the
///            finite-difference Jacobian ∂η/∂θ
/// jacobian = ∂η/∂θ + g/Z
struct DualityResiduals {
  Eigen::VectorXd grad_F;
  Eigen::VectorXd grad_I;
  Eigen::MatrixXd jacobian;
  double legendre = 0.0;

  double max_norm() const;
};

DualityResiduals duality_residuals(const PhiFamily& fam, const Eigen::VectorXd& theta);

}  // namespace phifam
