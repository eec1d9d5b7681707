#pragma once

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "phifam/calculus.hpp"
#include "phifam/measure.hpp"

namespace phifam {

class FamilyMember;

/// The φ-exponential family p_θ(x) = exp_φ(G(θ) − θ^k c_k(x)).
///
/// The parameter domain is never enumerated: θ belongs to it exactly when
/// `at(θ)` finds a normalizing G. Copies share their (immutable) state.
class PhiFamily {
 public:
  PhiFamily(DeformedCalculus calculus, MeasureSpace space, std::vector<RandomVariable> statistics);

  const DeformedCalculus& calculus() const { return impl_->calculus; }
  const MeasureSpace& space() const { return impl_->space; }
  const std::vector<RandomVariable>& statistics() const { return impl_->statistics; }
  int dimension() const { return static_cast<int>(impl_->statistics.size()); }

  PhiFamily with_space(MeasureSpace space) const;

  /// θ^k c_k(x).
  double contraction(const Eigen::VectorXd& theta, double x) const;

  /// Solve for G and build p_θ. Throws OutsideDomain when no G normalizes.
  FamilyMember at(const Eigen::VectorXd& theta) const;

 private:
  friend class FamilyMember;
  struct Impl {
    DeformedCalculus calculus;
    MeasureSpace space;
    std::vector<RandomVariable> statistics;
    std::vector<double> scan;
  };
  std::shared_ptr<const Impl> impl_;
};

/// p_θ at one fixed θ, with its normalization G, escort normalization Z and
/// the support cutoff / kink locations used to split quadrature panels.
class FamilyMember {
 public:
  const Eigen::VectorXd& theta() const { return theta_; }
  double G() const { return G_; }
  /// ∫ dμ ψ(G − θ·c). Throws DivergentIntegral when that integral diverges.
  double Z() const;
  bool has_Z() const { return std::isfinite(Z_); }

  /// G − θ^k c_k(x).
  double argument(double x) const;
  double pdf(double x) const;
  /// φ(p_θ(x)) / Z where p_θ(x) > 0, else 0.
  double escort(double x) const;

  const std::vector<double>& breakpoints() const { return breakpoints_; }
  const PhiFamily& family() const { return family_; }

  Pdf density() const;
  Pdf escort_density() const;

 private:
  friend class PhiFamily;
  FamilyMember(PhiFamily family, Eigen::VectorXd theta) : family_(std::move(family)), theta_(std::move(theta)) {}

  PhiFamily family_;
  Eigen::VectorXd theta_;
  double G_ = 0.0;
  double Z_ = kInf;
  std::string z_error_;
  std::vector<double> breakpoints_;
};

/// Normalizing G(θ) (module-level spelling of `fam.at(θ).G()`).
double solve_G(const PhiFamily& fam, const Eigen::VectorXd& theta);
double pdf_at(const PhiFamily& fam, const Eigen::VectorXd& theta, double x);
double escort_at(const PhiFamily& fam, const Eigen::VectorXd& theta, double x);
double zet(const PhiFamily& fam, const Eigen::VectorXd& theta);

/// Estimator components c_k. The scale function F is never stored; it is
/// reached through 𝔼_θ c_k = ∂F/∂θ^k.
struct Estimator {
  std::vector<RandomVariable> components;
  int dimension() const { return static_cast<int>(components.size()); }
};

/// Both members of an escort pair at one θ.
struct PairPoint {
  std::function<double(double)> base;
  std::function<double(double)> escort;
  std::vector<double> breakpoints;
  /// Known for canonical pairs of a φ-exponential family.
  std::optional<double> G;
  std::optional<double> Z;
};

/// Two θ-indexed families of pdfs on the same space, the second escort to
/// the first. Admits arbitrary pairings, not only the canonical φ(p_θ)/Z one.
class EscortPair {
 public:
  using Builder = std::function<PairPoint(const Eigen::VectorXd&)>;

  EscortPair(MeasureSpace space, int dimension, Builder builder,
             std::vector<RandomVariable> statistics = {});

  /// (p_θ, φ(p_θ)/Z) of a φ-exponential family, statistics included.
  static EscortPair canonical(const PhiFamily& fam);
  /// (p_θ, p_θ): the classical pairing.
  static EscortPair self_paired(MeasureSpace space, int dimension,
                                std::function<Pdf(const Eigen::VectorXd&)> family,
                                std::vector<RandomVariable> statistics = {});

  PairPoint at(const Eigen::VectorXd& theta) const { return builder_(theta); }
  const MeasureSpace& space() const { return space_; }
  int dimension() const { return dimension_; }
  /// The c_k entering ∂[G − θ^l c_l]/∂θ^k; may be empty.
  const std::vector<RandomVariable>& statistics() const { return statistics_; }

 private:
  MeasureSpace space_;
  int dimension_;
  Builder builder_;
  std::vector<RandomVariable> statistics_;
};

/// sup over quadrature nodes of |∂p/∂θ^k − Z P ∂[G − θ^l c_l]/∂θ^k|, with
/// ∂p by central differences. G and Z come from the pair when it knows them;
/// otherwise ∂G/∂θ^k = 𝔽_θ c_k and Z is the least-squares fit.
double escort_condition_residual(const EscortPair& pair, const Eigen::VectorXd& theta, int k);

}  // namespace phifam
