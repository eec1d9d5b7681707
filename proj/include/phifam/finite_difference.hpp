#pragma once

// Central differences in θ. The step for component k is
// rel · max(1, |θ^k|); `rel` defaults to 1e-5.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

namespace phifam::fd {

inline constexpr double kStep = 1e-5;

inline double step(double value, double rel = kStep) { return rel * std::max(1.0, std::abs(value)); }

inline Eigen::VectorXd shifted(const Eigen::VectorXd& theta, int k, double h) {
  Eigen::VectorXd out = theta;
  out[k] += h;
  return out;
}

/// ∂f/∂θ^k for scalar or vector-valued f, by central differences; with
/// `richardson` the h and h/2 estimates are combined to cancel the h² term.
template <class F>
auto partial(F&& f, const Eigen::VectorXd& theta, int k, double rel = kStep, bool richardson = false) {
  const double h = step(theta[k], rel);
  auto d = [&](double hh) {
    auto plus = f(shifted(theta, k, hh));
    auto minus = f(shifted(theta, k, -hh));
    return decltype(plus)((plus - minus) / (2.0 * hh));
  };
  if (!richardson) return d(h);
  auto coarse = d(h);
  auto fine = d(0.5 * h);
  return decltype(coarse)((4.0 * fine - coarse) / 3.0);
}

template <class F>
Eigen::VectorXd gradient(F&& f, const Eigen::VectorXd& theta, double rel = kStep, bool richardson = false) {
  Eigen::VectorXd g(theta.size());
  for (int k = 0; k < theta.size(); ++k) g[k] = partial(f, theta, k, rel, richardson);
  return g;
}

/// J(i, k) = ∂f_i/∂θ^k for vector-valued f.
template <class F>
Eigen::MatrixXd jacobian(F&& f, const Eigen::VectorXd& theta, double rel = kStep) {
  Eigen::MatrixXd j;
  for (int k = 0; k < theta.size(); ++k) {
    const Eigen::VectorXd col = partial(f, theta, k, rel);
    if (k == 0) j.resize(col.size(), theta.size());
    j.col(k) = col;
  }
  return j;
}

}  // namespace phifam::fd
