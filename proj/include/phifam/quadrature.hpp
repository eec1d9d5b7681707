#pragma once

// Gauss-Legendre building blocks shared by the kernel and the measure code.
//
// Everything here integrates scalar callables over finite intervals:
//   * `gauss_legendre`  one fixed-order panel
//   * `adaptive`        bisection driven by the panel-vs-halves discrepancy
//   * `adaptive_split`  the same, after cutting the interval at known kinks
//   * `tail_to_zero` / `tail_to_infinity`
//                       improper integrals summed over dyadic shells, with
//                       geometric extrapolation of the shell sequence and a
//                       divergence verdict after a fixed number of shells.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <vector>

namespace phifam::quadrature {

inline constexpr int kOrder = 10;

struct Rule {
  std::array<double, kOrder> nodes{};    // on [-1, 1], ascending
  std::array<double, kOrder> weights{};
};

// Newton iteration on P_n; computed once.
inline const Rule& rule() {
  static const Rule r = [] {
    Rule out;
    constexpr int n = kOrder;
    for (int i = 0; i < (n + 1) / 2; ++i) {
      double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
      double pp = 0.0;
      for (int iter = 0; iter < 100; ++iter) {
        double p1 = 1.0, p2 = 0.0;
        for (int j = 1; j <= n; ++j) {
          const double p3 = p2;
          p2 = p1;
          p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
        }
        pp = n * (z * p1 - p2) / (z * z - 1.0);
        const double dz = p1 / pp;
        z -= dz;
        if (std::abs(dz) < 1e-16) break;
      }
      const double w = 2.0 / ((1.0 - z * z) * pp * pp);
      out.nodes[i] = -z;
      out.nodes[n - 1 - i] = z;
      out.weights[i] = w;
      out.weights[n - 1 - i] = w;
    }
    return out;
  }();
  return r;
}

template <class F>
double gauss_legendre(F&& f, double a, double b) {
  const Rule& r = rule();
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double sum = 0.0;
  for (int i = 0; i < kOrder; ++i) sum += r.weights[i] * f(mid + half * r.nodes[i]);
  return half * sum;
}

namespace detail {

template <class F>
double adaptive_step(F& f, double a, double b, double whole, double tol, int depth) {
  const double mid = 0.5 * (a + b);
  const double left = gauss_legendre(f, a, mid);
  const double right = gauss_legendre(f, mid, b);
  const double halves = left + right;
  // The last clause stops refinement once the panels agree to rounding.
  const double noise = 64.0 * std::numeric_limits<double>::epsilon() * (std::abs(left) + std::abs(right));
  if (depth <= 0 || std::abs(halves - whole) <= std::max(tol, noise) || !std::isfinite(halves) ||
      mid <= a || mid >= b)
    return halves;
  return adaptive_step(f, a, mid, left, 0.5 * tol, depth - 1) +
         adaptive_step(f, mid, b, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

// Signed: adaptive(f, b, a) == -adaptive(f, a, b).
template <class F>
double adaptive(F&& f, double a, double b, double rel_tol, double abs_tol = 1e-15,
                int max_depth = 50) {
  if (a == b) return 0.0;
  if (b < a) return -adaptive(f, b, a, rel_tol, abs_tol, max_depth);
  const double whole = gauss_legendre(f, a, b);
  const double mid = 0.5 * (a + b);
  const double left = gauss_legendre(f, a, mid);
  const double right = gauss_legendre(f, mid, b);
  const double halves = left + right;
  if (!std::isfinite(halves)) return halves;
  const double tol = std::max(abs_tol, rel_tol * std::abs(halves));
  if (std::abs(halves - whole) <= tol) return halves;
  return detail::adaptive_step(f, a, mid, left, 0.5 * tol, max_depth - 1) +
         detail::adaptive_step(f, mid, b, right, 0.5 * tol, max_depth - 1);
}

// Powers of two strictly inside (a, b), for 0 < a < b spanning more than a
// factor of four. Keeps every piece within one octave so integrands like
// 1/u or u^(-q) stay well resolved.
inline std::vector<double> dyadic_cuts(double a, double b) {
  std::vector<double> cuts;
  if (!(a > 0.0) || b / a <= 4.0) return cuts;
  int e = static_cast<int>(std::floor(std::log2(a))) + 1;
  for (double c = std::ldexp(1.0, e); c < b; c = std::ldexp(1.0, ++e))
    if (c > a) cuts.push_back(c);
  return cuts;
}

// Integrate over [a, b] (either orientation), cutting at every point of
// `cuts` that lies strictly inside.
template <class F>
double adaptive_split(F&& f, double a, double b, std::span<const double> cuts,
                      double rel_tol, double abs_tol = 1e-15) {
  if (a == b) return 0.0;
  const double sign = b < a ? -1.0 : 1.0;
  const double lo = std::min(a, b), hi = std::max(a, b);
  std::vector<double> pts{lo};
  for (double c : cuts)
    if (c > lo && c < hi) pts.push_back(c);
  std::sort(pts.begin() + 1, pts.end());
  pts.push_back(hi);
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i)
    if (pts[i + 1] > pts[i]) sum += adaptive(f, pts[i], pts[i + 1], rel_tol, abs_tol);
  return sign * sum;
}

inline constexpr int kMaxShells = 60;

// Sum of a sequence of nonnegative shell integrals d_0, d_1, ... Stops when a
// shell is negligible, extrapolates geometrically once the shell ratio has
// settled below one, and declares divergence (nullopt) after kMaxShells.
template <class Shell>
std::optional<double> sum_shells(Shell&& shell, double rel_tol) {
  double sum = 0.0;
  double prev = std::numeric_limits<double>::quiet_NaN();
  double prev_ratio = std::numeric_limits<double>::quiet_NaN();
  int settled = 0;
  for (int k = 0; k < kMaxShells; ++k) {
    const double d = shell(k);
    if (!std::isfinite(d)) return std::nullopt;
    sum += d;
    if (std::abs(d) <= rel_tol * std::max(1.0, std::abs(sum))) return sum;
    if (k > 0 && prev != 0.0) {
      const double ratio = d / prev;
      if (ratio > 0.0 && ratio < 1.0 - 1e-3 && std::abs(ratio - prev_ratio) <= 1e-6 * ratio)
        ++settled;
      else
        settled = 0;
      if (settled >= 3) return sum + d * ratio / (1.0 - ratio);
      prev_ratio = ratio;
    }
    prev = d;
  }
  return std::nullopt;
}

// ∫_0^s f over shells [s 2^{-k-1}, s 2^{-k}].
template <class F>
std::optional<double> tail_to_zero(F&& f, double s, std::span<const double> cuts,
                                   double rel_tol) {
  return sum_shells(
      [&](int k) {
        const double hi = std::ldexp(s, -k);
        return adaptive_split(f, 0.5 * hi, hi, cuts, 0.1 * rel_tol);
      },
      rel_tol);
}

// ∫_s^∞ f over shells [s 2^k, s 2^{k+1}].
template <class F>
std::optional<double> tail_to_infinity(F&& f, double s, std::span<const double> cuts,
                                       double rel_tol) {
  return sum_shells(
      [&](int k) {
        const double lo = std::ldexp(s, k);
        return adaptive_split(f, lo, 2.0 * lo, cuts, 0.1 * rel_tol);
      },
      rel_tol);
}

}  // namespace phifam::quadrature
