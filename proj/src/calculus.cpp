#include "phifam/calculus.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "phifam/errors.hpp"
#include "phifam/quadrature.hpp"

namespace phifam {

namespace {

using Kind = Deformer::Kind;

// χ(v) = scale · v^exponent for every closed-form kind except the ceiling.
struct PowerChi {
  double scale;
  double exponent;
};

}  // namespace

double harmonic_number(double n) {
  if (n < 1.0) return 0.0;
  if (n < 64.0) {
    double h = 0.0;
    for (double k = n; k >= 1.0; k -= 1.0) h += 1.0 / k;
    return h;
  }
  const double inv = 1.0 / n;
  const double inv2 = inv * inv;
  return std::log(n) + std::numbers::egamma + 0.5 * inv -
         inv2 * (1.0 / 12.0 - inv2 * (1.0 / 120.0 - inv2 / 252.0));
}

namespace {

// ∫_0^w u/⌈u⌉ du, summed per unit interval: Σ_{k<n} (2k−1)/(2k) + the partial last one.
double ceiling_partial_moment(double w) {
  if (w <= 1.0) return 0.5 * w * w;
  const double n = std::ceil(w);
  return (n - 1.0) - 0.5 * harmonic_number(n - 1.0) +
         (w * w - (n - 1.0) * (n - 1.0)) / (2.0 * n);
}

// ln_φ(k) for the ceiling deformer at an integer k ≥ 1.
double ceiling_ln_at_integer(double k) { return harmonic_number(k) - 1.0; }

double ceiling_exp(double y) {
  if (y <= -1.0) return 0.0;
  if (y <= 0.0) return 1.0 + y;
  const double target = y + 1.0;  // H_{n-1} < target <= H_n
  double n = std::ceil(std::exp(target - std::numbers::egamma));
  if (!std::isfinite(n) || n > 1e15) return kInf;
  n = std::max(n, 2.0);
  while (n > 2.0 && harmonic_number(n - 1.0) >= target) n -= 1.0;
  while (harmonic_number(n) < target) n += 1.0;
  return (n - 1.0) + n * (target - harmonic_number(n - 1.0));
}

double ceiling_psi(double y) {
  if (y <= -1.0) return 0.0;
  if (y <= 0.0) return 1.0;
  return std::ceil(ceiling_exp(y));
}

}  // namespace

DeformedCalculus::DeformedCalculus(Deformer deformer)
    : DeformedCalculus(std::move(deformer), Options{}) {}

DeformedCalculus::DeformedCalculus(Deformer deformer, Options options)
    : deformer_(std::move(deformer)), options_(options) {
  compute_bounds();
  compute_moment();
}

bool DeformedCalculus::closed_form() const {
  return options_.closed_forms && deformer_.kind() != Kind::table;
}

void DeformedCalculus::compute_bounds() {
  const double q = deformer_.q();
  // The ceiling's bounds are analytic in both modes: its shells above 1 hold
  // exponentially many unit pieces.
  if (deformer_.kind() == Kind::ceiling) {
    bounds_ = {-1.0, kInf};
    return;
  }
  if (closed_form()) {
    switch (deformer_.kind()) {
      case Kind::power:
        if (q < 1.0) bounds_ = {-1.0 / (1.0 - q), kInf};
        else if (q > 1.0) bounds_ = {-kInf, 1.0 / (q - 1.0)};
        else bounds_ = {-kInf, kInf};
        return;
      case Kind::scaled_power:
        if (q > 1.0) bounds_ = {-q / (q - 1.0), kInf};
        else if (q < 1.0) bounds_ = {-kInf, q / (1.0 - q)};
        else bounds_ = {-kInf, kInf};
        return;
      case Kind::constant:
      case Kind::ceiling:
        bounds_ = {-1.0, kInf};
        return;
      case Kind::table:
        break;
    }
  }
  const auto inv = [this](double v) { return 1.0 / deformer_(v); };
  const double tol = options_.quadrature_tol;
  const auto below = quadrature::tail_to_zero(inv, 1.0, deformer_.kinks(0.0, 1.0), 1e-3 * tol);
  bounds_.lower = below ? -*below : -kInf;
  const auto above = quadrature::tail_to_infinity(inv, 1.0, deformer_.kinks(1.0, 1e6), 1e-3 * tol);
  bounds_.upper = above ? *above : kInf;
}

void DeformedCalculus::compute_moment() {
  moment_ = partial_moment(1.0);
}

double DeformedCalculus::moment() const {
  if (!has_moment())
    throw DivergentMoment("integral of u/phi(u) over (0,1) diverges for " +
                          std::string(to_string(deformer_.kind())) + " deformer");
  return moment_;
}

double DeformedCalculus::ln_phi(double u) const {
  if (!(u > 0.0)) throw NonPositiveInput("ln_phi needs u > 0, got " + std::to_string(u));
  if (u == 1.0) return 0.0;
  if (std::isinf(u)) return bounds_.upper;
  if (!closed_form()) return ln_phi_numeric(u);
  const double q = deformer_.q();
  switch (deformer_.kind()) {
    case Kind::power:
      if (q == 1.0) return std::log(u);
      return std::expm1((1.0 - q) * std::log(u)) / (1.0 - q);
    case Kind::scaled_power:
      if (q == 1.0) return std::log(u);
      return q * std::expm1((q - 1.0) * std::log(u)) / (q - 1.0);
    case Kind::constant:
      return u - 1.0;
    case Kind::ceiling: {
      if (u <= 1.0) return u - 1.0;
      const double n = std::ceil(u);
      return ceiling_ln_at_integer(n - 1.0) + (u - (n - 1.0)) / n;
    }
    case Kind::table:
      break;
  }
  return ln_phi_numeric(u);
}

double DeformedCalculus::ln_phi_numeric(double u) const {
  const auto inv = [this](double v) { return 1.0 / deformer_(v); };
  const double lo = std::min(u, 1.0), hi = std::max(u, 1.0);
  auto cuts = deformer_.kinks(lo, hi);
  const auto dy = quadrature::dyadic_cuts(lo, hi);
  cuts.insert(cuts.end(), dy.begin(), dy.end());
  return quadrature::adaptive_split(inv, 1.0, u, cuts, 1e-3 * options_.quadrature_tol);
}

double DeformedCalculus::exp_phi(double y) const {
  if (std::isnan(y)) return y;
  if (y <= bounds_.lower) return 0.0;
  if (y >= bounds_.upper) return kInf;
  if (y == 0.0) return 1.0;
  if (!closed_form()) return exp_phi_numeric(y);
  const double q = deformer_.q();
  switch (deformer_.kind()) {
    case Kind::power: {
      if (q == 1.0) return std::exp(y);
      const double a = 1.0 - q;
      const double base = a * y;
      if (base <= -1.0) return a > 0.0 ? 0.0 : kInf;
      return std::exp(std::log1p(base) / a);
    }
    case Kind::scaled_power: {
      if (q == 1.0) return std::exp(y);
      const double base = (q - 1.0) / q * y;
      if (base <= -1.0) return q > 1.0 ? 0.0 : kInf;
      return std::exp(std::log1p(base) / (q - 1.0));
    }
    case Kind::constant:
      return std::max(0.0, 1.0 + y);
    case Kind::ceiling:
      return ceiling_exp(y);
    case Kind::table:
      break;
  }
  return exp_phi_numeric(y);
}

double DeformedCalculus::exp_phi_numeric(double y) const {
  const double qtol = 1e-3 * options_.quadrature_tol;
  // ln_φ over [a, b], cut at kinks.
  const auto segment = [&](double a, double b) {
    const auto inv = [this](double v) { return 1.0 / deformer_(v); };
    const auto cuts = deformer_.kinks(std::min(a, b), std::max(a, b));
    return quadrature::adaptive_split(inv, a, b, cuts, qtol);
  };

  double lo, hi, ln_lo;
  if (y > 0.0) {
    lo = 1.0;
    ln_lo = 0.0;
    hi = 2.0;
    double ln_hi = segment(lo, hi);
    while (ln_hi < y) {
      lo = hi;
      ln_lo = ln_hi;
      hi *= 2.0;
      if (hi > 1e300) return kInf;
      ln_hi += segment(lo, hi);
    }
  } else {
    hi = 1.0;
    lo = 0.5;
    ln_lo = -segment(lo, hi);
    while (ln_lo > y) {
      hi = lo;
      lo *= 0.5;
      if (lo < 1e-300) return 0.0;
      ln_lo -= segment(lo, hi);
    }
  }
  // Bisection keeps ln_lo ≤ y < ln(hi); every step integrates only [lo, mid].
  const double tol = 0.1 * options_.inversion_tol;
  while (hi - lo > tol * std::max(1.0, lo)) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double ln_mid = ln_lo + segment(lo, mid);
    if (ln_mid <= y) {
      lo = mid;
      ln_lo = ln_mid;
    } else {
      hi = mid;
    }
  }
  // Newton polish: d(ln_φ)/dv = 1/φ(v).
  const double v = lo + (y - ln_lo) * deformer_(lo);
  return std::clamp(v, lo, hi);
}

double DeformedCalculus::psi(double y) const {
  if (std::isnan(y)) return y;
  if (y <= bounds_.lower) return 0.0;
  if (y >= bounds_.upper) return kInf;
  if (!closed_form()) return deformer_(exp_phi_numeric(y));
  const double q = deformer_.q();
  switch (deformer_.kind()) {
    case Kind::power: {
      if (q == 1.0) return std::exp(y);
      const double a = 1.0 - q;
      const double base = a * y;
      if (base <= -1.0) return a > 0.0 ? 0.0 : kInf;
      return std::exp(q * std::log1p(base) / a);
    }
    case Kind::scaled_power: {
      if (q == 1.0) return std::exp(y);
      const double base = (q - 1.0) / q * y;
      if (base <= -1.0) return q > 1.0 ? 0.0 : kInf;
      return std::exp((2.0 - q) * std::log1p(base) / (q - 1.0)) / q;
    }
    case Kind::constant:
      return y > -1.0 ? 1.0 : 0.0;
    case Kind::ceiling:
      return ceiling_psi(y);
    case Kind::table:
      break;
  }
  return deformer_(exp_phi_numeric(y));
}

double DeformedCalculus::partial_moment(double s) const {
  if (s <= 0.0) return 0.0;
  if (!closed_form()) return partial_moment_numeric(s);
  const double q = deformer_.q();
  switch (deformer_.kind()) {
    case Kind::power:
      if (q >= 2.0) return kInf;
      return std::pow(s, 2.0 - q) / (2.0 - q);
    case Kind::scaled_power:
      return std::pow(s, q);
    case Kind::constant:
      return 0.5 * s * s;
    case Kind::ceiling:
      return ceiling_partial_moment(s);
    case Kind::table:
      break;
  }
  return partial_moment_numeric(s);
}

double DeformedCalculus::partial_moment_numeric(double s) const {
  const auto f = [this](double u) { return u / deformer_(u); };
  const double tol = 1e-3 * options_.quadrature_tol;
  const double head_end = std::min(s, 1.0);
  const auto head = quadrature::tail_to_zero(f, head_end, deformer_.kinks(0.0, head_end), tol);
  if (!head) return kInf;
  if (s <= 1.0) return *head;
  auto cuts = deformer_.kinks(1.0, s);
  const auto dy = quadrature::dyadic_cuts(1.0, s);
  cuts.insert(cuts.end(), dy.begin(), dy.end());
  return *head + quadrature::adaptive_split(f, 1.0, s, cuts, tol);
}

double DeformedCalculus::ln_phi_antiderivative(double s) const {
  if (s <= 0.0) return 0.0;
  const double k = partial_moment(s);
  if (std::isinf(k)) return -kInf;
  return s * ln_phi(s) - k;
}

double DeformedCalculus::chi(double v) const {
  if (!(v > 0.0)) throw NonPositiveInput("chi needs v > 0, got " + std::to_string(v));
  if (!has_moment()) moment();  // throws
  return 1.0 / partial_moment(1.0 / v);
}

double DeformedCalculus::ln_chi(double w) const {
  if (!(w > 0.0)) throw NonPositiveInput("ln_chi needs w > 0, got " + std::to_string(w));
  if (!has_moment()) moment();
  if (w == 1.0) return 0.0;
  if (closed_form() && deformer_.kind() != Kind::ceiling) {
    const double q = deformer_.q();
    PowerChi c{1.0, 1.0};
    switch (deformer_.kind()) {
      case Kind::power: c = {2.0 - q, 2.0 - q}; break;
      case Kind::scaled_power: c = {1.0, q}; break;
      case Kind::constant: c = {2.0, 2.0}; break;
      default: break;
    }
    if (c.exponent == 1.0) return std::log(w) / c.scale;
    const double a = 1.0 - c.exponent;
    return std::expm1(a * std::log(w)) / (a * c.scale);
  }
  return ln_chi_numeric(w);
}

double DeformedCalculus::ln_chi_numeric(double w) const {
  // 1/χ(u) = K(1/u); K has kinks where 1/u hits a deformer kink.
  const auto f = [this](double u) { return partial_moment(1.0 / u); };
  const double lo = std::min(w, 1.0), hi = std::max(w, 1.0);
  std::vector<double> cuts;
  for (double k : deformer_.kinks(1.0 / hi, 1.0 / lo)) cuts.push_back(1.0 / k);
  const auto dy = quadrature::dyadic_cuts(lo, hi);
  cuts.insert(cuts.end(), dy.begin(), dy.end());
  return quadrature::adaptive_split(f, 1.0, w, cuts, 1e-3 * options_.quadrature_tol);
}

std::vector<double> DeformedCalculus::kink_levels(double lo, double hi, std::size_t limit) const {
  std::vector<double> out;
  const auto keep = [&](double y) {
    if (y > lo && y < hi) out.push_back(y);
  };
  if (std::isfinite(bounds_.lower)) keep(bounds_.lower);
  if (deformer_.kind() == Kind::ceiling) {
    for (double k = 1.0; out.size() < limit; k += 1.0) {
      const double y = ceiling_ln_at_integer(k);
      if (y >= hi) break;
      keep(y);
    }
  } else if (deformer_.kind() == Kind::table) {
    for (const auto& [u, f] : deformer_.knots()) {
      if (out.size() >= limit) break;
      keep(ln_phi(u));
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace phifam
