#include "phifam/deformer.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "phifam/errors.hpp"

namespace phifam {

Deformer Deformer::power(double q) {
  if (!(q > 0.0) || !std::isfinite(q))
    throw InvalidArgument("power deformer needs q > 0, got " + std::to_string(q));
  return Deformer(Kind::power, q);
}

Deformer Deformer::scaled_power(double q) {
  // q = 2 is the constant φ = 1/2; beyond it φ would decrease.
  if (!(q > 0.0) || !(q <= 2.0))
    throw InvalidArgument("scaled_power deformer needs 0 < q <= 2, got " + std::to_string(q));
  return Deformer(Kind::scaled_power, q);
}

Deformer Deformer::constant() { return Deformer(Kind::constant, 0.0); }

Deformer Deformer::ceiling() { return Deformer(Kind::ceiling, 0.0); }

Deformer Deformer::table(std::vector<std::pair<double, double>> knots) {
  if (knots.empty()) throw InvalidArgument("table deformer needs at least one knot");
  for (std::size_t i = 0; i < knots.size(); ++i) {
    const auto [u, f] = knots[i];
    if (!(u > 0.0) || !std::isfinite(u))
      throw InvalidArgument("table deformer knots must have u > 0");
    if (!(f > 0.0) || !std::isfinite(f))
      throw InvalidArgument("table deformer values must be strictly positive");
    if (i > 0) {
      if (!(u > knots[i - 1].first))
        throw InvalidArgument("table deformer knots must be strictly increasing in u");
      if (f < knots[i - 1].second)
        throw InvalidArgument("table deformer values must be non-decreasing");
    }
  }
  Deformer d(Kind::table, 0.0);
  if (knots.size() >= 2) {
    const auto& [u0, f0] = knots[knots.size() - 2];
    const auto& [u1, f1] = knots.back();
    d.tail_slope_ = (f1 - f0) / (u1 - u0);
  }
  d.knots_ = std::move(knots);
  return d;
}

double Deformer::operator()(double u) const {
  switch (kind_) {
    case Kind::power:
      return std::pow(u, q_);
    case Kind::scaled_power:
      return std::pow(u, 2.0 - q_) / q_;
    case Kind::constant:
      return 1.0;
    case Kind::ceiling:
      return std::ceil(u);
    case Kind::table: {
      if (u <= knots_.front().first) return knots_.front().second;
      if (u >= knots_.back().first)
        return knots_.back().second + tail_slope_ * (u - knots_.back().first);
      const auto it = std::upper_bound(
          knots_.begin(), knots_.end(), u,
          [](double x, const std::pair<double, double>& k) { return x < k.first; });
      const auto& [u1, f1] = *it;
      const auto& [u0, f0] = *(it - 1);
      return f0 + (f1 - f0) * (u - u0) / (u1 - u0);
    }
  }
  return 1.0;
}

std::vector<double> Deformer::kinks(double lo, double hi) const {
  std::vector<double> out;
  if (kind_ == Kind::ceiling) {
    for (double k = std::max(1.0, std::floor(lo) + 1.0); k < hi; k += 1.0) out.push_back(k);
  } else if (kind_ == Kind::table) {
    for (const auto& [u, f] : knots_)
      if (u > lo && u < hi) out.push_back(u);
  }
  return out;
}

const char* to_string(Deformer::Kind kind) {
  switch (kind) {
    case Deformer::Kind::power: return "power";
    case Deformer::Kind::scaled_power: return "scaled_power";
    case Deformer::Kind::constant: return "constant";
    case Deformer::Kind::ceiling: return "ceiling";
    case Deformer::Kind::table: return "table";
  }
  return "unknown";
}

}  // namespace phifam
