#include "phifam/measure.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <unordered_map>

#include "phifam/errors.hpp"
#include "phifam/quadrature.hpp"

namespace phifam {

MeasureSpace MeasureSpace::discrete(std::vector<double> points, std::vector<double> weights) {
  if (points.empty()) throw InvalidArgument("discrete measure needs at least one point");
  if (points.size() != weights.size())
    throw InvalidArgument("discrete measure: points and weights differ in length");
  for (double w : weights)
    if (!(w > 0.0) || !std::isfinite(w))
      throw InvalidArgument("discrete measure weights must be finite and > 0");
  for (double x : points)
    if (!std::isfinite(x)) throw InvalidArgument("discrete measure points must be finite");
  MeasureSpace m;
  m.discrete_ = true;
  m.points_ = std::move(points);
  m.weights_ = std::move(weights);
  return m;
}

MeasureSpace MeasureSpace::lebesgue(double a, double b, int panels) {
  if (!std::isfinite(a)) throw InvalidArgument("lebesgue measure needs a finite lower end");
  if (!(a < b)) throw InvalidArgument("lebesgue measure needs a < b");
  if (std::isinf(b) && b < 0) throw InvalidArgument("lebesgue measure upper end must exceed a");
  if (panels < 16) throw InvalidArgument("lebesgue measure needs at least 16 panels");
  MeasureSpace m;
  m.a_ = a;
  m.b_ = b;
  m.panels_ = panels;
  return m;
}

MeasureSpace MeasureSpace::with_panels(int panels) const {
  if (discrete_) return *this;
  return lebesgue(a_, b_, panels);
}

bool MeasureSpace::operator==(const MeasureSpace& o) const {
  if (discrete_ != o.discrete_) return false;
  if (discrete_) return points_ == o.points_ && weights_ == o.weights_;
  return a_ == o.a_ && b_ == o.b_;
}

double MeasureSpace::to_t(double x) const {
  if (std::isinf(b_)) {
    const double s = x - a_;
    return s / (1.0 + s);
  }
  return (x - a_) / (b_ - a_);
}

double MeasureSpace::from_t(double t) const {
  if (std::isinf(b_)) return a_ + t / (1.0 - t);
  return a_ + t * (b_ - a_);
}

Nodes MeasureSpace::nodes(std::span<const double> breakpoints, int refinement) const {
  Nodes out;
  if (discrete_) {
    out.x = Eigen::Map<const Eigen::VectorXd>(points_.data(), static_cast<Eigen::Index>(points_.size()));
    out.w = Eigen::Map<const Eigen::VectorXd>(weights_.data(), static_cast<Eigen::Index>(weights_.size()));
    return out;
  }
  std::vector<double> cuts{0.0, 1.0};
  for (double x : breakpoints) {
    if (!(x > a_ && x < b_)) continue;
    const double t = to_t(x);
    if (t > 0.0 && t < 1.0) cuts.push_back(t);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  const auto& rule = quadrature::rule();
  const double total = static_cast<double>(panels_) * refinement;
  std::vector<double> xs, ws;
  xs.reserve(static_cast<std::size_t>(total * quadrature::kOrder) + 64);
  ws.reserve(xs.capacity());
  const bool semi = std::isinf(b_);
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double t0 = cuts[i], t1 = cuts[i + 1];
    const int count = std::max(2, static_cast<int>(std::ceil(total * (t1 - t0))));
    const double h = (t1 - t0) / count;
    for (int p = 0; p < count; ++p) {
      const double mid = t0 + (p + 0.5) * h;
      for (int j = 0; j < quadrature::kOrder; ++j) {
        const double t = mid + 0.5 * h * rule.nodes[j];
        double jac;
        if (semi) {
          const double r = 1.0 - t;
          jac = 1.0 / (r * r);
        } else {
          jac = b_ - a_;
        }
        xs.push_back(from_t(t));
        ws.push_back(0.5 * h * rule.weights[j] * jac);
      }
    }
  }
  out.x = Eigen::Map<Eigen::VectorXd>(xs.data(), static_cast<Eigen::Index>(xs.size()));
  out.w = Eigen::Map<Eigen::VectorXd>(ws.data(), static_cast<Eigen::Index>(ws.size()));
  return out;
}

std::vector<double> MeasureSpace::scan_grid(int count) const {
  if (discrete_) return points_;
  std::vector<double> g;
  g.reserve(count);
  const int last = std::isinf(b_) ? count - 1 : count;  // t = 1 is x = ∞
  for (int i = 0; i < last; ++i) g.push_back(from_t(static_cast<double>(i) / (count - 1)));
  return g;
}

RandomVariable RandomVariable::monomial(double scale, double degree) {
  std::string label = std::to_string(scale) + "*x^" + std::to_string(degree);
  if (degree == 0.0) return RandomVariable([scale](double) { return scale; }, label);
  if (degree == 1.0) return RandomVariable([scale](double x) { return scale * x; }, label);
  if (degree == 2.0) return RandomVariable([scale](double x) { return scale * x * x; }, label);
  return RandomVariable([scale, degree](double x) { return scale * std::pow(x, degree); }, label);
}

RandomVariable RandomVariable::constant(double value) {
  return RandomVariable([value](double) { return value; }, std::to_string(value));
}

RandomVariable RandomVariable::table(std::vector<double> points, std::vector<double> values) {
  if (points.size() != values.size())
    throw InvalidArgument("random variable table: points and values differ in length");
  auto lookup = std::make_shared<std::unordered_map<double, double>>();
  for (std::size_t i = 0; i < points.size(); ++i) (*lookup)[points[i]] = values[i];
  return RandomVariable(
      [lookup](double x) {
        const auto it = lookup->find(x);
        if (it == lookup->end())
          throw InvalidArgument("random variable table has no value at x = " + std::to_string(x));
        return it->second;
      },
      "table");
}

RandomVariable operator+(const RandomVariable& a, const RandomVariable& b) {
  return RandomVariable([a, b](double x) { return a(x) + b(x); });
}

RandomVariable operator-(const RandomVariable& a, const RandomVariable& b) {
  return RandomVariable([a, b](double x) { return a(x) - b(x); });
}

RandomVariable operator*(double s, const RandomVariable& a) {
  return RandomVariable([s, a](double x) { return s * a(x); });
}

RandomVariable operator*(const RandomVariable& a, const RandomVariable& b) {
  return RandomVariable([a, b](double x) { return a(x) * b(x); });
}

bool refinement_diverges(double coarse, double mid, double fine) {
  if (!std::isfinite(coarse) || !std::isfinite(mid) || !std::isfinite(fine)) return true;
  const double d1 = std::abs(mid - coarse);
  const double d2 = std::abs(fine - mid);
  if (d2 <= 1e-9 * std::max(1.0, std::abs(fine))) return false;
  // A logarithmic singularity adds a constant per doubling, a divergent tail
  // more; convergent integrands shrink the increment.
  return d2 > 0.75 * d1;
}

double integrate(const MeasureSpace& space, const std::function<double(double)>& f,
                 std::span<const double> breakpoints, DivergenceCheck check, const char* what) {
  const auto sum_at = [&](int refinement) {
    const Nodes n = space.nodes(breakpoints, refinement);
    double s = 0.0;
    for (Eigen::Index i = 0; i < n.size(); ++i) {
      const double w = n.w[i];
      if (w == 0.0) continue;
      s += w * f(n.x[i]);
    }
    return s;
  };
  const double base = sum_at(1);
  if (check == DivergenceCheck::off) return base;
  if (space.is_discrete()) {
    if (!std::isfinite(base)) throw DivergentIntegral(std::string(what) + " is not finite");
    return base;
  }
  if (refinement_diverges(base, sum_at(2), sum_at(4)))
    throw DivergentIntegral(std::string(what) + " grows without bound under panel refinement");
  return base;
}

double expectation(const Pdf& p, const RandomVariable& f, DivergenceCheck check) {
  return integrate(
      p.space,
      [&](double x) {
        const double px = p(x);
        return px == 0.0 ? 0.0 : px * f(x);
      },
      p.breakpoints, check, "expectation");
}

double normalization_residual(const Pdf& p) {
  return integrate(p.space, p.density, p.breakpoints, DivergenceCheck::off) - 1.0;
}

std::vector<double> find_crossings(const MeasureSpace& space, const std::function<double(double)>& g,
                                   std::span<const double> grid) {
  std::vector<double> roots;
  if (space.is_discrete() || grid.size() < 2) return roots;
  double x0 = grid[0];
  double g0 = g(x0);
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double x1 = grid[i];
    const double g1 = g(x1);
    if ((g0 < 0.0 && g1 > 0.0) || (g0 > 0.0 && g1 < 0.0)) {
      double lo = x0, hi = x1, glo = g0;
      for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double gm = g(mid);
        if (gm == 0.0) {
          lo = hi = mid;
          break;
        }
        if ((gm < 0.0) == (glo < 0.0)) {
          lo = mid;
          glo = gm;
        } else {
          hi = mid;
        }
      }
      roots.push_back(0.5 * (lo + hi));
    } else if (g1 == 0.0 && g0 != 0.0) {
      roots.push_back(x1);
    }
    x0 = x1;
    g0 = g1;
  }
  return roots;
}

}  // namespace phifam
