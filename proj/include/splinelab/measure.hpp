#ifndef SPLINELAB_MEASURE_HPP
#define SPLINELAB_MEASURE_HPP

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include <nlohmann/json.hpp>

#include "splinelab/quadrature.hpp"
#include "splinelab/registry.hpp"

namespace splinelab {

/// Lebesgue measure or an absolutely continuous probability measure
/// dmu = w dx on [0,1]. Densities are renormalized to unit total mass.
class Measure {
public:
  enum class Kind { lebesgue, density };

  Measure() = default;

  static Measure lebesgue() { return Measure(); }

  static Measure with_density(AnalyticFunction raw) {
    Measure m;
    m.kind_ = Kind::density;
    m.raw_ = std::move(raw);
    m.breaks_ = m.raw_->breakpoints();
    const auto edges = panel_edges(0.0, 1.0, m.breaks_, 1.0 / 256);
    double total = 0.0;
    for_each_node(edges, default_gauss_points,
                  [&](double x, double w) { total += w * (*m.raw_)(x); });
    if (!(total > 0.0)) throw std::invalid_argument("density has nonpositive mass");
    m.scale_ = 1.0 / total;
    double lo = INFINITY, hi = 0.0;
    for (int i = 0; i <= 4096; ++i) {
      double v = m.density(i / 4096.0);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    m.min_density_ = lo;
    m.max_density_ = hi;
    return m;
  }

  Kind kind() const { return kind_; }
  bool is_lebesgue() const { return kind_ == Kind::lebesgue; }

  double density(double x) const { return kind_ == Kind::lebesgue ? 1.0 : scale_ * (*raw_)(x); }

  /// Density breakpoints (jumps), used as extra quadrature panel edges.
  const std::vector<double>& breakpoints() const { return breaks_; }

  /// Smallest M >= 1 with 1/M <= w <= M on the sampling grid; infinite when
  /// the density touches zero.
  double bound() const {
    if (kind_ == Kind::lebesgue) return 1.0;
    if (!(min_density_ > 0.0)) return INFINITY;
    return std::max({1.0, max_density_, 1.0 / min_density_});
  }
  double min_density() const { return kind_ == Kind::lebesgue ? 1.0 : min_density_; }
  double max_density() const { return kind_ == Kind::lebesgue ? 1.0 : max_density_; }

  const std::optional<AnalyticFunction>& raw_density() const { return raw_; }

  /// mu([a,b]).
  double mass(double a, double b) const {
    if (b <= a) return 0.0;
    if (kind_ == Kind::lebesgue) return b - a;
    const auto edges = panel_edges(a, b, breaks_, 1.0 / 64);
    double sum = 0.0;
    for_each_node(edges, default_gauss_points, [&](double x, double w) { sum += w * density(x); });
    return sum;
  }

  /// The point x in [a,b] with mu([a,x]) = target, by safeguarded Newton on
  /// the monotone cumulative mass.
  double quantile(double a, double b, double target, double tol = 1e-12) const {
    if (target <= 0.0) return a;
    if (kind_ == Kind::lebesgue) return std::min(b, a + target);
    double lo = a, hi = b;
    double x = a + (b - a) * std::clamp(target / mass(a, b), 0.0, 1.0);
    for (int iter = 0; iter < 200; ++iter) {
      const double f = mass(a, x) - target;
      if (std::abs(f) <= tol) return x;
      if (f > 0.0) hi = x;
      else lo = x;
      const double d = density(x);
      double next = d > 0.0 ? x - f / d : 0.5 * (lo + hi);
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
      x = next;
      if (hi - lo < 1e-15) break;
    }
    return x;
  }

  nlohmann::json to_json() const {
    if (kind_ == Kind::lebesgue) return {{"kind", "lebesgue"}};
    nlohmann::json j = raw_->to_json();
    j["kind"] = "density";
    return j;
  }

  static Measure from_json(const nlohmann::json& j) {
    const auto kind = j.value("kind", std::string("lebesgue"));
    if (kind == "lebesgue") return lebesgue();
    if (kind == "density") return with_density(AnalyticFunction::from_json(j));
    throw std::invalid_argument("unknown measure kind '" + kind + "'");
  }

private:
  Kind kind_ = Kind::lebesgue;
  std::optional<AnalyticFunction> raw_;
  std::vector<double> breaks_;
  double scale_ = 1.0;
  double min_density_ = 1.0;
  double max_density_ = 1.0;
};

/// Union of breakpoints of several sources, sorted and deduplicated.
inline std::vector<double> merge_breaks(std::initializer_list<std::span<const double>> lists) {
  std::vector<double> out;
  for (auto l : lists) out.insert(out.end(), l.begin(), l.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

/// <f,g>_mu over [0,1], panels split at the breakpoints of f, g and mu.
inline double inner_product(const PiecewiseFunction& f, const PiecewiseFunction& g,
                            const Measure& mu, int points = default_gauss_points) {
  const auto breaks = merge_breaks({f.breakpoints, g.breakpoints, mu.breakpoints()});
  const auto edges = panel_edges(0.0, 1.0, breaks);
  double sum = 0.0;
  for_each_node(edges, points,
                [&](double x, double w) { sum += w * f(x) * g(x) * mu.density(x); });
  return sum;
}

} // namespace splinelab

#endif // SPLINELAB_MEASURE_HPP
