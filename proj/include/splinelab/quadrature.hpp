#ifndef SPLINELAB_QUADRATURE_HPP
#define SPLINELAB_QUADRATURE_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <numbers>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace splinelab {

/// Gauss-Legendre rule on [-1,1], exact for polynomials of degree <= 2*points-1.
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
  int points = 0;
  int exact_degree() const { return 2 * points - 1; }
};

/// Nodes by Newton iteration on the three-term Legendre recurrence.
inline QuadratureRule gauss_legendre(int points) {
  if (points < 1) throw std::invalid_argument("gauss_legendre: points must be >= 1");
  QuadratureRule rule;
  rule.points = points;
  rule.nodes.assign(points, 0.0);
  rule.weights.assign(points, 0.0);
  const int half = (points + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (points + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int n = 2; n <= points; ++n) {
        double p2 = ((2.0 * n - 1.0) * x * p1 - (n - 1.0) * p0) / n;
        p0 = p1;
        p1 = p2;
      }
      dp = points * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // recompute derivative at the converged node for the weight
    double p0 = 1.0, p1 = x;
    for (int n = 2; n <= points; ++n) {
      double p2 = ((2.0 * n - 1.0) * x * p1 - (n - 1.0) * p0) / n;
      p0 = p1;
      p1 = p2;
    }
    dp = points * (x * p1 - p0) / (x * x - 1.0);
    double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[points - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[points - 1 - i] = w;
  }
  if (points % 2 == 1) rule.nodes[points / 2] = 0.0;
  return rule;
}

inline constexpr int max_gauss_points = 64;

/// Cached rules, built once on first use.
inline const QuadratureRule& gauss_rule(int points) {
  if (points < 1 || points > max_gauss_points)
    throw std::invalid_argument("gauss_rule: points out of range");
  static const auto rules = [] {
    std::array<QuadratureRule, max_gauss_points + 1> r;
    for (int p = 1; p <= max_gauss_points; ++p) r[p] = gauss_legendre(p);
    return r;
  }();
  return rules[points];
}

inline constexpr int default_gauss_points = 10;

/// Integrand carrier: an evaluator plus the points where smoothness may fail.
struct PiecewiseFunction {
  std::vector<double> breakpoints;
  std::function<double(double)> evaluate;

  double operator()(double x) const { return evaluate(x); }
};

/// Sorted panel edges for [a,b]: the endpoints, every break strictly inside,
/// and uniform subdivision so that no panel is wider than max_width.
inline std::vector<double> panel_edges(double a, double b, std::span<const double> breaks,
                                       double max_width = 0.0) {
  std::vector<double> edges{a};
  std::vector<double> inner;
  for (double t : breaks)
    if (t > a && t < b) inner.push_back(t);
  std::sort(inner.begin(), inner.end());
  inner.erase(std::unique(inner.begin(), inner.end()), inner.end());
  inner.push_back(b);
  for (double t : inner) {
    double left = edges.back();
    if (!(t > left)) continue;
    if (max_width > 0.0) {
      int pieces = static_cast<int>(std::ceil((t - left) / max_width - 1e-12));
      for (int m = 1; m < pieces; ++m) edges.push_back(left + (t - left) * m / pieces);
    }
    edges.push_back(t);
  }
  return edges;
}

/// Calls visit(x, weight) for every node of a composite Gauss rule over the
/// given panel edges.
template <class Visitor>
void for_each_node(std::span<const double> edges, int points, Visitor&& visit) {
  const auto& rule = gauss_rule(points);
  for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
    const double lo = edges[p], hi = edges[p + 1];
    const double half = 0.5 * (hi - lo), mid = 0.5 * (hi + lo);
    for (int q = 0; q < points; ++q) visit(mid + half * rule.nodes[q], half * rule.weights[q]);
  }
}

/// Composite Gauss-Legendre integral of f over [a,b], with f's breakpoints as
/// panel boundaries.
inline double integrate(const PiecewiseFunction& f, double a, double b,
                        int points_per_piece = default_gauss_points) {
  if (a > b) throw std::invalid_argument("integrate: a > b");
  if (a == b) return 0.0;
  const auto edges = panel_edges(a, b, f.breakpoints);
  double sum = 0.0;
  for_each_node(edges, points_per_piece, [&](double x, double w) { sum += w * f(x); });
  return sum;
}

/// Spectral integration on one panel: with values of g at the Gauss nodes,
/// row i of `matrix` gives the integral of the interpolant of g from the
/// left panel edge to node i (reference interval [-1,1]).
struct SpectralIntegrator {
  const QuadratureRule* rule = nullptr;
  std::vector<double> matrix; // points x points, row-major

  explicit SpectralIntegrator(int points = default_gauss_points) : rule(&gauss_rule(points)) {
    const int p = points;
    matrix.assign(static_cast<std::size_t>(p) * p, 0.0);
    const auto& xs = rule->nodes;
    auto lagrange = [&](int j, double s) {
      double v = 1.0;
      for (int m = 0; m < p; ++m)
        if (m != j) v *= (s - xs[m]) / (xs[j] - xs[m]);
      return v;
    };
    for (int i = 0; i < p; ++i) {
      const double half = 0.5 * (xs[i] + 1.0);
      for (int j = 0; j < p; ++j) {
        double acc = 0.0;
        for (int q = 0; q < p; ++q)
          acc += rule->weights[q] * lagrange(j, -1.0 + half * (rule->nodes[q] + 1.0));
        matrix[static_cast<std::size_t>(i) * p + j] = half * acc;
      }
    }
  }

  int points() const { return rule->points; }
};

inline const SpectralIntegrator& spectral_integrator() {
  static const SpectralIntegrator integrator(default_gauss_points);
  return integrator;
}

} // namespace splinelab

#endif // SPLINELAB_QUADRATURE_HPP
