#ifndef SPLINELAB_WEIGHTS_HPP
#define SPLINELAB_WEIGHTS_HPP

// Weight systems w = (w_1,...,w_k) generating Chebyshevian spline spaces, and
// the iterated integrals built from them: the dual functions u*_{j,i} and the
// Green's kernels g_j(x,y) that play the role of truncated powers.

#include <algorithm>
#include <cmath>
#include <deque>
#include <span>
#include <stdexcept>
#include <vector>

#include <nlohmann/json.hpp>

#include "splinelab/quadrature.hpp"
#include "splinelab/registry.hpp"

namespace splinelab {

inline double binomial(int n, int r) {
  double c = 1.0;
  for (int m = 1; m <= r; ++m) c = c * (n - r + m) / m;
  return c;
}

class WeightSystem {
public:
  static constexpr int omega_grid = 4096;

  WeightSystem(int order, std::vector<AnalyticFunction> weights)
      : order_(order), weights_(std::move(weights)) {
    if (order_ < 1) throw std::invalid_argument("weight system order must be >= 1");
    if (weights_.size() != static_cast<std::size_t>(order_))
      throw std::invalid_argument("weight system needs exactly k weights");
    samples_.assign(weights_.size(), std::vector<double>(omega_grid + 1));
    double lo = INFINITY, hi = 0.0;
    for (std::size_t j = 0; j < weights_.size(); ++j) {
      if (!weights_[j].smooth())
        throw std::invalid_argument("weights must be smooth registered families");
      for (int g = 0; g <= omega_grid; ++g) {
        const double v = weights_[j](static_cast<double>(g) / omega_grid);
        if (!(v > 0.0)) throw std::invalid_argument("weights must be positive on [0,1]");
        samples_[j][g] = v;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
    }
    bound_ = std::max({1.0, hi, 1.0 / lo});
  }

  /// All k weights equal to the same function.
  static WeightSystem uniform(int order, const AnalyticFunction& w) {
    return WeightSystem(order, std::vector<AnalyticFunction>(static_cast<std::size_t>(order), w));
  }
  static WeightSystem unit(int order) { return uniform(order, AnalyticFunction::constant(1.0)); }
  static WeightSystem constants(std::span<const double> values) {
    std::vector<AnalyticFunction> w;
    for (double v : values) w.push_back(AnalyticFunction::constant(v));
    return WeightSystem(static_cast<int>(values.size()), std::move(w));
  }

  int order() const { return order_; }
  /// w_j, 1-based as in the definitions.
  const AnalyticFunction& weight(int j) const { return weights_.at(static_cast<std::size_t>(j - 1)); }
  double w(int j, double x, int d = 0) const { return weight(j).derivative(x, d); }
  /// Smallest M with 1/M <= w_j <= M for all j (sampled).
  double bound() const { return bound_; }

  /// Modulus of continuity sup_{|x-y|<delta} |w_j(x) - w_j(y)|, estimated from
  /// a fine grid plus the exact offset x + delta.
  double omega(int j, double delta) const {
    if (!(delta > 0.0)) return 0.0;
    const auto& f = samples_.at(static_cast<std::size_t>(j - 1));
    const int n = omega_grid;
    if (delta >= 1.0) {
      auto [lo, hi] = std::minmax_element(f.begin(), f.end());
      return *hi - *lo;
    }
    const double h = 1.0 / n;
    const double reach = delta * (1.0 - 1e-9);
    std::deque<int> maxq, minq;
    double best = 0.0;
    int right = 0; // next grid index to enter the window
    for (int i = 0; i <= n; ++i) {
      while (right <= n && right * h - i * h < reach) {
        while (!maxq.empty() && f[maxq.back()] <= f[right]) maxq.pop_back();
        maxq.push_back(right);
        while (!minq.empty() && f[minq.back()] >= f[right]) minq.pop_back();
        minq.push_back(right);
        ++right;
      }
      while (maxq.front() < i) maxq.pop_front();
      while (minq.front() < i) minq.pop_front();
      best = std::max(best, f[maxq.front()] - f[minq.front()]);
      const double x = i * h;
      if (x + reach <= 1.0) {
        const double wf = weight(j)(x + reach);
        best = std::max({best, std::abs(wf - f[i])});
        // the exact window end against the window extremes
        best = std::max({best, f[maxq.front()] - wf, wf - f[minq.front()]});
      }
    }
    return best;
  }

  double max_omega(double delta) const {
    double m = 0.0;
    for (int j = 1; j <= order_; ++j) m = std::max(m, omega(j, delta));
    return m;
  }

  /// min and max of w_j over [a,b], sampled on a 129-point grid.
  std::pair<double, double> range(int j, double a, double b, int points = 129) const {
    double lo = INFINITY, hi = -INFINITY;
    for (int g = 0; g < points; ++g) {
      const double v = w(j, a + (b - a) * g / (points - 1));
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    return {lo, hi};
  }

  nlohmann::json to_json() const {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& w : weights_) arr.push_back(w.to_json());
    return {{"order", order_}, {"weights", arr}};
  }

  /// Accepts {"weights":[...]} with k entries, or a single family spec that is
  /// used for every w_j.
  static WeightSystem from_json(const nlohmann::json& j, int order) {
    if (j.contains("weights")) {
      std::vector<AnalyticFunction> w;
      for (const auto& e : j.at("weights")) w.push_back(AnalyticFunction::from_json(e));
      return WeightSystem(order, std::move(w));
    }
    return uniform(order, AnalyticFunction::from_json(j));
  }

private:
  int order_;
  std::vector<AnalyticFunction> weights_;
  std::vector<std::vector<double>> samples_;
  double bound_ = 1.0;
};

/// Values of the triangular family u*_{j,i}, j = 0..k, i = 1..k+1-j, at one
/// point, for iterated integrals starting at a base point `a`:
///   u*_{j,1} = 1,  D u*_{j,i} = w_{k-j} u*_{j+1,i-1},  u*_{j,i}(a) = 0 (i >= 2).
/// With a = 0 these are exactly the dual functions; other base points give a
/// unit-triangular change of basis within each span.
class DualTriangle {
public:
  explicit DualTriangle(int order = 1) : order_(order), values_(size(order), 0.0) {
    for (int j = 0; j <= order_; ++j) at(j, 1) = 1.0;
  }

  static std::size_t size(int k) { return static_cast<std::size_t>((k + 1) * (k + 2) / 2); }

  double& at(int j, int i) { return values_[index(j, i)]; }
  double at(int j, int i) const { return values_[index(j, i)]; }
  int order() const { return order_; }

private:
  std::size_t index(int j, int i) const {
    // row j holds i = 1..k+1-j
    std::size_t off = 0;
    for (int r = 0; r < j; ++r) off += static_cast<std::size_t>(order_ + 1 - r);
    return off + static_cast<std::size_t>(i - 1);
  }

  int order_;
  std::vector<double> values_;
};

/// Integrates the triangular system forward from `base` and returns the
/// triangle at each requested point (points must be >= base, any order).
inline std::vector<DualTriangle> dual_system_at(const WeightSystem& ws, double base,
                                                std::span<const double> points,
                                                double max_panel = 1.0 / 512) {
  const int k = ws.order();
  std::vector<DualTriangle> out(points.size(), DualTriangle(k));
  double end = base;
  for (double p : points) {
    if (p < base) throw std::invalid_argument("dual_system_at: point below base");
    end = std::max(end, p);
  }
  if (end == base) return out;

  const auto& integ = spectral_integrator();
  const int np = integ.points();
  const auto& rule = *integ.rule;
  const auto edges = panel_edges(base, end, points, max_panel);

  DualTriangle left(k);
  std::vector<DualTriangle> nodes(static_cast<std::size_t>(np), DualTriangle(k));
  std::vector<std::vector<double>> wv(static_cast<std::size_t>(k + 1), std::vector<double>(np));
  std::vector<double> integrand(static_cast<std::size_t>(np));

  auto record = [&](double x, const DualTriangle& tri) {
    for (std::size_t p = 0; p < points.size(); ++p)
      if (points[p] == x) out[p] = tri;
  };
  record(base, left);

  for (std::size_t e = 0; e + 1 < edges.size(); ++e) {
    const double lo = edges[e], hi = edges[e + 1];
    const double half = 0.5 * (hi - lo), mid = 0.5 * (hi + lo);
    for (int m = 1; m <= k; ++m)
      for (int q = 0; q < np; ++q) wv[m][q] = ws.w(m, mid + half * rule.nodes[q]);
    DualTriangle right(k);
    for (int i = 2; i <= k + 1; ++i) {
      for (int j = 0; j <= k + 1 - i; ++j) {
        const int m = k - j;
        double total = 0.0;
        for (int q = 0; q < np; ++q) {
          integrand[q] = wv[m][q] * nodes[q].at(j + 1, i - 1);
          total += rule.weights[q] * integrand[q];
        }
        for (int q = 0; q < np; ++q) {
          double acc = 0.0;
          for (int r = 0; r < np; ++r) acc += integ.matrix[q * np + r] * integrand[r];
          nodes[q].at(j, i) = left.at(j, i) + half * acc;
        }
        right.at(j, i) = left.at(j, i) + half * total;
      }
    }
    left = right;
    record(hi, left);
  }
  return out;
}

/// D^d u*_{j,i} at s, from the tabulated values at s and analytic weight
/// derivatives (product rule along the chain D u*_{j,i} = w_{k-j} u*_{j+1,i-1}).
inline double dual_derivative(const WeightSystem& ws, const DualTriangle& tri, double s, int j, int i,
                              int d) {
  if (i == 1) return d == 0 ? 1.0 : 0.0;
  if (d == 0) return tri.at(j, i);
  const int m = ws.order() - j;
  double sum = 0.0;
  for (int r = 0; r <= d - 1; ++r)
    sum += binomial(d - 1, r) * ws.w(m, s, r) * dual_derivative(ws, tri, s, j + 1, i - 1, d - 1 - r);
  return sum;
}

/// u*_{j,i}(x) for i = 1..k+1-j at every grid point (rows indexed by i-1).
inline std::vector<std::vector<double>> iterated_integral_table(const WeightSystem& ws, int j,
                                                                std::span<const double> grid) {
  const int k = ws.order();
  if (j < 0 || j > k) throw std::invalid_argument("iterated_integral_table: j out of range");
  for (std::size_t g = 0; g < grid.size(); ++g) {
    if (grid[g] < 0.0 || grid[g] > 1.0) throw std::invalid_argument("grid must lie in [0,1]");
    if (g > 0 && !(grid[g] > grid[g - 1])) throw std::invalid_argument("grid must be increasing");
  }
  const auto tri = dual_system_at(ws, 0.0, grid);
  std::vector<std::vector<double>> table(static_cast<std::size_t>(k + 1 - j),
                                         std::vector<double>(grid.size()));
  for (int i = 1; i <= k + 1 - j; ++i)
    for (std::size_t g = 0; g < grid.size(); ++g) table[i - 1][g] = tri[g].at(j, i);
  return table;
}

/// psi_m(y), m = 1..k, with h_m(x,y) = w_1(x) psi_m(y): psi_1 = 1 and
/// psi_m(y) = int_y^x w_m(r) psi_{m-1}(r) dr. One backward sweep from x
/// serves every order at once.
struct KernelColumn {
  std::vector<double> psi; // index m = 1..k (slot 0 unused)
};

inline std::vector<KernelColumn> kernel_sweep(const WeightSystem& ws, double x,
                                              std::span<const double> ys, double max_panel = 1.0 / 512) {
  const int k = ws.order();
  KernelColumn at_x{std::vector<double>(static_cast<std::size_t>(k + 1), 0.0)};
  at_x.psi[1] = 1.0;
  std::vector<KernelColumn> out(ys.size(), at_x);
  double low = x;
  for (double y : ys)
    if (y < x) low = std::min(low, y);
  if (low == x) return out;

  const auto& integ = spectral_integrator();
  const int np = integ.points();
  const auto& rule = *integ.rule;
  auto edges = panel_edges(low, x, ys, max_panel);

  KernelColumn right = at_x;
  std::vector<std::vector<double>> node_psi(static_cast<std::size_t>(k + 1), std::vector<double>(np, 0.0));
  for (int q = 0; q < np; ++q) node_psi[1][q] = 1.0;
  std::vector<double> integrand(static_cast<std::size_t>(np));

  for (std::size_t e = edges.size() - 1; e > 0; --e) {
    const double lo = edges[e - 1], hi = edges[e];
    const double half = 0.5 * (hi - lo), mid = 0.5 * (hi + lo);
    KernelColumn left = right;
    for (int m = 2; m <= k; ++m) {
      double total = 0.0;
      for (int q = 0; q < np; ++q) {
        integrand[q] = ws.w(m, mid + half * rule.nodes[q]) * node_psi[m - 1][q];
        total += rule.weights[q] * integrand[q];
      }
      for (int q = 0; q < np; ++q) {
        double acc = 0.0;
        for (int r = 0; r < np; ++r) acc += integ.matrix[q * np + r] * integrand[r];
        node_psi[m][q] = right.psi[m] + half * (total - acc);
      }
      left.psi[m] = right.psi[m] + half * total;
    }
    right = left;
    for (std::size_t p = 0; p < ys.size(); ++p)
      if (ys[p] == lo) out[p] = left;
  }
  return out;
}

/// D_y^d psi_m(y) from psi values at y: D psi_m = -w_m psi_{m-1}.
inline double kernel_derivative(const WeightSystem& ws, const KernelColumn& col, double y, int m, int d) {
  if (m == 1) return d == 0 ? 1.0 : 0.0;
  if (d == 0) return col.psi[m];
  double sum = 0.0;
  for (int r = 0; r <= d - 1; ++r)
    sum += binomial(d - 1, r) * ws.w(m, y, r) * kernel_derivative(ws, col, y, m - 1, d - 1 - r);
  return -sum;
}

/// (d/dy)^dy_order g_j(x,y), where g_j = 1_{x>=y} h_j. With
/// include_diagonal = false the indicator is 1_{x>y} (the left limit in x).
inline double g_kernel(const WeightSystem& ws, int j, double x, double y, int dy_order,
                       bool include_diagonal = true) {
  if (j < 1 || j > ws.order()) throw std::invalid_argument("g_kernel: j out of range");
  if (dy_order < 0 || dy_order >= j) throw std::invalid_argument("g_kernel: derivative order must be < j");
  if (x < 0.0 || x > 1.0 || y < 0.0 || y > 1.0) throw std::invalid_argument("g_kernel: x, y must lie in [0,1]");
  if (x < y || (!include_diagonal && x == y)) return 0.0;
  const double ys[1] = {y};
  const auto col = kernel_sweep(ws, x, ys);
  return ws.w(1, x) * kernel_derivative(ws, col[0], y, j, dy_order);
}

} // namespace splinelab

#endif // SPLINELAB_WEIGHTS_HPP
