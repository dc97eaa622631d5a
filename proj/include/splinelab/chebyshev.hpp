#ifndef SPLINELAB_CHEBYSHEV_HPP
#define SPLINELAB_CHEBYSHEV_HPP

// Chebyshevian B-splines M_i^w as ratios of confluent determinants:
//
//   M_i^w(x) = (-1)^k D(t_i..t_{i+k}; u*_1..u*_k, g_k(x,.)) / D(t_i..t_{i+k}; u*_1..u*_{k+1})
//
// Both determinants are assembled on a local frame: the dual functions are
// integrated from t_i instead of 0 (a unit-triangular column change, so the
// determinants are unchanged), then rows and columns are scaled by powers of
// the support length L so that every entry is O(1).

#include <cmath>
#include <limits>
#include <functional>
#include <memory>
#include <stdexcept>
#include <vector>

#include "splinelab/bspline.hpp"
#include "splinelab/linalg.hpp"
#include "splinelab/weights.hpp"

namespace splinelab {

/// Points s_1 <= ... <= s_m with confluence orders
/// d_i = max{j : s_i = ... = s_{i-j}}.
class ConfluentPointSet {
public:
  explicit ConfluentPointSet(std::vector<double> points) : points_(std::move(points)) {
    orders_.assign(points_.size(), 0);
    for (std::size_t i = 1; i < points_.size(); ++i) {
      if (points_[i] < points_[i - 1]) throw std::invalid_argument("confluent points must be nondecreasing");
      if (points_[i] == points_[i - 1]) orders_[i] = orders_[i - 1] + 1;
    }
  }
  const std::vector<double>& points() const { return points_; }
  const std::vector<int>& orders() const { return orders_; }
  std::size_t size() const { return points_.size(); }
  int max_order() const { return orders_.empty() ? 0 : *std::max_element(orders_.begin(), orders_.end()); }

private:
  std::vector<double> points_;
  std::vector<int> orders_;
};

/// A determinant column: s, d -> D^d u(s), valid for d <= max_order.
struct DeterminantColumn {
  std::function<double(double, int)> derivative;
  int max_order = 0;
};

/// det(D^{d_i} u_j(s_i)).
inline double confluent_determinant(const ConfluentPointSet& pts, const std::vector<DeterminantColumn>& columns) {
  const std::size_t n = pts.size();
  if (columns.size() != n) throw std::invalid_argument("confluent_determinant: need one column per point");
  DenseMatrix a(n, n);
  for (std::size_t c = 0; c < n; ++c) {
    for (std::size_t r = 0; r < n; ++r) {
      const int d = pts.orders()[r];
      if (d > columns[c].max_order)
        throw std::invalid_argument("confluent_determinant: column lacks the required derivative order");
      a(r, c) = columns[c].derivative(pts.points()[r], d);
    }
  }
  return determinant(std::move(a));
}

/// prod_{r<s} (s_s - s_r).
inline double vandermonde_product(std::span<const double> pts) {
  double p = 1.0;
  for (std::size_t s = 0; s < pts.size(); ++s)
    for (std::size_t r = 0; r < s; ++r) p *= pts[s] - pts[r];
  return p;
}

/// Everything about index i that does not depend on x.
struct LocalFrame {
  std::size_t index = 0;
  int order = 0;
  double base = 0.0;   // t_i
  double length = 0.0; // t_{i+k} - t_i
  ConfluentPointSet points{{}};
  std::vector<DualTriangle> duals; // dual triangle (base t_i) at each point
  DenseMatrix den_matrix;          // scaled denominator matrix
  double den_scaled = 0.0;         // its determinant
  int den_exponent = 0;            // D = den_scaled * L^den_exponent
};

inline LocalFrame make_local_frame(const WeightSystem& ws, const KnotSequence& knots, std::size_t i) {
  const int k = knots.order();
  if (ws.order() != k) throw std::invalid_argument("weight system order differs from knot order");
  LocalFrame f;
  f.index = i;
  f.order = k;
  f.base = knots[i];
  f.length = knots[i + k] - knots[i];
  std::vector<double> pts(knots.knots().begin() + static_cast<long>(i),
                          knots.knots().begin() + static_cast<long>(i) + k + 1);
  f.points = ConfluentPointSet(pts);
  f.duals = dual_system_at(ws, f.base, pts);

  const double L = f.length;
  DenseMatrix a(static_cast<std::size_t>(k + 1), static_cast<std::size_t>(k + 1));
  int dsum = 0;
  for (int r = 0; r <= k; ++r) {
    const int d = f.points.orders()[r];
    dsum += d;
    const double s = pts[r];
    for (int c = 1; c <= k + 1; ++c)
      a(r, c - 1) = dual_derivative(ws, f.duals[r], s, 0, c, d) * std::pow(L, d - (c - 1));
  }
  f.den_matrix = a;
  f.den_scaled = determinant(std::move(a));
  f.den_exponent = k * (k + 1) / 2 - dsum;
  return f;
}

/// Scaled numerator determinant for x, given kernel columns at the frame's
/// points; D_num = result * L^(k(k-1)/2 + k-1 - sum d).
inline double numerator_scaled(const WeightSystem& ws, const LocalFrame& f, double x,
                               const std::vector<KernelColumn>& kernel, bool include_diagonal) {
  const int k = f.order;
  const double L = f.length;
  const auto& pts = f.points.points();
  DenseMatrix a = f.den_matrix;
  const double w1x = ws.w(1, x);
  for (int r = 0; r <= k; ++r) {
    const int d = f.points.orders()[r];
    const double s = pts[r];
    const bool live = s < x || (include_diagonal && s == x);
    a(r, k) = live ? w1x * kernel_derivative(ws, kernel[r], s, k, d) * std::pow(L, d - (k - 1)) : 0.0;
  }
  return determinant(std::move(a));
}

inline int numerator_exponent(const LocalFrame& f) {
  int dsum = 0;
  for (int d : f.points.orders()) dsum += d;
  return f.order * (f.order - 1) / 2 + (f.order - 1) - dsum;
}

/// Unscaled numerator and denominator determinants of M_i^w(x).
struct DeterminantPair {
  double numerator = 0.0;
  double denominator = 0.0;
};

inline DeterminantPair chebyshev_determinants(const WeightSystem& ws, const KnotSequence& knots, std::size_t i,
                                             double x) {
  const auto f = make_local_frame(ws, knots, i);
  const bool include_diagonal = x < 1.0;
  const auto kernel = kernel_sweep(ws, x, f.points.points());
  DeterminantPair p;
  p.denominator = f.den_scaled * std::pow(f.length, f.den_exponent);
  p.numerator = numerator_scaled(ws, f, x, kernel, include_diagonal) * std::pow(f.length, numerator_exponent(f));
  return p;
}

class ChebyshevEvaluator final : public BasisEvaluator {
public:
  ChebyshevEvaluator(KnotSequence knots, WeightSystem ws) : knots_(std::move(knots)), ws_(std::move(ws)) {
    const std::size_t count = knots_.basis_count();
    frames_.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
      frames_.push_back(make_local_frame(ws_, knots_, i));
      if (!(frames_.back().den_scaled > 0.0))
        throw std::runtime_error("Chebyshevian B-spline denominator is not positive (index " + std::to_string(i) + ")");
    }
  }

  void active(double x, std::vector<std::pair<std::size_t, double>>& out) const override {
    const int k = knots_.order();
    const std::size_t mu = knot_span(knots_, x);
    const std::size_t first = mu + 1 - static_cast<std::size_t>(k);
    const bool include_diagonal = x < 1.0;
    // kernel values at t_first..t_{mu+k}, one backward sweep from x
    std::vector<double> ys(knots_.knots().begin() + static_cast<long>(first),
                           knots_.knots().begin() + static_cast<long>(mu) + k + 1);
    const auto kernel = kernel_sweep(ws_, x, ys);
    const double sign = (k % 2 == 0) ? 1.0 : -1.0;
    for (std::size_t i = first; i <= mu; ++i) {
      const LocalFrame& f = frames_[i];
      std::vector<KernelColumn> cols(kernel.begin() + static_cast<long>(i - first),
                                     kernel.begin() + static_cast<long>(i - first) + k + 1);
      const double num = numerator_scaled(ws_, f, x, cols, include_diagonal);
      out.emplace_back(i, sign * num / f.den_scaled / f.length);
    }
  }

  const WeightSystem& weights() const { return ws_; }

private:
  KnotSequence knots_;
  WeightSystem ws_;
  std::vector<LocalFrame> frames_;
};

inline SplineBasis build_chebyshev_basis(const KnotSequence& knots, const WeightSystem& ws) {
  if (knots.order() != ws.order()) throw std::invalid_argument("build_chebyshev_basis: order mismatch");
  return SplineBasis(BasisKind::chebyshev, knots, std::make_shared<ChebyshevEvaluator>(knots, ws));
}

/// Sample points: for each atom, `per_atom` equispaced points including the
/// left endpoint, plus x = 1.
inline std::vector<double> atom_grid(const KnotSequence& knots, int per_atom) {
  const auto d = knots.distinct();
  std::vector<double> g;
  for (std::size_t a = 0; a + 1 < d.size(); ++a)
    for (int s = 0; s < per_atom; ++s) g.push_back(d[a] + (d[a + 1] - d[a]) * s / per_atom);
  g.push_back(1.0);
  return g;
}

struct ComparisonRow {
  double sup_diff = 0.0;    // sup over the grid of |M_i^w - M_i|
  double supp_len = 0.0;    // t_{i+k} - t_i
  double omega = 0.0;       // max_j omega(w_j, supp_len)
  double bound_ratio = 0.0; // sup_diff * supp_len / omega; NaN when omega = 0
  double sup_scaled = 0.0;  // sup |M_i^w| * supp_len
};

inline std::vector<ComparisonRow> compare_to_classical(const SplineBasis& cheb, const SplineBasis& classical,
                                                       const WeightSystem& ws, std::span<const double> grid) {
  if (cheb.count() != classical.count() || cheb.order() != classical.order())
    throw std::invalid_argument("compare_to_classical: bases differ in shape");
  std::vector<ComparisonRow> rows(cheb.count());
  for (double x : grid) {
    const auto a = cheb.evaluate_all(x);
    const auto b = classical.evaluate_all(x);
    for (const auto& v : a) {
      double m = 0.0;
      for (const auto& u : b)
        if (u.index == v.index) m = u.m;
      rows[v.index].sup_diff = std::max(rows[v.index].sup_diff, std::abs(v.m - m));
      rows[v.index].sup_scaled = std::max(rows[v.index].sup_scaled, std::abs(v.m));
    }
  }
  for (std::size_t i = 0; i < rows.size(); ++i) {
    auto& r = rows[i];
    r.supp_len = cheb.support_length(i);
    r.sup_scaled *= r.supp_len;
    r.omega = ws.max_omega(r.supp_len);
    r.bound_ratio = r.omega > 0.0 ? r.sup_diff * r.supp_len / r.omega : std::numeric_limits<double>::quiet_NaN();
  }
  return rows;
}

/// The four determinant quantities from the comparison argument, built with
/// constant weights wbar_j = min of w_j over [t_i, t_{i+k}].
struct ProofQuantities {
  double q = 0.0;     // denominator with constant weights wbar
  double eps = 0.0;   // true denominator minus q
  double r = 0.0;     // numerator with constant weights wbar
  double delta = 0.0; // true numerator minus r
  double denominator = 0.0;
  double numerator = 0.0;
  std::vector<double> wbar;
};

inline ProofQuantities proof_quantities(const KnotSequence& knots, const WeightSystem& ws, std::size_t i, double x) {
  const int k = knots.order();
  const double a = knots[i], b = knots[i + static_cast<std::size_t>(k)];
  if (!(x > a && x < b)) throw std::invalid_argument("proof_quantities: x must lie inside the open support");
  ProofQuantities p;
  for (int j = 1; j <= k; ++j) p.wbar.push_back(ws.range(j, a, b).first);
  const auto bar = WeightSystem::constants(p.wbar);
  const auto actual = chebyshev_determinants(ws, knots, i, x);
  const auto frozen = chebyshev_determinants(bar, knots, i, x);
  p.denominator = actual.denominator;
  p.numerator = actual.numerator;
  p.q = frozen.denominator;
  p.r = frozen.numerator;
  p.eps = actual.denominator - frozen.denominator;
  p.delta = actual.numerator - frozen.numerator;
  return p;
}

} // namespace splinelab

#endif // SPLINELAB_CHEBYSHEV_HPP
