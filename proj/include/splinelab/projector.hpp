#ifndef SPLINELAB_PROJECTOR_HPP
#define SPLINELAB_PROJECTOR_HPP

// Orthogonal projection in L^2(mu) onto the span of a locally supported
// basis, written through the inverse (a_ij) of G_p = (<M_i, N_j>_mu):
//
//   P f = sum_{i,j} a_ij <f, M_j>_mu N_i.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "splinelab/gram.hpp"
#include "splinelab/parallel.hpp"

namespace splinelab {

inline PiecewiseFunction piecewise(const AnalyticFunction& f) { return {f.breakpoints(), f}; }

/// Samples for sup-norm estimates on [a,b]: the union of Chebyshev-Lobatto
/// sets of sizes 4..per_atom, so larger counts always contain smaller ones.
inline std::vector<double> lobatto_union(double a, double b, int per_atom) {
  std::vector<double> s;
  for (int m = 4; m <= std::max(per_atom, 4); ++m)
    for (int l = 0; l < m; ++l) {
      const double c = -std::cos(std::numbers::pi * l / (m - 1));
      s.push_back(a + 0.5 * (b - a) * (c + 1.0));
    }
  std::sort(s.begin(), s.end());
  std::vector<double> out;
  for (double x : s)
    if (out.empty() || x - out.back() > 1e-15 * (1.0 + std::abs(x))) out.push_back(x);
  out.front() = a;
  out.back() = b;
  return out;
}

inline std::vector<double> sample_points(const std::vector<double>& breaks, int per_atom) {
  std::vector<double> out;
  for (std::size_t a = 0; a + 1 < breaks.size(); ++a) {
    auto s = lobatto_union(breaks[a], breaks[a + 1], per_atom);
    out.insert(out.end(), s.begin(), s.end() - 1);
  }
  out.push_back(breaks.back());
  return out;
}

struct ProjectedFunction {
  std::vector<double> coefficients; // with respect to N_i
  std::shared_ptr<const SplineBasis> basis;

  double operator()(double t) const {
    double s = 0.0;
    for (const auto& v : basis->evaluate_all(t)) s += coefficients[v.index] * v.n;
    return s;
  }
  PiecewiseFunction as_function() const {
    return {basis->breakpoints(), [self = *this](double t) { return self(t); }};
  }
};

class Projector {
public:
  Projector(const SplineBasis& basis, Measure mu)
      : basis_(std::make_shared<const SplineBasis>(basis.renormalized(mu))), mu_(std::move(mu)) {
    gram_ = gram_matrix(*basis_, *basis_, mu_);
    auto inv = invert(gram_);
    a_ = std::move(inv.inverse);
    inv_norm_ = inv.inf_norm;
    inv_residual_ = inv.residual;
  }

  const SplineBasis& basis() const { return *basis_; }
  const Measure& measure() const { return mu_; }
  const BandedMatrix& gram() const { return gram_; }
  /// (a_ij) = G_p^{-1}.
  const DenseMatrix& gram_inverse() const { return a_; }
  double gram_inverse_norm() const { return inv_norm_; }
  double gram_inverse_residual() const { return inv_residual_; }
  /// a_j with N_j = a_j M_j.
  double normalizer(std::size_t j) const { return basis_->n_scale(j); }

  /// b_ij = a_ij / a_j, the inverse of (<N_i, N_j>_mu).
  DenseMatrix b_matrix() const {
    DenseMatrix b = a_;
    for (std::size_t i = 0; i < b.rows(); ++i)
      for (std::size_t j = 0; j < b.cols(); ++j) b(i, j) /= normalizer(j);
    return b;
  }

  /// Largest |b_ij - b_ji|.
  double b_asymmetry() const {
    const auto b = b_matrix();
    double m = 0.0;
    for (std::size_t i = 0; i < b.rows(); ++i)
      for (std::size_t j = 0; j < i; ++j) m = std::max(m, std::abs(b(i, j) - b(j, i)));
    return m;
  }

  /// <f, M_j>_mu for all j.
  std::vector<double> moments(const PiecewiseFunction& f) const {
    const auto kb = basis_->breakpoints();
    const auto breaks = merge_breaks({kb, mu_.breakpoints(), f.breakpoints});
    const auto edges = panel_edges(0.0, 1.0, breaks);
    std::vector<double> m(basis_->count(), 0.0);
    for_each_node(edges, default_gauss_points, [&](double x, double w) {
      const double fw = w * f(x) * mu_.density(x);
      if (fw == 0.0) return;
      for (const auto& v : basis_->evaluate_all(x)) m[v.index] += fw * v.m;
    });
    return m;
  }

  ProjectedFunction project(const PiecewiseFunction& f) const {
    const auto m = moments(f);
    return {a_ * m, basis_};
  }

  /// Lower estimate of ||P : L^inf(mu) -> L^inf(mu)|| = sup_t int |K(t,s)| dmu(s),
  /// K(t,s) = sum_ij a_ij N_i(t) M_j(s), with t sampled per atom.
  double operator_inf_norm(int samples_per_atom, unsigned threads = 1, int subpanels = 4) const {
    if (samples_per_atom < 4) throw std::invalid_argument("operator_inf_norm: need at least 4 samples per atom");
    const auto kb = basis_->breakpoints();
    const auto breaks = merge_breaks({kb, mu_.breakpoints()});
    const auto& rule = gauss_rule(default_gauss_points);
    struct Node {
      double w;
      std::vector<BasisValue> active;
    };
    std::vector<Node> nodes;
    for (std::size_t p = 0; p + 1 < breaks.size(); ++p) {
      const double lo = breaks[p], hi = breaks[p + 1];
      for (int s = 0; s < subpanels; ++s) {
        const double a = lo + (hi - lo) * s / subpanels, b = lo + (hi - lo) * (s + 1) / subpanels;
        const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
        for (int q = 0; q < rule.points; ++q) {
          const double x = mid + half * rule.nodes[q];
          nodes.push_back({half * rule.weights[q] * mu_.density(x), basis_->evaluate_all(x)});
        }
      }
    }
    const auto ts = sample_points(kb, samples_per_atom);
    std::vector<double> norms(ts.size(), 0.0);
    const std::size_t m = basis_->count();
    parallel_for(ts.size(), threads, [&](std::size_t idx) {
      std::vector<double> gamma(m, 0.0);
      for (const auto& v : basis_->evaluate_all(ts[idx]))
        for (std::size_t j = 0; j < m; ++j) gamma[j] += a_(v.index, j) * v.n;
      double total = 0.0;
      for (const auto& node : nodes) {
        double k = 0.0;
        for (const auto& v : node.active) k += gamma[v.index] * v.m;
        total += node.w * std::abs(k);
      }
      norms[idx] = total;
    });
    return *std::max_element(norms.begin(), norms.end());
  }

private:
  std::shared_ptr<const SplineBasis> basis_;
  Measure mu_;
  BandedMatrix gram_;
  DenseMatrix a_;
  double inv_norm_ = 0.0;
  double inv_residual_ = 0.0;
};

inline ProjectedFunction project(const Projector& p, const PiecewiseFunction& f) { return p.project(f); }

inline double operator_inf_norm(const Projector& p, int samples_per_atom, unsigned threads = 1) {
  return p.operator_inf_norm(samples_per_atom, threads);
}

/// N_i^* = sum_j a_ij M_j = sum_j b_ij N_j, dual to (N_j) in L^2(mu).
struct DualBasis {
  DenseMatrix b;                   // coefficients with respect to N_j
  double biorthogonality_error = 0.0; // max |<N_i^*, N_j>_mu - delta_ij|
  double q = 0.0;                  // decay rate of (a_ij)
  double c1 = 0.0;                 // fitted constant of the pointwise bound
  std::shared_ptr<const SplineBasis> basis;

  double operator()(std::size_t i, double t) const {
    double s = 0.0;
    for (const auto& v : basis->evaluate_all(t)) s += b(i, v.index) * v.n;
    return s;
  }
};

/// j(t): the smallest index j with t in the closed F-support of N_j.
inline std::size_t first_support_index(const SplineBasis& basis, double t) {
  for (std::size_t i = 0; i < basis.count(); ++i) {
    auto [a, b] = basis.f_support(i);
    if (t >= a && t <= b) return i;
  }
  throw std::out_of_range("first_support_index: t outside [0,1]");
}

inline DualBasis dual_basis(const Projector& p, int samples_per_atom = 6) {
  DualBasis d;
  d.basis = std::make_shared<const SplineBasis>(p.basis());
  d.b = p.b_matrix();
  const auto h = gram_matrix(p.basis(), Normalization::N, p.basis(), Normalization::N, p.measure());
  DenseMatrix bh = h.operator*(d.b.transposed()).transposed(); // (B H)^T = H^T B^T, H symmetric
  double err = 0.0;
  for (std::size_t i = 0; i < bh.rows(); ++i)
    for (std::size_t j = 0; j < bh.cols(); ++j) err = std::max(err, std::abs(bh(i, j) - (i == j ? 1.0 : 0.0)));
  d.biorthogonality_error = err;

  const auto fit = demko_fit(p.gram_inverse());
  d.q = fit.q;
  const auto ts = sample_points(p.basis().breakpoints(), samples_per_atom);
  const std::size_t m = p.basis().count();
  std::vector<double> supp_mass(m);
  for (std::size_t i = 0; i < m; ++i) {
    auto [a, b] = p.basis().f_support(i);
    supp_mass[i] = p.measure().mass(a, b);
  }
  double c1 = 0.0;
  for (double t : ts) {
    const auto act = p.basis().evaluate_all(t);
    const std::size_t jt = first_support_index(p.basis(), t);
    for (std::size_t i = 0; i < m; ++i) {
      double v = 0.0;
      for (const auto& a : act) v += d.b(i, a.index) * a.n;
      const double dist = static_cast<double>(i > jt ? i - jt : jt - i);
      c1 = std::max(c1, std::abs(v) * supp_mass[i] / std::pow(d.q, dist));
    }
  }
  d.c1 = c1;
  return d;
}

struct ProjectorDifference {
  double sup_diff = 0.0;            // sup_t |(P_F - P_G) f (t)| on the sampling grid
  double max_d_in_u = 0.0;          // max |d_i| over i with supp_F N_i inside U
  std::size_t count_in_u = 0;
  double expansion_residual = 0.0;  // sup |(P_F - P_G) f - sum_{i outside U} d_i N_i^*|
  bool expansion_check = false;
};

/// Compares the fine projector PF with the coarse PG, where F refines G and
/// U is the union of G-atoms that F leaves unsplit.
inline ProjectorDifference projector_difference(const Projector& pf, const Projector& pg, const PiecewiseFunction& f,
                                                int samples_per_atom = 8, double tol = 1e-8) {
  const auto fb = pf.basis().breakpoints();
  const auto gb = pg.basis().breakpoints();
  if (!std::includes(fb.begin(), fb.end(), gb.begin(), gb.end()))
    throw std::invalid_argument("projector_difference: the coarse partition is not nested in the fine one");
  if (pf.basis().order() != pg.basis().order())
    throw std::invalid_argument("projector_difference: orders differ");

  // U as a list of intervals: G-atoms that are also F-atoms
  std::vector<std::pair<double, double>> u;
  for (std::size_t a = 0; a + 1 < gb.size(); ++a) {
    auto it = std::lower_bound(fb.begin(), fb.end(), gb[a]);
    if (it + 1 != fb.end() && *(it + 1) == gb[a + 1]) u.emplace_back(gb[a], gb[a + 1]);
  }
  auto inside_u = [&](double a, double b) {
    // [a,b] is a union of F-atoms; check each one lies in U
    auto lo = std::lower_bound(fb.begin(), fb.end(), a);
    for (auto it = lo; it + 1 != fb.end() && *it < b; ++it) {
      bool found = false;
      for (auto [ua, ub] : u)
        if (ua == *it && ub == *(it + 1)) found = true;
      if (!found) return false;
    }
    return true;
  };

  const auto fp = pf.project(f);
  const auto gp = pg.project(f);
  auto diff = [&](double t) { return fp(t) - gp(t); };

  ProjectorDifference r;
  const auto ts = sample_points(fb, samples_per_atom);
  for (double t : ts) r.sup_diff = std::max(r.sup_diff, std::abs(diff(t)));

  const std::size_t m = pf.basis().count();
  std::vector<double> d(m, 0.0);
  const auto edges = panel_edges(0.0, 1.0, merge_breaks({fb, pf.measure().breakpoints()}));
  for_each_node(edges, default_gauss_points, [&](double x, double w) {
    const double v = w * diff(x) * pf.measure().density(x);
    for (const auto& a : pf.basis().evaluate_all(x)) d[a.index] += v * a.n;
  });
  std::vector<bool> in_u(m, false);
  for (std::size_t i = 0; i < m; ++i) {
    auto [a, b] = pf.basis().f_support(i);
    in_u[i] = inside_u(a, b);
    if (in_u[i]) {
      ++r.count_in_u;
      r.max_d_in_u = std::max(r.max_d_in_u, std::abs(d[i]));
    }
  }
  // reconstruct from the coefficients outside U through the dual basis
  const auto bmat = pf.b_matrix();
  std::vector<double> coeff(m, 0.0); // coefficients with respect to N_j
  for (std::size_t i = 0; i < m; ++i) {
    if (in_u[i]) continue;
    for (std::size_t j = 0; j < m; ++j) coeff[j] += d[i] * bmat(i, j);
  }
  for (double t : ts) {
    double s = 0.0;
    for (const auto& a : pf.basis().evaluate_all(t)) s += coeff[a.index] * a.n;
    r.expansion_residual = std::max(r.expansion_residual, std::abs(diff(t) - s));
  }
  r.expansion_check = r.max_d_in_u <= tol && r.expansion_residual <= tol;
  return r;
}

} // namespace splinelab

#endif // SPLINELAB_PROJECTOR_HPP
