#ifndef SPLINELAB_GRAM_HPP
#define SPLINELAB_GRAM_HPP

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <stdexcept>
#include <string>
#include <vector>

#include "splinelab/bspline.hpp"
#include "splinelab/linalg.hpp"

namespace splinelab {

enum class Normalization { M, N };

/// Quadrature panels for products of functions from two bases under mu.
inline std::vector<double> gram_panels(const SplineBasis& a, const SplineBasis& b, const Measure& mu) {
  const auto ba = a.breakpoints();
  const auto bb = b.breakpoints();
  const auto breaks = merge_breaks({ba, bb, mu.breakpoints()});
  return panel_edges(0.0, 1.0, breaks);
}

/// (<rows_i, cols_j>_mu) with each side in the requested normalization,
/// assembled panel by panel from the active functions at each Gauss node.
inline BandedMatrix gram_matrix(const SplineBasis& rows, Normalization row_norm, const SplineBasis& cols,
                                Normalization col_norm, const Measure& mu, int points = default_gauss_points) {
  if (rows.count() != cols.count()) throw std::invalid_argument("gram_matrix: bases differ in size");
  const bool same_knots = rows.knots().knots() == cols.knots().knots();
  const std::size_t band = same_knots ? static_cast<std::size_t>(std::max(rows.order(), cols.order()) - 1)
                                      : rows.count() - 1;
  BandedMatrix g(rows.count(), band);
  const auto edges = gram_panels(rows, cols, mu);
  for_each_node(edges, points, [&](double x, double w) {
    const double wd = w * mu.density(x);
    const auto ra = rows.evaluate_all(x);
    const auto ca = same_knots && &rows == &cols ? ra : cols.evaluate_all(x);
    for (const auto& r : ra) {
      const double rv = row_norm == Normalization::M ? r.m : r.n;
      if (rv == 0.0) continue;
      for (const auto& c : ca) {
        const double cv = col_norm == Normalization::M ? c.m : c.n;
        g.at(r.index, c.index) += wd * rv * cv;
      }
    }
  });
  return g;
}

/// G = (<M_i, N_j>_mu).
inline BandedMatrix gram_matrix(const SplineBasis& rows, const SplineBasis& cols, const Measure& mu) {
  return gram_matrix(rows, Normalization::M, cols, Normalization::N, mu);
}

/// Certified envelope |a_ij| <= c q^|i-j| + max_violation.
struct DecayFit {
  double c = 0.0;
  double q = 0.0;
  double max_violation = 0.0;
  bool ok = false; // q < 1
  std::vector<double> diagonal_max; // max |a_ij| over |i-j| = d
};

/// Per-diagonal maxima m_d = max_{|i-j|=d} |a_ij|. The rate is anchored at the
/// first off-diagonal, q = max_{d>=2} (m_d / m_1)^(1/(d-1)), over diagonals
/// above the roundoff floor, so boundary prefactors land in c rather than q;
/// c is then inflated until every entry is covered.
inline DecayFit demko_fit(const DenseMatrix& a, double noise_floor = 1e-13) {
  if (a.rows() != a.cols()) throw std::invalid_argument("demko_fit: matrix not square");
  constexpr double q_floor = 1e-6;
  const std::size_t n = a.rows();
  DecayFit fit;
  fit.diagonal_max.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t d = i > j ? i - j : j - i;
      fit.diagonal_max[d] = std::max(fit.diagonal_max[d], std::abs(a(i, j)));
    }
  const double diag = fit.diagonal_max.empty() ? 0.0 : fit.diagonal_max[0];
  const double first = n > 1 ? fit.diagonal_max[1] : 0.0;
  double q = q_floor;
  bool anchored = false;
  if (first > noise_floor) {
    for (std::size_t d = 2; d < n; ++d) {
      const double m = fit.diagonal_max[d];
      if (m <= noise_floor || m < DBL_MIN) continue;
      q = std::max(q, std::pow(m / first, 1.0 / static_cast<double>(d - 1)));
      anchored = true;
    }
    if (!anchored && diag > 0.0) q = std::max(q, first / diag);
  }
  fit.q = q;
  fit.ok = q < 1.0;
  double c = diag;
  if (fit.ok) {
    for (std::size_t d = 1; d < n; ++d) {
      const double m = fit.diagonal_max[d];
      if (m <= noise_floor) continue;
      c = std::max(c, m / std::pow(q, static_cast<double>(d)));
    }
  }
  fit.c = c;
  double viol = 0.0;
  for (std::size_t d = 0; d < n; ++d)
    viol = std::max(viol, fit.diagonal_max[d] - c * std::pow(q, static_cast<double>(d)));
  fit.max_violation = std::max(0.0, viol);
  return fit;
}

struct NeumannReport {
  double diff_norm = 0.0;    // ||G_p - G||_inf
  double x_norm = 0.0;       // ||G^{-1}(G_p - G)||_inf
  bool contraction = false;  // x_norm <= 1/2
  double g_inv_norm = 0.0;
  double gp_inv_norm = 0.0;
  bool inverse_bound = false; // ||G_p^{-1}|| <= 2 ||G^{-1}||, checked when contracting
};

inline NeumannReport neumann_check(const BandedMatrix& g, const BandedMatrix& gp) {
  if (g.dim() != gp.dim()) throw std::invalid_argument("neumann_check: dimension mismatch");
  NeumannReport r;
  const BandedMatrix diff = gp - g;
  r.diff_norm = inf_norm(diff);
  const auto ginv = invert(g);
  r.g_inv_norm = ginv.inf_norm;
  const DenseMatrix x = ginv.inverse * diff.to_dense();
  r.x_norm = inf_norm(x);
  r.contraction = r.x_norm <= 0.5;
  r.gp_inv_norm = invert(gp).inf_norm;
  r.inverse_bound = !r.contraction || r.gp_inv_norm <= 2.0 * r.g_inv_norm * (1.0 + 1e-12);
  return r;
}

inline void write_csv(const DenseMatrix& a, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << std::setprecision(17);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) out << (j ? "," : "") << a(i, j);
    out << '\n';
  }
}

} // namespace splinelab

#endif // SPLINELAB_GRAM_HPP
