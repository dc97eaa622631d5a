#ifndef SPLINELAB_PERTURB_HPP
#define SPLINELAB_PERTURB_HPP

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "splinelab/chebyshev.hpp"
#include "splinelab/projector.hpp"

namespace splinelab {

/// M_i^p = M_i / w(c_i) with c_i the center of supp M_i.
inline SplineBasis weighted_perturbed_basis(const SplineBasis& classical, const AnalyticFunction& w) {
  std::vector<double> f(classical.count());
  for (std::size_t i = 0; i < f.size(); ++i) {
    auto [a, b] = classical.support(i);
    const double v = w(0.5 * (a + b));
    if (!(v > 0.0)) throw std::invalid_argument("weighted_perturbed_basis: weight must be positive");
    f[i] = 1.0 / v;
  }
  return classical.scaled(BasisKind::perturbed, f);
}

/// Weighted family for dmu = w dx, using the (probability-normalized) density of mu.
inline SplineBasis weighted_perturbed_basis(const SplineBasis& classical, const Measure& mu) {
  std::vector<double> f(classical.count());
  for (std::size_t i = 0; i < f.size(); ++i) {
    auto [a, b] = classical.support(i);
    f[i] = 1.0 / mu.density(0.5 * (a + b));
  }
  return classical.scaled(BasisKind::perturbed, f);
}

struct PerturbationReport {
  double theta_proxy = 0.0;
  std::size_t band_c = 0;
  double norm_c = 0.0;
  double mesh = 0.0;
};

/// Closeness, band and size measures of a perturbed family against the classical one:
///   theta_proxy = max_ij |mu(supp_F M_j^p) <M_i^p, M_j^p>_mu - |supp M_j| <M_i, M_j>|
///   band_c      = smallest C with M_i^p M_j^p = 0 whenever |i - j| >= C
///   norm_c      = max_i ||M_i^p||_inf * mu(supp_F M_i^p)
inline PerturbationReport check_conditions(const SplineBasis& classical, const SplineBasis& perturbed,
                                           const Measure& mu, int samples_per_atom = 8) {
  if (classical.count() != perturbed.count())
    throw std::invalid_argument("check_conditions: bases differ in size");
  const std::size_t m = classical.count();
  PerturbationReport r;
  const auto gp = gram_matrix(perturbed, Normalization::M, perturbed, Normalization::M, mu);
  const auto gc = gram_matrix(classical, Normalization::M, classical, Normalization::M, Measure::lebesgue());
  std::vector<double> mass(m);
  for (std::size_t j = 0; j < m; ++j) {
    auto [a, b] = perturbed.f_support(j);
    mass[j] = mu.mass(a, b);
  }
  const std::size_t band = std::max(gp.bandwidth(), gc.bandwidth());
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i > band ? i - band : 0; j < std::min(m, i + band + 1); ++j)
      r.theta_proxy = std::max(r.theta_proxy,
                               std::abs(mass[j] * gp(i, j) - classical.support_length(j) * gc(i, j)));

  for (std::size_t i = 0; i < m; ++i) {
    auto [a, b] = perturbed.f_support(i);
    for (std::size_t j = i; j < m; ++j) {
      auto [c, d] = perturbed.f_support(j);
      if (std::min(b, d) - std::max(a, c) > 0.0) r.band_c = std::max(r.band_c, j - i + 1);
    }
  }

  std::vector<double> sup(m, 0.0);
  for (double x : sample_points(perturbed.breakpoints(), samples_per_atom))
    for (const auto& v : perturbed.evaluate_all(x)) sup[v.index] = std::max(sup[v.index], std::abs(v.m));
  for (std::size_t i = 0; i < m; ++i) r.norm_c = std::max(r.norm_c, sup[i] * mass[i]);

  r.mesh = mesh_norm(IntervalPartition(perturbed.breakpoints()), mu);
  return r;
}

/// Basis family for compatibility checks: classical, or Chebyshevian with fixed weights.
struct SplineFamily {
  int order = 1;
  std::optional<WeightSystem> weights;

  static SplineFamily classical(int k) { return {k, std::nullopt}; }
  static SplineFamily chebyshev(WeightSystem ws) { return {ws.order(), std::move(ws)}; }

  SplineBasis build(const IntervalPartition& p) const {
    const auto t = knot_sequence(p, order);
    return weights ? build_chebyshev_basis(t, *weights) : build_classical_basis(t);
  }
};

struct CompatibilityReport {
  bool nested = false;
  bool local = false;
  double nested_residual = 0.0; // worst relative L2(mu) residual
  double local_residual = 0.0;
  std::size_t local_count = 0;   // fine functions with supp_F inside I
};

/// Relative L2(mu) distance from f to the range of p.
inline double relative_residual(const Projector& p, const PiecewiseFunction& f) {
  const auto pf = p.project(f);
  const auto breaks = merge_breaks({f.breakpoints, p.basis().breakpoints(), p.measure().breakpoints()});
  double num = 0.0, den = 0.0;
  for_each_node(panel_edges(0.0, 1.0, breaks), default_gauss_points, [&](double x, double w) {
    const double fx = f(x), wd = w * p.measure().density(x);
    num += wd * (fx - pf(x)) * (fx - pf(x));
    den += wd * fx * fx;
  });
  return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

/// Nesting and locality: the coarse space sits inside the fine one, and fine
/// basis functions supported inside I already belong to the coarse space.
inline CompatibilityReport check_compatibility(const IntervalPartition& coarse, const IntervalPartition& fine,
                                               const SplineFamily& family, std::pair<double, double> region,
                                               const Measure& mu = Measure::lebesgue(), double tol = 1e-8) {
  if (!fine.refines(coarse)) throw std::invalid_argument("check_compatibility: fine does not refine coarse");
  const auto [lo, hi] = region;
  if (!(lo <= hi)) throw std::invalid_argument("check_compatibility: empty region");
  auto inner = [&](const IntervalPartition& p) {
    std::vector<double> v;
    for (double x : p.breakpoints())
      if (x > lo && x < hi) v.push_back(x);
    return v;
  };
  if (inner(coarse) != inner(fine))
    throw std::invalid_argument("check_compatibility: partitions differ inside the region");

  const auto cb = family.build(coarse);
  const auto fb = family.build(fine);
  const Projector pf(fb, mu);
  const Projector pc(cb, mu);
  CompatibilityReport r;
  for (std::size_t i = 0; i < cb.count(); ++i)
    r.nested_residual = std::max(r.nested_residual, relative_residual(pf, cb.M_function(i)));
  for (std::size_t i = 0; i < fb.count(); ++i) {
    auto [a, b] = fb.f_support(i);
    if (a < lo || b > hi) continue;
    ++r.local_count;
    r.local_residual = std::max(r.local_residual, relative_residual(pc, fb.M_function(i)));
  }
  r.nested = r.nested_residual <= tol;
  r.local = r.local_residual <= tol;
  return r;
}

} // namespace splinelab

#endif // SPLINELAB_PERTURB_HPP
