#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "splinelab.hpp"

using namespace splinelab;

namespace {

DeterminantColumn monomial_column(int degree) {
  return {[degree](double s, int d) {
            if (d > degree) return 0.0;
            double c = 1.0;
            for (int r = 0; r < d; ++r) c *= degree - r;
            return c * std::pow(s, degree - d);
          },
          8};
}

WeightSystem sin_weights(int k, double eps) { return WeightSystem::uniform(k, AnalyticFunction::one_plus_eps_sin(eps)); }

WeightSystem random_weights(int k, std::mt19937_64& rng) {
  std::vector<AnalyticFunction> w;
  for (int j = 0; j < k; ++j)
    w.push_back(AnalyticFunction::one_plus_eps_sin(0.4 * uniform01(rng), 1.0 + 2.0 * uniform01(rng),
                                                   6.0 * uniform01(rng)));
  return WeightSystem(k, w);
}

double max_diff(const SplineBasis& a, const SplineBasis& b, const KnotSequence& t) {
  double m = 0.0;
  for (double x : atom_grid(t, 24))
    for (std::size_t i = 0; i < a.count(); ++i) m = std::max(m, std::abs(a.M(i, x) - b.M(i, x)));
  return m;
}

} // namespace

TEST(ConfluentPointSet, Orders) {
  const ConfluentPointSet p({0, 0, 0, 0.5, 1, 1});
  EXPECT_EQ(p.orders(), (std::vector<int>{0, 1, 2, 0, 0, 1}));
  EXPECT_EQ(p.max_order(), 2);
  EXPECT_THROW(ConfluentPointSet({0.5, 0.2}), std::invalid_argument);
}

TEST(ConfluentDeterminant, Examples) {
  const std::vector<DeterminantColumn> cols{monomial_column(0), monomial_column(1)};
  EXPECT_DOUBLE_EQ(confluent_determinant(ConfluentPointSet({0, 1}), cols), 1.0);
  EXPECT_DOUBLE_EQ(confluent_determinant(ConfluentPointSet({0, 0}), cols), 1.0);
}

TEST(ConfluentDeterminant, Errors) {
  std::vector<DeterminantColumn> cols{monomial_column(0), monomial_column(1)};
  EXPECT_THROW(confluent_determinant(ConfluentPointSet({0, 1, 2}), cols), std::invalid_argument);
  cols[1].max_order = 0;
  EXPECT_THROW(confluent_determinant(ConfluentPointSet({0, 0}), cols), std::invalid_argument);
}

TEST(ConfluentDeterminant, MatchesLeibnizOnConfluentRows) {
  const ConfluentPointSet p({0.1, 0.1, 0.4, 0.7, 0.7});
  std::vector<DeterminantColumn> cols;
  for (int c = 0; c < 5; ++c) cols.push_back(monomial_column(c));
  oracle::Matrix a(5, std::vector<double>(5));
  for (int r = 0; r < 5; ++r)
    for (int c = 0; c < 5; ++c) a[r][c] = cols[c].derivative(p.points()[r], p.orders()[r]);
  EXPECT_NEAR(confluent_determinant(p, cols), oracle::leibniz_determinant(a), 1e-15);
}

// Distinct points with columns p*_c = t^(c-1)/(c-1)!: det = c_k * prod_{r<s}(t_s - t_r).
// c_k is measured from a 3-point brute-force determinant per k.
TEST(ConfluentDeterminant, VandermondeConstant) {
  for (int k = 1; k <= 5; ++k) {
    std::vector<DeterminantColumn> cols;
    for (int c = 1; c <= k + 1; ++c) {
      auto m = monomial_column(c - 1);
      const double f = oracle::factorial(c - 1);
      cols.push_back({[m, f](double s, int d) { return m.derivative(s, d) / f; }, 8});
    }
    // c_k from the smallest instance by brute force: points 0, 1, 2, ..., k
    oracle::Matrix a(k + 1, std::vector<double>(k + 1));
    std::vector<double> ref;
    for (int r = 0; r <= k; ++r) ref.push_back(r);
    for (int r = 0; r <= k; ++r)
      for (int c = 0; c <= k; ++c) a[r][c] = cols[c].derivative(ref[r], 0);
    const double ck = oracle::leibniz_determinant(a) / vandermonde_product(ref);
    double expect = 1.0;
    for (int m = 1; m <= k; ++m) expect /= oracle::factorial(m);
    EXPECT_NEAR(ck, expect, 1e-12 * expect);

    std::mt19937_64 rng(k);
    std::vector<double> pts;
    for (int r = 0; r <= k; ++r) pts.push_back(uniform01(rng));
    std::sort(pts.begin(), pts.end());
    EXPECT_NEAR(confluent_determinant(ConfluentPointSet(pts), cols), ck * vandermonde_product(pts),
                1e-12 * std::abs(ck * vandermonde_product(pts)));
    // the library's denominator with unit weights on distinct knots
    if (k >= 1) {
      std::vector<double> kn(static_cast<std::size_t>(k), 0.0);
      kn.insert(kn.end(), pts.begin(), pts.end());
      kn.insert(kn.end(), static_cast<std::size_t>(k), 1.0);
      const KnotSequence t(k, kn);
      const double x = 0.5 * (pts[0] + pts[1]);
      const auto dp = chebyshev_determinants(WeightSystem::unit(k), t, static_cast<std::size_t>(k), x);
      EXPECT_NEAR(dp.denominator, ck * vandermonde_product(pts), 1e-9 * std::abs(ck * vandermonde_product(pts)));
    }
  }
}

TEST(ChebyshevBasis, UnitWeightsReproduceClassical) {
  for (int k = 1; k <= 5; ++k) {
    for (const auto& p : {uniform_partition(6), random_partition(9, 77 + k, 100.0)}) {
      const auto t = knot_sequence(p, k);
      EXPECT_LE(max_diff(build_chebyshev_basis(t, WeightSystem::unit(k)), build_classical_basis(t), t), 1e-8)
          << "k=" << k;
    }
  }
}

TEST(ChebyshevBasis, ConstantWeightsReproduceClassical) {
  const std::vector<double> c{0.7, 1.6, 1.2};
  const auto t = knot_sequence(random_partition(5, 3, 10.0), 3);
  EXPECT_LE(max_diff(build_chebyshev_basis(t, WeightSystem::constants(c)), build_classical_basis(t), t), 1e-9);
}

TEST(ChebyshevBasis, UnitIntegralPositivityAndSupport) {
  std::mt19937_64 rng(3);
  for (int k = 1; k <= 4; ++k) {
    const auto ws = random_weights(k, rng);
    const auto t = knot_sequence(random_partition(6, 10 + k, 20.0), k);
    const auto b = build_chebyshev_basis(t, ws);
    for (std::size_t i = 0; i < b.count(); ++i) {
      auto [lo, hi] = b.support(i);
      EXPECT_NEAR(integrate(b.M_function(i), 0.0, 1.0, 10), 1.0, 1e-10) << "k=" << k << " i=" << i;
      for (int s = 1; s < 20; ++s) EXPECT_GT(b.M(i, lo + (hi - lo) * s / 20.0), 0.0);
      if (lo > 0.0) {
        EXPECT_EQ(b.M(i, 0.5 * lo), 0.0);
      }
      if (hi < 1.0) {
        EXPECT_EQ(b.M(i, 0.5 * (hi + 1.0)), 0.0);
      }
    }
  }
}

TEST(ChebyshevBasis, Errors) {
  const auto t = knot_sequence(uniform_partition(3), 2);
  EXPECT_THROW(build_chebyshev_basis(t, WeightSystem::unit(3)), std::invalid_argument);
}

TEST(CompareToClassical, UnitWeightsAndHalving) {
  const auto t = knot_sequence(uniform_partition(16), 3);
  const auto cl = build_classical_basis(t);
  const auto grid = atom_grid(t, 16);
  for (const auto& r : compare_to_classical(build_chebyshev_basis(t, WeightSystem::unit(3)), cl,
                                            WeightSystem::unit(3), grid)) {
    EXPECT_LE(r.sup_diff, 1e-8);
    EXPECT_TRUE(std::isnan(r.bound_ratio));
  }
  auto sup = [&](double eps) {
    const auto ws = sin_weights(3, eps);
    double m = 0.0;
    for (const auto& r : compare_to_classical(build_chebyshev_basis(t, ws), cl, ws, grid)) m = std::max(m, r.sup_diff);
    return m;
  };
  const double ratio = sup(0.05) / sup(0.1);
  EXPECT_GE(ratio, 0.3);
  EXPECT_LE(ratio, 0.7);
}

TEST(CompareToClassical, BoundRatioStableUnderRefinement) {
  double lo = 1e300, hi = 0.0;
  for (int n : {8, 16, 32, 64}) {
    const auto t = knot_sequence(uniform_partition(n), 3);
    const auto ws = sin_weights(3, 0.1);
    const auto cheb = build_chebyshev_basis(t, ws);
    double m = 0.0;
    for (const auto& r : compare_to_classical(cheb, build_classical_basis(t), ws, atom_grid(t, 12))) {
      m = std::max(m, r.bound_ratio);
      EXPECT_LE(r.sup_scaled, 3.0 * 1.2); // |M_i^w| <= C / |supp|
    }
    lo = std::min(lo, m);
    hi = std::max(hi, m);
  }
  EXPECT_LE(hi / lo, 2.0);
}

TEST(ProofQuantities, UnitWeights) {
  const auto t = knot_sequence(uniform_partition(5), 3);
  const auto p = proof_quantities(t, WeightSystem::unit(3), 2, 0.3);
  EXPECT_NEAR(p.eps, 0.0, 1e-14 * std::abs(p.q));
  EXPECT_NEAR(p.delta, 0.0, 1e-14 * std::abs(p.q));
  EXPECT_THROW(proof_quantities(t, WeightSystem::unit(3), 2, 0.0), std::invalid_argument);
}

TEST(ProofQuantities, Identities) {
  std::mt19937_64 rng(12);
  for (int k = 1; k <= 4; ++k) {
    const auto ws = random_weights(k, rng);
    const auto t = knot_sequence(random_partition(6, k, 10.0), k);
    const auto cl = build_classical_basis(t);
    for (std::size_t i = 0; i < cl.count(); ++i) {
      auto [a, b] = cl.support(i);
      for (int s = 1; s < 8; ++s) {
        const double x = a + (b - a) * s / 8.0;
        const auto p = proof_quantities(t, ws, i, x);
        const double sign = k % 2 ? -1.0 : 1.0;
        EXPECT_NEAR(sign * p.r / p.q, cl.M(i, x), 1e-8 * k / (b - a));
        EXPECT_GE(p.eps, -1e-12 * p.q);
        EXPECT_LE(std::abs(p.r), k / (b - a) * p.q * (1 + 1e-10));
      }
    }
  }
}

// prod_j (min w_j)^j <= D_w / D_poly <= prod_j (max w_j)^j
TEST(ProofQuantities, DenominatorRatioBounds) {
  std::mt19937_64 rng(99);
  for (int k = 1; k <= 4; ++k)
    for (int trial = 0; trial < 50; ++trial) {
      const auto ws = random_weights(k, rng);
      const auto t = knot_sequence(random_partition(5, 1000 * k + trial, 20.0), k);
      const std::size_t i = static_cast<std::size_t>(trial) % t.basis_count();
      auto [a, b] = std::pair{t[i], t[i + k]};
      const double x = 0.5 * (a + b);
      const double dw = chebyshev_determinants(ws, t, i, x).denominator;
      const double dp = chebyshev_determinants(WeightSystem::unit(k), t, i, x).denominator;
      double lo = 1.0, hi = 1.0;
      for (int j = 1; j <= k; ++j) {
        auto [mn, mx] = ws.range(j, a, b, 513);
        lo *= std::pow(mn, j);
        hi *= std::pow(mx, j);
      }
      EXPECT_GE(dw / dp, lo * (1 - 1e-9));
      EXPECT_LE(dw / dp, hi * (1 + 1e-9));
    }
}

TEST(ProofQuantities, EpsilonScalesWithModulus) {
  // eps_k / (q_k * max_j omega(w_j, |supp|)) stays within a factor 2 across refinement
  for (int k = 2; k <= 4; ++k) {
    const auto ws = sin_weights(k, 0.1);
    double lo = 1e300, hi = 0.0;
    for (int n : {8, 16, 32, 64}) {
      const auto t = knot_sequence(uniform_partition(n), k);
      double m = 0.0;
      for (std::size_t i = 0; i < t.basis_count(); ++i) {
        const double a = t[i], b = t[i + k];
        const auto p = proof_quantities(t, ws, i, 0.5 * (a + b));
        m = std::max(m, p.eps / (p.q * ws.max_omega(b - a)));
      }
      lo = std::min(lo, m);
      hi = std::max(hi, m);
    }
    EXPECT_LE(hi / lo, 2.0) << "k=" << k;
  }
}
