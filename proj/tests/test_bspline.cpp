#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "splinelab.hpp"

using namespace splinelab;

TEST(ClassicalBasis, OrderOneIndicators) {
  const auto b = build_classical_basis(knot_sequence(uniform_partition(2), 1));
  ASSERT_EQ(b.count(), 2u);
  EXPECT_DOUBLE_EQ(b.M(0, 0.2), 2.0);
  EXPECT_DOUBLE_EQ(b.M(0, 0.5), 0.0);
  EXPECT_DOUBLE_EQ(b.M(1, 0.5), 2.0);
  EXPECT_DOUBLE_EQ(b.M(1, 1.0), 2.0);
  const auto v = b.evaluate_all(0.7);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].index, 1u);
}

TEST(ClassicalBasis, LinearHat) {
  const auto b = build_classical_basis(knot_sequence(uniform_partition(2), 2));
  EXPECT_DOUBLE_EQ(b.N(1, 0.5), 1.0);
  const auto v = b.evaluate_all(0.25);
  ASSERT_EQ(v.size(), 2u);
  EXPECT_EQ(v[0].index, 0u);
  EXPECT_EQ(v[1].index, 1u);
  EXPECT_DOUBLE_EQ(v[0].n, 0.5);
  EXPECT_DOUBLE_EQ(v[1].n, 0.5);
}

TEST(ClassicalBasis, EndpointValues) {
  for (int k = 1; k <= 5; ++k) {
    const auto b = build_classical_basis(knot_sequence(random_partition(6, 2, 10.0), k));
    const auto v0 = b.evaluate_all(0.0);
    for (const auto& v : v0) EXPECT_DOUBLE_EQ(v.n, v.index == 0 ? 1.0 : 0.0);
    const auto v1 = b.evaluate_all(1.0);
    for (const auto& v : v1) EXPECT_NEAR(v.n, v.index == b.count() - 1 ? 1.0 : 0.0, 1e-15);
  }
}

TEST(ClassicalBasis, MatchesRecursiveDefinition) {
  std::mt19937_64 rng(9);
  for (int k = 1; k <= 5; ++k) {
    const auto t = knot_sequence(random_partition(7, 40 + k, 50.0), k);
    const auto b = build_classical_basis(t);
    for (int s = 0; s < 200; ++s) {
      const double x = s == 0 ? 1.0 : uniform01(rng);
      for (std::size_t i = 0; i < b.count(); ++i)
        EXPECT_NEAR(b.N(i, x), oracle::bspline(t.knots(), i, k, x), 1e-13) << "k=" << k << " i=" << i;
    }
  }
}

TEST(ClassicalBasis, PartitionOfUnityAndBounds) {
  std::mt19937_64 rng(1);
  for (int k = 1; k <= 6; ++k) {
    const auto b = build_classical_basis(knot_sequence(random_partition(15, 100 + k, 200.0), k));
    for (int s = 0; s < 1000; ++s) {
      const double x = uniform01(rng);
      const auto vals = b.evaluate_all(x);
      EXPECT_LE(vals.size(), static_cast<std::size_t>(k));
      double sum = 0.0;
      for (const auto& v : vals) {
        sum += v.n;
        EXPECT_GE(v.m, 0.0);
        EXPECT_LE(v.m, k / b.support_length(v.index) * (1 + 1e-12));
        auto [lo, hi] = b.support(v.index);
        EXPECT_GE(x, lo);
        EXPECT_LE(x, hi);
      }
      EXPECT_NEAR(sum, 1.0, 1e-12);
    }
  }
}

TEST(ClassicalBasis, UnitIntegral) {
  for (int k = 1; k <= 6; ++k) {
    const auto b = build_classical_basis(knot_sequence(random_partition(9, 7 * k, 100.0), k));
    for (std::size_t i = 0; i < b.count(); ++i) {
      auto [lo, hi] = b.support(i);
      EXPECT_NEAR(integrate(b.M_function(i), lo, hi, (k + 1) / 2 + 1), 1.0, 1e-12);
      // zero outside the support
      if (lo > 0.0) {
        EXPECT_EQ(b.M(i, lo * 0.5), 0.0);
      }
      if (hi < 1.0) {
        EXPECT_EQ(b.M(i, 0.5 * (hi + 1.0)), 0.0);
      }
    }
  }
}

TEST(ClassicalBasis, SupportDisjointness) {
  for (int k = 1; k <= 5; ++k) {
    const auto b = build_classical_basis(knot_sequence(random_partition(12, k, 20.0), k));
    for (std::size_t i = 0; i < b.count(); ++i)
      for (std::size_t j = i + static_cast<std::size_t>(k); j < b.count(); ++j)
        EXPECT_LE(b.support(i).second, b.support(j).first);
  }
}

TEST(SplineBasis, Normalizations) {
  const auto t = knot_sequence(random_partition(5, 3, 5.0), 3);
  const auto b = build_classical_basis(t);
  for (std::size_t i = 0; i < b.count(); ++i) {
    EXPECT_DOUBLE_EQ(b.n_scale(i), b.support_length(i) / 3);
    EXPECT_DOUBLE_EQ(b.N(i, 0.4), b.n_scale(i) * b.M(i, 0.4));
  }
  const auto mu = Measure::with_density(AnalyticFunction::one_plus_eps_sin(0.3));
  const auto r = b.renormalized(mu);
  for (std::size_t i = 0; i < b.count(); ++i) {
    auto [lo, hi] = r.f_support(i);
    EXPECT_NEAR(r.n_scale(i), mu.mass(lo, hi) / 3, 1e-15);
    EXPECT_DOUBLE_EQ(r.M(i, 0.4), b.M(i, 0.4));
  }
  EXPECT_EQ(to_string(b.kind()), "classical");
}

TEST(SplineBasis, Errors) {
  const auto b = build_classical_basis(knot_sequence(uniform_partition(3), 2));
  EXPECT_THROW(b.evaluate_all(-0.1), std::out_of_range);
  EXPECT_THROW(b.evaluate_all(1.1), std::out_of_range);
  const std::vector<double> f{1.0};
  EXPECT_THROW(b.scaled(BasisKind::perturbed, f), std::invalid_argument);
  EXPECT_THROW(KnotSequence(2, {0, 0, 0.5, 0.5, 0.5, 1, 1}), std::invalid_argument);
}
