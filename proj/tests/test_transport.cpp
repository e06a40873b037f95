#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "plstab/error.hpp"
#include "plstab/experiments.hpp"
#include "plstab/quadrature.hpp"
#include "plstab/transport.hpp"

using namespace plstab;

TEST(Quadrature, AdaptiveSimpsonOnSmoothAndKinked) {
  const auto r = adaptive_simpson([](double x) { return std::sin(x); }, 0.0, M_PI, 1e-12);
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.value, 2.0, 1e-11);
  const auto k = adaptive_simpson([](double x) { return std::abs(x - 0.3); }, 0.0, 1.0, 1e-12);
  EXPECT_NEAR(k.value, 0.5 * (0.09 + 0.49), 1e-11);
}

TEST(Quadrature, BudgetExhaustionIsReported) {
  const auto r = adaptive_simpson([](double x) { return 1.0 / std::sqrt(x + 1e-300); }, 0.0, 1.0,
                                  1e-15, 200);
  EXPECT_FALSE(r.converged);
}

TEST(TransportMap, IdentityOnEqualMarginals) {
  const auto f = random_density(5, 4);
  const TransportMap t(f, f);
  EXPECT_NEAR(t.map(f.quantile(0.3)), f.quantile(0.3), 1e-12);
  const auto lap = laplace_density();
  EXPECT_NEAR(TransportMap(lap, lap).map(0.3), 0.3, 1e-15);
}

TEST(TransportMap, UniformStretch) {
  const TransportMap t(uniform_density(0, 1), uniform_density(0, 2));
  EXPECT_NEAR(t.map(0.25), 0.5, 1e-15);
  EXPECT_NEAR(t.inverse(1.5), 0.75, 1e-15);
  EXPECT_NEAR(t.derivative(0.4), 2.0, 1e-14);
}

TEST(TransportMap, AffineEquivariance) {
  const auto lap = laplace_density();
  const double s = 1.7;
  const double sh = -0.4;
  const TransportMap t(lap, affine_image(lap, s, sh));
  for (double x = -30.0; x <= 30.0; x += 0.37)
    EXPECT_NEAR(t.map(x), s * x + sh, 1e-9 * std::max(1.0, std::abs(x))) << x;
}

TEST(TransportMap, PushforwardAndMonotoneOnRandomPairs) {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const auto f = random_density(2 * seed, 1 + static_cast<int>(seed % 6));
    const auto g = random_density(2 * seed + 1, 1 + static_cast<int>((seed + 3) % 6));
    const TransportMap t(f, g);
    double prev = -kInf;
    for (int i = 1; i < 200; ++i) {
      const double p = i / 200.0;
      const double x = f.quantile(p);
      const double y = t.map(x);
      EXPECT_NEAR(g.cdf(y), p, 1e-9) << seed;
      EXPECT_GE(y, prev);
      prev = y;
      EXPECT_NEAR(t.inverse(y), x, 1e-8 * std::max(1.0, std::abs(x)));
      const double lhs = f.pdf(x);
      const double rhs = g.pdf(y) * t.derivative(x);
      if (lhs > 0.0) EXPECT_NEAR(rhs / lhs, 1.0, 1e-7);
    }
  }
}

TEST(TransportMap, CellsPartitionTheLevels) {
  const TransportMap t(random_density(11, 5), random_density(12, 3));
  const auto cs = t.cells();
  ASSERT_FALSE(cs.empty());
  EXPECT_EQ(cs.front().p_lo, 0.0);
  EXPECT_NEAR(cs.back().p_hi, 1.0, 1e-12);
  for (std::size_t i = 1; i < cs.size(); ++i) EXPECT_EQ(cs[i].p_lo, cs[i - 1].p_hi);
}

TEST(QuadraticCost, Examples) {
  const auto f = random_density(3, 5);
  EXPECT_NEAR(quadratic_cost(f, f), 0.0, 1e-14);
  EXPECT_NEAR(quadratic_cost(uniform_density(0, 1), uniform_density(0, 2)), 1.0 / 3.0, 1e-12);
  const auto t = make_example(ExampleKind::Exa2, 0.1);
  EXPECT_NEAR(quadratic_cost(t.f, t.g), 2.0 * 0.01 / 1.21, 1e-10);
}

TEST(QuadraticCost, MatchesLevelOracle) {
  for (std::uint64_t seed = 1; seed <= 12; ++seed) {
    const auto f = random_density(seed, 3);
    const auto g = random_density(seed + 50, 4);
    EXPECT_NEAR(quadratic_cost(f, g), oracle::quadratic_cost(f, g),
                1e-7 * std::max(1.0, oracle::quadratic_cost(f, g)))
        << seed;
  }
}

TEST(QuadraticCost, PartialRangeIsAdditive) {
  const TransportMap t(random_density(21, 4), random_density(22, 4));
  const double z = t.source().quantile(0.4);
  const double whole = integrate_cost(t, -kInf, kInf, 1e-12).value;
  const double left = integrate_cost(t, -kInf, z, 1e-12).value;
  const double right = integrate_cost(t, z, kInf, 1e-12).value;
  EXPECT_NEAR(left + right, whole, 1e-10);
}

TEST(DeficitIntegral, Examples) {
  const auto f = random_density(8, 4);
  EXPECT_NEAR(pl_deficit_integral(f, f), 0.0, 1e-14);
  const auto t2 = make_example(ExampleKind::Exa2, 0.01);
  const double d2 = pl_deficit_integral(t2.f, t2.g);
  EXPECT_GT(d2, 0.0);
  EXPECT_LE(d2, 0.01);
  const auto t3 = make_example(ExampleKind::Exa3, 0.01);
  const double d3 = pl_deficit_integral(t3.f, t3.g);
  EXPECT_GE(d3, 0.0025);
  EXPECT_LE(d3, 0.04);
  // the uniform core contributes nothing and the two exponential bands 1/3 eps each
  EXPECT_NEAR(d3, 2.0 * 0.01 / 3.0, 1e-10);
}

TEST(DeficitIntegral, MatchesLevelOracle) {
  for (std::uint64_t seed = 1; seed <= 12; ++seed) {
    const auto f = random_density(seed + 7, 2);
    const auto g = random_density(seed + 90, 5);
    const double ref = oracle::deficit(f, g);
    EXPECT_NEAR(pl_deficit_integral(f, g), ref, 1e-7 * std::max(1.0, ref)) << seed;
  }
}

TEST(DeficitIntegrand, Examples) {
  EXPECT_EQ(deficit_integrand(1.0, 0.5), 0.0);
  EXPECT_NEAR(deficit_integrand(4.0, 0.5), 0.25, 1e-15);
  EXPECT_NEAR(deficit_integrand(4.0, 0.3), (0.3 + 0.7 * 4.0) / std::pow(4.0, 0.7) - 1.0, 1e-14);
  EXPECT_THROW(deficit_integrand(0.0, 0.5), Error);
  EXPECT_THROW(deficit_integrand(2.0, 1.0), Error);
}

TEST(DeficitIntegrand, SeriesBranchIsContinuous) {
  for (double a : {0.2, 0.5, 0.8}) {
    for (double t : {1.0 + 1e-9, 1.0 - 1e-6, std::exp(0.0999), std::exp(0.1001), std::exp(-0.0999),
                     std::exp(-0.1001)}) {
      // (alpha + beta t) t^{-beta} - 1 evaluated in long double as reference
      const long double lt = t;
      const long double ref =
          (a + (1.0L - a) * lt) * std::pow(lt, -(1.0L - a)) - 1.0L;
      EXPECT_NEAR(deficit_integrand(t, a), static_cast<double>(ref), 1e-15 + 1e-9 * std::abs(ref));
    }
  }
}

TEST(DeficitIntegrand, NonnegativeByWeightedAmGm) {
  for (double a : {0.1, 0.3, 0.5, 0.9})
    for (double lt = -20.0; lt <= 20.0; lt += 0.05) EXPECT_GE(deficit_integrand(std::exp(lt), a), 0.0);
}

TEST(DerivativeEnergy, FiniteForSmoothPairAndDivergentForExa3) {
  const auto lap = laplace_density();
  const TransportMap smooth(lap, affine_image(lap, 1.2, 0.0));
  EXPECT_FALSE(probe_derivative_energy(smooth).divergent);
  // T' = 1.2 everywhere and the levels below delta on both sides are cut off
  EXPECT_NEAR(derivative_energy(smooth, 1e-3), 0.04 * (1.0 - 2e-3), 1e-9);
  const auto t3 = make_example(ExampleKind::Exa3, 0.01);
  EXPECT_TRUE(probe_derivative_energy(TransportMap(t3.f, t3.g)).divergent);
}

TEST(Align, ProportionalAndShifted) {
  const auto f = laplace_density();
  const auto m = LogConcaveFunction(f.scaled(std::log1p(0.1)));
  const auto a = align(f, m);
  EXPECT_NEAR(a.a, 1.0 / 1.1, 1e-8);
  EXPECT_NEAR(a.b, 0.0, 1e-8);
  EXPECT_NEAR(a.residual, 0.0, 1e-8);

  const auto g = random_density(4, 4);
  const auto shifted = LogConcaveFunction(g.composed_affine(1.0, 3.0));
  const auto s = align(g, shifted);
  EXPECT_NEAR(s.a, 1.0, 1e-7);
  EXPECT_NEAR(s.b, 3.0, 1e-7);
  EXPECT_NEAR(s.residual, 0.0, 1e-7);
}

TEST(Align, NeverWorseThanIdentity) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto f = random_density(seed, 3);
    const auto m = LogConcaveFunction(random_density(seed + 30, 4));
    const auto a = align(f, m);
    EXPECT_LE(a.residual, l1_distance(f, m) + 1e-12) << seed;
    EXPECT_NEAR(a.residual, alignment_residual(f, m, a.a, a.b), 1e-12);
  }
}

TEST(TransportMap, HalfLineSource) {
  // 1/2 e^{-x} on [-ln 2, inf) against Laplace: cdf matching gives T(x) = x on the right half
  const auto f = build_density({-std::log(2.0)}, {0.0}, std::nullopt, -1.0, false);
  const auto lap = laplace_density();
  const TransportMap t(f, lap);
  EXPECT_NEAR(t.map(1.0), 1.0, 1e-12);
  EXPECT_NEAR(lap.cdf(t.map(-0.5)), f.cdf(-0.5), 1e-12);
  EXPECT_NEAR(quadratic_cost(f, lap), oracle::quadratic_cost(f, lap), 1e-7);
}
