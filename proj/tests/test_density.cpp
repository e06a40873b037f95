#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "plstab/density.hpp"
#include "plstab/error.hpp"
#include "plstab/experiments.hpp"
#include "plstab/numerics.hpp"

using namespace plstab;

namespace {

LogConcaveDensity uniform01() { return uniform_density(0.0, 1.0); }

// 1/2 e^{-x} on [-ln 2, inf): the extremal density of the median-mean bound
LogConcaveDensity phi() {
  return build_density({-std::numbers::ln2}, {0.0}, std::nullopt, -1.0, false);
}

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorKind::ParseError;
}

}  // namespace

TEST(Numerics, Expm1RatioSmallBranch) {
  EXPECT_DOUBLE_EQ(numerics::expm1_ratio(0.0), 1.0);
  EXPECT_NEAR(numerics::expm1_ratio(1e-9), 1.0 + 5e-10, 1e-18);
  EXPECT_NEAR(numerics::expm1_ratio(1.0), std::expm1(1.0), 1e-15);
}

TEST(Numerics, Log1pRatio) {
  EXPECT_DOUBLE_EQ(numerics::log1p_ratio(0.0), 1.0);
  EXPECT_NEAR(numerics::log1p_ratio(1e-10), 1.0 - 5e-11, 1e-18);
  EXPECT_NEAR(numerics::log1p_ratio(3.0), std::log(4.0) / 3.0, 1e-15);
}

TEST(Numerics, DecayingMomentsMatchGammaIntegrals) {
  // int_0^inf t^k e^{-2t} = k! / 2^{k+1}
  const auto j = numerics::decaying_moments(2.0, kInf, 4);
  const double expect[] = {0.5, 0.25, 0.25, 0.375, 0.75};
  for (int k = 0; k <= 4; ++k) EXPECT_NEAR(j[k], expect[k], 1e-15);
  // finite length against a fine trapezoid
  const auto jf = numerics::decaying_moments(0.7, 3.0, 3);
  for (int k = 0; k <= 3; ++k) {
    const double ref = oracle::trapezoid(
        [&](double t) { return std::pow(t, k) * std::exp(-0.7 * t); }, 0.0, 3.0, 200000);
    EXPECT_NEAR(jf[k], ref, 1e-9) << k;
  }
  // lambda = 0 is the plain power integral
  const auto j0 = numerics::decaying_moments(0.0, 2.0, 2);
  EXPECT_NEAR(j0[2], 8.0 / 3.0, 1e-14);
}

TEST(Build, UniformHasUnitMass) {
  const auto d = build_density({0.0, 1.0}, {0.0, 0.0}, std::nullopt, std::nullopt, false);
  EXPECT_NEAR(d.mass(), 1.0, 1e-15);
}

TEST(Build, LaplaceHasUnitMass) {
  const auto d = build_density({0.0}, {std::log(0.5)}, 1.0, -1.0, false);
  EXPECT_NEAR(d.mass(), 1.0, 1e-15);
}

TEST(Build, RejectsInvalidShapes) {
  EXPECT_EQ(kind_of([] { build_function({0, 1, 2}, {0, 0, 1}); }), ErrorKind::ConcavityViolated);
  EXPECT_EQ(kind_of([] { build_function({1, 0}, {0, 0}); }), ErrorKind::UnsortedKnots);
  EXPECT_EQ(kind_of([] { build_function({0, 1}, {0}); }), ErrorKind::LengthMismatch);
  EXPECT_EQ(kind_of([] { build_function({}, {}); }), ErrorKind::EmptyInput);
  EXPECT_EQ(kind_of([] { build_function({0, 1}, {0, 0}, -1.0); }), ErrorKind::InfiniteMass);
  EXPECT_EQ(kind_of([] { build_function({0, 1}, {0, 0}, std::nullopt, 0.5); }),
            ErrorKind::InfiniteMass);
  EXPECT_EQ(kind_of([] { build_function({0}, {0}); }), ErrorKind::ZeroMass);
  EXPECT_EQ(kind_of([] { build_density({0, 2}, {0, 0}, std::nullopt, std::nullopt, false); }),
            ErrorKind::NotNormalized);
  EXPECT_EQ(kind_of([] { build_function({0, 1}, {0, NAN}); }), ErrorKind::NonfiniteValue);
}

TEST(Build, TailSlopeMustDominateChords) {
  // a left tail flatter than the first chord breaks concavity
  EXPECT_EQ(kind_of([] { build_function({0, 1}, {0, 2}, 1.0); }), ErrorKind::ConcavityViolated);
}

TEST(Build, SingleKnotWithOneTail) {
  const auto d = build_density({0.0}, {0.0}, std::nullopt, -2.0, true);
  EXPECT_NEAR(d.pdf(0.5), 2.0 * std::exp(-1.0), 1e-15);
  EXPECT_EQ(d.pdf(-0.1), 0.0);
  EXPECT_NEAR(d.quantile(0.5), std::log(2.0) / 2.0, 1e-15);
}

TEST(Build, NormalizeShiftsLogvals) {
  const auto d = build_density({0.0, 2.0}, {1.0, 1.0}, std::nullopt, std::nullopt, true);
  EXPECT_NEAR(d.mass(), 1.0, 1e-15);
  EXPECT_NEAR(d.logvals()[0], -std::log(2.0), 1e-15);
}

TEST(Evaluate, LaplaceValues) {
  const auto d = laplace_density();
  EXPECT_NEAR(d.pdf(0.0), 0.5, 1e-15);
  EXPECT_NEAR(d.cdf(0.0), 0.5, 1e-15);
  EXPECT_NEAR(d.quantile(0.75), std::numbers::ln2, 1e-15);
  EXPECT_NEAR(d.quantile(0.25), -std::numbers::ln2, 1e-15);
  EXPECT_EQ(kind_of([&] { d.quantile(0.0); }), ErrorKind::QuantileOutOfRange);
  EXPECT_EQ(kind_of([&] { d.quantile(1.0); }), ErrorKind::QuantileOutOfRange);
}

TEST(Evaluate, FarTailQuantilesStayAccurate) {
  const auto d = laplace_density();
  // sf(x) = e^{-x}/2
  EXPECT_NEAR(d.quantile_upper(1e-300), -std::log(2e-300), 1e-12);
  // exp of an argument near -600 carries ~600 ulp of relative error
  EXPECT_NEAR(d.sf(600.0), 0.5 * std::exp(-600.0), 1e-12 * 0.5 * std::exp(-600.0));
}

TEST(Evaluate, SmallSlopePieceInvertsStably) {
  const auto d = build_density({0.0, 1.0}, {0.0, 1e-12}, std::nullopt, std::nullopt, true);
  for (double p : {1e-9, 0.3, 0.5, 0.9, 1.0 - 1e-9}) EXPECT_NEAR(d.cdf(d.quantile(p)), p, 1e-15);
}

TEST(Evaluate, QuantileInvertsCdfOnRandomDensities) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto d = random_density(seed, 1 + static_cast<int>(seed % 6));
    SeededStream rng(seed + 100);
    const double lo = d.quantile(1e-6);
    const double hi = d.quantile(1.0 - 1e-6);
    for (int i = 0; i < 1000; ++i) {
      const double x = rng.uniform(lo, hi);
      EXPECT_NEAR(d.quantile(d.cdf(x)), x, 1e-9 * std::max(1.0, std::abs(x))) << seed;
    }
  }
}

TEST(Stats, Laplace) {
  const auto s = stats(laplace_density());
  EXPECT_NEAR(s.mean, 0.0, 1e-15);
  EXPECT_NEAR(s.median, 0.0, 1e-15);
  EXPECT_NEAR(s.median_height, 0.5, 1e-15);
  EXPECT_NEAR(s.second_moment, 2.0, 1e-14);
}

TEST(Stats, ExtremalDensityAttainsMedianMeanBound) {
  const auto s = stats(phi());
  EXPECT_NEAR(s.median, 0.0, 1e-15);
  EXPECT_NEAR(s.mean, 1.0 - std::numbers::ln2, 1e-15);
  EXPECT_NEAR(s.median_height * std::abs(s.median - s.mean), std::log(std::sqrt(std::exp(1.0) / 2.0)),
              1e-12);
}

TEST(Stats, Uniform) {
  const auto s = stats(uniform01());
  EXPECT_NEAR(s.mean, 0.5, 1e-15);
  EXPECT_NEAR(s.median, 0.5, 1e-15);
  EXPECT_NEAR(s.median_height, 1.0, 1e-15);
}

TEST(AffineImage, TranslationAndContraction) {
  const auto lap = laplace_density();
  EXPECT_NEAR(affine_image(lap, 1.0, 3.0).pdf(3.0), 0.5, 1e-15);
  EXPECT_NEAR(affine_image(lap, 1.0 / 1.1, 0.0).pdf(0.0), 0.55, 1e-15);
  EXPECT_EQ(kind_of([&] { affine_image(lap, 0.0, 1.0); }), ErrorKind::NonpositiveScale);
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto d = affine_image(random_density(seed, 4), 0.37 * static_cast<double>(seed), -1.5);
    EXPECT_NEAR(d.mass(), 1.0, 1e-9);
  }
}

TEST(L1Distance, Examples) {
  EXPECT_EQ(l1_distance(laplace_density(), laplace_density()), 0.0);
  EXPECT_NEAR(l1_distance(uniform01(), uniform_density(0.0, 2.0)), 1.0, 1e-15);
  const auto t = make_example(ExampleKind::Exa3, 0.01);
  EXPECT_NEAR(l1_distance(t.f, t.g), 0.04 / std::exp(1.0), 1e-12);
}

TEST(L1Distance, MetricOnSeededTriples) {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const auto a = random_density(3 * seed, 3);
    const auto b = random_density(3 * seed + 1, 4);
    const auto c = random_density(3 * seed + 2, 5);
    EXPECT_EQ(l1_distance(a, b), l1_distance(b, a));
    EXPECT_LE(l1_distance(a, c), l1_distance(a, b) + l1_distance(b, c) + 1e-9);
    EXPECT_LE(l1_distance(a, b), 2.0 + 1e-12);
  }
}

TEST(Hull, ConcaveChainIsReproduced) {
  const std::vector<HullPoint> pts{{0, 0}, {1, 1}, {2, 1.5}, {3, 1.6}};
  const auto h = log_concave_hull(pts);
  ASSERT_EQ(h.knots().size(), 4u);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(h.logvals()[i], pts[i].log_value);
}

TEST(Hull, TwoBoxesBecomeOne) {
  const std::vector<HullPoint> pts{{0, 0}, {1, 0}, {2, 0}, {3, 0}};
  const auto h = log_concave_hull(pts);
  EXPECT_EQ(h.support_lo(), 0.0);
  EXPECT_EQ(h.support_hi(), 3.0);
  EXPECT_NEAR(h.mass(), 3.0, 1e-15);
  EXPECT_EQ(h.value(1.5), 1.0);
}

TEST(Hull, DominatedPointIsDropped) {
  const std::vector<HullPoint> pts{{0, 0}, {1, 1}, {2, 0}, {1, 0}};
  const auto h = log_concave_hull(pts);
  ASSERT_EQ(h.knots().size(), 3u);
  EXPECT_EQ(h.logvals()[1], 1.0);
  EXPECT_EQ(kind_of([] { log_concave_hull({}); }), ErrorKind::EmptyInput);
}

TEST(Hull, IdempotentOnRandomDensities) {
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const auto d = random_density(seed, 5);
    std::vector<HullPoint> pts;
    for (std::size_t i = 0; i < d.knots().size(); ++i) pts.push_back({d.knots()[i], d.logvals()[i]});
    const auto h = log_concave_hull(pts, d.left_tail_slope(), d.right_tail_slope());
    EXPECT_TRUE(h == d) << seed;
    std::vector<HullPoint> again;
    for (std::size_t i = 0; i < h.knots().size(); ++i)
      again.push_back({h.knots()[i], h.logvals()[i]});
    EXPECT_TRUE(log_concave_hull(again, h.left_tail_slope(), h.right_tail_slope()) == h);
  }
}

TEST(RandomDensity, ContractAndDeterminism) {
  const auto a = random_density(1, 5);
  const auto b = random_density(1, 5);
  const auto c = random_density(2, 5);
  EXPECT_NEAR(a.mass(), 1.0, 1e-9);
  EXPECT_TRUE(a == b);
  EXPECT_FALSE(a == c);
  EXPECT_EQ(kind_of([] { random_density(1, 0); }), ErrorKind::InvalidArgument);
}

TEST(RandomDensity, BothTailOptionsOccur) {
  int left = 0;
  int right = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const auto d = random_density(seed, 3);
    left += d.left_tail_slope() ? 1 : 0;
    right += d.right_tail_slope() ? 1 : 0;
  }
  EXPECT_GT(left, 25);
  EXPECT_LT(left, 75);
  EXPECT_GT(right, 25);
  EXPECT_LT(right, 75);
}

TEST(Property, SingleCrossingAgainstExponentials) {
  // {t : h(t) >= a b^t} is an interval because ln h - t ln b is concave
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    const auto d = random_density(seed, 5);
    SeededStream rng(seed * 7);
    const double lo = d.quantile(1e-4);
    const double hi = d.quantile(1.0 - 1e-4);
    for (int trial = 0; trial < 10; ++trial) {
      const double log_a = std::log(d.pdf(d.quantile(rng.uniform(0.1, 0.9)))) - rng.uniform(0, 1);
      const double log_b = rng.uniform(-2.0, 2.0);
      int runs = 0;
      bool inside = false;
      for (int i = 0; i <= 2000; ++i) {
        const double t = lo + (hi - lo) * i / 2000.0;
        const bool above = d.log_value(t) >= log_a + t * log_b;
        if (above && !inside) ++runs;
        inside = above;
      }
      EXPECT_LE(runs, 1) << seed;
    }
  }
}

TEST(Property, ClosedFormsMatchTrapezoidOracle) {
  for (std::uint64_t seed = 1; seed <= 25; ++seed) {
    const auto d = random_density(seed, 1 + static_cast<int>(seed % 6));
    const auto s = stats(d);
    EXPECT_NEAR(d.mass(), oracle::mass(d), 1e-7);
    EXPECT_NEAR(s.mean, oracle::moment(d, 1), 1e-7);
    EXPECT_NEAR(s.second_moment, oracle::moment(d, 2), 1e-7);
    EXPECT_NEAR(s.median, oracle::median(d), 1e-7);
  }
}
