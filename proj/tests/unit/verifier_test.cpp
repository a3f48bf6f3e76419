#include <array>
#include <cmath>
#include <numbers>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "bot/angles.hpp"
#include "bot/random.hpp"
#include "bot/verifier.hpp"
#include "support/oracles.hpp"

namespace bot {
namespace {

constexpr double kPi = std::numbers::pi;

std::array<double, 6> as_box(const Cuboid& c) { return {c.alpha_lo, c.alpha_hi, c.m1_lo, c.m1_hi, c.m2_lo, c.m2_hi}; }

// Random cuboid with alpha in [0.5, 1), m1 in [0.01, 0.25] and m2 inside the band for every m1.
Cuboid random_cuboid(Rng& rng) {
  Cuboid c;
  const double a0 = 0.5 + 0.49 * uniform01(rng);
  c.alpha_lo = a0;
  c.alpha_hi = std::min(a0 + 0.1 * uniform01(rng), 0.999);
  const double m0 = 0.01 + 0.2 * uniform01(rng);
  c.m1_lo = m0;
  c.m1_hi = std::min(m0 + 0.05 * uniform01(rng), 0.25);
  const double lo = 0.5 - c.m1_lo;
  const double hi = 1.0 - 2.0 * c.m1_hi;
  const double s = lo + (hi - lo) * uniform01(rng);
  c.m2_lo = s;
  c.m2_hi = s + (hi - s) * uniform01(rng);
  return c;
}

TEST(Gamma, ZeroAlphaConstants) {
  for (double m1 : {0.1, 0.2, 0.3})
    for (double m2 : {0.1, 0.3, 0.5}) {
      EXPECT_NEAR(gamma(0.0, m1, m2), 2.0 * kPi / 3.0, 1e-12);
      EXPECT_NEAR(gamma2(0.0, m1, m2), kPi / 3.0, 1e-12);
    }
}

TEST(Gamma, ClosesAtAlphaOne) {
  for (double m1 : {0.05, 0.2})
    for (double m2 : {0.3, 0.6}) {
      EXPECT_NEAR(gamma2(1.0, m1, m2), 0.0, 1e-12);
      EXPECT_NEAR(gamma1(1.0, m1, m2), 0.0, 1e-12);
    }
}

TEST(Gamma, PositiveAtHalf) {
  Rng rng(3);
  for (int i = 0; i < 200; ++i) {
    const double m1 = 0.01 + 0.9 * uniform01(rng);
    const double m2 = (1.0 - m1) * (0.01 + 0.98 * uniform01(rng));
    EXPECT_GT(gamma(0.5, m1, m2), 0.0);
  }
}

TEST(Gamma, SplitsIntoBothHalves) {
  for (int ia = 0; ia <= 10; ++ia)
    for (int i = 1; i < 10; ++i)
      for (int j = 1; j < 10; ++j) {
        const double alpha = ia / 10.0;
        const double m1 = i / 10.0;
        const double m2 = (1.0 - m1) * j / 10.0;
        const double m3 = 1.0 - m1 - m2;
        const double g = gamma(alpha, m1, m2);
        EXPECT_NEAR(gamma1(alpha, m1, m2) + gamma2(alpha, m1, m2), g, 1e-12);
        EXPECT_NEAR(gamma1(alpha, m3, m2) + gamma2(alpha, m3, m2), g, 1e-12);
      }
}

TEST(Gamma, RejectsMassesOffSimplex) {
  EXPECT_THROW(gamma(0.5, 0.0, 0.5), std::domain_error);
  EXPECT_THROW(gamma1(0.5, 0.6, 0.4), std::domain_error);
  EXPECT_THROW(gamma2(0.5, 0.3, -0.1), std::domain_error);
}

TEST(LowerBound, PointCuboidIsExact) {
  Rng rng(11);
  for (int i = 0; i < 100; ++i) {
    const Cuboid box = random_cuboid(rng);
    Cuboid p{box.alpha_lo, box.alpha_lo, box.m1_lo, box.m1_lo, box.m2_lo, box.m2_lo};
    EXPECT_NEAR(lower_bound_gamma2(p, 0.0), gamma2(p.alpha_lo, p.m1_lo, p.m2_lo), 1e-12);
  }
}

TEST(LowerBound, BelowSampledMinimum) {
  Rng rng(12);
  for (int i = 0; i < 200; ++i) {
    const Cuboid c = random_cuboid(rng);
    const double bound = lower_bound_gamma2(c);
    // 5^3 lattice including faces, plus the interior samples below
    EXPECT_LE(bound, oracle::sampled_min_gamma2(as_box(c), 5, false) + 1e-15);
    for (int s = 0; s < 100; ++s) {
      const double a = c.alpha_lo + (c.alpha_hi - c.alpha_lo) * uniform01(rng);
      const double m1 = c.m1_lo + (c.m1_hi - c.m1_lo) * uniform01(rng);
      const double m2 = c.m2_lo + (c.m2_hi - c.m2_lo) * uniform01(rng);
      ASSERT_LE(bound, oracle::ref_gamma2(a, m1, m2) + 1e-15);
    }
  }
}

TEST(LowerBound, TightensUnderRefinement) {
  Rng rng(13);
  for (int i = 0; i < 200; ++i) {
    const Cuboid c = random_cuboid(rng);
    const double parent = lower_bound_gamma2(c);
    for (const Cuboid& child : c.split()) EXPECT_GE(lower_bound_gamma2(child), parent);
  }
}

TEST(LowerBound, RejectsCuboidsOutsideRegion) {
  EXPECT_THROW(lower_bound_gamma2({0.4, 0.6, 0.1, 0.2, 0.4, 0.5}), std::domain_error);
  EXPECT_THROW(lower_bound_gamma2({0.6, 0.7, 0.1, 0.3, 0.4, 0.5}), std::domain_error);
  EXPECT_THROW(lower_bound_gamma2({0.6, 0.7, 0.0, 0.2, 0.4, 0.5}), std::domain_error);
  EXPECT_THROW(lower_bound_gamma2({0.6, 0.7, 0.1, 0.2, 0.2, 0.5}), std::domain_error);
  EXPECT_THROW(lower_bound_gamma2({0.7, 0.6, 0.1, 0.2, 0.4, 0.5}), std::domain_error);
}

TEST(Cuboid, SplitTilesParent) {
  const Cuboid c{0.5, 0.9, 0.05, 0.25, 0.3, 0.8};
  const auto kids = c.split();
  ASSERT_EQ(kids.size(), 8u);
  double volume = 0.0;
  for (const auto& k : kids) {
    volume += (k.alpha_hi - k.alpha_lo) * (k.m1_hi - k.m1_lo) * (k.m2_hi - k.m2_lo);
    EXPECT_GE(k.alpha_lo, c.alpha_lo);
    EXPECT_LE(k.m2_hi, c.m2_hi);
  }
  EXPECT_NEAR(volume, (c.alpha_hi - c.alpha_lo) * (c.m1_hi - c.m1_lo) * (c.m2_hi - c.m2_lo), 1e-15);
  EXPECT_EQ(kids[0].alpha_hi, 0.7);
  EXPECT_EQ(kids[1].alpha_lo, 0.7);
  EXPECT_EQ(kids[2].m1_lo, 0.15);
  EXPECT_EQ(kids[4].m2_lo, 0.55);
}

TEST(Cuboid, BandMembership) {
  EXPECT_TRUE((Cuboid{0.5, 0.6, 0.1, 0.2, 0.25, 0.29}).outside_band());
  EXPECT_TRUE((Cuboid{0.5, 0.6, 0.1, 0.2, 0.81, 0.9}).outside_band());
  EXPECT_FALSE((Cuboid{0.5, 0.6, 0.1, 0.2, 0.25, 0.35}).outside_band());
  const Cuboid clipped = Cuboid{0.5, 0.6, 0.1, 0.2, 0.25, 0.9}.clipped_to_band();
  EXPECT_DOUBLE_EQ(clipped.m2_lo, 0.3);
  EXPECT_DOUBLE_EQ(clipped.m2_hi, 0.8);
  EXPECT_EQ(clipped.alpha_hi, 0.6);
}

TEST(Cuboid, ClippingKeepsInBandPoints) {
  Rng rng(21);
  const Cuboid c = Cuboid{0.5, 0.6, 0.05, 0.25, 0.25, 0.9}.clipped_to_band();
  for (int i = 0; i < 10000; ++i) {
    const double m1 = 0.05 + 0.2 * uniform01(rng);
    const double m2 = 0.5 - m1 + (0.5 - m1) * uniform01(rng);
    if (m2 > 1.0 - 2.0 * m1) continue;
    ASSERT_GE(m2, c.m2_lo);
    ASSERT_LE(m2, c.m2_hi);
  }
}

TEST(VerifyRegion, CertifiesCoarseSetting) {
  const VerificationReport r = verify_region(1e-2, 1e-2, 1e-4);
  EXPECT_TRUE(r.all_positive);
  EXPECT_GT(r.min_lower_bound, r.threshold);
  EXPECT_GT(r.cuboids_processed, 1);
  EXPECT_FALSE(r.failing.has_value());
  EXPECT_EQ(r.eps, 1e-2);
  EXPECT_EQ(r.delta, 1e-2);
}

TEST(VerifyRegion, SampledRegionStaysAboveThreshold) {
  Rng rng(31);
  for (int i = 0; i < 20000; ++i) {
    const double a = 0.5 + (0.99 - 0.5) * uniform01(rng);
    const double m1 = 0.01 + 0.24 * uniform01(rng);
    const double m2 = 0.5 - m1 + (0.5 - m1) * uniform01(rng);
    ASSERT_GT(oracle::ref_gamma2(a, m1, m2), 1e-4) << a << ' ' << m1 << ' ' << m2;
  }
}

TEST(VerifyRegion, ImpossibleThresholdFailsFast) {
  const VerificationReport r = verify_region(1e-2, 1e-2, kPi, 6);
  EXPECT_FALSE(r.all_positive);
  ASSERT_TRUE(r.failing.has_value());
  EXPECT_LE(r.failing_bound, kPi);
  EXPECT_LT(r.wall_seconds, 10.0);
}

TEST(VerifyRegion, Deterministic) {
  const VerificationReport a = verify_region(2e-2, 2e-2, 1e-4, 40, 1);
  const VerificationReport b = verify_region(2e-2, 2e-2, 1e-4, 40, 3);
  EXPECT_EQ(a.cuboids_processed, b.cuboids_processed);
  EXPECT_EQ(a.leaves, b.leaves);
  EXPECT_EQ(a.max_depth, b.max_depth);
  EXPECT_EQ(a.min_lower_bound, b.min_lower_bound);
}

TEST(VerifyRegion, RejectsNonPositiveParameters) {
  EXPECT_THROW(verify_region(0.0, 1e-2), std::invalid_argument);
  EXPECT_THROW(verify_region(1e-2, -1.0), std::invalid_argument);
  EXPECT_THROW(verify_region(1e-2, 1e-2, 0.0), std::invalid_argument);
}

TEST(VerifyRegion, ReportJson) {
  const VerificationReport r = verify_region(1e-2, 1e-2, kPi, 2);
  const nlohmann::json j = to_json(r);
  EXPECT_EQ(j.at("all_positive"), false);
  EXPECT_TRUE(j.contains("failing_cuboid"));
  EXPECT_EQ(j.at("cuboids_processed").get<long long>(), r.cuboids_processed);
}

TEST(Audit, PremisesHold) {
  const AuditReport r = monotonicity_audit(100);
  EXPECT_TRUE(r.ok()) << (r.violations.empty() ? "" : r.violations.front());
  EXPECT_GT(r.checks, 10000);
}

TEST(Audit, FDecreasingInK) {
  double prev = f_angle(0.7, 1e-4);
  for (int i = 1; i < 10000; ++i) {
    const double k = 1e-4 + (1.0 - 2e-4) * i / 9999.0;
    const double v = f_angle(0.7, k);
    ASSERT_LT(v, prev) << k;
    prev = v;
  }
}

TEST(Audit, HDecreasingInAlpha) {
  double prev = h_angle(0.0, 0.3);
  for (int i = 1; i <= 1000; ++i) {
    const double v = h_angle(i / 1000.0, 0.3);
    ASSERT_LT(v, prev);
    prev = v;
  }
}

}  // namespace
}  // namespace bot
