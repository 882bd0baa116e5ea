#include <gtest/gtest.h>

#include <cmath>

#include "condest/error.hpp"
#include "condest/testkit.hpp"

using namespace condest;

TEST(Exact, UniformEight) {
  auto d = make_distribution(std::vector<double>(8, 1.0));
  const auto ctx = make_exact_context(d, 1, 1e-9);
  const auto m = exact_s_gamma_w(ctx);
  EXPECT_NEAR(m.s, 7.0 / 8, 1e-12);
  EXPECT_NEAR(m.gamma, 1.0 / 7, 1e-12);
  EXPECT_NEAR(m.w, 1.0, 1e-12);
}

TEST(Exact, PointMassAnchor) {
  auto d = make_distribution({1, 0, 0});
  const auto m = exact_s_gamma_w(make_exact_context(d, 1, 1e-3));
  EXPECT_EQ(m.s, 0.0);
  EXPECT_TRUE(std::isinf(m.gamma));
}

TEST(Exact, MediumElementUsesAcceptance) {
  auto d = make_distribution({0.1, 0.11, 0.2, 0.59});
  const auto ctx = make_exact_context(d, 1, 1e-3);
  const auto m = exact_s_gamma_w(ctx);
  EXPECT_NEAR(m.s, 0.11 * ctx.f[2], 1e-15);
}

TEST(Exact, BetaSmallCases) {
  auto d = make_distribution({1, 1});
  const auto ctx = make_exact_context(d, 1, 1e-3);
  EXPECT_NEAR(exact_expected_beta(ctx, 1.0), 0.5, 1e-12);
  EXPECT_EQ(exact_expected_beta(ctx, 0.0), 0.0);
  const auto big = make_exact_context(make_distribution(std::vector<double>(13, 1.0)), 1, 1e-3);
  EXPECT_THROW(exact_expected_beta(big, 0.5), ValidationError);
}

TEST(Exact, RatioIdentity) {
  for (const auto& w : std::vector<std::vector<double>>{{1, 2, 3, 4, 5}, {1, 1.1, 1.15, 0.3, 7}, {2, 2, 2, 0, 1}}) {
    auto d = make_distribution(w);
    for (Element x = 1; x <= d.size(); ++x) {
      if (d.mass(x) == 0.0) continue;
      const auto ctx = make_exact_context(d, x, 1e-3);
      const auto m = exact_s_gamma_w(ctx);
      for (double a : {0.1, 0.55, 1.0}) {
        EXPECT_NEAR(exact_expected_beta_ratio(ctx, a) * d.mass(x), a * m.s, 1e-12);
      }
    }
  }
}

TEST(Exact, TailProbabilitiesWithinBounds) {
  auto d = make_distribution({1, 1, 1, 1, 1, 1, 1, 1.1, 0.5, 0.7, 3, 1});
  const auto ctx = make_exact_context(d, 1, 1e-3);
  const double mx = d.mass(1);
  const double s = exact_s_gamma_w(ctx).s;
  for (double alpha : {0.2, 0.5, 1.0}) {
    const double e = alpha * s;
    for (double delta : {0.1, 0.3, 0.6, 1.0}) {
      const double bound = std::exp(-delta * delta * e / (4 * mx));
      EXPECT_LE(exact_filtered_tail(ctx, alpha, (1 + delta) * e, true), bound + 1e-12);
      EXPECT_LE(exact_filtered_tail(ctx, alpha, (1 - delta) * e, false), bound + 1e-12);
      EXPECT_LE(exact_filtered_tail(ctx, alpha, (2 + delta) * e, true),
                std::exp(-delta * e / (2 * mx)) + 1e-12);
    }
  }
}

TEST(Wilson, Examples) {
  const auto all = success_rate([](std::uint64_t) { return true; }, 50, 0);
  EXPECT_EQ(all.rate, 1.0);
  const auto w = wilson(500, 1000);
  EXPECT_LT(w.lo, 0.5);
  EXPECT_GT(w.hi, 0.5);
  EXPECT_NEAR(w.hi - w.lo, 0.062, 0.001);
  const auto coin = success_rate([](std::uint64_t s) { return (s * 0x9e3779b97f4a7c15ULL) >> 63; }, 1000, 1);
  EXPECT_LT(coin.lo, 0.5);
  EXPECT_GT(coin.hi, 0.5);
}

TEST(Bounds, LandmarkValues) {
  EXPECT_LT(beta_upper_bound(2.0), 0.9);
  EXPECT_GT(beta_lower_bound(41.0), 0.92);
}
