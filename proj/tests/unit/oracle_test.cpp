#include <gtest/gtest.h>

#include <algorithm>
#include <map>

#include "condest/dist.hpp"
#include "condest/error.hpp"
#include "condest/oracle.hpp"

using namespace condest;

TEST(Oracle, ExplicitConditioning) {
  auto d = make_distribution({1, 2, 3, 4});
  OracleSession s(d, 1);
  int threes = 0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    auto y = s.sample_conditional(Explicit{{1, 3}});
    ASSERT_TRUE(y);
    ASSERT_TRUE(*y == 1 || *y == 3);
    threes += *y == 3;
  }
  EXPECT_NEAR(threes / double(n), 0.75, 0.015);
  EXPECT_EQ(s.total(), std::uint64_t(n));
}

TEST(Oracle, ZeroMassPolicies) {
  auto d = make_distribution({1, 0, 0});
  OracleSession err(d, 1);
  EXPECT_FALSE(err.sample_conditional(Pair{2, 3}).has_value());
  EXPECT_EQ(err.zero_mass_requests(), 1u);

  OracleSession uni(d, 1, ZeroPolicy::UniformFallback);
  std::map<Element, int> seen;
  for (int i = 0; i < 200; ++i) seen[*uni.sample_conditional(Pair{2, 3})]++;
  EXPECT_EQ(seen.size(), 2u);
}

TEST(Oracle, FilterDrawsMatchConditionalMass) {
  auto d = gen_named(parse_family("zipf:1"), 40, 0);
  OracleSession s(d, 3);
  FilterUnion f{12345, 0.3, 7, {}};
  const double total = s.conditional_mass(f);
  std::map<Element, int> counts;
  const int n = 40000;
  for (int i = 0; i < n; ++i) {
    auto y = s.sample_conditional(f);
    ASSERT_TRUE(y);
    ASSERT_TRUE(filter_contains(f, d, *y));
    counts[*y]++;
  }
  for (const auto& [y, c] : counts) {
    const double p = d.mass(y) / total;
    EXPECT_NEAR(c / double(n), p, 5 * std::sqrt(p * (1 - p) / n) + 1e-3) << "y=" << y;
  }
}

TEST(Oracle, FreshFiltersAreExactToo) {
  // One draw per filter exercises the rejection path only.
  auto d = make_distribution({4, 1, 1, 1, 1});
  OracleSession s(d, 11);
  int anchors = 0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    FilterUnion f{s.fresh_seed(), 1.0, 2, {}};
    anchors += *s.sample_conditional(f) == 2;
  }
  EXPECT_NEAR(anchors / double(n), 0.125, 0.01);
}

TEST(Oracle, HashFilterIsStable) {
  auto d = make_distribution(std::vector<double>(10000, 1.0));
  FilterUnion f{42, 0.5, 1, {9}};
  const FilterUnion g{42, 0.5, 1, {}};
  for (Element y = 2; y < 100; ++y) {
    if (y != 9) EXPECT_EQ(filter_contains(f, d, y), filter_contains(g, d, y));
  }
  EXPECT_TRUE(filter_contains(f, d, 1));
  EXPECT_TRUE(filter_contains(f, d, 9));
  int in = 0;
  for (Element y = 1; y <= 10000; ++y) in += filter_contains(f, d, y);
  EXPECT_NEAR(in / 10000.0, 0.5, 0.03);
}

TEST(Oracle, SmallAlphaFilterDensityAndDraws) {
  auto d = make_distribution(std::vector<double>(20000, 1.0));
  FilterUnion f{777, 0.01, 5, {}};
  const auto members = filter_support_members(f, d);
  EXPECT_NEAR(members.size() / 20000.0, 0.01, 0.003);
  EXPECT_TRUE(std::is_sorted(members.begin(), members.end()));
  for (Element y : members) EXPECT_TRUE(filter_contains(f, d, y));
  OracleSession s(d, 4);
  EXPECT_NEAR(s.conditional_mass(f) * 20000.0, double(members.size() + !std::binary_search(members.begin(), members.end(), Element{5})), 1e-6);
  for (int i = 0; i < 200; ++i) {
    auto y = s.sample_conditional(f);
    ASSERT_TRUE(y);
    EXPECT_TRUE(filter_contains(f, d, *y));
  }
}

TEST(Oracle, PhasesPartitionCounts) {
  auto d = make_distribution({1, 1});
  OracleSession s(d, 1);
  s.sample();
  {
    auto ph = s.phase("a");
    s.sample();
    s.sample();
    EXPECT_THROW((void)s.phase("b"), std::logic_error);
  }
  {
    auto ph = s.phase("b");
    (void)s.count_pair(1, 2, 10);
  }
  EXPECT_EQ(s.counters().at("unphased"), 1u);
  EXPECT_EQ(s.counters().at("a"), 2u);
  EXPECT_EQ(s.counters().at("b"), 10u);
  EXPECT_EQ(s.total(), 13u);
}

TEST(Oracle, BudgetStopsBeforeDrawing) {
  auto d = make_distribution({1, 1});
  auto budget = std::make_shared<SampleBudget>(SampleBudget{5, 0});
  OracleSession a(d, 1);
  OracleSession b(d, 2);
  a.attach_budget(budget);
  b.attach_budget(budget);
  for (int i = 0; i < 3; ++i) a.sample();
  b.sample();
  b.sample();
  EXPECT_THROW(a.sample(), BudgetExhausted);
  EXPECT_EQ(budget->used, 5u);
  EXPECT_EQ(a.total(), 3u);
}

TEST(Oracle, PairCountsBatchedAndUnbatchedAgree) {
  auto d = make_distribution({1, 3});
  OracleSession batched(d, 1);
  OracleSession looped(d, 2);
  looped.set_pair_batching(false);
  double sb = 0;
  double sl = 0;
  for (int i = 0; i < 200; ++i) {
    sb += double(*batched.count_pair(1, 2, 100));
    sl += double(*looped.count_pair(1, 2, 100));
  }
  EXPECT_NEAR(sb / 20000, 0.75, 0.015);
  EXPECT_NEAR(sl / 20000, 0.75, 0.015);
  EXPECT_EQ(batched.total(), looped.total());
}

TEST(Oracle, SameSeedSameStream) {
  auto d = gen_named(parse_family("zipf:1"), 30, 0);
  OracleSession a(d, 77);
  OracleSession b(d, 77);
  for (int i = 0; i < 100; ++i) {
    FilterUnion f{a.fresh_seed(), 0.2, 3, {}};
    FilterUnion g{b.fresh_seed(), 0.2, 3, {}};
    EXPECT_EQ(a.sample_conditional(f), b.sample_conditional(g));
  }
}
