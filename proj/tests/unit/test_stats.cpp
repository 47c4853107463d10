#include <gtest/gtest.h>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>

#include "fixtures.hpp"
#include "gliomics/error.hpp"
#include "gliomics/stats.hpp"

using namespace gliomics;

namespace {

const GroupSamples kFixture{{1, 2, 3}, {4, 5, 6}, {7, 8, 9}};

/// H from first principles: pooled ranks by counting, no tie handling.
double h_oracle(const GroupSamples& g) {
  std::vector<double> all;
  for (const auto& grp : g) all.insert(all.end(), grp.begin(), grp.end());
  const double n = static_cast<double>(all.size());
  double s = 0;
  for (const auto& grp : g) {
    double rank_sum = 0;
    for (double v : grp) rank_sum += 1.0 + static_cast<double>(std::count_if(all.begin(), all.end(), [&](double w) { return w < v; }));
    s += rank_sum * rank_sum / static_cast<double>(grp.size());
  }
  return 12.0 / (n * (n + 1)) * s - 3 * (n + 1);
}

GroupSamples random_groups(Rng& rng, int k, int n) {
  GroupSamples g(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < n; ++j) g[static_cast<std::size_t>(i)].push_back(rng.normal(0.3 * i, 1.0));
  return g;
}

}  // namespace

TEST(Midranks, TiesShareMeanRank) {
  const std::vector<double> v{10, 20, 20, 5, 20};
  EXPECT_EQ(midranks(v), (std::vector<double>{2, 4, 4, 1, 4}));
}

TEST(KruskalWallis, HandFixture) {
  const KwResult r = kruskal_wallis(kFixture);
  EXPECT_NEAR(r.h, 7.2, 1e-9);
  EXPECT_EQ(r.df, 2);
  EXPECT_NEAR(r.p, std::exp(-3.6), 1e-12);
}

TEST(KruskalWallis, IdenticalGroups) {
  const KwResult r = kruskal_wallis({{4, 4, 4}, {4, 4, 4}, {4, 4, 4}});
  EXPECT_TRUE(r.all_identical);
  EXPECT_EQ(r.h, 0.0);
  EXPECT_EQ(r.p, 1.0);
}

TEST(KruskalWallis, MatchesRankOracleWithoutTies) {
  Rng rng(1);
  for (int trial = 0; trial < 50; ++trial) {
    const GroupSamples g = random_groups(rng, 2 + static_cast<int>(rng.below(4)), 3 + static_cast<int>(rng.below(15)));
    EXPECT_NEAR(kruskal_wallis(g).h, h_oracle(g), 1e-9);
  }
}

TEST(KruskalWallis, MonotoneTransformAndGroupOrder) {
  Rng rng(2);
  const GroupSamples g = random_groups(rng, 3, 12);
  GroupSamples t = g, swapped{g[2], g[0], g[1]};
  for (auto& grp : t)
    for (double& v : grp) v = std::exp(v) * 3 - 1;
  const double h = kruskal_wallis(g).h;
  EXPECT_NEAR(kruskal_wallis(t).h, h, 1e-12);
  EXPECT_NEAR(kruskal_wallis(swapped).h, h, 1e-12);
}

TEST(KruskalWallis, TwoGroupsAgreeWithMannWhitney) {
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const GroupSamples g = random_groups(rng, 2, 20 + static_cast<int>(rng.below(20)));
    const double n1 = static_cast<double>(g[0].size()), n2 = static_cast<double>(g[1].size());
    double u = 0;
    for (double a : g[0])
      for (double b : g[1]) u += a > b ? 1.0 : (a == b ? 0.5 : 0.0);
    const double z = (u - n1 * n2 / 2) / std::sqrt(n1 * n2 * (n1 + n2 + 1) / 12);
    const double p_mw = std::erfc(std::abs(z) / std::sqrt(2.0));
    EXPECT_NEAR(kruskal_wallis(g).p, p_mw, 0.01);
  }
}

TEST(KruskalWallis, NeedsTwoGroups) {
  EXPECT_THROW(kruskal_wallis({{1, 2, 3}}), Error);
}

TEST(Dunn, FixtureExtremePairHasLargestZ) {
  const DunnResult d = dunn_posthoc(kFixture);
  ASSERT_EQ(d.pairs.size(), 3u);
  EXPECT_EQ(d.pairs[1].first, 0);
  EXPECT_EQ(d.pairs[1].second, 2);
  for (const auto& p : d.pairs) EXPECT_LE(std::abs(p.z), std::abs(d.pairs[1].z));
  EXPECT_LT(d.pairs[1].z, 0.0);
  for (const auto& p : d.pairs) EXPECT_NEAR(p.p_adjusted, std::min(1.0, 3 * p.p), 1e-15);
}

TEST(Dunn, EqualRankMeansGiveZeroZ) {
  const DunnResult d = dunn_posthoc({{1, 6}, {2, 5}, {3, 4}});
  for (const auto& p : d.pairs) {
    EXPECT_NEAR(p.z, 0.0, 1e-12);
    EXPECT_NEAR(p.p_adjusted, 1.0, 1e-12);
    EXPECT_FALSE(p.significant);
  }
}

TEST(Dunn, SwappingGroupsNegatesZ) {
  Rng rng(4);
  const GroupSamples g = random_groups(rng, 3, 10);
  const DunnResult a = dunn_posthoc(g);
  const DunnResult b = dunn_posthoc({g[1], g[0], g[2]});
  EXPECT_NEAR(b.pairs[0].z, -a.pairs[0].z, 1e-12);
  EXPECT_NEAR(b.pairs[0].p, a.pairs[0].p, 1e-12);
  // Pair (0,2) of b is pair (1,2) of a.
  EXPECT_NEAR(b.pairs[1].z, a.pairs[2].z, 1e-12);
}

TEST(Dunn, TooFewGroups) {
  try {
    dunn_posthoc({{1, 2}, {3, 4}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::TooFewGroups);
  }
}

TEST(ChiSquare, ClosedFormsAndReference) {
  for (int k : {1, 2, 5, 17}) EXPECT_EQ(chi2_sf(0.0, k), 1.0);
  for (double x : {0.01, 0.5, 2.0, 7.2, 30.0, 120.0}) EXPECT_NEAR(chi2_sf(x, 2), std::exp(-x / 2), 1e-12);
  EXPECT_NEAR(chi2_sf(7.2, 2), 0.02732, 5e-6);
}

TEST(ChiSquare, AgreesWithBoost) {
  for (int k = 1; k <= 30; ++k) {
    const boost::math::chi_squared dist(k);
    for (double x : {0.05, 0.7, 1.5, 3.0, 8.0, 15.0, 40.0, 80.0}) {
      const double ref = boost::math::cdf(boost::math::complement(dist, x));
      EXPECT_NEAR(chi2_sf(x, k), ref, 1e-12 + 1e-10 * ref) << k << " " << x;
    }
  }
}

TEST(GammaQ, AgreesWithBoost) {
  for (double a : {0.5, 1.0, 2.5, 7.0, 20.0})
    for (double x : {0.1, 1.0, 3.0, 10.0, 25.0}) {
      const double ref = boost::math::gamma_q(a, x);
      EXPECT_NEAR(gamma_q(a, x), ref, 1e-13 + 1e-10 * ref) << a << " " << x;
    }
}

TEST(NormalSf, Reference) {
  EXPECT_DOUBLE_EQ(normal_sf(0.0), 0.5);
  EXPECT_NEAR(normal_sf(1.959963984540054), 0.025, 1e-15);
  EXPECT_NEAR(normal_sf(-1.0) + normal_sf(1.0), 1.0, 1e-15);
}
