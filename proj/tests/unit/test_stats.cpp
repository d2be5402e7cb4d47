#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

#include "oracles/oracle_values.hpp"
#include "satd/special_functions.hpp"
#include "satd/stats_tests.hpp"

using namespace satd;
using namespace satd::stats;

namespace {

constexpr double kOracleTol = 1e-6;

double rel_err(double got, double want) {
  return want == 0.0 ? std::fabs(got) : std::fabs(got - want) / std::fabs(want);
}

std::vector<std::vector<double>> tie_groups() { return {oracle::kTieA, oracle::kTieB, oracle::kTieC}; }

} // namespace

TEST(SpecialFunctions, ChiSquareTailMatchesReference) {
  for (std::size_t i = 0; i < oracle::kChi2X.size(); ++i)
    EXPECT_LT(rel_err(special::chi2_sf(oracle::kChi2X[i], oracle::kChi2Df[i]), oracle::kChi2Sf[i]), 1e-10)
        << "x=" << oracle::kChi2X[i] << " df=" << oracle::kChi2Df[i];
}

TEST(SpecialFunctions, NormalTailMatchesReference) {
  for (std::size_t i = 0; i < oracle::kNormZ.size(); ++i)
    EXPECT_LT(rel_err(special::normal_sf(oracle::kNormZ[i]), oracle::kNormSf[i]), 1e-10) << oracle::kNormZ[i];
}

TEST(SpecialFunctions, NormalQuantileMatchesReference) {
  for (std::size_t i = 0; i < oracle::kNormP.size(); ++i)
    EXPECT_NEAR(special::normal_quantile(oracle::kNormP[i]), oracle::kNormQuantile[i], 1e-9) << oracle::kNormP[i];
}

TEST(SpecialFunctions, ChiSquareEdges) {
  EXPECT_EQ(special::chi2_sf(0.0, 3), 1.0);
  EXPECT_GE(special::chi2_sf(1e6, 1), 0.0);
  EXPECT_LE(special::chi2_sf(1e6, 1), 1e-300);
}

TEST(KruskalWallis, MatchesReferenceWithoutTies) {
  auto r = kruskal_wallis({oracle::kKwA, oracle::kKwB, oracle::kKwC});
  EXPECT_NEAR(r.statistic, oracle::kKwH, kOracleTol);
  EXPECT_NEAR(r.p_value, oracle::kKwP, kOracleTol);
  EXPECT_EQ(*r.df, 2.0);
}

TEST(KruskalWallis, MatchesReferenceWithTies) {
  auto r = kruskal_wallis(tie_groups());
  EXPECT_NEAR(r.statistic, oracle::kKwTieH, kOracleTol);
  EXPECT_NEAR(r.p_value, oracle::kKwTieP, kOracleTol);
  EXPECT_NEAR(kruskal_wallis({{1, 2, 3}, {4, 5, 6}, {7, 8, 9}}).p_value, oracle::kKwSeqP, kOracleTol);
}

TEST(KruskalWallis, AllTiedGivesNoEvidence) {
  auto r = kruskal_wallis({{2, 2}, {2, 2, 2}});
  EXPECT_EQ(r.statistic, 0.0);
  EXPECT_EQ(r.p_value, 1.0);
}

TEST(KruskalWallis, RejectsEmptyGroup) {
  EXPECT_THROW(kruskal_wallis({{1, 2}, {}}), Error);
}

TEST(Dunn, MatchesReferenceWithTies) {
  auto raw = dunn_posthoc(tie_groups(), {}, Correction::None);
  auto adj = dunn_posthoc(tie_groups(), {"a", "b", "c"});
  ASSERT_EQ(raw.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_NEAR(raw[i].p_value, oracle::kDunnTieRaw[i], kOracleTol);
    EXPECT_NEAR(adj[i].p_value, oracle::kDunnTieBonf[i], kOracleTol);
  }
  EXPECT_EQ(adj[0].groups, "a|b");
  EXPECT_EQ(adj[2].groups, "b|c");
}

TEST(Dunn, MatchesReferenceOnShiftedGroups) {
  std::vector<std::vector<double>> g = {{1, 2, 3, 4, 5, 6}, {1.5, 2.5, 3.5, 4.5, 5.5, 6.5}, {20, 21, 22, 23, 24, 25}};
  auto adj = dunn_posthoc(g);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(adj[i].p_value, oracle::kDunnShiftBonf[i], kOracleTol);
}

TEST(MannWhitney, MatchesReferenceAsymptotic) {
  auto r = mann_whitney_u(oracle::kMwA, oracle::kMwB);
  EXPECT_EQ(r.statistic, oracle::kMwU);
  EXPECT_NEAR(r.p_value, oracle::kMwP, kOracleTol);
  auto nc = mann_whitney_u(oracle::kMwA, oracle::kMwB, {.continuity = false});
  EXPECT_NEAR(nc.p_value, oracle::kMwPNoCc, kOracleTol);
}

TEST(MannWhitney, MatchesReferenceWithTies) {
  auto r = mann_whitney_u(oracle::kTieA, oracle::kTieB);
  EXPECT_EQ(r.statistic, oracle::kMwTieU);
  EXPECT_NEAR(r.p_value, oracle::kMwTieP, kOracleTol);
}

TEST(MannWhitney, ExactPermutationMatchesReference) {
  EXPECT_NEAR(mann_whitney_exact_p(oracle::kMwA, oracle::kMwB), oracle::kMwPExact, 1e-12);
  std::vector<double> big(21, 1.0);
  EXPECT_THROW(mann_whitney_exact_p(big, std::vector<double>{2.0}), Error);
}

TEST(CliffsDelta, MatchesBruteForce) {
  EXPECT_NEAR(cliffs_delta(oracle::kTieA, oracle::kTieB).value, oracle::kCliffsTie, 1e-12);
  EXPECT_NEAR(cliffs_delta(oracle::kMwA, oracle::kMwB).value, oracle::kCliffsMw, 1e-12);
}

TEST(CliffsDelta, MagnitudeCutpoints) {
  EXPECT_EQ(cliffs_magnitude(0.1469), Magnitude::Negligible);
  EXPECT_EQ(cliffs_magnitude(0.147), Magnitude::Small);
  EXPECT_EQ(cliffs_magnitude(-0.33), Magnitude::Medium);
  EXPECT_EQ(cliffs_magnitude(0.474), Magnitude::Large);
  EXPECT_STREQ(to_string(Magnitude::Large), "large");
}

TEST(Kappa, MatchesReference) {
  auto k = cohens_kappa(oracle::kKappaA, oracle::kKappaB);
  EXPECT_NEAR(k.kappa, oracle::kKappa, kOracleTol);
  EXPECT_FALSE(k.degenerate);
}

TEST(Kappa, IdenticalLabelsGiveOne) {
  std::vector<std::string> a = {"x", "y", "x", "z"};
  EXPECT_EQ(cohens_kappa(a, a).kappa, 1.0);
  EXPECT_THROW(cohens_kappa(a, {"x"}), Error);
}

TEST(Entropy, MatchesReference) {
  EXPECT_NEAR(normalized_entropy(oracle::kEntropyCounts), oracle::kEntropy, kOracleTol);
  EXPECT_EQ(normalized_entropy(std::vector<double>{4, 4, 4, 4}), 1.0);
  EXPECT_EQ(normalized_entropy(std::vector<double>{0, 7, 0}), 0.0);
  EXPECT_THROW(normalized_entropy(std::vector<double>{0, 0}), Error);
}

// ---- properties ------------------------------------------------------------

namespace {

std::vector<double> random_sample(std::mt19937_64& rng, std::size_t n, bool ties) {
  std::uniform_int_distribution<int> small(0, 6);
  std::normal_distribution<double> norm(0.0, 2.0);
  std::vector<double> v(n);
  for (auto& x : v) x = ties ? small(rng) : norm(rng);
  return v;
}

std::function<double(double)> random_monotone(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.1, 3.0);
  const double a = u(rng), b = u(rng), c = u(rng) - 1.5;
  return [=](double x) { return a * std::exp(x / 4.0) + b * x * x * x + c; };
}

std::vector<double> mapped(const std::vector<double>& v, const std::function<double(double)>& f) {
  std::vector<double> out;
  for (double x : v) out.push_back(f(x));
  return out;
}

} // namespace

TEST(RankProperties, InvariantUnderMonotoneMaps) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    const bool ties = trial % 2 == 0;
    std::vector<std::vector<double>> g = {random_sample(rng, 5 + trial % 7, ties), random_sample(rng, 6, ties),
                                          random_sample(rng, 4 + trial % 3, ties)};
    auto f = random_monotone(rng);
    std::vector<std::vector<double>> h;
    for (const auto& x : g) h.push_back(mapped(x, f));

    EXPECT_NEAR(kruskal_wallis(g).p_value, kruskal_wallis(h).p_value, 1e-12);
    auto d1 = dunn_posthoc(g), d2 = dunn_posthoc(h);
    for (std::size_t i = 0; i < d1.size(); ++i) EXPECT_NEAR(d1[i].p_value, d2[i].p_value, 1e-12);
    EXPECT_EQ(mann_whitney_u(g[0], g[1]).statistic, mann_whitney_u(h[0], h[1]).statistic);
    EXPECT_NEAR(mann_whitney_u(g[0], g[1]).p_value, mann_whitney_u(h[0], h[1]).p_value, 1e-12);
    EXPECT_EQ(cliffs_delta(g[0], g[2]).value, cliffs_delta(h[0], h[2]).value);
  }
}

TEST(RankProperties, CliffsDeltaAntisymmetricAndBounded) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    auto a = random_sample(rng, 1 + trial % 9, trial % 3 == 0);
    auto b = random_sample(rng, 1 + trial % 5, trial % 3 == 0);
    const double d = cliffs_delta(a, b).value;
    EXPECT_EQ(d, -cliffs_delta(b, a).value);
    EXPECT_GE(d, -1.0);
    EXPECT_LE(d, 1.0);
  }
}

TEST(RankProperties, BonferroniNeverBelowRaw) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<std::vector<double>> g = {random_sample(rng, 6, true), random_sample(rng, 5, false),
                                          random_sample(rng, 7, true), random_sample(rng, 4, false)};
    auto raw = dunn_posthoc(g, {}, Correction::None);
    auto adj = dunn_posthoc(g);
    for (std::size_t i = 0; i < raw.size(); ++i) {
      EXPECT_GE(adj[i].p_value, raw[i].p_value);
      EXPECT_EQ(adj[i].p_value, std::min(1.0, raw[i].p_value * 6.0));
      EXPECT_GE(raw[i].p_value, 0.0);
      EXPECT_LE(adj[i].p_value, 1.0);
    }
  }
}

TEST(RankProperties, KappaAtMostOneAndOneOnlyWhenIdentical) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> lab(0, 2);
  const std::vector<std::string> names = {"p", "q", "r"};
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::string> a, b;
    for (int i = 0; i < 12; ++i) {
      a.push_back(names[lab(rng)]);
      b.push_back(names[lab(rng)]);
    }
    auto k = cohens_kappa(a, b);
    if (k.degenerate) continue;
    EXPECT_LE(k.kappa, 1.0);
    EXPECT_EQ(k.kappa == 1.0, a == b);
  }
}

TEST(RankProperties, EntropyInvariantUnderBucketPermutation) {
  std::mt19937_64 rng(21);
  std::uniform_int_distribution<int> c(0, 30);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> v(7);
    for (auto& x : v) x = c(rng);
    v[0] += 1;
    const double h = normalized_entropy(v);
    std::shuffle(v.begin(), v.end(), rng);
    EXPECT_NEAR(normalized_entropy(v), h, 1e-15);
    EXPECT_GE(h, 0.0);
    EXPECT_LE(h, 1.0 + 1e-15);
  }
}
