#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "test_util.hpp"
#include "topk/simplex.hpp"

using namespace topk;

TEST(LabelSpace, RejectsInvalidSizes) {
  EXPECT_NO_THROW(LabelSpace(2, 1));
  EXPECT_THROW(LabelSpace(1, 1), std::invalid_argument);
  EXPECT_THROW(LabelSpace(4, 0), std::invalid_argument);
  EXPECT_THROW(LabelSpace(4, 4), std::invalid_argument);
}

TEST(ProbVector, Validation) {
  EXPECT_NO_THROW(prob({0.5, 0.3, 0.2}));
  EXPECT_THROW(prob({0.5, 0.6}), std::invalid_argument);
  EXPECT_THROW(prob({1.5, -0.5}), std::invalid_argument);
  EXPECT_THROW(prob({std::nan(""), 1.0}), std::invalid_argument);
  bool renormalized = false;
  const ProbVector p = ProbVector::normalized({0.5, 0.5000005}, 1e-6, &renormalized);
  EXPECT_TRUE(renormalized);
  EXPECT_NEAR(p[0] + p[1], 1.0, 1e-15);
  EXPECT_THROW(ProbVector::normalized({0.5, 0.51}, 1e-6), std::invalid_argument);
}

TEST(ScoreVector, RejectsNonFinite) {
  EXPECT_THROW(ScoreVector({1.0, INFINITY}), std::invalid_argument);
  EXPECT_NO_THROW(ScoreVector({-3.0, 2.0}));
}

TEST(TopKSet, SortsAndRejectsDuplicates) {
  EXPECT_EQ(TopKSet({2, 0}).members(), (LabelSet{0, 2}));
  EXPECT_THROW(TopKSet({1, 1}), std::invalid_argument);
}

TEST(SortedDesc, Examples) {
  SortedScores s = sorted_desc(std::vector<double>{0.2, 0.5, 0.3});
  EXPECT_EQ(s.order, labels1({2, 3, 1}));
  EXPECT_EQ(s.values, (std::vector<double>{0.5, 0.3, 0.2}));

  EXPECT_EQ(sorted_desc(std::vector<double>{1, 1, 0}).order, labels1({1, 2, 3}));
  EXPECT_EQ(sorted_desc(std::vector<double>{0, 0, 0, 0}).order,
            labels1({1, 2, 3, 4}));
}

TEST(SortedDesc, IsAPermutation) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> level(0, 3);
  for (int t = 0; t < 500; ++t) {
    std::vector<double> u(6);
    for (double& x : u) x = level(rng);
    const SortedScores s = sorted_desc(u);
    std::vector<double> back(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) back[s.order[i]] = s.values[i];
    ASSERT_EQ(back, u);
    for (std::size_t i = 1; i < u.size(); ++i) {
      ASSERT_GE(s.values[i - 1], s.values[i]);
      if (s.values[i - 1] == s.values[i]) ASSERT_LT(s.order[i - 1], s.order[i]);
    }
  }
}

TEST(Sigma, Examples) {
  EXPECT_NEAR(sigma(std::vector<double>{0.5, 0.3, 0.2}, 2), 0.8, 1e-15);
  EXPECT_DOUBLE_EQ(sigma(std::vector<double>{1, 1, 0, 0}, 4), 2.0);
  EXPECT_DOUBLE_EQ(sigma(std::vector<double>{2, 0, 0, 0}, 1), 2.0);
  EXPECT_THROW(sigma(std::vector<double>{1, 2}, 0), std::out_of_range);
  EXPECT_THROW(sigma(std::vector<double>{1, 2}, 3), std::out_of_range);
}

TEST(Sigma, AverageOfTopMIsNonIncreasing) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g;
  for (int t = 0; t < 1000; ++t) {
    std::vector<double> u(7);
    for (double& x : u) x = g(rng);
    for (std::size_t m = 1; m < u.size(); ++m) {
      ASSERT_GE(sigma(u, m) / m, sigma(u, m + 1) / (m + 1) - 1e-15);
    }
  }
}

TEST(TopKSets, Examples) {
  EXPECT_EQ(top_k_sets(std::vector<double>{0.5, 0.3, 0.2}, 2),
            (std::vector<TopKSet>{set1({1, 2})}));
  EXPECT_EQ(top_k_sets(std::vector<double>{0.4, 0.3, 0.3}, 2),
            (std::vector<TopKSet>{set1({1, 2}), set1({1, 3})}));
  EXPECT_EQ(top_k_sets(std::vector<double>{0, 0, 0, 0}, 2).size(), 6u);
}

TEST(TopKSets, MatchesSubsetEnumeration) {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> level(0, 2);
  for (int t = 0; t < 2000; ++t) {
    const std::size_t n = 2 + t % 5;
    const std::size_t k = 1 + t % (n - 1);
    std::vector<double> u(n);
    for (double& x : u) x = 0.5 * level(rng);
    const auto expected = oracle::top_k_sets(u, k);
    const auto got = top_k_sets(u, k);
    ASSERT_EQ(got.size(), expected.size());
    for (std::size_t i = 0; i < got.size(); ++i) {
      ASSERT_EQ(got[i].members(), expected[i]);
    }
    // Ambiguity iff the k-th and (k+1)-th values tie.
    const SortedScores s = sorted_desc(u);
    ASSERT_EQ(got.size() > 1, s.values[k - 1] == s.values[k]);
    ASSERT_EQ(argmax_link(u, k), got.front());
  }
}

TEST(ArgmaxLink, Examples) {
  EXPECT_EQ(argmax_link(std::vector<double>{1, 1, 1, 0}, 2), set1({1, 2}));
  EXPECT_EQ(argmax_link(std::vector<double>{0, 0, 0, 0, 1}, 3), set1({1, 2, 5}));
  EXPECT_EQ(argmax_link(std::vector<double>{0.1, 0.9, 0.5}, 2), set1({2, 3}));
}

TEST(Combinations, CountsAndOrder) {
  const auto c = combinations(5, 2);
  EXPECT_EQ(c.size(), 10u);
  EXPECT_EQ(c.front(), (LabelSet{0, 1}));
  EXPECT_EQ(c.back(), (LabelSet{3, 4}));
  EXPECT_TRUE(std::is_sorted(c.begin(), c.end()));
  EXPECT_EQ(combinations(4, 0).size(), 1u);
  EXPECT_TRUE(combinations(2, 3).empty());
}

TEST(Dirichlet, SamplesLieOnTheSimplex) {
  const auto samples = dirichlet_sample(std::vector<double>{1, 1, 1}, 42, 100000);
  for (const ProbVector& p : samples) {
    double total = 0.0;
    for (double x : p.values()) {
      ASSERT_GE(x, 0.0);
      total += x;
    }
    ASSERT_NEAR(total, 1.0, 1e-12);
  }
}

TEST(Dirichlet, MeanMatchesConcentrationRatio) {
  const auto samples = dirichlet_sample(std::vector<double>{1000, 1, 1}, 7, 10000);
  double mean = 0.0;
  for (const ProbVector& p : samples) mean += p[0];
  mean /= samples.size();
  EXPECT_NEAR(mean, 1000.0 / 1002.0, 0.05);

  // Small shapes take the boosted path; check its mean too.
  const auto small = dirichlet_sample(std::vector<double>{0.125, 0.125, 1, 1, 1}, 9, 20000);
  mean = 0.0;
  for (const ProbVector& p : small) mean += p[0];
  mean /= small.size();
  EXPECT_NEAR(mean, 0.125 / 3.25, 0.005);
}

TEST(Dirichlet, Deterministic) {
  const std::vector<double> alpha{0.5, 2.0, 1.0};
  const auto a = dirichlet_sample(alpha, 123, 50);
  const auto b = dirichlet_sample(alpha, 123, 50);
  const auto c = dirichlet_sample(alpha, 124, 50);
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < 3; ++j) ASSERT_EQ(a[i][j], b[i][j]);
  }
  EXPECT_NE(a[0][0], c[0][0]);
}

TEST(Dirichlet, RejectsNonPositiveConcentration) {
  EXPECT_THROW(dirichlet_sample(std::vector<double>{1, 0, 1}, 1, 1), std::domain_error);
  EXPECT_THROW(dirichlet_sample(std::vector<double>{1, -2}, 1, 1), std::domain_error);
}
