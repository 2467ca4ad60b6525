#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "optdict/chain_qp.hpp"
#include "optdict/error.hpp"
#include "optdict/majorization.hpp"
#include "optdict/verify.hpp"
#include "oracles.hpp"

using namespace optdict;

namespace {

struct Instance {
  std::vector<double> a, s;
};

Instance random_instance(std::mt19937_64& rng, std::size_t m) {
  std::uniform_real_distribution<double> u(0.05, 5.0);
  Instance in{std::vector<double>(m), std::vector<double>(m)};
  for (auto& v : in.a) v = u(rng);
  for (auto& v : in.s) v = u(rng);
  std::sort(in.s.begin(), in.s.end(), std::greater<>());
  return in;
}

}  // namespace

TEST(ChainQp, OneDimensional) {
  const auto sol = solve_chain_qp(ChainQpProblem({2}, {1}));
  EXPECT_NEAR(sol.x[0], 0.5, 1e-15);
  EXPECT_NEAR(sol.objective, -0.5, 1e-15);
}

TEST(ChainQp, OrderedTargetsAreNotPooled) {
  const ChainQpProblem p({2, 1}, {1, 1});
  const auto sol = solve_chain_qp(p);
  EXPECT_NEAR(sol.x[0], 0.5, 1e-15);
  EXPECT_NEAR(sol.x[1], 1.0, 1e-15);
  const auto grid = qp_grid_oracle(p, 400, 6);
  EXPECT_NEAR(grid.objective, sol.objective, 1e-8);
  EXPECT_NEAR(sol.objective, -1.5, 1e-15);
}

TEST(ChainQp, ViolatingTargetsPool) {
  const ChainQpProblem p({1, 1}, {4, 1});
  const auto sol = solve_chain_qp(p);
  EXPECT_NEAR(sol.x[0], 1.5, 1e-15);
  EXPECT_NEAR(sol.x[1], 1.5, 1e-15);
  EXPECT_NEAR(sol.objective, -4.5, 1e-14);
  const auto grid = qp_grid_oracle(p, 400, 6);
  EXPECT_NEAR(grid.objective, -4.5, 1e-4);
  EXPECT_NEAR(grid.x[0], 1.5, 1e-3);
  EXPECT_NEAR(grid.x[1], 1.5, 1e-3);
}

TEST(ChainQp, ProblemValidation) {
  EXPECT_THROW(ChainQpProblem({}, {}), InvalidInput);
  EXPECT_THROW(ChainQpProblem({1, 1}, {1}), InvalidInput);
  EXPECT_THROW(ChainQpProblem({0, 1}, {1, 1}), InvalidInput);
  EXPECT_THROW(ChainQpProblem({-1}, {1}), InvalidInput);
  EXPECT_THROW(ChainQpProblem({1}, {-1}), InvalidInput);
  EXPECT_THROW(ChainQpProblem({1, 1}, {1, 2}), InvalidInput);
}

TEST(ChainQp, ZeroTargetRejectedBySolver) {
  const ChainQpProblem p({1, 1}, {1, 0});
  EXPECT_THROW((void)solve_chain_qp(p), InvalidInput);
}

TEST(ExtractPartition, Examples) {
  EXPECT_EQ(extract_partition(ChainQpSolution{{0.5, 1.0}, 0}, 1e-10).one_based_boundaries(),
            (std::vector<std::size_t>{1, 2}));
  EXPECT_EQ(extract_partition(ChainQpSolution{{1.5, 1.5}, 0}).one_based_boundaries(),
            (std::vector<std::size_t>{1}));
  EXPECT_EQ(extract_partition(ChainQpSolution{{0.3, 0.3, 0.7, 0.7, 0.9}, 0})
                .one_based_boundaries(),
            (std::vector<std::size_t>{1, 3, 5}));
}

TEST(ExtractPartition, JitterBelowToleranceIsIgnored) {
  const ChainQpSolution sol{{1.0, 1.0 + 1e-14, 2.0}, 0};
  EXPECT_EQ(extract_partition(sol).block_count(), 2u);
  EXPECT_EQ(extract_partition(sol, 0.0).block_count(), 3u);
}

TEST(SpectrumFromDual, Examples) {
  const std::vector<double> s1{1};
  EXPECT_NEAR(spectrum_from_dual(s1, ChainQpSolution{{0.5}, 0}).lambda[0], 2.0, 1e-15);

  // Targets (2,1) with equal weights pool at x = 1.5, so lambda = (2, 1)/1.5.
  const ChainQpProblem p({1, 1}, {4, 1});
  const auto sol = solve_chain_qp(p);
  const auto lam = spectrum_from_dual(p.targets(), sol);
  EXPECT_NEAR(lam.lambda[0], 4.0 / 3.0, 1e-14);
  EXPECT_NEAR(lam.lambda[1], 2.0 / 3.0, 1e-14);
  const auto mapped = lambda_map({2, 1}, {1, 1}, extract_partition(sol));
  EXPECT_NEAR(lam.lambda[0], mapped[0], 1e-10);
  EXPECT_NEAR(lam.lambda[1], mapped[1], 1e-10);
}

TEST(SpectrumFromDual, SingletonBlocksGiveWeights) {
  const ChainQpProblem p({4, 2, 1}, {4, 4, 4});
  const auto sol = solve_chain_qp(p);
  EXPECT_EQ(extract_partition(sol).block_count(), 3u);
  const auto lam = spectrum_from_dual(p.targets(), sol);
  EXPECT_NEAR(lam.lambda[0], 4, 1e-12);
  EXPECT_NEAR(lam.lambda[1], 2, 1e-12);
  EXPECT_NEAR(lam.lambda[2], 1, 1e-12);
}

TEST(SpectrumFromDual, ZeroDualRejected) {
  const std::vector<double> s{1, 1};
  EXPECT_THROW((void)spectrum_from_dual(s, ChainQpSolution{{0.0, 1.0}, 0}), InvalidInput);
  EXPECT_THROW((void)spectrum_from_dual(s, ChainQpSolution{{1.0}, 0}), InvalidInput);
}

TEST(QpObjective, Examples) {
  const std::vector<double> one{1}, half{0.5, 1}, zero{0, 0};
  EXPECT_DOUBLE_EQ(qp_objective(ChainQpProblem({1}, {1}), one), -1.0);
  EXPECT_DOUBLE_EQ(qp_objective(ChainQpProblem({2, 1}, {1, 1}), half), -1.5);
  EXPECT_DOUBLE_EQ(qp_objective(ChainQpProblem({1, 1}, {4, 1}), zero), 0.0);
  EXPECT_THROW((void)qp_objective(ChainQpProblem({1, 1}, {4, 1}), one), InvalidInput);
}

TEST(ChainQpProperties, MatchesPartitionEnumeration) {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 300; ++trial) {
    const auto in = random_instance(rng, 1 + trial % 8);
    const auto sol = solve_chain_qp(ChainQpProblem(in.a, in.s));
    const auto ref = oracle::enumerate_chain_qp(in.a, in.s);
    ASSERT_NEAR(sol.objective, ref.objective, 1e-10 * std::max(1.0, std::abs(ref.objective)));
    for (std::size_t t = 0; t < in.a.size(); ++t) ASSERT_NEAR(sol.x[t], ref.x[t], 1e-10);
  }
}

TEST(ChainQpProperties, BeatsRandomFeasiblePoints) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 30; ++trial) {
    const auto in = random_instance(rng, 1 + trial % 6);
    const ChainQpProblem p(in.a, in.s);
    const auto sol = solve_chain_qp(p);
    std::uniform_real_distribution<double> u(0.0, 3.0);
    for (int k = 0; k < 10000; ++k) {
      std::vector<double> x(in.a.size());
      for (auto& v : x) v = u(rng);
      std::sort(x.begin(), x.end());
      ASSERT_LE(sol.objective, qp_objective(p, x) + 1e-12);
    }
  }
}

TEST(ChainQpProperties, DualityOrderingTiesAndFeasibility) {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t m = 1 + trial % 6;
    const auto in = random_instance(rng, m);
    const ChainQpProblem p(in.a, in.s);
    const auto sol = solve_chain_qp(p);
    const auto part = extract_partition(sol);
    std::vector<double> root(m);
    for (std::size_t i = 0; i < m; ++i) root[i] = std::sqrt(in.s[i]);
    const double pstar = j_value(RealSequence(root), RealSequence(in.a), part);
    EXPECT_NEAR(pstar, -sol.objective, 1e-9 * pstar);

    const auto lam = spectrum_from_dual(in.s, sol).lambda;
    for (std::size_t i = 1; i < m; ++i) EXPECT_LE(lam[i], lam[i - 1] * (1 + 1e-12));
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = i + 1; j < m; ++j)
        if (std::abs(lam[i] - lam[j]) <= 1e-12 * lam[i]) EXPECT_NEAR(in.s[i], in.s[j], 1e-9 * in.s[i]);

    // Weights as prefix of a longer profile: c' prefix sums never exceed lambda's.
    double pc = 0, pl = 0;
    for (std::size_t i = 0; i < m; ++i) {
      pc += in.a[i];
      pl += lam[i];
      EXPECT_LE(pc, pl + 1e-9);
    }
    EXPECT_NEAR(pc, pl, 1e-9 * pc);
  }
}

TEST(ChainQpProperties, ProfileMajorizedByPaddedSpectrum) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.1, 4.0);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t m = 1 + trial % 4, K = m + trial % 3;
    std::vector<double> c(K), s(m);
    for (auto& v : c) v = u(rng);
    for (auto& v : s) v = u(rng);
    std::sort(c.begin(), c.end(), std::greater<>());
    std::sort(s.begin(), s.end(), std::greater<>());
    const LengthProfile profile(c);
    const auto cp = collapse_lengths(profile, m);
    const auto sol = solve_chain_qp(ChainQpProblem(cp.vector(), s));
    auto lam = spectrum_from_dual(s, sol).lambda;
    lam.resize(K, 0.0);
    EXPECT_TRUE(check_majorization(profile.as_sequence(), RealSequence(lam)));
  }
}
