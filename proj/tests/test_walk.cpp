/*
   Copyright 2026 The fragerase Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>
#include <vector>

#include "fragerase/fragmenter.hpp"
#include "fragerase/walk.hpp"
#include "generators.hpp"
#include "oracles.hpp"

using namespace fragerase;
using testgen::figure_one_rule;

namespace {

const SplittingRule kFullUniform =
    SplittingRule::fully_random(ProportionDistribution::uniform());

}  // namespace

TEST(WalkDistribution, Examples) {
  const auto fig = walk_distribution(realize_environment(figure_one_rule(), 2, 0), 2);
  ASSERT_EQ(fig.n(), 2);
  EXPECT_NEAR(fig.probs[0], 1.0 / 6.0, 1e-15);
  EXPECT_NEAR(fig.probs[1], 7.0 / 18.0, 1e-15);
  EXPECT_NEAR(fig.probs[2], 4.0 / 9.0, 1e-15);
  const auto up = walk_distribution(realize_environment(SplittingRule::constant(1.0), 3, 0), 3);
  EXPECT_EQ(up.probs, (std::vector<double>{0, 0, 0, 1}));
  const auto half = walk_distribution(realize_environment(SplittingRule::constant(0.5), 2, 0), 2);
  EXPECT_EQ(half.probs, (std::vector<double>{0.25, 0.5, 0.25}));
}

TEST(WalkCdf, Examples) {
  const auto fig = walk_distribution(realize_environment(figure_one_rule(), 2, 0), 2);
  EXPECT_NEAR(walk_cdf(fig, 0), 1.0 / 6.0, 1e-15);
  EXPECT_EQ(walk_cdf(fig, 2), 1.0);
  EXPECT_EQ(walk_cdf(fig, -1), 0.0);
  const auto d = walk_distribution(realize_environment(SplittingRule::constant(0.5), 10, 0), 10);
  EXPECT_NEAR(walk_cdf(d, 4), 193.0 / 512.0, 1e-15);
  EXPECT_NEAR(walk_cdf(d, 4), binomial_cdf(10, 0.5, 4), 1e-15);
}

TEST(BinomialCdf, Examples) {
  EXPECT_EQ(binomial_cdf(2, 0.5, 0), 0.25);
  EXPECT_EQ(binomial_cdf(37, 0.3, 37), 1.0);
  EXPECT_EQ(binomial_cdf(37, 0.3, -1), 0.0);
  const double exact = oracle::to_double(oracle::binomial_cdf_exact(50, 3, 10, 10));
  EXPECT_NEAR(binomial_cdf(50, 0.3, 10), exact, 1e-13 * exact);
  EXPECT_NEAR(exact, 0.078850624823056409, 1e-17);
  EXPECT_THROW(binomial_cdf(5, 1.2, 2), Error);
}

TEST(BinomialCdf, DegenerateProbabilities) {
  EXPECT_EQ(binomial_cdf(10, 0.0, 0), 1.0);
  EXPECT_EQ(binomial_cdf(10, 1.0, 9), 0.0);
  EXPECT_EQ(binomial_cdf(10, 1.0, 10), 1.0);
}

TEST(BinomialCdf, AgreesWithExactRationals) {
  std::mt19937_64 gen(77);
  for (int trial = 0; trial < 150; ++trial) {
    const int n = 1 + static_cast<int>(gen() % 80);
    const long num = 1 + static_cast<long>(gen() % 99);
    const int k = static_cast<int>(gen() % (n + 1));
    const double exact = oracle::to_double(oracle::binomial_cdf_exact(n, num, 100, k));
    const double got = binomial_cdf(n, num / 100.0, k);
    EXPECT_NEAR(got, exact, 1e-12 * std::max(exact, 1e-300) + 1e-15)
        << n << " " << num << " " << k;
  }
}

TEST(BinomialCdf, LargeNStaysAccurate) {
  EXPECT_NEAR(binomial_cdf(100000, 0.5, 50000), 0.50126156310709836994, 1e-13);
  EXPECT_NEAR(binomial_cdf(1000, 0.3, 200), 4.9862589321573917846e-13, 1e-24);
}

TEST(EnumeratePaths, Examples) {
  const auto fig = enumerate_paths_oracle(realize_environment(figure_one_rule(), 2, 0), 2);
  EXPECT_NEAR(fig.probs[0], 1.0 / 6.0, 1e-15);
  EXPECT_NEAR(fig.probs[1], 7.0 / 18.0, 1e-15);
  EXPECT_NEAR(fig.probs[2], 4.0 / 9.0, 1e-15);
  const auto flat = enumerate_paths_oracle(realize_environment(SplittingRule::constant(0.0), 4, 0), 4);
  EXPECT_EQ(flat.probs, (std::vector<double>{1, 0, 0, 0, 0}));
  const auto env = realize_environment(kFullUniform, 10, 7);
  const auto a = enumerate_paths_oracle(env, 10);
  const auto b = walk_distribution(env, 10);
  for (int j = 0; j <= 10; ++j) EXPECT_NEAR(a.probs[j], b.probs[j], 1e-12);
}

TEST(EnumeratePaths, RefusesLargeN) {
  const auto env = realize_environment(SplittingRule::constant(0.5), 21, 0);
  try {
    enumerate_paths_oracle(env, 21);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::TooLarge);
  }
}

TEST(SimulateWalk, AlwaysUp) {
  const auto env = realize_environment(SplittingRule::constant(1.0), 30, 0);
  const auto s = simulate_walk(env, 30, 500, 3);
  for (int v : s.values) EXPECT_EQ(v, 30);
  const auto flat = simulate_walk(realize_environment(SplittingRule::constant(0.0), 30, 0), 30, 50, 3);
  for (int v : flat.values) EXPECT_EQ(v, 0);
}

TEST(SimulateWalk, ConstantHalfMatchesBinomial) {
  const int r = 100000;
  const auto env = realize_environment(SplittingRule::constant(0.5), 100, 0);
  const auto s = simulate_walk(env, 100, r, 12);
  EXPECT_NEAR(s.empirical_cdf(50), binomial_cdf(100, 0.5, 50), 3 * std::sqrt(0.25 / r));
}

TEST(SimulateWalk, QuenchedFullyRandomMatchesDp) {
  const int r = 100000;
  const auto env = realize_environment(kFullUniform, 50, 3);
  const auto s = simulate_walk(env, 50, r, 99);
  const auto d = walk_distribution(env, 50);
  for (int k = 0; k <= 50; ++k)
    EXPECT_NEAR(s.empirical_cdf(k), walk_cdf(d, k), 3 * std::sqrt(0.25 / r)) << k;
}

TEST(SimulateWalk, ThreadCountDoesNotChangeSamples) {
  const auto env = realize_environment(kFullUniform, 200, 4);
  const auto one = simulate_walk(env, 200, 3001, 5, 1);
  for (unsigned t : {2u, 3u, 8u}) EXPECT_EQ(simulate_walk(env, 200, 3001, 5, t).values, one.values);
  EXPECT_NE(simulate_walk(env, 200, 3001, 6, 1).values, one.values);
}

TEST(SimulateWalk, Errors) {
  const auto env = realize_environment(SplittingRule::constant(0.5), 5, 0);
  EXPECT_THROW(simulate_walk(env, 5, 0, 1), Error);
  EXPECT_THROW(simulate_walk(env, 6, 10, 1), Error);
}

TEST(VerifyRepresentation, Examples) {
  const auto env = realize_environment(figure_one_rule(), 2, 0);
  EXPECT_LE(verify_representation(evolve(env, 2), walk_distribution(env, 2)).max_abs_err, 1e-15);
  for (int i = 1; i <= 9; ++i) {
    const auto c = realize_environment(SplittingRule::constant(i / 10.0), 50, 0);
    for (int n : {1, 7, 25, 50}) {
      const auto part = evolve(c, n);
      WalkDistribution bin;
      for (int j = 0; j <= n; ++j)
        bin.probs.push_back(binomial_cdf(n, i / 10.0, j) - binomial_cdf(n, i / 10.0, j - 1));
      EXPECT_LE(verify_representation(part, bin).max_abs_err, 1e-12);
    }
  }
  EXPECT_THROW(verify_representation(evolve(env, 2), walk_distribution(env, 1)), Error);
}

TEST(VerifyRepresentation, HundredFullyRandomEnvironments) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto env = realize_environment(kFullUniform, 200, seed);
    const auto rep = verify_representation(evolve(env, 200), walk_distribution(env, 200));
    ASSERT_LE(rep.max_abs_err, 1e-11) << seed;
  }
}

TEST(Invariants, RepresentationAcrossRegimes) {
  std::mt19937_64 gen(55);
  for (int trial = 0; trial < 100; ++trial) {
    const auto rule = testgen::random_rule(gen);
    const int n = 1 + static_cast<int>(gen() % 500);
    const auto env = realize_environment(rule, n, gen());
    const auto rep = verify_representation(evolve(env, n), walk_distribution(env, n));
    ASSERT_LE(rep.max_abs_err, 1e-11) << rule.describe() << " n " << n;
  }
}

TEST(Invariants, DpMatchesEnumeration) {
  std::mt19937_64 gen(14);
  for (int trial = 0; trial < 50; ++trial) {
    const auto rule = testgen::random_rule(gen);
    const int n = 1 + static_cast<int>(gen() % 14);
    const auto env = realize_environment(rule, n, gen());
    const auto a = enumerate_paths_oracle(env, n);
    const auto b = walk_distribution(env, n);
    for (int j = 0; j <= n; ++j) ASSERT_NEAR(a.probs[j], b.probs[j], 1e-12);
  }
}

TEST(Invariants, MassConservationAndMonotoneCdfEveryStep) {
  std::mt19937_64 gen(99);
  for (int trial = 0; trial < 40; ++trial) {
    const auto rule = testgen::random_rule(gen);
    const int n = 1 + static_cast<int>(gen() % 300);
    const auto env = realize_environment(rule, n, gen());
    for (int m = 1; m <= n; m += 1 + m / 10) {
      const auto d = walk_distribution(env, m);
      double total = 0.0;
      for (double q : d.probs) {
        ASSERT_GE(q, 0.0);
        total += q;
      }
      ASSERT_NEAR(total, 1.0, 1e-12);
      for (int k = 1; k <= m; ++k) ASSERT_LE(walk_cdf(d, k - 1), walk_cdf(d, k) + 1e-15);
    }
  }
}

TEST(Invariants, AnnealedAverageIsBinomial) {
  const int n = 50, k = 20, reps = 2000;
  double sum = 0.0, sum2 = 0.0;
  for (int s = 0; s < reps; ++s) {
    const double a = evolve(realize_environment(kFullUniform, n, 1000 + s), n).points[k - 1];
    sum += a;
    sum2 += a * a;
  }
  const double mean = sum / reps;
  const double var = sum2 / reps - mean * mean;
  EXPECT_NEAR(mean, binomial_cdf(n, 0.5, k - 1), 4 * std::sqrt(var / reps));
}

TEST(WalkCsv, Headers) {
  const auto env = realize_environment(SplittingRule::constant(0.5), 2, 0);
  std::ostringstream a, b;
  write_walk_distribution_csv(a, walk_distribution(env, 2));
  EXPECT_EQ(a.str(), "k,prob,cdf\n0,0.25,0.25\n1,0.5,0.75\n2,0.25,1\n");
  write_walk_sample_csv(b, simulate_walk(realize_environment(SplittingRule::constant(1.0), 2, 0), 2, 2, 0));
  EXPECT_EQ(b.str(), "replica,x_n\n0,2\n1,2\n");
}
