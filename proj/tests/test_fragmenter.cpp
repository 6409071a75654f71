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
#include <limits>
#include <random>
#include <sstream>
#include <vector>

#include "fragerase/fragmenter.hpp"
#include "generators.hpp"
#include "oracles.hpp"

using namespace fragerase;
using testgen::figure_one_rule;

TEST(Refine, FigureOneSteps) {
  const Partition p0{};
  const double r1[] = {2.0 / 3.0};
  const auto p1 = refine(p0, r1);
  ASSERT_EQ(p1.n(), 1);
  EXPECT_NEAR(p1.points[0], 1.0 / 3.0, 1e-16);
  const double r2[] = {0.5, 2.0 / 3.0};
  const auto p2 = refine(p1, r2);
  ASSERT_EQ(p2.n(), 2);
  EXPECT_NEAR(p2.points[0], 1.0 / 6.0, 4 * std::numeric_limits<double>::epsilon());
  EXPECT_NEAR(p2.points[1], 5.0 / 9.0, 4 * std::numeric_limits<double>::epsilon());
  const auto ev = evolve(realize_environment(figure_one_rule(), 2, 0), 2);
  EXPECT_EQ(ev.points, p2.points);
}

TEST(Refine, AllOnesShiftsWithZeroPrepended) {
  const Partition part{{0.1, 0.4, 0.4, 0.9}};
  const std::vector<double> ones(5, 1.0);
  const auto next = refine(part, ones);
  EXPECT_EQ(next.points, (std::vector<double>{0.0, 0.1, 0.4, 0.4, 0.9}));
}

TEST(Refine, AllZerosAppendsOne) {
  const Partition part{{0.1, 0.4}};
  const std::vector<double> zeros(3, 0.0);
  EXPECT_EQ(refine(part, zeros).points, (std::vector<double>{0.1, 0.4, 1.0}));
}

TEST(Refine, Errors) {
  const Partition part{{0.5}};
  const double short_row[] = {0.5};
  try {
    refine(part, short_row);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::RowLengthMismatch);
  }
  const double bad_row[] = {0.5, 1.5};
  EXPECT_THROW(refine(part, bad_row), Error);
}

TEST(Evolve, Examples) {
  const auto half = evolve(realize_environment(SplittingRule::constant(0.5), 2, 0), 2);
  EXPECT_EQ(half.points, (std::vector<double>{0.25, 0.75}));
  const auto zero = evolve(realize_environment(SplittingRule::constant(0.0), 5, 0), 5);
  EXPECT_EQ(zero.points, std::vector<double>(5, 1.0));
  const auto fig = evolve(realize_environment(figure_one_rule(), 2, 0), 2);
  EXPECT_NEAR(fig.points[0], 1.0 / 6.0, 1e-15);
  EXPECT_NEAR(fig.points[1], 5.0 / 9.0, 1e-15);
  EXPECT_EQ(evolve(realize_environment(SplittingRule::constant(0.5), 3, 0), 0).n(), 0);
}

TEST(Evolve, BeyondEnvironmentIsRejected) {
  const auto env = realize_environment(SplittingRule::constant(0.5), 3, 0);
  EXPECT_THROW(evolve(env, 4), Error);
  EXPECT_THROW(evolve_log(env, -1), Error);
}

TEST(Evolve, ObserverSeesEveryStep) {
  const auto env = realize_environment(figure_one_rule(), 2, 0);
  std::vector<std::vector<double>> seen;
  evolve(env, 2, [&](int m, std::span<const double> pts) {
    EXPECT_EQ(static_cast<int>(pts.size()), m);
    seen.emplace_back(pts.begin(), pts.end());
  });
  ASSERT_EQ(seen.size(), 2u);
  EXPECT_NEAR(seen[0][0], 1.0 / 3.0, 1e-16);
}

TEST(EvolveLog, Examples) {
  const auto env = realize_environment(SplittingRule::constant(0.5), 2000, 0);
  const auto two = evolve_log(env, 2);
  EXPECT_NEAR(two.log_points[0], std::log(0.25), 1e-15);
  EXPECT_NEAR(two.log_points[1], std::log(0.75), 1e-15);
  const auto deep = evolve_log(env, 2000);
  EXPECT_NEAR(deep.log_points[0], -2000 * std::log(2.0), 1e-12 * 2000 * std::log(2.0));
  EXPECT_EQ(evolve(env, 2000).points[0], 0.0);
  const auto fig = evolve_log(realize_environment(figure_one_rule(), 2, 0), 2);
  EXPECT_NEAR(fig.log_points[0], std::log(1.0 / 6.0), 1e-15);
  EXPECT_NEAR(fig.log_points[1], std::log(5.0 / 9.0), 1e-15);
}

TEST(EvolveLog, DegenerateProportionsGiveNegativeInfinity) {
  const auto ones = evolve_log(realize_environment(SplittingRule::constant(1.0), 4, 0), 4);
  for (double v : ones.log_points) EXPECT_EQ(v, -std::numeric_limits<double>::infinity());
  const auto mixed = evolve_log(realize_environment(SplittingRule::sequence({0.0, 1.0, 0.5}), 3, 0), 3);
  EXPECT_EQ(mixed.log_points[0], -std::numeric_limits<double>::infinity());
  EXPECT_EQ(mixed.log_points[1], std::log(0.5));
  EXPECT_EQ(mixed.log_points[2], 0.0);
}

TEST(MeasureOf, Examples) {
  const Partition fig{{1.0 / 6.0, 5.0 / 9.0}};
  EXPECT_EQ(measure_of(fig, EmpiricalQuery::closed(0.0, 0.5)), 0.5);
  EXPECT_EQ(measure_of(fig, EmpiricalQuery::closed(0.0, 1.0)), 1.0);

  const auto part = evolve(realize_environment(SplittingRule::constant(0.5), 10, 0), 10);
  const auto cdf = oracle::binomial_cdf_row(10, 1, 2);
  int count = 0;
  for (int k = 1; k <= 10; ++k) count += cdf[k - 1] >= 0.25 && cdf[k - 1] <= 0.75;
  EXPECT_EQ(count, 2);
  EXPECT_DOUBLE_EQ(measure_of(part, EmpiricalQuery::closed(0.25, 0.75)), count / 10.0);
}

TEST(MeasureOf, ClosureConventionsAtBreakPoints) {
  const Partition part{{0.25, 0.5, 0.5, 0.75}};
  EXPECT_EQ(measure_of(part, EmpiricalQuery::closed(0.5, 0.5)), 0.5);
  EXPECT_EQ(measure_of(part, EmpiricalQuery::half_open(0.5, 0.5)), 0.0);
  EXPECT_EQ(measure_of(part, EmpiricalQuery::half_open(0.25, 0.75)), 0.75);
  EXPECT_EQ(measure_of(part, EmpiricalQuery{0.25, 0.75, false, true}), 0.75);
  EXPECT_EQ(measure_of(part, EmpiricalQuery{0.25, 0.75, false, false}), 0.5);
}

TEST(MeasureOf, Errors) {
  try {
    measure_of(Partition{}, EmpiricalQuery::closed(0, 1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::EmptyPartition);
  }
  EXPECT_THROW(measure_of(Partition{{0.5}}, EmpiricalQuery::closed(0.6, 0.4)), Error);
}

TEST(MeasureOf, HalfOpenAdditivity) {
  std::mt19937_64 gen(31);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const auto rule = testgen::random_rule(gen);
    const int n = 1 + static_cast<int>(gen() % 200);
    const auto part = evolve(realize_environment(rule, n, gen()), n);
    EXPECT_EQ(measure_of(part, EmpiricalQuery::closed(0.0, 1.0)), 1.0);
    double cuts[3] = {u(gen), u(gen), u(gen)};
    std::sort(cuts, cuts + 3);
    // Reuse existing break points as cuts half the time.
    if (trial % 2) cuts[1] = part.points[gen() % part.points.size()];
    std::sort(cuts, cuts + 3);
    const double left = measure_of(part, EmpiricalQuery::half_open(cuts[0], cuts[1]));
    const double right = measure_of(part, EmpiricalQuery::half_open(cuts[1], cuts[2]));
    const double whole = measure_of(part, EmpiricalQuery::half_open(cuts[0], cuts[2]));
    EXPECT_NEAR(left + right, whole, 1e-15);
  }
}

TEST(TransformedCdf, Examples) {
  const auto lp = evolve_log(realize_environment(SplittingRule::constant(0.5), 2000, 0), 2000);
  EXPECT_EQ(transformed_cdf(lp, 1.0), 1.0);
  EXPECT_EQ(transformed_cdf(lp, 0.0), 0.0);
  const double alpha = oracle::kl_inverse_below(0.5, std::log(1 / 0.6));
  EXPECT_NEAR(transformed_cdf(lp, 0.6), alpha, 0.02);
  EXPECT_THROW(transformed_cdf(lp, 1.5), Error);
  EXPECT_THROW(transformed_cdf(LogPartition{}, 0.5), Error);
}

TEST(TransformedCdf, ZeroBreakPointsCountAtZero) {
  const auto lp = evolve_log(realize_environment(SplittingRule::sequence({0.0, 1.0, 0.5}), 3, 0), 3);
  EXPECT_EQ(transformed_cdf(lp, 0.0), 1.0 / 3.0);
  EXPECT_EQ(transformed_cdf(lp, 0.0, false), 0.0);
  EXPECT_EQ(transformed_cdf(lp, 1.0, false), 2.0 / 3.0);
}

TEST(LongestInterval, Examples) {
  EXPECT_NEAR(longest_interval(Partition{{1.0 / 6.0, 5.0 / 9.0}}), 4.0 / 9.0, 1e-15);
  EXPECT_EQ(longest_interval(Partition{}), 1.0);
  const int n = 10000;
  const auto part = evolve(realize_environment(SplittingRule::constant(0.5), n, 0), n);
  EXPECT_LE(longest_interval(part), 10.0 / std::sqrt(n / 4.0));
}

TEST(RateEstimate, Examples) {
  const int n = 4000;
  const auto lp = evolve_log(realize_environment(SplittingRule::constant(0.5), n, 0), n);
  EXPECT_NEAR(rate_estimate(lp, 0.25), static_cast<double>(oracle::kl(0.25L, 0.5L)), 0.01);
  EXPECT_LE(rate_estimate(lp, 0.4999), 0.01);
  const auto ones = evolve_log(realize_environment(SplittingRule::constant(0.0), 5, 0), 5);
  EXPECT_EQ(rate_estimate(ones, 0.5), 0.0);
  EXPECT_THROW(rate_estimate(lp, 0.0), Error);
  EXPECT_THROW(rate_estimate(ones, 0.1), Error);
}

TEST(PartitionCsv, HeaderAndPrecision) {
  const auto env = realize_environment(figure_one_rule(), 2, 0);
  std::ostringstream os;
  write_partition_csv(os, evolve(env, 2), evolve_log(env, 2));
  std::istringstream in(os.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "k,a,log_a");
  std::getline(in, line);
  EXPECT_EQ(line.substr(0, 2), "1,");
  const double a = std::stod(line.substr(2, line.find(',', 2) - 2));
  EXPECT_EQ(a, evolve(env, 2).points[0]);
  EXPECT_THROW(write_partition_csv(os, evolve(env, 2), evolve_log(env, 1)), Error);
}

TEST(Invariants, SortedUnitLengthAndSandwichOverRandomEnvironments) {
  std::mt19937_64 gen(20240601);
  for (int trial = 0; trial < 10000; ++trial) {
    const auto rule = testgen::random_rule(gen);
    const int n = 1 + static_cast<int>(gen() % 500);
    const auto env = realize_environment(rule, n, gen());
    std::vector<double> prev = {0.0, 1.0};
    bool ok = true;
    evolve(env, n, [&](int m, std::span<const double> pts) {
      double total = pts[0];
      for (int k = 1; k <= m; ++k) {
        const double a = pts[k - 1];
        ok = ok && a >= 0.0 && a <= 1.0;
        if (k > 1) {
          ok = ok && pts[k - 2] <= a;
          total += a - pts[k - 2];
        }
        ok = ok && prev[k - 1] <= a && a <= prev[k];
      }
      total += 1.0 - pts[m - 1];
      ok = ok && std::abs(total - 1.0) <= 1e-12;
      prev.assign(1, 0.0);
      prev.insert(prev.end(), pts.begin(), pts.end());
      prev.push_back(1.0);
    });
    ASSERT_TRUE(ok) << "trial " << trial << " rule " << rule.describe() << " n " << n;
  }
}

TEST(Invariants, LogLinearAgreement) {
  std::mt19937_64 gen(404);
  for (int trial = 0; trial < 300; ++trial) {
    const auto rule = testgen::random_rule(gen);
    const int n = 1 + static_cast<int>(gen() % 200);
    const auto env = realize_environment(rule, n, gen());
    const auto lin = evolve(env, n);
    const auto lg = evolve_log(env, n);
    for (int k = 0; k < n; ++k) {
      const double a = lin.points[k];
      if (a > 1e-290) {
        ASSERT_LE(std::abs(std::exp(lg.log_points[k]) - a), 1e-10 * a)
            << rule.describe() << " n " << n << " k " << k + 1;
      }
      if (k > 0) ASSERT_LE(lg.log_points[k - 1], lg.log_points[k]);
    }
    ASSERT_LE(lg.log_points.back(), 0.0);
  }
}

TEST(Invariants, ConstantRuleIsBinomialCdf) {
  for (int i = 1; i <= 9; ++i) {
    const auto env = realize_environment(SplittingRule::constant(i / 10.0), 50, 0);
    for (int n = 1; n <= 50; ++n) {
      const auto part = evolve(env, n);
      const auto exact = oracle::binomial_cdf_row(n, i, 10);
      for (int k = 1; k <= n; ++k)
        ASSERT_NEAR(part.points[k - 1], exact[k - 1], 1e-12)
            << "p " << i / 10.0 << " n " << n << " k " << k;
    }
  }
}
