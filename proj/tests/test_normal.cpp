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

#include "fragerase/normal.hpp"
#include "oracles.hpp"

using namespace fragerase;

TEST(NormalCdf, Examples) {
  EXPECT_EQ(normal_cdf(0.0), 0.5);
  for (double t : {0.1, 0.7, 1.5, 3.0, 8.0}) EXPECT_NEAR(normal_cdf(t) + normal_cdf(-t), 1.0, 1e-15);
  EXPECT_NEAR(normal_cdf(1.959963985), 0.975, 1e-9);
  EXPECT_NEAR(oracle::normal_cdf(1.959963985), 0.97500000002688156, 1e-16);
}

// Relative condition number of Phi at t is about 1 + t^2.
TEST(NormalCdf, MatchesHighPrecisionErfc) {
  for (double t = -37.0; t <= 8.5; t += 0.037) {
    const double ref = oracle::normal_cdf(t);
    EXPECT_NEAR(normal_cdf(t), ref, 4e-16 * (1 + t * t) * ref) << t;
  }
}

TEST(NormalQuantile, Examples) {
  EXPECT_EQ(normal_quantile(0.5), 0.0);
  EXPECT_NEAR(normal_quantile(0.975), 1.959963984540054, 1e-8);
  for (double v : {1e-10, 0.01, 0.2, 0.4999}) {
    const double u = 1 - (1 - v);  // so that 1 - u is exact
    EXPECT_NEAR(normal_quantile(u), -normal_quantile(1 - u), 1e-12);
  }
  EXPECT_NEAR(normal_quantile(0.75) - normal_quantile(0.25), 1.3489795003921635, 1e-12);
}

TEST(NormalQuantile, DomainErrors) {
  for (double u : {0.0, 1.0, -0.1, 1.1, std::nan("")}) EXPECT_THROW(normal_quantile(u), Error);
}

TEST(NormalQuantile, InvertsCdfOnLogGrid) {
  double worst = 0.0;
  for (int i = 0; i <= 400; ++i) {
    const double v = std::pow(10.0, -8.0 + 8.0 * i / 400.0) * 0.5;
    for (double u : {v, 1.0 - v}) worst = std::max(worst, std::abs(normal_cdf(normal_quantile(u)) - u));
  }
  EXPECT_LE(worst, 1e-12);
}
