// Copyright 2026 The qdist Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <gtest/gtest.h>

#include "qdist/campaigns.hpp"

using namespace qdist;

TEST(Campaigns, ApproxRowQOneIsExact) {
  const auto r = approx_row(1.0, 8, 1000);
  EXPECT_LT(r.max_error, 1e-12);
  EXPECT_TRUE(r.bounded());
  EXPECT_TRUE(r.within_bound());
  EXPECT_EQ(r.degree, 15);
}

TEST(Campaigns, ApproxRowHalfPowerDecay) {
  const double e32 = approx_row(0.5, 32, 10000).max_error, e64 = approx_row(0.5, 64, 10000).max_error;
  EXPECT_GE(e64 / e32, 0.5 * std::pow(2.0, -0.5));
  EXPECT_LE(e64 / e32, 2.0 * std::pow(2.0, -0.5));
}

TEST(Campaigns, EstimateIsDeterministicAcrossThreadCounts) {
  EstimateCampaign c;
  c.trials = 6;
  c.seed = 9;
  c.threads = 1;
  const auto a = run_estimate_campaign(c);
  c.threads = 3;
  const auto b = run_estimate_campaign(c);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].estimate, b[i].estimate);
    EXPECT_EQ(a[i].seed, b[i].seed);
    EXPECT_EQ(a[i].ledger, b[i].ledger);
  }
  EXPECT_EQ(success_rate(a, 0.1), 1.0);
}

TEST(Campaigns, VerifySmallRunHasNoViolations) {
  VerifyCampaign c;
  c.pairs = 60;
  c.threads = 2;
  const auto r = run_verify_campaign(c);
  EXPECT_EQ(r.violations, 0u);
  EXPECT_FALSE(r.rows.empty());
  c.alphas = {SchattenOrder::finite(2), SchattenOrder::finite(1)};
  EXPECT_THROW(run_verify_campaign(c), Error);
}

TEST(Campaigns, BenchQuerySlope) {
  BenchCampaign c;
  const auto r = run_bench_campaign(c);
  EXPECT_EQ(r.theory, 4.0);
  EXPECT_TRUE(r.within()) << r.slope;
  for (std::size_t i = 1; i < r.points.size(); ++i) EXPECT_GT(r.points[i].cost, r.points[i - 1].cost);
}
