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

#include <cmath>

#include "qdist/estimators.hpp"

using namespace qdist;

namespace {

DensityMatrix ket(std::size_t n, std::size_t idx) { return DensityMatrix::from_pure(PureState::basis(n, idx)); }

double hilbert_schmidt_powered(const DensityMatrix &a, const DensityMatrix &b) {
  return 0.5 * (trace_product(a.matrix(), a.matrix()).real() + trace_product(b.matrix(), b.matrix()).real() -
                2.0 * trace_product(a.matrix(), b.matrix()).real());
}

}  // namespace

TEST(SplitBudget, QueryConstants) {
  const auto b = split_budget(2.0, 0.16, CostModel::kQuery);
  EXPECT_DOUBLE_EQ(b.eps_p, 0.0025);
  EXPECT_DOUBLE_EQ(b.delta_p, 0.0025);
  EXPECT_DOUBLE_EQ(b.eps_H, 0.0025);
  EXPECT_EQ(b.delta, 0.0);
}

TEST(SplitBudget, SampleConstants) {
  const auto b = split_budget(2.0, 0.1, CostModel::kSample);
  const double u = 0.1 / 1024.0;
  EXPECT_DOUBLE_EQ(b.eps_p, u);
  EXPECT_DOUBLE_EQ(b.delta_p, u);
  EXPECT_DOUBLE_EQ(b.eps_H, u);
  EXPECT_DOUBLE_EQ(b.delta, u);
}

TEST(SplitBudget, Errors) {
  try {
    split_budget(1.0, 0.1, CostModel::kQuery);
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.code(), ErrorCode::kAlphaOutOfRange);
  }
  EXPECT_THROW(split_budget(2.0, 0.0, CostModel::kQuery), Error);
  EXPECT_THROW(split_budget(2.0, 1.0, CostModel::kSample), Error);
}

TEST(DecompositionIdentity, SignedPowerTraceGivesSchattenPower) {
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto r0 = random_density(2, 1 + s % 4, 10 + s), r1 = random_density(2, 1 + (s + 2) % 4, 20 + s);
    const ComplexMatrix nu = r0.matrix() - r1.matrix();
    for (double a : {1.5, 2.0, 3.0}) {
      const ComplexMatrix g = matrix_function(nu, [a](double x) { return x == 0.0 ? 0.0 : std::copysign(std::pow(std::abs(x), a - 1.0), x); });
      const double lhs = trace_product(r0.matrix(), g).real() - trace_product(r1.matrix(), g).real();
      EXPECT_NEAR(lhs, 2.0 * powered_distance(r0, r1, a), 1e-10);
    }
  }
}

TEST(ErrorChain, PolynomialReplacementWithinEpsP) {
  for (double a : {1.5, 2.0, 3.0}) {
    const auto split = split_budget(a, 0.2, CostModel::kQuery);
    const auto plan = plan_series(a - 1.0, split.eps_p, {});
    for (std::uint64_t s = 0; s < 5; ++s) {
      const auto r0 = random_density(2, 2, 30 + s), r1 = random_density(2, 3, 40 + s);
      const ComplexMatrix nu = r0.matrix() - r1.matrix();
      const ComplexMatrix poly = matrix_function(nu, [&](double x) { return 0.5 * eval_series(*plan.series, x / 2.0); });
      const ComplexMatrix exact = matrix_function(nu, [&](double x) { return 0.5 * signed_power_half(x / 2.0, a - 1.0); });
      const double d_poly = trace_product(poly, nu).real();
      const double d_exact = trace_product(exact, nu).real();
      EXPECT_LE(std::abs(d_poly - d_exact), split.eps_p) << a;
    }
  }
}

TEST(QueryEstimator, EqualStatesGiveZero) {
  const auto rho = random_density(2, 3, 1);
  for (Backend b : {Backend::kExactExpectation, Backend::kHadamardSampling, Backend::kQae}) {
    const auto r = estimate_powered_query(rho, rho, 2.0, 0.1, 7, b);
    EXPECT_LE(r.estimate, 0.1) << backend_name(b);
  }
}

TEST(QueryEstimator, OrthogonalKetsExact) {
  const auto r = estimate_powered_query(ket(1, 0), ket(1, 1), 2.0, 0.05, 1, Backend::kExactExpectation);
  EXPECT_NEAR(r.estimate, 1.0, 0.05);
  ASSERT_TRUE(r.oracle_value.has_value());
  EXPECT_DOUBLE_EQ(*r.oracle_value, 1.0);
}

TEST(QueryEstimator, ExactBackendAlwaysWithinEps) {
  for (std::uint64_t s = 0; s < 40; ++s) {
    const auto r0 = random_density(2, 1 + s % 4, 100 + s), r1 = random_density(2, 1 + (s / 4) % 4, 200 + s);
    for (double a : {1.5, 2.0, 3.0}) {
      const auto r = estimate_powered_query(r0, r1, a, 0.1, s, Backend::kExactExpectation);
      EXPECT_LE(*r.abs_error(), 0.1);
    }
  }
}

TEST(QueryEstimator, SamplingBackendsMostlyWithinEps) {
  int ok_h = 0, ok_q = 0;
  const int n = 40;
  for (int s = 0; s < n; ++s) {
    const auto r0 = random_density(2, 2, 300 + s), r1 = random_density(2, 3, 400 + s);
    ok_h += *estimate_powered_query(r0, r1, 1.5, 0.1, s, Backend::kHadamardSampling).abs_error() <= 0.1;
    ok_q += *estimate_powered_query(r0, r1, 1.5, 0.1, s, Backend::kQae).abs_error() <= 0.1;
  }
  EXPECT_GE(ok_h, 0.8 * n);
  EXPECT_GE(ok_q, 0.8 * n);
}

TEST(QueryEstimator, Deterministic) {
  const auto r0 = random_density(2, 2, 5), r1 = random_density(2, 2, 6);
  for (Backend b : {Backend::kHadamardSampling, Backend::kQae}) {
    const auto a = estimate_powered_query(r0, r1, 2.0, 0.1, 99, b);
    const auto c = estimate_powered_query(r0, r1, 2.0, 0.1, 99, b);
    EXPECT_EQ(a.estimate, c.estimate);
    EXPECT_EQ(a.ledger, c.ledger);
  }
}

TEST(QueryEstimator, BackendsConvergeWithManyShots) {
  // 10^6 shots on the same encoding: sampled and exact traces agree within 3 sigma.
  const auto r0 = random_density(2, 2, 50), r1 = random_density(2, 4, 51);
  const auto plan = plan_series(1.0, 0.01, {});
  const auto bep = qsvt_apply(lcu_difference(encode_density(r0, Oracle::kQ0), encode_density(r1, Oracle::kQ1)), *plan.series, 0.0);
  const double p = hadamard_test_prob(bep, r0);
  Rng rng(3);
  const double n = 1e6;
  const double got = static_cast<double>(hadamard_test_counts(p, static_cast<std::uint64_t>(n), rng)) / n;
  EXPECT_NEAR(got, p, 3.0 * std::sqrt(p * (1 - p) / n));
}

TEST(QueryEstimator, AlphaRangeEnforced) {
  const auto r = random_density(1, 1, 1);
  for (double a : {1.0, 1.05, 8.5}) {
    try {
      estimate_powered_query(r, r, a, 0.1, 1, Backend::kExactExpectation);
      FAIL() << a;
    } catch (const Error &e) {
      EXPECT_EQ(e.code(), ErrorCode::kAlphaOutOfRange);
    }
  }
  EstimatorOptions wide;
  wide.alpha_max = 10.0;
  EXPECT_NO_THROW(estimate_powered_query(r, r, 9.0, 0.4, 1, Backend::kExactExpectation, wide));
}

TEST(QueryEstimator, DimensionMismatch) {
  EXPECT_THROW(estimate_powered_query(ket(1, 0), ket(2, 0), 2.0, 0.1, 1, Backend::kExactExpectation), Error);
}

TEST(QueryEstimator, QaeLedgerWithinConstantBound) {
  for (double a : {1.5, 2.0, 3.0, 5.0}) {
    for (double eps : {0.2, 0.1, 0.05}) {
      const auto r = estimate_powered_query(ket(1, 0), ket(1, 1), a, eps, 1, Backend::kQae);
      EXPECT_LE(r.ledger.total_queries(), r.ledger_bound) << a << " " << eps;
      EXPECT_GT(r.ledger.total_queries(), 0.0);
    }
  }
}

TEST(DistanceQuery, OrthogonalKets) {
  const auto r = estimate_distance_query(ket(1, 0), ket(1, 1), 2.0, 0.1, 3, Backend::kExactExpectation);
  EXPECT_NEAR(r.estimate, 1.0 / std::sqrt(2.0), 0.1);
  EXPECT_NEAR(r.error_bound, std::pow(2.0, -0.5) * 0.1, 1e-15);
}

TEST(DistanceQuery, EqualStates) {
  const auto rho = random_density(2, 2, 8);
  EXPECT_LE(estimate_distance_query(rho, rho, 2.0, 0.1, 1, Backend::kQae).estimate, 0.1);
}

TEST(DistanceQuery, LedgerGrowthWhenEpsHalves) {
  const auto r0 = random_density(1, 2, 1), r1 = random_density(1, 1, 2);
  const double c1 = estimate_distance_query(r0, r1, 2.0, 0.1, 1, Backend::kQae).ledger.total_queries();
  const double c2 = estimate_distance_query(r0, r1, 2.0, 0.05, 1, Backend::kQae).ledger.total_queries();
  const double ratio = c2 / c1;
  EXPECT_GE(ratio, 16.0 / 2.0);
  EXPECT_LE(ratio, 16.0 * 2.0);
}

TEST(SampleEstimator, EqualStates) {
  const auto rho = random_density(1, 2, 3);
  EXPECT_LE(estimate_powered_sample(rho, rho, 2.0, 0.1, 5).estimate, 0.1);
}

TEST(SampleEstimator, HilbertSchmidtAgreement) {
  int ok = 0;
  for (int s = 0; s < 30; ++s) {
    const auto r0 = random_density(1, 1 + s % 2, 500 + s), r1 = random_density(1, 1 + (s / 2) % 2, 600 + s);
    const auto r = estimate_powered_sample(r0, r1, 2.0, 0.1, s);
    ok += std::abs(r.estimate - hilbert_schmidt_powered(r0, r1)) <= 0.1;
  }
  EXPECT_GE(ok, 28);
}

TEST(SampleEstimator, LedgerExponent) {
  const auto r0 = random_density(1, 2, 1), r1 = random_density(1, 1, 2);
  std::vector<double> inv_eps, cost;
  for (double eps : {0.2, 0.1, 0.05, 0.025}) {
    const auto r = estimate_powered_sample(r0, r1, 2.0, eps, 1, Backend::kExactExpectation);
    inv_eps.push_back(1.0 / eps);
    cost.push_back(r.ledger.total_samples());
  }
  // Powered sample exponent 3 + 2/(alpha - 1) = 5 up to the log factor.
  EXPECT_NEAR(loglog_slope(inv_eps, cost), 5.0, 1.0);
}

TEST(SampleEstimator, QaeRejected) {
  const auto rho = random_density(1, 2, 3);
  EXPECT_THROW(estimate_powered_sample(rho, rho, 2.0, 0.1, 5, Backend::kQae), Error);
}

TEST(EvenAlpha, BothEstimatorsMatchHilbertSchmidt) {
  for (int s = 0; s < 10; ++s) {
    const auto r0 = random_density(2, 2, 700 + s), r1 = random_density(2, 3, 800 + s);
    const double hs = hilbert_schmidt_powered(r0, r1);
    EXPECT_NEAR(estimate_powered_query(r0, r1, 2.0, 0.1, s, Backend::kExactExpectation).estimate, hs, 0.1);
    EXPECT_NEAR(estimate_powered_sample(r0, r1, 2.0, 0.1, s, Backend::kExactExpectation).estimate, hs, 0.1);
  }
}

TEST(Slope, RecoversKnownExponent) {
  const std::vector<double> x{1, 2, 4, 8}, y{3, 24, 192, 1536};
  EXPECT_NEAR(loglog_slope(x, y), 3.0, 1e-12);
  EXPECT_DOUBLE_EQ(query_exponent(2.0), 4.0);
  EXPECT_DOUBLE_EQ(sample_exponent(2.0), 10.0);
}
