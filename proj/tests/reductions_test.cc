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

#include <algorithm>
#include <cmath>
#include <vector>

#include "qdist/commuting.hpp"
#include "qdist/reductions.hpp"

using namespace qdist;

namespace {

DensityMatrix ket(std::size_t n, std::size_t idx) { return DensityMatrix::from_pure(PureState::basis(n, idx)); }

DensityMatrix qubit_diag(double p) { return DensityMatrix::diagonal({p, 1.0 - p}); }

double binom(int n, int k) { return std::tgamma(n + 1.0) / (std::tgamma(k + 1.0) * std::tgamma(n - k + 1.0)); }

// Two-outcome tensor power l1 distance by direct enumeration of type classes.
double binomial_l1(double p1, double q1, int m) {
  const double p2 = 1 - p1, q2 = 1 - q1;
  double s = 0;
  for (int k = 0; k <= m; ++k) s += binom(m, k) * std::abs(std::pow(p1, k) * std::pow(p2, m - k) - std::pow(q1, k) * std::pow(q2, m - k));
  return s;
}

const std::vector<SchattenOrder> kOrders{SchattenOrder::finite(1), SchattenOrder::finite(1.5), SchattenOrder::finite(2),
                                         SchattenOrder::finite(3), SchattenOrder::infinity()};

}  // namespace

TEST(CommutingPair, QubitTotalVariation) {
  EXPECT_NEAR(cp_l_alpha(cp_from_qubit(0.95, 0.05), 1.0), 0.9, 1e-14);
  EXPECT_NEAR(cp_l_alpha(cp_from_qubit(0.95, 0.05), SchattenOrder::infinity()), 0.45, 1e-14);
  EXPECT_THROW(cp_from_qubit(1.5, 0.0), Error);
}

TEST(CommutingPair, MatchesDenseOracleOnDiagonalStates) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed);
    std::vector<double> p(4), q(4);
    double sp = 0, sq = 0;
    for (int i = 0; i < 4; ++i) {
      sp += p[i] = rng.uniform();
      sq += q[i] = rng.uniform();
    }
    for (int i = 0; i < 4; ++i) p[i] /= sp, q[i] /= sq;
    const auto rho0 = DensityMatrix::diagonal(p), rho1 = DensityMatrix::diagonal(q);
    const auto cp = cp_from_dense(rho0, rho1);
    for (const auto &a : kOrders) EXPECT_NEAR(cp_l_alpha(cp, a), l_alpha_distance(rho0, rho1, a), 1e-12) << a.to_string();
  }
  EXPECT_THROW(cp_from_dense(random_density(1, 2, 3), qubit_diag(0.5)), Error);
}

TEST(CommutingPair, XorSquareMatchesDenseDiagonal) {
  const auto cp = cp_xor_power(cp_from_qubit(0.7, 0.2), 2);
  const auto [x0, x1] = xor_states(qubit_diag(0.7), qubit_diag(0.2), 2);
  std::vector<std::pair<double, double>> dense;
  for (std::size_t i = 0; i < x0.dim(); ++i) dense.emplace_back(x0.matrix()(i, i).real(), x1.matrix()(i, i).real());
  std::sort(dense.begin(), dense.end());
  const auto expanded = cp_expand(cp);
  ASSERT_EQ(expanded.size(), dense.size());
  for (std::size_t i = 0; i < dense.size(); ++i) {
    EXPECT_NEAR(expanded[i].first, dense[i].first, 1e-14);
    EXPECT_NEAR(expanded[i].second, dense[i].second, 1e-14);
  }
}

TEST(CommutingPair, XorPowerIdentity) {
  const auto cp = cp_from_qubit(0.9, 0.3);
  const double t = cp_l_alpha(cp, 1.0);
  for (int l = 1; l <= 8; ++l) {
    const auto x = cp_xor_power(cp, l);
    x.validate();
    for (double a : {1.0, 1.1, 2.0}) EXPECT_NEAR(cp_l_alpha(x, a), std::pow(cp_l_alpha(cp, a), l), 1e-12) << l;
    EXPECT_NEAR(cp_l_alpha(x, 1.0), std::pow(t, l), 1e-12);
  }
}

TEST(CommutingPair, TensorPowerMatchesBinomialOracle) {
  for (auto [p, q] : {std::pair{0.95, 0.05}, {0.6, 0.3}, {0.5, 0.5}, {1.0, 0.0}}) {
    for (int m : {1, 2, 3, 7}) {
      const auto t = cp_tensor_power(cp_from_qubit(p, q), m);
      t.validate();
      EXPECT_NEAR(cp_l_alpha(t, 1.0), 0.5 * binomial_l1(p, q, m), 1e-12) << p << " " << q << " " << m;
    }
  }
}

TEST(CommutingPair, MassInvariantAtLargePowers) {
  const auto cp = cp_tensor_power(cp_xor_power(cp_from_qubit(0.9, 0.1), 6), 59);
  EXPECT_NO_THROW(cp.validate());
  EXPECT_NEAR(cp.log_support_size(), 6 * 59 * std::log(2.0), 1e-9);
}

TEST(CommutingPair, ThreadCountDoesNotChangeResults) {
  const auto base = cp_xor_power(cp_from_diagonals({0.5, 0.3, 0.2}, {0.1, 0.2, 0.7}), 3);
  const auto one = cp_tensor_power(base, 8, 1);
  const auto many = cp_tensor_power(base, 8, 4);
  ASSERT_EQ(one.outcomes.size(), many.outcomes.size());
  for (const auto &a : kOrders) {
    EXPECT_NEAR(cp_l_alpha(one, a, 1), cp_l_alpha(many, a, 4), 1e-12);
    EXPECT_EQ(cp_tensor_power_l_alpha(base, 12, a, 1), cp_tensor_power_l_alpha(base, 12, a, 4));
  }
}

TEST(CommutingPair, StreamedPowerMatchesMaterialized) {
  const auto base = cp_xor_power(cp_from_diagonals({0.5, 0.3, 0.2}, {0.1, 0.2, 0.7}), 2);
  for (int m : {1, 2, 5, 9}) {
    const auto full = cp_tensor_power(base, m);
    for (const auto &a : kOrders) EXPECT_NEAR(cp_tensor_power_l_alpha(base, m, a), cp_l_alpha(full, a), 1e-12) << m;
  }
  for (int m : {1, 4, 30}) EXPECT_NEAR(cp_tensor_power_l_alpha(cp_from_qubit(0.6, 0.3), m, 1.0), 0.5 * binomial_l1(0.6, 0.3, m), 1e-12);
}

TEST(CommutingPair, TypeClassOverflow) {
  std::vector<double> p(16, 1.0 / 16), q(16, 0.0);
  q[0] = 1.0;
  EXPECT_THROW(cp_tensor_power(cp_from_diagonals(p, q), 59), Error);
  try {
    cp_tensor_power(cp_from_diagonals(p, q), 59);
  } catch (const Error &e) {
    EXPECT_EQ(e.code(), ErrorCode::kTypeClassOverflow);
  }
}

TEST(RankBounds, PurePairsCollapse) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto a = DensityMatrix::from_pure(random_pure(2, seed));
    const auto b = DensityMatrix::from_pure(random_pure(2, seed + 100));
    for (const auto &o : kOrders) {
      const auto r = verify_rank_bounds(a, b, o);
      EXPECT_EQ(r.rank0, 1);
      EXPECT_EQ(r.rank1, 1);
      EXPECT_NEAR(r.lower, r.trace, 1e-10) << o.to_string();
      EXPECT_NEAR(r.upper, r.trace, 1e-10) << o.to_string();
    }
  }
}

TEST(RankBounds, KetVersusMaximallyMixed) {
  const auto r = verify_rank_bounds(ket(1, 0), DensityMatrix::maximally_mixed(1), SchattenOrder::finite(2));
  EXPECT_NEAR(r.trace, 0.5, 1e-14);
  // Difference has eigenvalues +-1/2, so T_2 = 1/2 * sqrt(1/2).
  EXPECT_NEAR(r.t_alpha, 0.5 * std::sqrt(0.5), 1e-14);
  EXPECT_TRUE(r.holds());
}

TEST(RankBounds, Campaign) {
  int pairs = 0;
  for (std::uint64_t seed = 0; seed < 250; ++seed) {
    Rng rng(seed);
    const std::size_t n = 1 + rng.uniform_int(4);
    const std::size_t dim = std::size_t{1} << n;
    const std::size_t r0 = 1 + rng.uniform_int(std::min<std::size_t>(4, dim));
    const std::size_t r1 = 1 + rng.uniform_int(std::min<std::size_t>(4, dim));
    const auto a = random_density(n, r0, rng.split(1)());
    const auto b = random_density(n, r1, rng.split(2)());
    for (const auto &o : kOrders) {
      const auto r = verify_rank_bounds(a, b, o);
      ++pairs;
      EXPECT_TRUE(r.holds()) << seed << " " << o.to_string();
      EXPECT_GE(r.simplified_upper - r.upper, -1e-10);
      EXPECT_EQ(r.rank0, static_cast<int>(r0));
    }
  }
  EXPECT_GE(pairs, 1000);
}

TEST(RankBounds, DimensionMismatch) {
  EXPECT_THROW(verify_rank_bounds(ket(1, 0), ket(2, 0), SchattenOrder::finite(2)), Error);
}

TEST(XorStates, LengthOneIsIdentity) {
  const auto a = random_density(2, 2, 5), b = random_density(2, 3, 6);
  const auto [x0, x1] = xor_states(a, b, 1);
  EXPECT_LT(max_abs_diff(x0.matrix(), a.matrix()), 1e-12);
  EXPECT_LT(max_abs_diff(x1.matrix(), b.matrix()), 1e-12);
}

TEST(XorStates, LengthTwoFormula) {
  const auto a = random_density(1, 2, 7), b = random_density(1, 2, 8);
  const auto [x0, x1] = xor_states(a, b, 2);
  const ComplexMatrix e = (kron(a.matrix(), a.matrix()) + kron(b.matrix(), b.matrix())) * Complex(0.5);
  const ComplexMatrix o = (kron(a.matrix(), b.matrix()) + kron(b.matrix(), a.matrix())) * Complex(0.5);
  EXPECT_LT(max_abs_diff(x0.matrix(), e), 1e-15);
  EXPECT_LT(max_abs_diff(x1.matrix(), o), 1e-15);
}

TEST(XorStates, ExactPowerIdentity) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto a = random_density(1, 2, seed), b = random_density(1, 2, seed + 50);
    for (int l : {2, 3}) {
      const auto [x0, x1] = xor_states(a, b, l);
      for (double al : {1.0, 1.1, 1.5, 2.0}) {
        EXPECT_NEAR(l_alpha_distance(x0, x1, al), std::pow(l_alpha_distance(a, b, al), l), 1e-9);
      }
    }
  }
}

TEST(XorStates, DimensionCap) {
  const auto a = random_density(2, 2, 1), b = random_density(2, 2, 2);
  try {
    xor_states(a, b, 7);
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.code(), ErrorCode::kDimensionCapExceeded);
  }
  EXPECT_THROW(xor_states(a, b, 0), Error);
}

TEST(DirectProduct, Bounds) {
  EXPECT_LT(max_abs_diff(direct_product(random_density(2, 3, 4), 1).matrix(), random_density(2, 3, 4).matrix()), 1e-15);
  const auto orth = direct_product_bounds(ket(1, 0), ket(1, 1), 2, 1.0);
  EXPECT_NEAR(orth.value, 1.0, 1e-12);
  EXPECT_TRUE(orth.holds());
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto a = random_density(1, 1 + seed % 2, seed), b = random_density(1, 2, seed + 1000);
    for (int l : {2, 3}) {
      const auto r = direct_product_bounds(a, b, l, 1.0);
      EXPECT_TRUE(r.lower_applies);
      EXPECT_TRUE(r.holds()) << seed << " " << l;
    }
  }
  // Upper bound alone for alpha above 1 + 1/n.
  const auto r = direct_product_bounds(random_density(2, 2, 1), random_density(2, 2, 2), 2, 3.0);
  EXPECT_FALSE(r.lower_applies);
  EXPECT_TRUE(r.holds());
}

TEST(Polarization, PlanArithmetic) {
  const auto p = polarization_plan(0.8, 0.25, 2);
  EXPECT_EQ(p.lambda, 2.0);
  EXPECT_EQ(p.l, 6);
  EXPECT_EQ(p.m, std::ceil(64.0 / (16.0 * std::pow(0.8, 12))));
  EXPECT_EQ(p.m, 59);
  EXPECT_LE(p.no_side_product, 1.0 / 16);
  const auto q = polarization_plan(0.95, 0.25, 1);
  EXPECT_EQ(q.l, 5);
  EXPECT_EQ(q.m, 4);
  const auto z = polarization_plan(0.5, 0.0, 1);
  EXPECT_EQ(z.lambda, 2.0);
  EXPECT_EQ(z.l, 5);
}

TEST(Polarization, NearlyClosedGapStillPlans) {
  const auto p = polarization_plan(0.8, 0.64 - 1e-6, 1);
  EXPECT_GT(p.lambda, 1.0);
  EXPECT_GT(p.l, 100000);
}

TEST(Polarization, GapViolation) {
  try {
    polarization_plan(0.5, 0.25, 1);
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.code(), ErrorCode::kGapViolation);
  }
  EXPECT_THROW(polarization_plan(0.5, 0.6, 1), Error);
}

TEST(Polarization, FullPlanOnCommutingPairs) {
  const auto plan = polarization_plan(0.8, 0.25, 2);
  const auto yes = partial_polarize(cp_from_qubit(0.95, 0.05), plan, SchattenOrder::finite(1), 4);
  EXPECT_EQ(yes.certificate.side, PromiseSide::kYes);
  EXPECT_TRUE(yes.certificate.satisfied);
  EXPECT_GE(yes.certificate.t_alpha_out, 0.5 - 0.5 * std::exp(-2.0));
  EXPECT_DOUBLE_EQ(yes.certificate.output_qubits, 6.0 * 59.0);
  const auto no = partial_polarize(cp_from_qubit(0.5, 0.25), plan, SchattenOrder::finite(1), 4);
  EXPECT_EQ(no.certificate.side, PromiseSide::kNo);
  EXPECT_TRUE(no.certificate.satisfied);
  EXPECT_LE(no.certificate.t_alpha_out, 1.0 / 16);
  const auto same = partial_polarize(cp_from_qubit(0.3, 0.3), plan, SchattenOrder::finite(1));
  EXPECT_EQ(same.certificate.t_alpha_out, 0.0);
  try {
    partial_polarize(cp_from_qubit(0.7, 0.2), plan, SchattenOrder::finite(1));
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.code(), ErrorCode::kUnknownSide);
  }
}

TEST(Polarization, CommutingPathMatchesDense) {
  for (int l = 1; l <= 3; ++l) {
    for (int m = 1; m <= 2; ++m) {
      const auto plan = custom_plan(0.8, 0.25, 2, l, m);
      for (auto [p, q] : {std::pair{0.95, 0.05}, {0.6, 0.4}}) {
        const auto c = partial_polarize(cp_from_qubit(p, q), plan, SchattenOrder::finite(1));
        const auto d = partial_polarize(qubit_diag(p), qubit_diag(q), plan, SchattenOrder::finite(1));
        EXPECT_NEAR(c.certificate.t_alpha_out, d.certificate.t_alpha_out, 1e-12) << l << " " << m;
        EXPECT_EQ(c.certificate.side, d.certificate.side);
        EXPECT_EQ(c.certificate.output_qubits, d.certificate.output_qubits);
      }
    }
  }
  EXPECT_THROW(partial_polarize(qubit_diag(0.95), qubit_diag(0.05), polarization_plan(0.8, 0.25, 2), SchattenOrder::finite(1)),
               Error);
}

TEST(Uniformized, FixedPoints) {
  const auto mm = DensityMatrix::maximally_mixed(2);
  EXPECT_LT(max_abs_diff(uniformized_state(mm).matrix(), mm.matrix()), 1e-12);
  const auto pure = DensityMatrix::from_pure(random_pure(2, 3));
  EXPECT_LT(max_abs_diff(uniformized_state(pure).matrix(), pure.matrix()), 1e-12);
}

TEST(Uniformized, TraceDistanceIsSpectrumTotalVariation) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto rho = random_density(3, 4, seed);
    const auto u = uniformized_state(rho);
    EXPECT_EQ(u.rank(), 4);
    double tv = 0;
    for (double x : rho.spectrum()) tv += x > 1e-12 ? std::abs(x - 0.25) : x;
    EXPECT_NEAR(trace_distance(rho, u), 0.5 * tv, 1e-10);
  }
}

TEST(PureInstances, OverlapIsExact) {
  for (double ov : {0.0, 0.3, 0.999, 1.0}) {
    const auto [a, b] = pure_instance_pair(ov, 3, 11);
    EXPECT_NEAR(std::abs(inner(a.amplitudes(), b.amplitudes())), ov, 1e-10);
  }
  EXPECT_THROW(pure_instance_pair(1.2, 2, 1), Error);
}

TEST(PureInstances, IdentityCircuit) {
  const auto inst = pureqsd_from_unitary(ComplexMatrix::identity(4), 1);
  EXPECT_NEAR(inst.overlap_sq, 1.0, 1e-14);
  EXPECT_EQ(inst.accept_prob, 0.0);
  EXPECT_EQ(inst.psi0.amplitudes().size(), 8u);
}

TEST(PureInstances, FlipOnOutputGivesOrthogonalPair) {
  ComplexMatrix x(2);
  x(0, 1) = x(1, 0) = 1.0;
  const auto inst = pureqsd_from_unitary(kron(ComplexMatrix::identity(2), x), 1);
  EXPECT_NEAR(inst.accept_prob, 1.0, 1e-14);
  EXPECT_NEAR(inst.overlap_sq, 0.0, 1e-14);
  EXPECT_NEAR(lambda_infinity(DensityMatrix::from_pure(inst.psi0), DensityMatrix::from_pure(inst.psi1)), 1.0, 1e-12);
}

TEST(PureInstances, OverlapEqualsRejectionProbabilitySquared) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto c = random_unitary(4, seed);
    const auto inst = pureqsd_from_unitary(c, seed % 2);
    // Independent: amplitude of |0..0>|0> after C^dagger P0 C, P0 projecting O onto 0.
    const std::size_t obit = seed % 2 == 0 ? 2 : 1;
    Complex amp = 0;
    for (std::size_t i = 0; i < 4; ++i) {
      if (!(i & obit)) amp += std::conj(c(i, 0)) * c(i, 0);
    }
    EXPECT_NEAR(inst.overlap_sq, std::norm(amp), 1e-10);
    EXPECT_NEAR(inst.overlap_sq, inst.direct_identity_rhs(), 1e-10);
  }
}

TEST(PureInstances, RejectsNonUnitary) {
  try {
    pureqsd_from_unitary(ComplexMatrix::identity(4) * Complex(1.1), 0);
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.code(), ErrorCode::kNotUnitary);
  }
}

TEST(Thresholds, PureStateFamily) {
  const auto [y, n] = promise_thresholds(PromiseFamily::kPureQsdBqp, 2, SchattenOrder::finite(1), 0.25, 0.0);
  EXPECT_DOUBLE_EQ(y, 0.75);
  EXPECT_DOUBLE_EQ(n, 0.25);
  for (int nq = 2; nq <= 20; ++nq) {
    for (const auto &a : kOrders) {
      const auto [yy, nn] = promise_thresholds(PromiseFamily::kPureQsdBqp, nq, a, 0.25, 0.0);
      EXPECT_GE(yy - nn, 0.25 - 1e-15);
    }
  }
  const auto [yi, ni] = promise_thresholds(PromiseFamily::kPureQsdBqp, 3, SchattenOrder::infinity(), 0.25, 0.0);
  EXPECT_DOUBLE_EQ(yi, 0.5 * (1 - 0.125));
  EXPECT_DOUBLE_EQ(ni, 0.5 * 0.125);
}

TEST(Thresholds, MixedStateGapTendsToConstant) {
  double prev = -1;
  for (int n : {1000, 10000, 100000, 1000000}) {
    const auto [y, no] = promise_thresholds(PromiseFamily::kQsdQszk, n, SchattenOrder::finite(1), 0.25, 0.0);
    EXPECT_GT(y - no, 0.3);
    EXPECT_GT(y - no, prev);
    prev = y - no;
  }
  EXPECT_NEAR(prev, 0.5, 0.01);
  try {
    promise_thresholds(PromiseFamily::kQsdQszk, 2, SchattenOrder::finite(1), 0.25, 0.0);
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.code(), ErrorCode::kGapViolation);
  }
  EXPECT_THROW(promise_thresholds(PromiseFamily::kQsdQszk, 100, SchattenOrder::finite(1), 0.6, 0.0), Error);
  EXPECT_THROW(promise_thresholds(PromiseFamily::kPureQsdBqp, 1, SchattenOrder::finite(1), 0.25, 0.0), Error);
}

TEST(ScalarFacts, SqrtGap) { EXPECT_GE(sqrt_gap_min(), -1e-12); }

TEST(ScalarFacts, RootIncrementPeaksAtZero) {
  for (double a : {1.5, 2.0, 3.0}) {
    for (double d : {1e-3, 0.01, 0.1, 0.5}) EXPECT_LE(root_increment_max_rise(a, d), 1e-15) << a << " " << d;
  }
}
