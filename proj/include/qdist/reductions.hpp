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

#pragma once

#include <algorithm>
#include <climits>
#include <cstdint>
#include <limits>
#include <span>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qdist/commuting.hpp"
#include "qdist/distance.hpp"
#include "qdist/rng.hpp"
#include "qdist/state.hpp"

namespace qdist {

inline constexpr std::size_t kMaxDenseDim = std::size_t{1} << 12;

/// Rank-dependent sandwich lower <= T <= upper around T_alpha.
struct RankBounds {
  SchattenOrder alpha = SchattenOrder::finite(1.0);
  double t_alpha = 0.0;
  double lower = 0.0;
  double trace = 0.0;
  double upper = 0.0;
  // Coarser upper bound (2 max rank)^{1 - 1/alpha} T_alpha; for infinity the
  // limit 2 max rank T_inf.
  double simplified_upper = 0.0;
  int rank0 = 0;
  int rank1 = 0;

  bool holds(double slack = 1e-10) const {
    return trace - lower >= -slack && upper - trace >= -slack && simplified_upper - trace >= -slack;
  }
};

inline RankBounds verify_rank_bounds(const DensityMatrix &rho0, const DensityMatrix &rho1, const SchattenOrder &order) {
  check_same_dims(rho0, rho1);
  RankBounds b;
  b.alpha = order;
  b.rank0 = rho0.rank();
  b.rank1 = rho1.rank();
  b.trace = trace_distance(rho0, rho1);
  b.t_alpha = l_alpha_distance(rho0, rho1, order);
  const double r0 = b.rank0, r1 = b.rank1;
  if (order.is_infinite()) {
    b.lower = 2.0 * b.t_alpha;
    b.upper = 2.0 * std::min(r0, r1) * b.t_alpha;
    b.simplified_upper = 2.0 * std::max(r0, r1) * b.t_alpha;
  } else {
    const double a = order.value();
    b.lower = std::pow(2.0, 1.0 - 1.0 / a) * b.t_alpha;
    b.upper = 2.0 * std::pow(std::pow(r0, 1.0 - a) + std::pow(r1, 1.0 - a), -1.0 / a) * b.t_alpha;
    b.simplified_upper = std::pow(2.0 * std::max(r0, r1), 1.0 - 1.0 / a) * b.t_alpha;
  }
  return b;
}

inline void check_dense_cap(std::size_t dim, std::size_t cap) {
  if (dim > cap) {
    throw Error(ErrorCode::kDimensionCapExceeded,
                "dense dimension " + std::to_string(dim) + " exceeds cap " + std::to_string(cap) + "; use the commuting-pair path");
  }
}

/// Dimension of an l-fold tensor power, saturating instead of overflowing.
inline std::size_t power_dim(std::size_t dim, long long l) {
  std::size_t out = 1;
  for (long long i = 0; i < l; ++i) {
    if (out > SIZE_MAX / dim) return SIZE_MAX;
    out *= dim;
  }
  return out;
}

/// rho~_b = 2^{-l+1} sum over b_1 xor ... xor b_l = b of rho_{b_1} (x) ... (x) rho_{b_l}.
inline std::pair<DensityMatrix, DensityMatrix> xor_states(const DensityMatrix &rho0, const DensityMatrix &rho1, int l,
                                                          std::size_t cap = kMaxDenseDim) {
  check_same_dims(rho0, rho1);
  if (l < 1) throw Error(ErrorCode::kParamOutOfRange, "xor length must be >= 1");
  check_dense_cap(power_dim(rho0.dim(), l), cap);
  // Unnormalized even/odd parity sums, built one factor at a time.
  ComplexMatrix even = rho0.matrix(), odd = rho1.matrix();
  for (int i = 1; i < l; ++i) {
    ComplexMatrix e = kron(even, rho0.matrix()) + kron(odd, rho1.matrix());
    ComplexMatrix o = kron(even, rho1.matrix()) + kron(odd, rho0.matrix());
    even = std::move(e);
    odd = std::move(o);
  }
  const Complex norm = std::ldexp(1.0, -l + 1);
  return {DensityMatrix(even * norm), DensityMatrix(odd * norm)};
}

inline DensityMatrix direct_product(const DensityMatrix &rho, int l, std::size_t cap = kMaxDenseDim) {
  if (l < 1) throw Error(ErrorCode::kParamOutOfRange, "tensor power must be >= 1");
  check_dense_cap(power_dim(rho.dim(), l), cap);
  ComplexMatrix m = rho.matrix();
  for (int i = 1; i < l; ++i) m = kron(m, rho.matrix());
  return DensityMatrix(m);
}

struct DirectProductBounds {
  double t_alpha_in = 0.0;
  double value = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  bool lower_applies = false;  // alpha <= 1 + 1/n

  bool holds(double slack = 1e-10) const {
    return upper - value >= -slack && (!lower_applies || value - lower >= -slack);
  }
};

inline DirectProductBounds direct_product_bounds(const DensityMatrix &rho0, const DensityMatrix &rho1, int l, double alpha,
                                                 std::size_t cap = kMaxDenseDim) {
  DirectProductBounds b;
  b.t_alpha_in = l_alpha_distance(rho0, rho1, alpha);
  b.value = l_alpha_distance(direct_product(rho0, l, cap), direct_product(rho1, l, cap), alpha);
  b.lower = 0.5 - 0.5 * std::exp(-0.5 * l * b.t_alpha_in * b.t_alpha_in);
  b.upper = l * b.t_alpha_in;
  b.lower_applies = alpha <= 1.0 + 1.0 / static_cast<double>(std::max<std::size_t>(1, rho0.n_qubits())) + 1e-15;
  return b;
}

struct PolarizationPlan {
  double a = 0.0;
  double b = 0.0;
  int k = 1;
  double lambda = 0.0;
  int l = 0;
  long long m = 0;
  bool m_saturated = false;
  double no_side_product = 0.0;  // m b^l, which the no side needs <= 1/16

  double yes_bound() const { return 0.5 - 0.5 * std::exp(-static_cast<double>(k)); }
  static constexpr double no_bound() { return 1.0 / 16.0; }
};

/// lambda = min(a^2/b, 2), l = ceil(log_lambda(32k)), m = ceil(lambda^l / (16 a^{2l})).
inline PolarizationPlan polarization_plan(double a, double b, int k) {
  if (!(b >= 0.0 && b < a && a <= 1.0)) throw Error(ErrorCode::kParamOutOfRange, "need 0 <= b < a <= 1");
  if (!(a * a > b)) throw Error(ErrorCode::kGapViolation, "need a^2 > b");
  if (k < 1) throw Error(ErrorCode::kParamOutOfRange, "k must be >= 1");
  PolarizationPlan p;
  p.a = a;
  p.b = b;
  p.k = k;
  p.lambda = b == 0.0 ? 2.0 : std::min(a * a / b, 2.0);
  const double l = std::log(32.0 * k) / std::log(p.lambda);
  if (!(l < 1e9)) throw Error(ErrorCode::kParamOutOfRange, "xor length overflows");
  p.l = std::max(1, static_cast<int>(std::ceil(l - 1e-9)));
  const double log_m = p.l * std::log(p.lambda) - std::log(16.0) - 2.0 * p.l * std::log(a);
  if (log_m > std::log(9.0e18)) {
    p.m = LLONG_MAX;
    p.m_saturated = true;
  } else {
    p.m = std::max(1LL, static_cast<long long>(std::ceil(std::exp(log_m) * (1.0 - 1e-12))));
  }
  p.no_side_product = static_cast<double>(p.m) * std::pow(b, p.l);
  return p;
}

/// Plan with explicit (l, m), for down-scaled dense cross-checks.
inline PolarizationPlan custom_plan(double a, double b, int k, int l, long long m) {
  PolarizationPlan p = polarization_plan(a, b, k);
  p.l = l;
  p.m = m;
  p.m_saturated = false;
  p.no_side_product = static_cast<double>(m) * std::pow(b, l);
  return p;
}

enum class PromiseSide { kYes, kNo };

inline const char *side_name(PromiseSide s) { return s == PromiseSide::kYes ? "yes" : "no"; }

struct PolarizationCertificate {
  PolarizationPlan plan;
  SchattenOrder alpha = SchattenOrder::finite(1.0);
  PromiseSide side = PromiseSide::kYes;
  double t_alpha_in = 0.0;
  double t_alpha_out = 0.0;
  double bound = 0.0;
  bool satisfied = false;
  double output_qubits = 0.0;  // l * m * n
  std::string path;            // "dense" or "commuting"
};

inline PromiseSide classify_side(double t_in, const PolarizationPlan &plan) {
  if (t_in >= plan.a) return PromiseSide::kYes;
  if (t_in <= plan.b) return PromiseSide::kNo;
  throw Error(ErrorCode::kUnknownSide, "input T_alpha = " + std::to_string(t_in) + " lies strictly between b and a");
}

inline PolarizationCertificate make_certificate(const PolarizationPlan &plan, const SchattenOrder &alpha, double t_in, double t_out,
                                                std::size_t n_qubits, std::string path) {
  PolarizationCertificate c;
  c.plan = plan;
  c.alpha = alpha;
  c.side = classify_side(t_in, plan);
  c.t_alpha_in = t_in;
  c.t_alpha_out = t_out;
  c.path = std::move(path);
  c.output_qubits = static_cast<double>(plan.l) * static_cast<double>(plan.m) * static_cast<double>(n_qubits);
  if (c.side == PromiseSide::kYes) {
    c.bound = plan.yes_bound();
    c.satisfied = t_out >= c.bound - 1e-12;
  } else {
    c.bound = PolarizationPlan::no_bound();
    c.satisfied = t_out <= c.bound + 1e-12;
  }
  return c;
}

struct DensePolarized {
  DensityMatrix rho0;
  DensityMatrix rho1;
  PolarizationCertificate certificate;
};

/// XOR with l, then m-fold tensor power, on dense states.
inline DensePolarized partial_polarize(const DensityMatrix &rho0, const DensityMatrix &rho1, const PolarizationPlan &plan,
                                       const SchattenOrder &alpha, std::size_t cap = kMaxDenseDim) {
  check_same_dims(rho0, rho1);
  check_dense_cap(power_dim(power_dim(rho0.dim(), plan.l), plan.m), cap);
  const double t_in = l_alpha_distance(rho0, rho1, alpha);
  classify_side(t_in, plan);
  auto [x0, x1] = xor_states(rho0, rho1, plan.l, cap);
  DensityMatrix out0 = direct_product(x0, static_cast<int>(plan.m), cap);
  DensityMatrix out1 = direct_product(x1, static_cast<int>(plan.m), cap);
  const double t_out = l_alpha_distance(out0, out1, alpha);
  auto cert = make_certificate(plan, alpha, t_in, t_out, rho0.n_qubits(), "dense");
  return {std::move(out0), std::move(out1), cert};
}

/// The commuting output is kept factored: the polarized pair is xored^{(x) m}.
struct CommutingPolarized {
  CommutingPair xored;
  long long m = 1;
  PolarizationCertificate certificate;

  /// Materialized output, only when the type classes fit kMaxTypeClasses.
  CommutingPair expand(unsigned threads = 1) const { return cp_tensor_power(xored, static_cast<int>(m), threads); }
};

inline CommutingPolarized partial_polarize(const CommutingPair &cp, const PolarizationPlan &plan, const SchattenOrder &alpha,
                                           unsigned threads = 1) {
  if (plan.m_saturated || plan.m > INT_MAX) throw Error(ErrorCode::kTypeClassOverflow, "tensor power too large");
  cp.validate();
  const double t_in = cp_l_alpha(cp, alpha, threads);
  classify_side(t_in, plan);
  CommutingPair x = cp_xor_power(cp, plan.l, threads);
  const double t_out = cp_tensor_power_l_alpha(x, static_cast<int>(plan.m), alpha, threads);
  const double n = std::ceil(cp.log_support_size() / std::log(2.0) - 1e-9);
  auto cert = make_certificate(plan, alpha, t_in, t_out, static_cast<std::size_t>(std::max(1.0, n)), "commuting");
  return {std::move(x), plan.m, cert};
}

/// Same eigenvectors as rho, eigenvalues 1/rank on its numerical support.
inline DensityMatrix uniformized_state(const DensityMatrix &rho) {
  const HermitianEig eig = eig_hermitian(rho.matrix());
  const int r = numerical_rank(eig.values);
  const double lmax = eig.values.back();
  const double cut = static_cast<double>(eig.values.size()) * std::numeric_limits<double>::epsilon() * lmax;
  return DensityMatrix(spectral_apply(eig, [&](double x) { return x > cut ? 1.0 / r : 0.0; }));
}

/// Two n-qubit pure states with |<psi0|psi1>| = overlap.
inline std::pair<PureState, PureState> pure_instance_pair(double overlap, std::size_t n_qubits, std::uint64_t seed) {
  if (!(overlap >= 0.0 && overlap <= 1.0)) throw Error(ErrorCode::kParamOutOfRange, "overlap must be in [0, 1]");
  if (n_qubits < 1) throw Error(ErrorCode::kParamOutOfRange, "need at least one qubit");
  const PureState a = random_pure(n_qubits, seed);
  const PureState b = random_pure(n_qubits, Rng(seed).split(1)());
  // Orthonormal partner of a inside span{a, b}.
  ComplexVector e = b.amplitudes();
  const Complex proj = inner(a.amplitudes(), e);
  for (std::size_t i = 0; i < e.size(); ++i) e[i] -= proj * a.amplitudes()[i];
  const double en = vector_norm(e);
  for (auto &z : e) z /= en;
  ComplexVector v(e.size());
  const double s = std::sqrt(std::max(0.0, 1.0 - overlap * overlap));
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = overlap * a.amplitudes()[i] + s * e[i];
  return {a, PureState::normalized(std::move(v))};
}

struct PureQsdInstance {
  PureState psi0;
  PureState psi1;
  // Pr[measuring the output qubit of C|0...0> gives 1]
  double accept_prob = 0.0;
  double overlap_sq = 0.0;

  /// The identity as usually quoted: |<psi0|psi1>|^2 = 1 - p^2.
  double quoted_identity_rhs() const { return 1.0 - accept_prob * accept_prob; }
  /// What the construction actually gives: (1 - p)^2.
  double direct_identity_rhs() const { return (1.0 - accept_prob) * (1.0 - accept_prob); }
};

/// psi0 = |0...0>|0>_F, psi1 = C^dagger CNOT_{O->F} C |0...0>|0>_F, with the
/// flag F appended as the last qubit.
inline PureQsdInstance pureqsd_from_unitary(const ComplexMatrix &c, std::size_t output_qubit) {
  if (unitarity_defect(c) > 1e-10) throw Error(ErrorCode::kNotUnitary, "circuit matrix is not unitary");
  const std::size_t n = qubit_count(c.dim());
  if (output_qubit >= n) throw Error(ErrorCode::kParamOutOfRange, "output qubit out of range");
  const std::size_t d = c.dim();
  const std::size_t obit = std::size_t{1} << (n - 1 - output_qubit);

  ComplexVector zero(d);
  zero[0] = 1.0;
  const ComplexVector phi = c * std::span<const Complex>(zero);
  double p = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    if (i & obit) p += std::norm(phi[i]);
  }
  // CNOT: basis (i, f) -> (i, f xor o(i)); the state index is 2 i + f.
  ComplexVector after(2 * d);
  for (std::size_t i = 0; i < d; ++i) after[2 * i + ((i & obit) ? 1 : 0)] = phi[i];
  const ComplexMatrix cdag = c.adjoint();
  ComplexVector psi1(2 * d);
  for (std::size_t f = 0; f < 2; ++f) {
    ComplexVector slice(d);
    for (std::size_t i = 0; i < d; ++i) slice[i] = after[2 * i + f];
    const ComplexVector back = cdag * std::span<const Complex>(slice);
    for (std::size_t i = 0; i < d; ++i) psi1[2 * i + f] = back[i];
  }
  PureQsdInstance inst{PureState::basis(n + 1, 0), PureState::normalized(std::move(psi1)), std::clamp(p, 0.0, 1.0), 0.0};
  inst.overlap_sq = std::norm(inner(inst.psi0.amplitudes(), inst.psi1.amplitudes()));
  return inst;
}

enum class PromiseFamily { kPureQsdBqp, kQsdQszk };

/// (yes, no) thresholds of the two hardness results.
/// kPureQsdBqp: (2^{1/a-1}(1 - 2^{-n}), 2^{1/a-1-n}).
/// kQsdQszk: (1 - gamma, gamma') with the tau/delta-dependent exponents.
inline std::pair<double, double> promise_thresholds(PromiseFamily which, int n, const SchattenOrder &alpha, double tau,
                                                    double delta) {
  if (n < 2) throw Error(ErrorCode::kParamOutOfRange, "n must be >= 2");
  double yes = 0.0, no = 0.0;
  if (which == PromiseFamily::kPureQsdBqp) {
    const double f = alpha.is_infinite() ? 0.5 : std::pow(2.0, 1.0 / alpha.value() - 1.0);
    yes = f * (1.0 - std::ldexp(1.0, -n));
    no = f * std::ldexp(1.0, -n);
  } else {
    if (!(tau > 0.0 && tau < 0.5)) throw Error(ErrorCode::kParamOutOfRange, "tau must be in (0, 1/2)");
    if (!(delta >= 0.0)) throw Error(ErrorCode::kParamOutOfRange, "delta must be >= 0");
    const double nd = static_cast<double>(n);
    const double den = std::pow(nd, 1.0 + delta) + 1.0;
    const double nt = std::pow(nd, tau);
    const double gamma = 1.0 - std::exp2(-(nd + 1.0) / den) + std::exp2(-nt - (nd + 1.0) / den);
    yes = 1.0 - gamma;
    no = std::exp2(-nt - 1.0 / den);
  }
  if (!(yes - no > 0.0)) {
    throw Error(ErrorCode::kGapViolation, "promise gap " + std::to_string(yes - no) + " is not positive at n = " + std::to_string(n));
  }
  return {yes, no};
}

/// min over an even grid of [0, 1] of sqrt(1 - (1 - x)^2) - sqrt(x).
inline double sqrt_gap_min(int grid = 10000) {
  double m = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= grid; ++i) {
    const double x = static_cast<double>(i) / grid;
    m = std::min(m, std::sqrt(1.0 - (1.0 - x) * (1.0 - x)) - std::sqrt(x));
  }
  return m;
}

/// Largest increase of (x + delta)^{1/alpha} - x^{1/alpha} between adjacent
/// grid points of [0, 1]; <= 0 means non-increasing, so the maximum is at 0.
inline double root_increment_max_rise(double alpha, double delta, int grid = 10000) {
  double prev = std::pow(delta, 1.0 / alpha);
  double rise = -std::numeric_limits<double>::infinity();
  for (int i = 1; i <= grid; ++i) {
    const double x = static_cast<double>(i) / grid;
    const double v = std::pow(x + delta, 1.0 / alpha) - std::pow(x, 1.0 / alpha);
    rise = std::max(rise, v - prev);
    prev = v;
  }
  return rise;
}

}  // namespace qdist
