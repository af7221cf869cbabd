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
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>

#include "qdist/chebyshev.hpp"
#include "qdist/eig.hpp"
#include "qdist/rng.hpp"
#include "qdist/state.hpp"

namespace qdist {

/// Which state-preparation oracle (or which state's copies) a cost refers to.
enum class Oracle { kQ0, kQ1 };

inline const char *oracle_name(Oracle o) { return o == Oracle::kQ0 ? "q0" : "q1"; }

/// Query and sample counts. Stored as doubles: sample-model counts routinely
/// exceed 2^64 at modest precision.
struct CostLedger {
  double queries_q0 = 0.0;
  double queries_q1 = 0.0;
  double samples_rho0 = 0.0;
  double samples_rho1 = 0.0;
  double shots = 0.0;
  // Derived O((a + 1) d) gate estimate; never simulated.
  double gates = 0.0;

  double total_queries() const { return queries_q0 + queries_q1; }
  double total_samples() const { return samples_rho0 + samples_rho1; }

  void charge_query(Oracle o, double n = 1.0) { (o == Oracle::kQ0 ? queries_q0 : queries_q1) += n; }
  void charge_samples(Oracle o, double n) { (o == Oracle::kQ0 ? samples_rho0 : samples_rho1) += n; }

  CostLedger &operator+=(const CostLedger &o) {
    queries_q0 += o.queries_q0;
    queries_q1 += o.queries_q1;
    samples_rho0 += o.samples_rho0;
    samples_rho1 += o.samples_rho1;
    shots += o.shots;
    gates += o.gates;
    return *this;
  }

  friend CostLedger operator+(CostLedger a, const CostLedger &b) { return a += b; }

  /// Every count multiplied by n (n uses of the same construction).
  CostLedger times(double n) const {
    return CostLedger{queries_q0 * n, queries_q1 * n, samples_rho0 * n, samples_rho1 * n, shots * n, gates * n};
  }

  /// True when no count of `after` is below the matching count here.
  bool dominated_by(const CostLedger &after) const {
    return queries_q0 <= after.queries_q0 && queries_q1 <= after.queries_q1 && samples_rho0 <= after.samples_rho0 &&
           samples_rho1 <= after.samples_rho1 && shots <= after.shots && gates <= after.gates;
  }

  friend bool operator==(const CostLedger &, const CostLedger &) = default;
};

/// Largest singular value of a Hermitian matrix.
inline double hermitian_operator_norm(const ComplexMatrix &m) {
  const auto v = eigenvalues(m);
  return std::max(std::abs(v.front()), std::abs(v.back()));
}

/// Matrix-level stand-in for a unitary whose top-left block is target/scale
/// up to err. `ledger` counts what one use of that unitary costs.
struct BlockEncoding {
  ComplexMatrix target;
  double scale = 1.0;
  int ancillas = 0;
  double err = 0.0;
  CostLedger ledger;

  void validate() const {
    if (!(scale > 0.0)) throw Error(ErrorCode::kPrecondition, "block-encoding scale must be > 0");
    const double nrm = hermitian_operator_norm(target);
    if (nrm > scale + err + 1e-10) {
      throw Error(ErrorCode::kPrecondition, "target norm " + std::to_string(nrm) + " exceeds scale " + std::to_string(scale));
    }
  }
};

/// Purification-based encoding of rho: scale 1, one query each to U and U^dagger.
inline BlockEncoding encode_density(const DensityMatrix &rho, Oracle which) {
  BlockEncoding be{rho.matrix(), 1.0, static_cast<int>(2 * rho.n_qubits()), 0.0, {}};
  be.ledger.charge_query(which, 2.0);
  return be;
}

/// Encoding available to a samplized algorithm: a (2, a, 0) encoding of rho,
/// one use of the underlying oracle per use.
inline BlockEncoding encode_density_sampled(const DensityMatrix &rho, Oracle which) {
  BlockEncoding be{rho.matrix(), 2.0, static_cast<int>(2 * rho.n_qubits()) + 1, 0.0, {}};
  be.ledger.charge_query(which, 1.0);
  return be;
}

/// be0 - be1 via the state-preparation pair (HX, H): scale doubles, one
/// extra ancilla, one controlled use of each input.
inline BlockEncoding lcu_difference(const BlockEncoding &be0, const BlockEncoding &be1) {
  if (be0.target.dim() != be1.target.dim()) throw Error(ErrorCode::kDimensionMismatch, "lcu inputs differ in dimension");
  if (be0.scale != be1.scale) throw Error(ErrorCode::kPrecondition, "lcu inputs need equal scale");
  if (be0.err != 0.0 || be1.err != 0.0) throw Error(ErrorCode::kPrecondition, "lcu inputs must be exact");
  BlockEncoding out{be0.target - be1.target, 2.0 * be0.scale, std::max(be0.ancillas, be1.ancillas) + 1, 0.0,
                    be0.ledger + be1.ledger};
  return out;
}

/// Exact QSVT: target <- (1/2) P(target / scale) with P the series. The
/// circuit error delta is recorded in err only. Costs one use of the input
/// encoding per unit of nominal degree.
inline BlockEncoding qsvt_apply(const BlockEncoding &be, const ChebyshevSeries &s, double delta) {
  if (be.err != 0.0) throw Error(ErrorCode::kPrecondition, "qsvt input must be exact");
  const double sup = series_sup_bound(s);
  if (sup > 1.0 + 1e-12) {
    throw Error(ErrorCode::kSeriesUnbounded, "series reaches " + std::to_string(sup) + " on [-1, 1]");
  }
  const double inv = 1.0 / be.scale;
  BlockEncoding out;
  out.target = matrix_function(be.target, [&](double x) { return 0.5 * eval_series(s, std::clamp(x * inv, -1.0, 1.0)); });
  out.scale = 1.0;
  out.ancillas = be.ancillas + 2;
  out.err = delta;
  out.ledger = be.ledger.times(static_cast<double>(s.degree));
  out.ledger.gates += static_cast<double>(be.ancillas + 1) * s.degree;
  return out;
}

inline void require_unit_scale(const BlockEncoding &be) {
  if (be.scale != 1.0) throw Error(ErrorCode::kScaleNotOne, "Hadamard test needs a scale-1 encoding, got " + std::to_string(be.scale));
}

/// Pr[ancilla reads 0] = 1/2 + Re tr(A rho) / 2
inline double hadamard_test_prob(const BlockEncoding &be, const DensityMatrix &rho) {
  require_unit_scale(be);
  return std::clamp(0.5 + 0.5 * trace_product(be.target, rho.matrix()).real(), 0.0, 1.0);
}

/// Variant with an S^dagger on the control: 1/2 + Im tr(A rho) / 2.
inline double hadamard_test_prob_imag(const BlockEncoding &be, const DensityMatrix &rho) {
  require_unit_scale(be);
  return std::clamp(0.5 + 0.5 * trace_product(be.target, rho.matrix()).imag(), 0.0, 1.0);
}

/// One controlled use of the encoding plus one preparation of the input state.
inline CostLedger hadamard_test_cost(const BlockEncoding &be, Oracle prepared) {
  CostLedger c = be.ledger;
  c.charge_query(prepared, 1.0);
  c.shots += 1.0;
  return c;
}

inline int bernoulli_zero_bit(double prob_zero, Rng &rng) { return rng.uniform() < prob_zero ? 0 : 1; }

inline int hadamard_test_sample(const BlockEncoding &be, const DensityMatrix &rho, std::uint64_t seed) {
  Rng rng(seed);
  return bernoulli_zero_bit(hadamard_test_prob(be, rho), rng);
}

/// Number of zero outcomes among `shots` independent runs. Small counts are
/// drawn bit by bit; large ones through a binomial draw.
inline std::uint64_t hadamard_test_counts(double prob_zero, std::uint64_t shots, Rng &rng) {
  if (shots <= 4096) {
    std::uint64_t zeros = 0;
    for (std::uint64_t i = 0; i < shots; ++i) zeros += bernoulli_zero_bit(prob_zero, rng) == 0;
    return zeros;
  }
  std::binomial_distribution<std::uint64_t> dist(shots, std::clamp(prob_zero, 0.0, 1.0));
  return dist(rng);
}

/// Pr[y] for phase estimation of eigenphase omega with M outcomes.
inline double phase_outcome_prob(double omega, std::uint64_t y, std::uint64_t m) {
  const double md = static_cast<double>(m);
  double delta = omega - static_cast<double>(y) / md;
  delta -= std::round(delta);
  const double den = std::sin(std::numbers::pi * delta);
  if (std::abs(den) < 1e-300 || std::abs(delta) < 1e-15) return 1.0;
  const double num = std::sin(md * std::numbers::pi * delta);
  return (num * num) / (md * md * den * den);
}

inline bool is_power_of_two(std::uint64_t m) { return m != 0 && (m & (m - 1)) == 0; }

/// Simulated amplitude estimation: picks the +theta or -theta eigenphase
/// branch with probability 1/2 each, samples the phase-estimation outcome by
/// walking outward from the peak, and returns sin^2(pi y / M).
inline double amplitude_estimate(double p_true, std::uint64_t m, Rng &rng) {
  if (!(p_true >= 0.0 && p_true <= 1.0)) throw Error(ErrorCode::kDomainError, "amplitude must be a probability");
  if (m < 2 || !is_power_of_two(m)) throw Error(ErrorCode::kMOutOfRange, "M must be a power of two >= 2");
  const double theta = std::asin(std::sqrt(p_true)) / std::numbers::pi;
  const bool minus = rng.uniform() < 0.5;
  double omega = minus ? 1.0 - theta : theta;
  omega -= std::floor(omega);
  const double u = rng.uniform();
  const double md = static_cast<double>(m);
  const auto peak = static_cast<std::int64_t>(std::floor(omega * md)) % static_cast<std::int64_t>(m);
  const auto mi = static_cast<std::int64_t>(m);
  double cum = 0.0;
  std::int64_t y = peak;
  // Order: peak, peak+1, peak-1, peak+2, peak-2, ...
  for (std::int64_t step = 0; step < mi; ++step) {
    const std::int64_t off = step == 0 ? 0 : (step % 2 == 1 ? (step + 1) / 2 : -(step / 2));
    y = ((peak + off) % mi + mi) % mi;
    cum += phase_outcome_prob(omega, static_cast<std::uint64_t>(y), m);
    if (u < cum) break;
  }
  const double s = std::sin(std::numbers::pi * static_cast<double>(y) / md);
  return s * s;
}

inline double amplitude_estimate(double p_true, std::uint64_t m, std::uint64_t seed) {
  Rng rng(seed);
  return amplitude_estimate(p_true, m, rng);
}

/// Additive error bound 2 pi sqrt(p(1-p))/M + pi^2/M^2 that holds with
/// probability at least 8/pi^2.
inline double amplitude_estimate_bound(double p_true, std::uint64_t m) {
  const double md = static_cast<double>(m);
  return 2.0 * std::numbers::pi * std::sqrt(p_true * (1.0 - p_true)) / md + std::numbers::pi * std::numbers::pi / (md * md);
}

inline std::uint64_t next_power_of_two(std::uint64_t x) {
  std::uint64_t m = 1;
  while (m < x) m <<= 1;
  return m;
}

}  // namespace qdist
