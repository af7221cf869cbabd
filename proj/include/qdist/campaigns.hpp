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
#include <chrono>
#include <cmath>
#include <string>
#include <vector>

#include "qdist/chebyshev.hpp"
#include "qdist/distance.hpp"
#include "qdist/estimators.hpp"
#include "qdist/parallel.hpp"
#include "qdist/reductions.hpp"

// Batch runners shared by the command-line tool and the acceptance suite.
namespace qdist {

inline double elapsed_ms(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

struct ApproxRow {
  double q = 0.0;
  int dtilde = 0;
  int degree = 0;
  double max_error = 0.0;
  // 4 x the error of the plain degree-dtilde truncation, a computable
  // stand-in for 4 x the best uniform error.
  double bound_4eps = 0.0;
  double max_abs = 0.0;
  double runtime_ms = 0.0;

  bool bounded() const { return max_abs <= 1.0; }
  bool within_bound() const { return max_error <= bound_4eps + 1e-14; }
};

inline ApproxRow approx_row(double q, int dtilde, int grid) {
  const auto start = std::chrono::steady_clock::now();
  const auto raw = chebyshev_coeffs(q, dtilde);
  const ChebyshevSeries s = averaged_truncation(raw, dtilde, q);
  ChebyshevSeries plain{q, dtilde, dtilde, std::vector<double>(raw.begin(), raw.begin() + dtilde + 1), std::nullopt};
  const GridStats g = grid_stats(s, grid);
  ApproxRow row;
  row.q = q;
  row.dtilde = dtilde;
  row.degree = s.degree;
  row.max_error = g.max_error;
  row.max_abs = g.max_abs;
  row.bound_4eps = 4.0 * grid_stats(plain, grid).max_error;
  row.runtime_ms = elapsed_ms(start);
  return row;
}

/// Random pair on n qubits with ranks drawn from 1..min(max_rank, 2^n).
inline std::pair<DensityMatrix, DensityMatrix> random_pair(std::size_t n_qubits, std::size_t max_rank, std::uint64_t seed) {
  Rng rng(seed);
  const std::size_t dim = std::size_t{1} << n_qubits;
  const std::size_t cap = std::min(max_rank, dim);
  const std::size_t r0 = 1 + rng.uniform_int(cap);
  const std::size_t r1 = 1 + rng.uniform_int(cap);
  return {random_density(n_qubits, r0, rng.split(1)()), random_density(n_qubits, r1, rng.split(2)())};
}

struct EstimateCampaign {
  Quantity quantity = Quantity::kDistance;
  CostModel model = CostModel::kQuery;
  Backend backend = Backend::kHadamardSampling;
  double alpha = 2.0;
  double eps = 0.1;
  int trials = 1;
  std::size_t n_qubits = 2;
  std::size_t max_rank = 4;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  EstimatorOptions options;
  // Fixed instance; when absent each trial draws its own random pair.
  std::optional<std::pair<DensityMatrix, DensityMatrix>> instance;
};

/// Trial t uses instance seed split(2t) and estimator seed split(2t + 1).
inline std::vector<EstimationReport> run_estimate_campaign(const EstimateCampaign &c) {
  if (c.trials < 1) throw Error(ErrorCode::kParamOutOfRange, "trials must be >= 1");
  const Rng root(c.seed);
  std::vector<EstimationReport> out(static_cast<std::size_t>(c.trials));
  parallel_for(out.size(), c.threads, [&](std::size_t t) {
    const std::uint64_t est_seed = root.split(2 * t + 1)();
    if (c.instance) {
      out[t] = estimate(c.quantity, c.model, c.instance->first, c.instance->second, c.alpha, c.eps, est_seed, c.backend, c.options);
    } else {
      const auto [r0, r1] = random_pair(c.n_qubits, c.max_rank, root.split(2 * t)());
      out[t] = estimate(c.quantity, c.model, r0, r1, c.alpha, c.eps, est_seed, c.backend, c.options);
    }
  });
  return out;
}

inline double success_rate(const std::vector<EstimationReport> &rs, double tol) {
  if (rs.empty()) return 0.0;
  std::size_t ok = 0;
  for (const auto &r : rs) ok += r.abs_error() && *r.abs_error() <= tol;
  return static_cast<double>(ok) / static_cast<double>(rs.size());
}

struct VerifyRow {
  std::size_t trial = 0;
  std::string check;
  std::string alpha;
  double margin = 0.0;  // >= -slack means the inequality holds
};

struct VerifyCampaign {
  int pairs = 1000;
  std::vector<SchattenOrder> alphas{SchattenOrder::finite(1), SchattenOrder::finite(1.5), SchattenOrder::finite(2),
                                    SchattenOrder::finite(3), SchattenOrder::infinity()};
  std::size_t max_qubits = 4;
  std::size_t max_rank = 4;
  double slack = 1e-10;
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

struct VerifyResult {
  std::vector<VerifyRow> rows;
  std::size_t violations = 0;
};

namespace detail {

inline void verify_trial(const VerifyCampaign &c, std::size_t t, std::vector<VerifyRow> &rows) {
  const Rng rng(Rng(c.seed).split(t)());
  Rng pick = rng.split(0);
  const std::size_t n = 1 + pick.uniform_int(c.max_qubits);
  const std::size_t cap = std::min(c.max_rank, std::size_t{1} << n);
  const auto rho0 = random_density(n, 1 + pick.uniform_int(cap), rng.split(1)());
  const auto rho1 = random_density(n, 1 + pick.uniform_int(cap), rng.split(2)());
  const auto rho2 = random_density(n, 1 + pick.uniform_int(cap), rng.split(3)());
  const auto psi0 = DensityMatrix::from_pure(random_pure(n, rng.split(4)()));
  const auto psi1 = DensityMatrix::from_pure(random_pure(n, rng.split(5)()));
  auto add = [&](const char *check, const SchattenOrder *a, double margin) {
    rows.push_back({t, check, a ? a->to_string() : "", margin});
  };

  const double trace = trace_distance(rho0, rho1);
  const double f = fidelity(rho0, rho1);
  add("fidelity_lower", nullptr, trace - (1.0 - f));
  add("fidelity_upper", nullptr, std::sqrt(std::max(0.0, 1.0 - f * f)) - trace);

  const auto spec = difference_spectrum(rho0, rho1);
  const double norm1 = schatten_norm(spec, SchattenOrder::finite(1));
  const int rank_a = numerical_rank([&] {
    std::vector<double> mags;
    for (double x : spec) mags.push_back(std::abs(x));
    return mags;
  }());

  double prev = 0.0;
  bool have_prev = false;
  for (const auto &a : c.alphas) {
    const RankBounds rb = verify_rank_bounds(rho0, rho1, a);
    add("rank_lower", &a, rb.trace - rb.lower);
    add("rank_upper", &a, rb.upper - rb.trace);
    add("rank_simplified_upper", &a, rb.simplified_upper - rb.trace);
    add("simplified_not_tighter", &a, rb.simplified_upper - rb.upper);
    add("t_alpha_le_trace", &a, rb.trace - rb.t_alpha);
    add("powered_le_trace", &a, rb.trace - powered_distance(rho0, rho1, a));

    const RankBounds pure = verify_rank_bounds(psi0, psi1, a);
    add("pure_equality", &a, -std::abs(pure.trace - pure.lower));

    const double t12 = l_alpha_distance(rho1, rho2, a), t02 = l_alpha_distance(rho0, rho2, a);
    add("triangle", &a, rb.t_alpha + t12 - t02);
    add("symmetry", &a, -std::abs(rb.t_alpha - l_alpha_distance(rho1, rho0, a)));

    const double norm_a = schatten_norm(spec, a);
    const double r_factor = a.is_infinite() ? rank_a : std::pow(rank_a, 1.0 - 1.0 / a.value());
    add("norm_sandwich_lower", &a, norm1 - norm_a);
    add("norm_sandwich_upper", &a, r_factor * norm_a - norm1);

    // Alphas are listed in increasing order; T_alpha must not increase.
    if (have_prev) add("monotone_in_alpha", &a, prev - rb.t_alpha);
    prev = rb.t_alpha;
    have_prev = true;
  }
}

}  // namespace detail

inline VerifyResult run_verify_campaign(const VerifyCampaign &c) {
  if (c.pairs < 1) throw Error(ErrorCode::kParamOutOfRange, "pairs must be >= 1");
  if (c.max_qubits < 1 || c.max_qubits > 6) throw Error(ErrorCode::kParamOutOfRange, "max_qubits must be in [1, 6]");
  if (c.max_rank < 1) throw Error(ErrorCode::kParamOutOfRange, "max_rank must be >= 1");
  for (std::size_t i = 1; i < c.alphas.size(); ++i) {
    const auto &a = c.alphas[i - 1], &b = c.alphas[i];
    if (a.is_infinite() || (!b.is_infinite() && b.value() <= a.value())) {
      throw Error(ErrorCode::kParamOutOfRange, "alphas must be strictly increasing");
    }
  }
  std::vector<std::vector<VerifyRow>> slots(static_cast<std::size_t>(c.pairs));
  parallel_for(slots.size(), c.threads, [&](std::size_t t) { detail::verify_trial(c, t, slots[t]); });
  VerifyResult res;
  for (auto &s : slots) {
    for (auto &r : s) {
      res.violations += r.margin < -c.slack;
      res.rows.push_back(std::move(r));
    }
  }
  return res;
}

struct BenchPoint {
  double eps = 0.0;
  double cost = 0.0;
  long long degree = 0;
  double runtime_ms = 0.0;
};

struct BenchCampaign {
  CostModel model = CostModel::kQuery;
  Backend backend = Backend::kQae;
  double alpha = 2.0;
  std::vector<double> eps{0.2, 0.1, 0.05, 0.025};
  std::uint64_t seed = 0;
  std::optional<double> tolerance;  // defaults: 0.5 query, 1.0 sample
  unsigned threads = 1;
  EstimatorOptions options;
};

struct BenchResult {
  std::vector<BenchPoint> points;
  double slope = 0.0;
  double theory = 0.0;
  double tolerance = 0.0;

  bool within() const { return std::abs(slope - theory) <= tolerance; }
};

/// Ledger cost of the distance estimator against 1/eps on one random qubit
/// pair: total queries (query model) or total samples (sample model).
inline BenchResult run_bench_campaign(const BenchCampaign &c) {
  if (c.eps.size() < 2) throw Error(ErrorCode::kParamOutOfRange, "bench needs at least two eps values");
  const auto [r0, r1] = random_pair(1, 2, Rng(c.seed).split(0)());
  BenchResult res;
  res.points.resize(c.eps.size());
  parallel_for(c.eps.size(), c.threads, [&](std::size_t i) {
    const auto start = std::chrono::steady_clock::now();
    EstimatorOptions opt = c.options;
    opt.compute_oracle = false;
    const auto r = estimate(Quantity::kDistance, c.model, r0, r1, c.alpha, c.eps[i], Rng(c.seed).split(1)(), c.backend, opt);
    res.points[i] = {c.eps[i], c.model == CostModel::kQuery ? r.ledger.total_queries() : r.ledger.total_samples(), r.degree,
                     elapsed_ms(start)};
  });
  std::vector<double> x, y;
  for (const auto &p : res.points) {
    x.push_back(1.0 / p.eps);
    y.push_back(p.cost);
  }
  res.slope = loglog_slope(x, y);
  res.theory = c.model == CostModel::kQuery ? query_exponent(c.alpha) : sample_exponent(c.alpha);
  res.tolerance = c.tolerance.value_or(c.model == CostModel::kQuery ? 0.5 : 1.0);
  return res;
}

}  // namespace qdist
