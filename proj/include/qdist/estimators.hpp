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

#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qdist/block_encoding.hpp"
#include "qdist/chebyshev.hpp"
#include "qdist/distance.hpp"

namespace qdist {

enum class CostModel { kQuery, kSample };
enum class Backend { kExactExpectation, kHadamardSampling, kQae };
enum class Quantity { kPowered, kDistance };

inline const char *backend_name(Backend b) {
  switch (b) {
    case Backend::kExactExpectation: return "exact_expectation";
    case Backend::kHadamardSampling: return "hadamard_sampling";
    case Backend::kQae: return "qae";
  }
  return "?";
}

inline Backend parse_backend(const std::string &s) {
  if (s == "exact_expectation" || s == "exact") return Backend::kExactExpectation;
  if (s == "hadamard_sampling" || s == "hadamard") return Backend::kHadamardSampling;
  if (s == "qae") return Backend::kQae;
  throw Error(ErrorCode::kParse, "unknown backend '" + s + "'");
}

inline const char *model_name(CostModel m) { return m == CostModel::kQuery ? "query" : "sample"; }
inline const char *quantity_name(Quantity q) { return q == Quantity::kPowered ? "powered" : "distance"; }

struct BudgetSplit {
  double eps_total = 0.0;
  double eps_p = 0.0;
  double delta_p = 0.0;
  double eps_H = 0.0;
  double delta = 0.0;  // samplizer diamond-norm slack; 0 in the query model
  CostModel model = CostModel::kQuery;
};

inline BudgetSplit split_budget(double alpha, double eps, CostModel model) {
  if (!(alpha > 1.0)) throw Error(ErrorCode::kAlphaOutOfRange, "alpha must be > 1, got " + std::to_string(alpha));
  if (!(eps > 0.0 && eps < 1.0)) throw Error(ErrorCode::kEpsOutOfRange, "eps must lie in (0, 1), got " + std::to_string(eps));
  BudgetSplit b;
  b.eps_total = eps;
  b.model = model;
  if (model == CostModel::kQuery) {
    const double u = std::pow(2.0, -alpha - 4.0) * eps;
    b.eps_p = b.delta_p = b.eps_H = u;
  } else {
    const double u = std::pow(4.0, -alpha - 3.0) * eps;
    b.eps_p = b.delta_p = b.eps_H = b.delta = u;
  }
  return b;
}

struct EstimatorOptions {
  // alpha must lie in (alpha_min, alpha_max]; callers may widen this.
  double alpha_min = 1.05;
  double alpha_max = 8.0;
  // Refuse plans whose averaged series would need more coefficients.
  long long max_dtilde = 1LL << 24;
  // Query ledger cap: total queries <= C * d / eps_H with d the nominal degree.
  double ledger_constant = 8500.0;
  int qae_repetitions = 9;
  bool compute_oracle = true;
};

struct EstimationReport {
  Quantity quantity = Quantity::kPowered;
  CostModel model = CostModel::kQuery;
  double alpha = 0.0;
  double estimate = 0.0;
  double raw_estimate = 0.0;  // unclamped 2^{a+1}(x0 - x1) / 2 or 4^a(p0 - p1) / 2
  double eps_total = 0.0;
  double error_bound = 0.0;
  double confidence = 0.0;
  std::uint64_t seed = 0;
  Backend backend = Backend::kExactExpectation;
  BudgetSplit split;
  long long degree = 0;  // nominal degree from degree_for_error
  int dtilde = 0;
  double shots_per_term = 0.0;
  double ledger_bound = 0.0;  // query model only
  CostLedger ledger;
  std::optional<double> oracle_value;

  std::optional<double> abs_error() const {
    if (!oracle_value) return std::nullopt;
    return std::abs(estimate - *oracle_value);
  }
};

struct SeriesPlan {
  long long degree = 0;
  std::shared_ptr<const ChebyshevSeries> series;
};

/// Certified series for approximating (1/2) sgn(x)|x|^q to eps_p. Series are
/// cached by (q, dtilde) since repeated trials share them.
inline SeriesPlan plan_series(double q, double eps_p, const EstimatorOptions &opt) {
  const long long d = degree_for_error(q, eps_p, beta_prime(q));
  const long long dt = dtilde_for_degree(d);
  if (dt > opt.max_dtilde) {
    throw Error(ErrorCode::kParamOutOfRange, "polynomial degree " + std::to_string(d) + " exceeds the configured cap");
  }
  static std::mutex mu;
  static std::map<std::pair<double, long long>, std::shared_ptr<const ChebyshevSeries>> cache;
  const auto key = std::make_pair(q, dt);
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(key);
    if (it != cache.end()) return {d, it->second};
  }
  auto s = std::make_shared<ChebyshevSeries>(build_series(q, static_cast<int>(dt)));
  certify_bounded(*s);
  std::lock_guard<std::mutex> lock(mu);
  auto [it, inserted] = cache.emplace(key, std::move(s));
  return {d, it->second};
}

inline void check_alpha_range(double alpha, const EstimatorOptions &opt) {
  if (!(alpha > opt.alpha_min && alpha <= opt.alpha_max)) {
    throw Error(ErrorCode::kAlphaOutOfRange,
                "alpha " + std::to_string(alpha) + " outside (" + std::to_string(opt.alpha_min) + ", " + std::to_string(opt.alpha_max) + "]");
  }
  if (!(alpha > 1.0)) throw Error(ErrorCode::kAlphaOutOfRange, "alpha must be > 1");
}

/// Hoeffding count for estimating a +-1 valued mean to t with failure prob f.
inline double hoeffding_shots(double t, double fail) { return std::ceil(2.0 * std::log(2.0 / fail) / (t * t)); }

namespace detail {

struct TraceEstimate {
  double value = 0.0;
  CostLedger cost;
  double shots = 0.0;
};

/// Estimate x = tr(A rho) = 2 Pr[0] - 1 for one Hadamard-test input.
inline TraceEstimate estimate_trace(const BlockEncoding &bep, const DensityMatrix &rho, Oracle which, Backend backend,
                                    const BudgetSplit &split, double fail, Rng rng, const EstimatorOptions &opt) {
  const double p = hadamard_test_prob(bep, rho);
  const CostLedger per_use = hadamard_test_cost(bep, which);
  TraceEstimate out;
  switch (backend) {
    case Backend::kExactExpectation:
    case Backend::kHadamardSampling: {
      out.shots = hoeffding_shots(split.eps_H, fail);
      out.cost = per_use.times(out.shots);
      if (backend == Backend::kExactExpectation) {
        out.value = 2.0 * p - 1.0;
      } else {
        const auto zeros = hadamard_test_counts(p, static_cast<std::uint64_t>(out.shots), rng);
        out.value = 2.0 * static_cast<double>(zeros) / out.shots - 1.0;
      }
      break;
    }
    case Backend::kQae: {
      const auto m = next_power_of_two(static_cast<std::uint64_t>(std::ceil(8.0 * std::numbers::pi / split.eps_H)));
      std::vector<double> runs(static_cast<std::size_t>(opt.qae_repetitions));
      for (auto &r : runs) r = amplitude_estimate(p, m, rng);
      std::sort(runs.begin(), runs.end());
      out.value = 2.0 * runs[runs.size() / 2] - 1.0;
      out.shots = static_cast<double>(opt.qae_repetitions);
      out.cost = per_use.times(static_cast<double>(opt.qae_repetitions) * static_cast<double>(m));
      out.cost.shots = out.shots;
      break;
    }
  }
  return out;
}

}  // namespace detail

/// Query-model estimate of Lambda_alpha(rho0, rho1).
inline EstimationReport estimate_powered_query(const DensityMatrix &rho0, const DensityMatrix &rho1, double alpha, double eps,
                                               std::uint64_t seed, Backend backend, const EstimatorOptions &opt = {}) {
  check_same_dims(rho0, rho1);
  check_alpha_range(alpha, opt);
  const BudgetSplit split = split_budget(alpha, eps, CostModel::kQuery);
  const SeriesPlan plan = plan_series(alpha - 1.0, split.eps_p, opt);

  const BlockEncoding nu = lcu_difference(encode_density(rho0, Oracle::kQ0), encode_density(rho1, Oracle::kQ1));
  const BlockEncoding bep = qsvt_apply(nu, *plan.series, split.delta_p);

  // Two trace terms with failure 0.1 each: overall success >= 0.8.
  const Rng rng(seed);
  const auto x0 = detail::estimate_trace(bep, rho0, Oracle::kQ0, backend, split, 0.1, rng.split(0), opt);
  const auto x1 = detail::estimate_trace(bep, rho1, Oracle::kQ1, backend, split, 0.1, rng.split(1), opt);

  EstimationReport r;
  r.quantity = Quantity::kPowered;
  r.model = CostModel::kQuery;
  r.alpha = alpha;
  r.raw_estimate = std::pow(2.0, alpha + 1.0) * (x0.value - x1.value) / 2.0;
  r.estimate = std::clamp(r.raw_estimate, 0.0, 1.0);
  r.eps_total = eps;
  r.error_bound = eps;
  r.confidence = 0.8;
  r.seed = seed;
  r.backend = backend;
  r.split = split;
  r.degree = plan.degree;
  r.dtilde = plan.series->dtilde;
  r.shots_per_term = x0.shots;
  r.ledger = x0.cost + x1.cost;
  r.ledger_bound = opt.ledger_constant * static_cast<double>(plan.degree) / split.eps_H;
  if (opt.compute_oracle) r.oracle_value = powered_distance(rho0, rho1, alpha);
  return r;
}

/// Query-model estimate of T_alpha: the powered estimator run at eps^alpha.
inline EstimationReport estimate_distance_query(const DensityMatrix &rho0, const DensityMatrix &rho1, double alpha, double eps,
                                                std::uint64_t seed, Backend backend, const EstimatorOptions &opt = {}) {
  EstimationReport r = estimate_powered_query(rho0, rho1, alpha, std::pow(eps, alpha), seed, backend, opt);
  r.quantity = Quantity::kDistance;
  r.raw_estimate = r.estimate;
  r.estimate = std::min(1.0, powered_to_distance(r.estimate, alpha));
  r.eps_total = eps;
  r.error_bound = std::pow(2.0, 1.0 / alpha - 1.0) * eps;
  if (opt.compute_oracle) r.oracle_value = l_alpha_distance(rho0, rho1, alpha);
  return r;
}

/// Samples consumed by one samplized run of a query algorithm that makes
/// q_total queries, q_j of them to the oracle for rho_j: q_total q_j / delta
/// * ln^2(q_total / delta).
inline double samplizer_samples(double q_total, double q_j, double delta) {
  const double lg = std::log(std::max(q_total / delta, std::numbers::e));
  return q_total * q_j / delta * lg * lg;
}

/// Sample-model estimate of Lambda_alpha. The samplized channel is applied
/// exactly; its diamond-norm slack delta appears only in the ledger.
inline EstimationReport estimate_powered_sample(const DensityMatrix &rho0, const DensityMatrix &rho1, double alpha, double eps,
                                                std::uint64_t seed, Backend backend = Backend::kHadamardSampling,
                                                const EstimatorOptions &opt = {}) {
  check_same_dims(rho0, rho1);
  check_alpha_range(alpha, opt);
  if (backend == Backend::kQae) throw Error(ErrorCode::kPrecondition, "the sample model has no amplitude-estimation backend");
  const BudgetSplit split = split_budget(alpha, eps, CostModel::kSample);
  const SeriesPlan plan = plan_series(alpha - 1.0, split.eps_p, opt);

  const BlockEncoding nu =
      lcu_difference(encode_density_sampled(rho0, Oracle::kQ0), encode_density_sampled(rho1, Oracle::kQ1));
  const BlockEncoding bep = qsvt_apply(nu, *plan.series, split.delta_p);
  const double q0 = bep.ledger.queries_q0, q1 = bep.ledger.queries_q1, q = q0 + q1;

  // Failure 0.01 per state.
  const double shots = hoeffding_shots(split.eps_H, 0.01);
  const Rng rng(seed);
  double p[2];
  CostLedger ledger;
  const DensityMatrix *rho[2] = {&rho0, &rho1};
  for (int j = 0; j < 2; ++j) {
    const double prob = hadamard_test_prob(bep, *rho[j]);
    if (backend == Backend::kExactExpectation) {
      p[j] = 2.0 * prob - 1.0;
    } else {
      Rng r = rng.split(static_cast<std::uint64_t>(j));
      const auto zeros = hadamard_test_counts(prob, static_cast<std::uint64_t>(shots), r);
      p[j] = 2.0 * static_cast<double>(zeros) / shots - 1.0;
    }
    CostLedger per_shot;
    per_shot.charge_samples(Oracle::kQ0, samplizer_samples(q, q0, split.delta));
    per_shot.charge_samples(Oracle::kQ1, samplizer_samples(q, q1, split.delta));
    per_shot.charge_samples(j == 0 ? Oracle::kQ0 : Oracle::kQ1, 1.0);
    per_shot.shots = 1.0;
    per_shot.gates = bep.ledger.gates;
    ledger += per_shot.times(shots);
  }

  EstimationReport r;
  r.quantity = Quantity::kPowered;
  r.model = CostModel::kSample;
  r.alpha = alpha;
  r.raw_estimate = std::pow(4.0, alpha) * (p[0] - p[1]) / 2.0;
  r.estimate = std::clamp(r.raw_estimate, 0.0, 1.0);
  r.eps_total = eps;
  r.error_bound = eps;
  r.confidence = 0.98;
  r.seed = seed;
  r.backend = backend;
  r.split = split;
  r.degree = plan.degree;
  r.dtilde = plan.series->dtilde;
  r.shots_per_term = shots;
  r.ledger = ledger;
  if (opt.compute_oracle) r.oracle_value = powered_distance(rho0, rho1, alpha);
  return r;
}

inline EstimationReport estimate_distance_sample(const DensityMatrix &rho0, const DensityMatrix &rho1, double alpha, double eps,
                                                 std::uint64_t seed, Backend backend = Backend::kHadamardSampling,
                                                 const EstimatorOptions &opt = {}) {
  EstimationReport r = estimate_powered_sample(rho0, rho1, alpha, std::pow(eps, alpha), seed, backend, opt);
  r.quantity = Quantity::kDistance;
  r.raw_estimate = r.estimate;
  r.estimate = std::min(1.0, powered_to_distance(r.estimate, alpha));
  r.eps_total = eps;
  r.error_bound = std::pow(2.0, 1.0 / alpha - 1.0) * eps;
  if (opt.compute_oracle) r.oracle_value = l_alpha_distance(rho0, rho1, alpha);
  return r;
}

/// Dispatch on quantity and model.
inline EstimationReport estimate(Quantity quantity, CostModel model, const DensityMatrix &rho0, const DensityMatrix &rho1,
                                 double alpha, double eps, std::uint64_t seed, Backend backend, const EstimatorOptions &opt = {}) {
  if (model == CostModel::kQuery) {
    return quantity == Quantity::kPowered ? estimate_powered_query(rho0, rho1, alpha, eps, seed, backend, opt)
                                          : estimate_distance_query(rho0, rho1, alpha, eps, seed, backend, opt);
  }
  return quantity == Quantity::kPowered ? estimate_powered_sample(rho0, rho1, alpha, eps, seed, backend, opt)
                                        : estimate_distance_sample(rho0, rho1, alpha, eps, seed, backend, opt);
}

/// Least-squares slope of log(y) against log(x).
inline double loglog_slope(const std::vector<double> &x, const std::vector<double> &y) {
  if (x.size() != y.size() || x.size() < 2) throw Error(ErrorCode::kPrecondition, "slope fit needs >= 2 matching points");
  double mx = 0.0, my = 0.0;
  const auto n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

/// Exponents of 1/eps in the query and sample cost of the distance estimators.
inline double query_exponent(double alpha) { return alpha + 1.0 + 1.0 / (alpha - 1.0); }
inline double sample_exponent(double alpha) { return 3.0 * alpha + 2.0 + 2.0 / (alpha - 1.0); }

}  // namespace qdist
