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
#include <limits>
#include <string>
#include <vector>

#include "qdist/distance.hpp"
#include "qdist/parallel.hpp"

namespace qdist {

/// log(exp(a) + exp(b)) without overflow.
inline double log_add_exp(double a, double b) {
  if (a == -std::numeric_limits<double>::infinity()) return b;
  if (b == -std::numeric_limits<double>::infinity()) return a;
  const double m = std::max(a, b);
  return m + std::log1p(std::exp(-std::abs(a - b)));
}

/// Running log-sum-exp accumulator.
struct LogSum {
  double max = -std::numeric_limits<double>::infinity();
  double scaled = 0.0;  // sum of exp(x - max)

  void add(double x) {
    if (x == -std::numeric_limits<double>::infinity()) return;
    if (x <= max) {
      scaled += std::exp(x - max);
    } else {
      scaled = scaled * std::exp(max - x) + 1.0;
      max = x;
    }
  }

  void merge(const LogSum &o) {
    if (o.scaled == 0.0) return;
    if (scaled == 0.0) {
      *this = o;
      return;
    }
    if (o.max <= max) {
      scaled += o.scaled * std::exp(o.max - max);
    } else {
      scaled = scaled * std::exp(max - o.max) + o.scaled;
      max = o.max;
    }
  }

  double value() const { return scaled == 0.0 ? -std::numeric_limits<double>::infinity() : max + std::log(scaled); }
};

/// One joint eigenvalue pair (p, q) of two simultaneously diagonal states,
/// repeated exp(log_mult) times.
struct CpOutcome {
  double p = 0.0;
  double q = 0.0;
  double log_mult = 0.0;
};

/// Compressed joint spectrum of a commuting pair of states.
struct CommutingPair {
  std::vector<CpOutcome> outcomes;
  std::string note;

  /// log(sum mult * p), log(sum mult * q); both should be ~0.
  std::pair<double, double> log_masses() const {
    LogSum sp, sq;
    for (const auto &o : outcomes) {
      if (o.p > 0.0) sp.add(o.log_mult + std::log(o.p));
      if (o.q > 0.0) sq.add(o.log_mult + std::log(o.q));
    }
    return {sp.value(), sq.value()};
  }

  void validate(double tol = 1e-9) const {
    for (const auto &o : outcomes) {
      if (!(o.p >= 0.0 && o.q >= 0.0) || !std::isfinite(o.log_mult)) {
        throw Error(ErrorCode::kInvalidState, "commuting pair has a negative or non-finite entry");
      }
    }
    const auto [lp, lq] = log_masses();
    if (std::abs(std::expm1(lp)) > tol || std::abs(std::expm1(lq)) > tol) {
      throw Error(ErrorCode::kInvalidState, "commuting pair masses are not 1");
    }
  }

  /// Number of distinct joint eigenvalues, sum of multiplicities (may be huge).
  double log_support_size() const {
    LogSum s;
    for (const auto &o : outcomes) s.add(o.log_mult);
    return s.value();
  }
};

inline CommutingPair cp_from_diagonals(const std::vector<double> &p, const std::vector<double> &q) {
  if (p.size() != q.size()) throw Error(ErrorCode::kDimensionMismatch, "diagonals differ in length");
  CommutingPair cp;
  for (std::size_t i = 0; i < p.size(); ++i) cp.outcomes.push_back({p[i], q[i], 0.0});
  cp.validate();
  return cp;
}

/// rho0 = diag(p, 1 - p), rho1 = diag(q, 1 - q)
inline CommutingPair cp_from_qubit(double p, double q) {
  if (!(p >= 0.0 && p <= 1.0 && q >= 0.0 && q <= 1.0)) throw Error(ErrorCode::kParamOutOfRange, "qubit probabilities must be in [0, 1]");
  CommutingPair cp = cp_from_diagonals({p, 1.0 - p}, {q, 1.0 - q});
  cp.note = "qubit";
  return cp;
}

/// Requires both states diagonal in the computational basis.
inline CommutingPair cp_from_dense(const DensityMatrix &rho0, const DensityMatrix &rho1, double tol = 1e-12) {
  check_same_dims(rho0, rho1);
  std::vector<double> p(rho0.dim()), q(rho0.dim());
  for (std::size_t r = 0; r < rho0.dim(); ++r) {
    for (std::size_t c = 0; c < rho0.dim(); ++c) {
      if (r != c && (std::abs(rho0.matrix()(r, c)) > tol || std::abs(rho1.matrix()(r, c)) > tol)) {
        throw Error(ErrorCode::kPrecondition, "states are not diagonal");
      }
    }
    p[r] = rho0.matrix()(r, r).real();
    q[r] = rho1.matrix()(r, r).real();
  }
  return cp_from_diagonals(p, q);
}

/// Sorts outcomes and merges those whose (p, q) agree to a relative 1e-13.
inline void cp_merge(CommutingPair &cp) {
  auto &v = cp.outcomes;
  std::sort(v.begin(), v.end(), [](const CpOutcome &a, const CpOutcome &b) { return a.p != b.p ? a.p < b.p : a.q < b.q; });
  const auto close = [](double x, double y) { return std::abs(x - y) <= 1e-13 * std::max(std::abs(x), std::abs(y)); };
  std::vector<CpOutcome> out;
  for (const auto &o : v) {
    if (!out.empty() && close(out.back().p, o.p) && close(out.back().q, o.q)) {
      out.back().log_mult = log_add_exp(out.back().log_mult, o.log_mult);
    } else {
      out.push_back(o);
    }
  }
  v = std::move(out);
}

inline constexpr double kMaxTypeClasses = 1e7;

/// log C(m + r - 1, r - 1), the number of compositions of m into r parts.
inline double log_composition_count(long long m, std::size_t r) {
  return std::lgamma(static_cast<double>(m + static_cast<long long>(r))) - std::lgamma(static_cast<double>(m) + 1.0) -
         std::lgamma(static_cast<double>(r));
}

inline void check_type_classes(long long m, std::size_t r) {
  if (log_composition_count(m, r) > std::log(kMaxTypeClasses) + 1e-9) {
    throw Error(ErrorCode::kTypeClassOverflow, "more than 1e7 type classes for power " + std::to_string(m) + " over " +
                                                   std::to_string(r) + " outcomes");
  }
}

namespace detail {

/// Visits every composition (k_1..k_r) of m with k_0 fixed to `first`.
template <class F>
void for_each_composition(std::vector<int> &k, std::size_t pos, int remaining, F &f) {
  if (pos + 1 == k.size()) {
    k[pos] = remaining;
    f(k);
    return;
  }
  for (int v = remaining; v >= 0; --v) {
    k[pos] = v;
    for_each_composition(k, pos + 1, remaining - v, f);
  }
}

/// Enumerates type classes of an m-fold product, one task per value of the
/// first count, and concatenates results in task order.
template <class Emit>
std::vector<CpOutcome> enumerate_type_classes(std::size_t r, int m, unsigned threads, Emit emit) {
  std::vector<std::vector<CpOutcome>> slots(static_cast<std::size_t>(m) + 1);
  parallel_for(slots.size(), threads, [&](std::size_t task) {
    const int first = m - static_cast<int>(task);
    std::vector<int> k(r, 0);
    k[0] = first;
    auto &slot = slots[task];
    if (r == 1) {
      slot.push_back(emit(k));
      return;
    }
    auto f = [&](const std::vector<int> &kk) { slot.push_back(emit(kk)); };
    for_each_composition(k, 1, m - first, f);
  });
  std::vector<CpOutcome> out;
  for (auto &s : slots) out.insert(out.end(), s.begin(), s.end());
  return out;
}

inline double log_multinomial(int m, const std::vector<int> &k) {
  double s = std::lgamma(static_cast<double>(m) + 1.0);
  for (int x : k) s -= std::lgamma(static_cast<double>(x) + 1.0);
  return s;
}

/// prod_i x_i^{k_i} with 0^0 = 1; signs tracked for negative bases.
inline double signed_power_product(const std::vector<double> &x, const std::vector<int> &k) {
  double logabs = 0.0;
  bool negative = false;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (k[i] == 0) continue;
    if (x[i] == 0.0) return 0.0;
    logabs += k[i] * std::log(std::abs(x[i]));
    if (x[i] < 0.0 && (k[i] % 2 == 1)) negative = !negative;
  }
  const double v = std::exp(logabs);
  return negative ? -v : v;
}

}  // namespace detail

/// XOR construction on a commuting pair. Per type class,
/// P = 2^{-l}[prod(p + q) + prod(p - q)], Q = 2^{-l}[prod(p + q) - prod(p - q)].
inline CommutingPair cp_xor_power(const CommutingPair &cp, int l, unsigned threads = 1) {
  if (l < 1) throw Error(ErrorCode::kParamOutOfRange, "xor power must be >= 1");
  const std::size_t r = cp.outcomes.size();
  check_type_classes(l, r);
  std::vector<double> sum(r), diff(r), mu(r);
  for (std::size_t i = 0; i < r; ++i) {
    sum[i] = cp.outcomes[i].p + cp.outcomes[i].q;
    diff[i] = cp.outcomes[i].p - cp.outcomes[i].q;
    mu[i] = cp.outcomes[i].log_mult;
  }
  const double scale = std::ldexp(1.0, -l);
  CommutingPair out;
  out.outcomes = detail::enumerate_type_classes(r, l, threads, [&](const std::vector<int> &k) {
    const double s = detail::signed_power_product(sum, k);
    const double d = detail::signed_power_product(diff, k);
    double lm = detail::log_multinomial(l, k);
    for (std::size_t i = 0; i < r; ++i) lm += k[i] * mu[i];
    return CpOutcome{std::max(0.0, scale * (s + d)), std::max(0.0, scale * (s - d)), lm};
  });
  out.note = cp.note + " xor^" + std::to_string(l);
  cp_merge(out);
  return out;
}

/// m-fold tensor power, enumerated by type class.
inline CommutingPair cp_tensor_power(const CommutingPair &cp, int m, unsigned threads = 1) {
  if (m < 1) throw Error(ErrorCode::kParamOutOfRange, "tensor power must be >= 1");
  const std::size_t r = cp.outcomes.size();
  check_type_classes(m, r);
  std::vector<double> p(r), q(r), mu(r);
  for (std::size_t i = 0; i < r; ++i) {
    p[i] = cp.outcomes[i].p;
    q[i] = cp.outcomes[i].q;
    mu[i] = cp.outcomes[i].log_mult;
  }
  CommutingPair out;
  out.outcomes = detail::enumerate_type_classes(r, m, threads, [&](const std::vector<int> &k) {
    double lm = detail::log_multinomial(m, k);
    for (std::size_t i = 0; i < r; ++i) lm += k[i] * mu[i];
    return CpOutcome{detail::signed_power_product(p, k), detail::signed_power_product(q, k), lm};
  });
  out.note = cp.note + " tensor^" + std::to_string(m);
  cp_merge(out);
  return out;
}

/// T_alpha = (1/2)(sum mult |p - q|^alpha)^{1/alpha}, via log-sum-exp.
/// Partial sums run over fixed chunks so the result does not depend on the
/// thread count.
inline double cp_l_alpha(const CommutingPair &cp, const SchattenOrder &order, unsigned threads = 1) {
  if (order.is_infinite()) {
    double m = 0.0;
    for (const auto &o : cp.outcomes) m = std::max(m, std::abs(o.p - o.q));
    return 0.5 * m;
  }
  const double alpha = order.value();
  constexpr std::size_t kChunk = 4096;
  const std::size_t n = cp.outcomes.size();
  std::vector<LogSum> partial((n + kChunk - 1) / kChunk);
  parallel_for(partial.size(), threads, [&](std::size_t c) {
    const std::size_t end = std::min(n, (c + 1) * kChunk);
    for (std::size_t i = c * kChunk; i < end; ++i) {
      const double d = std::abs(cp.outcomes[i].p - cp.outcomes[i].q);
      if (d > 0.0) partial[c].add(cp.outcomes[i].log_mult + alpha * std::log(d));
    }
  });
  LogSum total;
  for (const auto &s : partial) total.merge(s);
  if (total.scaled == 0.0) return 0.0;
  return std::min(1.0, 0.5 * std::exp(total.value() / alpha));
}

inline double cp_l_alpha(const CommutingPair &cp, double alpha, unsigned threads = 1) {
  return cp_l_alpha(cp, SchattenOrder::finite(alpha), threads);
}

inline constexpr double kMaxStreamedTypeClasses = 1e9;

/// T_alpha of the m-fold tensor power of cp without materializing it. Type
/// classes are summed per value of the first count and the per-task sums are
/// merged in task order, so threads do not change the result.
inline double cp_tensor_power_l_alpha(const CommutingPair &cp, int m, const SchattenOrder &order, unsigned threads = 1) {
  if (m < 1) throw Error(ErrorCode::kParamOutOfRange, "tensor power must be >= 1");
  const std::size_t r = cp.outcomes.size();
  if (log_composition_count(m, r) > std::log(kMaxStreamedTypeClasses) + 1e-9) {
    throw Error(ErrorCode::kTypeClassOverflow, "more than 1e9 type classes for power " + std::to_string(m) + " over " +
                                                   std::to_string(r) + " outcomes");
  }
  const double ninf = -std::numeric_limits<double>::infinity();
  std::vector<double> lp(r), lq(r), mu(r);
  for (std::size_t i = 0; i < r; ++i) {
    lp[i] = cp.outcomes[i].p > 0.0 ? std::log(cp.outcomes[i].p) : ninf;
    lq[i] = cp.outcomes[i].q > 0.0 ? std::log(cp.outcomes[i].q) : ninf;
    mu[i] = cp.outcomes[i].log_mult;
  }
  std::vector<double> lfact(static_cast<std::size_t>(m) + 1);
  for (int i = 0; i <= m; ++i) lfact[i] = std::lgamma(i + 1.0);
  const bool inf = order.is_infinite();
  const double alpha = inf ? 1.0 : order.value();

  std::vector<LogSum> sums(static_cast<std::size_t>(m) + 1);
  std::vector<double> maxes(sums.size(), 0.0);
  parallel_for(sums.size(), threads, [&](std::size_t task) {
    std::vector<int> k(r, 0);
    k[0] = m - static_cast<int>(task);
    auto visit = [&](const std::vector<int> &kk) {
      // 0^0 = 1 through the k > 0 guard.
      double a = 0.0, b = 0.0, lm = lfact[m];
      for (std::size_t i = 0; i < r; ++i) {
        if (kk[i] == 0) continue;
        a += kk[i] * lp[i];
        b += kk[i] * lq[i];
        lm += kk[i] * mu[i] - lfact[kk[i]];
      }
      const double d = std::abs(std::exp(a) - std::exp(b));
      if (d <= 0.0) return;
      if (inf) {
        maxes[task] = std::max(maxes[task], d);
      } else {
        sums[task].add(lm + alpha * std::log(d));
      }
    };
    if (r == 1) {
      visit(k);
    } else {
      detail::for_each_composition(k, 1, static_cast<int>(task), visit);
    }
  });
  if (inf) return 0.5 * *std::max_element(maxes.begin(), maxes.end());
  LogSum total;
  for (const auto &s : sums) total.merge(s);
  if (total.scaled == 0.0) return 0.0;
  return std::min(1.0, 0.5 * std::exp(total.value() / alpha));
}

inline double cp_tensor_power_l_alpha(const CommutingPair &cp, int m, double alpha, unsigned threads = 1) {
  return cp_tensor_power_l_alpha(cp, m, SchattenOrder::finite(alpha), threads);
}

/// Explicit list of (p, q) pairs, each repeated by its (rounded) multiplicity.
inline std::vector<std::pair<double, double>> cp_expand(const CommutingPair &cp, double max_size = 1e6) {
  if (cp.log_support_size() > std::log(max_size)) throw Error(ErrorCode::kDimensionCapExceeded, "expansion too large");
  std::vector<std::pair<double, double>> out;
  for (const auto &o : cp.outcomes) {
    const auto count = static_cast<long long>(std::llround(std::exp(o.log_mult)));
    for (long long i = 0; i < count; ++i) out.emplace_back(o.p, o.q);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace qdist
