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

#include "qdist/eig.hpp"
#include "qdist/state.hpp"

namespace qdist {

/// Order of a Schatten norm: a real alpha >= 1 or +infinity. Infinity is a
/// separate variant, never a large float.
class SchattenOrder {
 public:
  static SchattenOrder finite(double alpha) {
    if (!(alpha >= 1.0) || !std::isfinite(alpha)) {
      throw Error(ErrorCode::kAlphaOutOfRange, "alpha must be a finite real >= 1, got " + std::to_string(alpha));
    }
    return SchattenOrder(alpha, false);
  }
  static SchattenOrder infinity() { return SchattenOrder(std::numeric_limits<double>::infinity(), true); }

  bool is_infinite() const { return infinite_; }
  double value() const { return alpha_; }

  std::string to_string() const {
    if (infinite_) return "inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", alpha_);
    return buf;
  }

  friend bool operator==(const SchattenOrder &, const SchattenOrder &) = default;

 private:
  SchattenOrder(double a, bool inf) : alpha_(a), infinite_(inf) {}
  double alpha_;
  bool infinite_;
};

inline constexpr double kSpectrumZero = 1e-14;
inline constexpr double kLambdaInfinityTol = 1e-9;

inline void check_same_dims(const DensityMatrix &a, const DensityMatrix &b) {
  if (a.dim() != b.dim()) {
    throw Error(ErrorCode::kDimensionMismatch, "states of dimension " + std::to_string(a.dim()) + " and " + std::to_string(b.dim()));
  }
}

/// Eigenvalues of rho0 - rho1 with magnitudes below 1e-14 set to zero.
inline std::vector<double> difference_spectrum(const DensityMatrix &rho0, const DensityMatrix &rho1) {
  check_same_dims(rho0, rho1);
  std::vector<double> lam = eigenvalues(rho0.matrix() - rho1.matrix());
  for (auto &x : lam) {
    if (std::abs(x) < kSpectrumZero) x = 0.0;
  }
  return lam;
}

/// sum_i |lambda_i|^alpha
inline double power_sum(const std::vector<double> &spectrum, double alpha) {
  double s = 0.0;
  for (double x : spectrum) {
    if (x != 0.0) s += std::pow(std::abs(x), alpha);
  }
  return s;
}

inline double schatten_norm(const std::vector<double> &spectrum, const SchattenOrder &order) {
  if (order.is_infinite()) {
    double m = 0.0;
    for (double x : spectrum) m = std::max(m, std::abs(x));
    return m;
  }
  return std::pow(power_sum(spectrum, order.value()), 1.0 / order.value());
}

inline double trace_distance(const DensityMatrix &rho0, const DensityMatrix &rho1) {
  double s = 0.0;
  for (double x : difference_spectrum(rho0, rho1)) s += std::abs(x);
  return std::clamp(0.5 * s, 0.0, 1.0);
}

inline void check_alpha(double alpha) {
  if (!(alpha >= 1.0)) throw Error(ErrorCode::kAlphaOutOfRange, "alpha " + std::to_string(alpha) + " < 1");
}

/// T_alpha = (1/2) ||rho0 - rho1||_alpha
inline double l_alpha_distance(const DensityMatrix &rho0, const DensityMatrix &rho1, double alpha) {
  check_alpha(alpha);
  return std::clamp(0.5 * schatten_norm(difference_spectrum(rho0, rho1), SchattenOrder::finite(alpha)), 0.0, 1.0);
}

/// Lambda_alpha = (1/2) ||rho0 - rho1||_alpha^alpha
inline double powered_distance(const DensityMatrix &rho0, const DensityMatrix &rho1, double alpha) {
  check_alpha(alpha);
  return std::clamp(0.5 * power_sum(difference_spectrum(rho0, rho1), alpha), 0.0, 1.0);
}

/// max_i |lambda_i(rho0 - rho1)| / 2
inline double t_infinity(const DensityMatrix &rho0, const DensityMatrix &rho1) {
  return 0.5 * schatten_norm(difference_spectrum(rho0, rho1), SchattenOrder::infinity());
}

/// (1/2) #{i : |lambda_i| >= 1 - 1e-9}; always one of 0, 1/2, 1.
inline double lambda_infinity(const DensityMatrix &rho0, const DensityMatrix &rho1) {
  const auto lam = difference_spectrum(rho0, rho1);
  const auto count = std::count_if(lam.begin(), lam.end(), [](double x) { return std::abs(x) >= 1.0 - kLambdaInfinityTol; });
  return 0.5 * static_cast<double>(std::min<std::ptrdiff_t>(count, 2));
}

inline double l_alpha_distance(const DensityMatrix &rho0, const DensityMatrix &rho1, const SchattenOrder &order) {
  return order.is_infinite() ? t_infinity(rho0, rho1) : l_alpha_distance(rho0, rho1, order.value());
}

inline double powered_distance(const DensityMatrix &rho0, const DensityMatrix &rho1, const SchattenOrder &order) {
  return order.is_infinite() ? lambda_infinity(rho0, rho1) : powered_distance(rho0, rho1, order.value());
}

/// F = tr|sqrt(rho0) sqrt(rho1)|, the sum of singular values of
/// D0 V0^dagger V1 D1 where rho_b = V_b D_b^2 V_b^dagger. Eigenvalues below the
/// numerical-rank cut are zeroed first.
inline double fidelity(const DensityMatrix &rho0, const DensityMatrix &rho1) {
  check_same_dims(rho0, rho1);
  const HermitianEig e0 = eig_hermitian(rho0.matrix()), e1 = eig_hermitian(rho1.matrix());
  const std::size_t d = rho0.dim();
  auto roots = [d](const std::vector<double> &v) {
    const double cut = static_cast<double>(d) * std::numeric_limits<double>::epsilon() * v.back();
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) r[i] = v[i] > cut ? std::sqrt(v[i]) : 0.0;
    return r;
  };
  const auto r0 = roots(e0.values), r1 = roots(e1.values);
  ComplexMatrix k = e0.vectors.adjoint() * e1.vectors;
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) k(i, j) *= r0[i] * r1[j];
  }
  double f = 0.0;
  for (double s : singular_values(k)) f += s;
  return std::clamp(f, 0.0, 1.0);
}

/// 2^{1/alpha - 1} x^{1/alpha}: converts an estimate of Lambda_alpha into one
/// of T_alpha.
inline double powered_to_distance(double x, double alpha) {
  check_alpha(alpha);
  if (x < 0.0) throw Error(ErrorCode::kDomainError, "powered value must be >= 0");
  return std::pow(2.0, 1.0 / alpha - 1.0) * std::pow(x, 1.0 / alpha);
}

struct DistanceReport {
  SchattenOrder alpha = SchattenOrder::finite(1.0);
  double value = 0.0;
  int rank0 = 0;
  int rank1 = 0;
};

inline DistanceReport distance_report(const DensityMatrix &rho0, const DensityMatrix &rho1, const SchattenOrder &order) {
  return DistanceReport{order, l_alpha_distance(rho0, rho1, order), rho0.rank(), rho1.rank()};
}

}  // namespace qdist
