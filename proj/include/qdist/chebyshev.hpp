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
#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qdist/error.hpp"

namespace qdist {

/// Lanczos approximation (g = 7, 9 terms) with reflection below 1/2.
inline double gamma_fn(double x) {
  if (!(x > 0.0)) throw Error(ErrorCode::kDomainError, "gamma_fn needs x > 0, got " + std::to_string(x));
  static constexpr std::array<double, 9> kP = {
      0.99999999999980993, 676.5203681218851, -1259.1392167224028, 771.32342877765313, -176.61502916214059,
      12.507343278686905, -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};
  constexpr double kPi = std::numbers::pi;
  if (x < 0.5) return kPi / (std::sin(kPi * x) * gamma_fn(1.0 - x));
  const double z = x - 1.0;
  double a = kP[0];
  const double t = z + 7.5;
  for (int i = 1; i < 9; ++i) a += kP[i] / (z + i);
  return std::sqrt(2.0 * kPi) * std::pow(t, z + 0.5) * std::exp(-t) * a;
}

/// Chebyshev coefficients c_0..c_{2 dtilde - 1} of f(x) = sgn(x)|x|^q / 2.
inline std::vector<double> chebyshev_coeffs(double q, int dtilde) {
  if (!(q > 0.0)) throw Error(ErrorCode::kParamOutOfRange, "q must be > 0");
  if (dtilde < 1) throw Error(ErrorCode::kParamOutOfRange, "dtilde must be >= 1");
  std::vector<double> c(2 * static_cast<std::size_t>(dtilde), 0.0);
  // The Gamma ratio overflows for q near 340; use lgamma beyond the point
  // where the Lanczos form stops being accurate.
  const double ratio = q < 300.0 ? gamma_fn(0.5 * (q + 2.0)) / gamma_fn(0.5 * (q + 3.0))
                                 : std::exp(std::lgamma(0.5 * (q + 2.0)) - std::lgamma(0.5 * (q + 3.0)));
  c[1] = ratio / std::sqrt(std::numbers::pi);
  for (std::size_t k = 3; k < c.size(); k += 2) {
    const double l = 0.5 * static_cast<double>(k - 1);
    c[k] = c[k - 2] * (q - 2.0 * l + 1.0) / (q + 2.0 * l + 1.0);
  }
  return c;
}

/// Averaged (de La Vallee Poussin) truncation of an odd Chebyshev series.
struct ChebyshevSeries {
  double q = 0.0;
  int dtilde = 0;
  int degree = 0;
  std::vector<double> coeffs;  // c-hat_0 .. c-hat_degree
  // Cached result of series_sup_bound, filled by certify_bounded.
  std::optional<double> sup_certificate;

  /// Index of the last nonzero coefficient; evaluation stops there.
  std::size_t effective_length() const {
    std::size_t n = coeffs.size();
    while (n > 0 && coeffs[n - 1] == 0.0) --n;
    return n;
  }

  double abs_sum() const {
    double s = 0.0;
    for (double c : coeffs) s += std::abs(c);
    return s;
  }
};

inline ChebyshevSeries averaged_truncation(std::span<const double> raw, int dtilde, double q) {
  if (dtilde < 1) throw Error(ErrorCode::kParamOutOfRange, "dtilde must be >= 1");
  const std::size_t deg = 2 * static_cast<std::size_t>(dtilde) - 1;
  if (raw.size() < deg + 1) throw Error(ErrorCode::kPrecondition, "need at least 2*dtilde raw coefficients");
  ChebyshevSeries s{q, dtilde, static_cast<int>(deg), std::vector<double>(deg + 1, 0.0), std::nullopt};
  const auto dt = static_cast<std::size_t>(dtilde);
  for (std::size_t k = 0; k <= deg; ++k) {
    s.coeffs[k] = k <= dt ? raw[k] : static_cast<double>(2 * dt - k) / static_cast<double>(dt) * raw[k];
  }
  return s;
}

inline ChebyshevSeries build_series(double q, int dtilde) {
  const auto raw = chebyshev_coeffs(q, dtilde);
  return averaged_truncation(raw, dtilde, q);
}

inline constexpr double kXSlack = 1e-12;

/// Clenshaw recurrence. Inputs within 1e-12 outside [-1, 1] are clamped.
inline double eval_series(const ChebyshevSeries &s, double x) {
  if (!(std::abs(x) <= 1.0 + kXSlack)) throw Error(ErrorCode::kXOutOfRange, "x = " + std::to_string(x) + " outside [-1, 1]");
  x = std::clamp(x, -1.0, 1.0);
  const std::size_t n = s.effective_length();
  double b1 = 0.0, b2 = 0.0;
  for (std::size_t k = n; k-- > 1;) {
    const double b0 = 2.0 * x * b1 - b2 + s.coeffs[k];
    b2 = b1;
    b1 = b0;
  }
  const double c0 = n > 0 ? s.coeffs[0] : 0.0;
  return c0 + x * b1 - b2;
}

/// ½ sgn(x) |x|^q
inline double signed_power_half(double x, double q) {
  if (x == 0.0) return 0.0;
  return std::copysign(0.5 * std::pow(std::abs(x), q), x);
}

struct GridStats {
  double max_error = 0.0;
  double max_abs = 0.0;
};

/// Error and sup-norm on the Chebyshev-extrema grid cos(pi j / (N-1)). The
/// series and target are both odd, so only x >= 0 is evaluated.
inline GridStats grid_stats(const ChebyshevSeries &s, int grid_size) {
  if (grid_size < 1000) throw Error(ErrorCode::kPrecondition, "grid_size must be >= 1000");
  GridStats g;
  const double step = std::numbers::pi / static_cast<double>(grid_size - 1);
  for (int j = 0; 2 * j <= grid_size - 1; ++j) {
    const double x = std::cos(step * j);
    const double p = eval_series(s, x);
    g.max_error = std::max(g.max_error, std::abs(p - signed_power_half(x, s.q)));
    g.max_abs = std::max(g.max_abs, std::abs(p));
  }
  return g;
}

inline double uniform_error(const ChebyshevSeries &s, int grid_size = 10000) { return grid_stats(s, grid_size).max_error; }

/// Upper bound on max |P(x)| over [-1, 1]. The coefficient abs-sum bounds it
/// for free; when that exceeds 1 a grid measurement is used instead.
inline double series_sup_bound(const ChebyshevSeries &s, int grid_size = 10000) {
  if (s.sup_certificate) return *s.sup_certificate;
  const double a = s.abs_sum();
  if (a <= 1.0) return a;
  return grid_stats(s, grid_size).max_abs;
}

inline void certify_bounded(ChebyshevSeries &s) { s.sup_certificate = series_sup_bound(s); }

/// d = ceil((beta' / eps)^(1/q))
inline long long degree_for_error(double q, double eps, double beta_prime) {
  if (!(eps > 0.0 && eps < 0.5)) throw Error(ErrorCode::kEpsOutOfRange, "eps " + std::to_string(eps) + " not in (0, 1/2)");
  if (!(beta_prime > 0.0)) throw Error(ErrorCode::kParamOutOfRange, "beta' must be > 0");
  if (!(q > 0.0)) throw Error(ErrorCode::kParamOutOfRange, "q must be > 0");
  const double d = std::pow(beta_prime / eps, 1.0 / q);
  if (!(d < 9.0e18)) throw Error(ErrorCode::kParamOutOfRange, "degree overflows");
  // Guard against log/exp rounding pushing an exact integer up by one.
  return std::max(1LL, static_cast<long long>(std::ceil(d * (1.0 - 1e-12))));
}

/// Smallest dtilde whose averaged series (degree 2 dtilde - 1) reaches degree d.
inline long long dtilde_for_degree(long long d) { return std::max(1LL, (d + 2) / 2); }

namespace detail {

struct BetaFixture {
  double q;
  double beta_prime;
};

// 2 * sup_{dtilde in {1, 2, 4, ..., 256}} (2 dtilde - 1)^q * err(dtilde) on a
// 10^4-point grid; regenerate with calibrate_beta_prime.
inline constexpr std::array<BetaFixture, 15> kBetaFixtures = {{
    {0.05, 0.84176083674198332},
    {0.1, 0.74969111465414662},
    {0.25, 0.56922491107723605},
    {0.5, 0.36524756861425733},
    {0.75, 0.18676357987455908},
    {1, 1},
    {1.5, 0.44494309487342221},
    {2, 0.94558740515448858},
    {2.5, 1.7959129886578424},
    {3, 3.3750000000000036},
    {3.5, 7.0702362430663275},
    {4, 24.942403871979913},
    {5, 262.60937500001864},
    {6, 3146.7509618296331},
    {7, 32169.6484375},
}};

}  // namespace detail

inline constexpr int kCalibrationGrid = 10000;
inline constexpr int kCalibrationMaxDtilde = 256;
inline constexpr double kCalibrationFloor = 1e-10;

/// Empirical constant beta' with d^q * err(d) <= beta' / 2 over the sweep. A
/// sweep that never rises above rounding noise (the series is exact, q = 1)
/// gets beta' = 1.
inline double calibrate_beta_prime(double q) {
  double sup = 0.0;
  for (int dt = 1; dt <= kCalibrationMaxDtilde; dt *= 2) {
    const ChebyshevSeries s = build_series(q, dt);
    sup = std::max(sup, std::pow(static_cast<double>(s.degree), q) * uniform_error(s, kCalibrationGrid));
  }
  return sup < kCalibrationFloor ? 1.0 : 2.0 * sup;
}

inline const auto &beta_fixtures() { return detail::kBetaFixtures; }

/// Fixture lookup, falling back to an on-demand calibration sweep.
inline double beta_prime(double q) {
  for (const auto &f : detail::kBetaFixtures) {
    if (std::abs(f.q - q) < 1e-12) return f.beta_prime;
  }
  return calibrate_beta_prime(q);
}

}  // namespace qdist
