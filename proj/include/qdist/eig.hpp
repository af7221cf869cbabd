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
#include <functional>
#include <limits>
#include <numeric>
#include <vector>

#include "qdist/matrix.hpp"

namespace qdist {

struct HermitianEig {
  std::vector<double> values;  // ascending
  ComplexMatrix vectors;       // column j is the eigenvector of values[j]
};

struct JacobiOptions {
  double hermitian_tol = 1e-8;
  double off_tol = 1e-13;
  int max_sweeps = 100;
};

/// Cyclic complex Jacobi. Each (p, q) rotation first removes the phase of
/// A_pq with a diagonal unitary, then applies the real symmetric Jacobi
/// rotation, so the combined 2x2 unitary is
///   [ c            s           ]
///   [ -s e^{-iphi}  c e^{-iphi} ]
/// The off-diagonal tolerance is relative to max(1, ||M||_F).
inline HermitianEig eig_hermitian(const ComplexMatrix &m, const JacobiOptions &opt = {}) {
  const std::size_t n = m.dim();
  if (!m.is_hermitian(opt.hermitian_tol)) {
    throw Error(ErrorCode::kNotHermitian, "defect " + std::to_string(m.hermitian_defect()));
  }
  ComplexMatrix a = m.hermitian_part();
  for (std::size_t i = 0; i < n; ++i) a(i, i) = a(i, i).real();
  ComplexMatrix v = ComplexMatrix::identity(n);
  const double tol = opt.off_tol * std::max(1.0, m.frobenius());

  auto off_norm = [&] {
    double s = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t c = r + 1; c < n; ++c) s += std::norm(a(r, c));
    }
    return std::sqrt(2.0 * s);
  };

  int sweep = 0;
  while (off_norm() > tol) {
    if (sweep++ >= opt.max_sweeps) {
      throw Error(ErrorCode::kNoConvergence, "Jacobi exceeded " + std::to_string(opt.max_sweeps) + " sweeps");
    }
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const Complex apq = a(p, q);
        const double mag = std::abs(apq);
        if (mag == 0.0) continue;
        const Complex phase_conj = std::conj(apq) / mag;  // e^{-i phi}
        const double app = a(p, p).real(), aqq = a(q, q).real();
        const double theta = (aqq - app) / (2.0 * mag);
        double t;
        if (std::abs(theta) > 1e150) {
          t = 0.5 / theta;
        } else {
          t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        }
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        const Complex u_pp = c, u_pq = s, u_qp = -s * phase_conj, u_qq = c * phase_conj;

        for (std::size_t k = 0; k < n; ++k) {
          const Complex akp = a(k, p), akq = a(k, q);
          a(k, p) = akp * u_pp + akq * u_qp;
          a(k, q) = akp * u_pq + akq * u_qq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const Complex apk = a(p, k), aqk = a(q, k);
          a(p, k) = std::conj(u_pp) * apk + std::conj(u_qp) * aqk;
          a(q, k) = std::conj(u_pq) * apk + std::conj(u_qq) * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        a(p, p) = a(p, p).real();
        a(q, q) = a(q, q).real();
        for (std::size_t k = 0; k < n; ++k) {
          const Complex vkp = v(k, p), vkq = v(k, q);
          v(k, p) = vkp * u_pp + vkq * u_qp;
          v(k, q) = vkp * u_pq + vkq * u_qq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return a(i, i).real() < a(j, j).real(); });
  HermitianEig out{std::vector<double>(n), ComplexMatrix(n)};
  for (std::size_t j = 0; j < n; ++j) {
    out.values[j] = a(order[j], order[j]).real();
    for (std::size_t k = 0; k < n; ++k) out.vectors(k, j) = v(k, order[j]);
  }
  return out;
}

/// V diag(f(lambda)) V^dagger
template <class F>
ComplexMatrix spectral_apply(const HermitianEig &eig, F &&f) {
  const std::size_t n = eig.values.size();
  std::vector<double> fv(n);
  for (std::size_t j = 0; j < n; ++j) fv[j] = f(eig.values[j]);
  ComplexMatrix out(n);
  const ComplexMatrix &v = eig.vectors;
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = r; c < n; ++c) {
      Complex s = 0.0;
      for (std::size_t j = 0; j < n; ++j) s += v(r, j) * fv[j] * std::conj(v(c, j));
      out(r, c) = s;
      out(c, r) = std::conj(s);
    }
    out(r, r) = out(r, r).real();
  }
  return out;
}

template <class F>
ComplexMatrix matrix_function(const ComplexMatrix &m, F &&f) {
  return spectral_apply(eig_hermitian(m), std::forward<F>(f));
}

inline std::vector<double> eigenvalues(const ComplexMatrix &m) { return eig_hermitian(m).values; }

/// #{lambda_i > dim * eps * lambda_max}
inline int numerical_rank(const std::vector<double> &values) {
  if (values.empty()) return 0;
  const double lmax = *std::max_element(values.begin(), values.end());
  if (lmax <= 0.0) return 0;
  const double cut = static_cast<double>(values.size()) * std::numeric_limits<double>::epsilon() * lmax;
  return static_cast<int>(std::count_if(values.begin(), values.end(), [cut](double x) { return x > cut; }));
}

/// Singular values (descending) by one-sided Jacobi on the columns. The
/// absolute error is O(eps ||M||), with no square root of a Gram spectrum.
inline std::vector<double> singular_values(const ComplexMatrix &m, double tol = 1e-15, int max_sweeps = 60) {
  const std::size_t n = m.dim();
  ComplexMatrix a = m;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        double al = 0.0, be = 0.0;
        Complex ga = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          al += std::norm(a(i, p));
          be += std::norm(a(i, q));
          ga += std::conj(a(i, p)) * a(i, q);
        }
        const double g = std::abs(ga);
        if (g == 0.0 || g <= tol * std::sqrt(al * be)) continue;
        rotated = true;
        // Rephase column q so the inner product is real, then rotate.
        const Complex ph = std::conj(ga) / g;
        const double zeta = (be - al) / (2.0 * g);
        const double t = (zeta >= 0.0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t), s = c * t;
        for (std::size_t i = 0; i < n; ++i) {
          const Complex x = a(i, p), y = a(i, q) * ph;
          a(i, p) = c * x - s * y;
          a(i, q) = s * x + c * y;
        }
      }
    }
    if (!rotated) break;
  }
  std::vector<double> sv(n);
  for (std::size_t j = 0; j < n; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += std::norm(a(i, j));
    sv[j] = std::sqrt(s);
  }
  std::sort(sv.begin(), sv.end(), std::greater<>());
  return sv;
}

}  // namespace qdist
