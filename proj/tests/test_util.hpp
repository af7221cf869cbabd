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

#include "qdist/matrix.hpp"
#include "qdist/rng.hpp"

namespace qdist::testing {

inline ComplexMatrix random_hermitian(std::size_t dim, std::uint64_t seed) {
  Rng rng(seed);
  ComplexMatrix m(dim);
  for (std::size_t r = 0; r < dim; ++r) {
    m(r, r) = rng.normal();
    for (std::size_t c = r + 1; c < dim; ++c) {
      const double re = rng.normal();
      const double im = rng.normal();
      m(r, c) = Complex(re, im);
      m(c, r) = std::conj(m(r, c));
    }
  }
  return m;
}

inline ComplexMatrix random_matrix(std::size_t dim, std::uint64_t seed) {
  Rng rng(seed);
  ComplexMatrix m(dim);
  for (std::size_t r = 0; r < dim; ++r) {
    for (std::size_t c = 0; c < dim; ++c) {
      const double re = rng.normal();
      const double im = rng.normal();
      m(r, c) = Complex(re, im);
    }
  }
  return m;
}

/// Adaptive Simpson quadrature, independent of everything in the library.
template <class F>
double simpson_step(F &f, double a, double b, double fa, double fm, double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol) {
    return left + right + (left + right - whole) / 15.0;
  }
  return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

template <class F>
double integrate(F f, double a, double b, double tol = 1e-13) {
  // Fixed pre-split so symmetric integrands cannot fool the first error test.
  constexpr int kPieces = 64;
  const double h = (b - a) / kPieces;
  double total = 0.0;
  for (int i = 0; i < kPieces; ++i) {
    const double lo = a + i * h;
    const double hi = i + 1 == kPieces ? b : lo + h;
    const double fa = f(lo);
    const double fb = f(hi);
    const double fm = f(0.5 * (lo + hi));
    const double whole = (hi - lo) / 6.0 * (fa + 4.0 * fm + fb);
    total += simpson_step(f, lo, hi, fa, fm, fb, whole, tol / kPieces, 40);
  }
  return total;
}

}  // namespace qdist::testing
