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
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "qdist/error.hpp"

namespace qdist {

using Complex = std::complex<double>;
using ComplexVector = std::vector<Complex>;

/// Dense square complex matrix, row-major. Qubit 0 is the most significant
/// bit of a basis index, so kron(A, B) places A on the leading qubits.
class ComplexMatrix {
 public:
  ComplexMatrix() = default;
  explicit ComplexMatrix(std::size_t dim) : dim_(dim), entries_(dim * dim) {}
  ComplexMatrix(std::size_t dim, std::vector<Complex> entries) : dim_(dim), entries_(std::move(entries)) {
    if (entries_.size() != dim_ * dim_) {
      throw Error(ErrorCode::kDimensionMismatch, "entry count is not dim^2");
    }
  }

  static ComplexMatrix identity(std::size_t dim) {
    ComplexMatrix m(dim);
    for (std::size_t i = 0; i < dim; ++i) m(i, i) = 1.0;
    return m;
  }

  static ComplexMatrix diagonal(std::span<const double> values) {
    ComplexMatrix m(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) m(i, i) = values[i];
    return m;
  }

  /// |v><w|
  static ComplexMatrix outer(std::span<const Complex> v, std::span<const Complex> w) {
    if (v.size() != w.size()) throw Error(ErrorCode::kDimensionMismatch, "outer product of unequal vectors");
    ComplexMatrix m(v.size());
    for (std::size_t r = 0; r < v.size(); ++r) {
      for (std::size_t c = 0; c < w.size(); ++c) m(r, c) = v[r] * std::conj(w[c]);
    }
    return m;
  }

  std::size_t dim() const { return dim_; }
  std::span<const Complex> entries() const { return entries_; }
  std::span<Complex> entries() { return entries_; }

  Complex &operator()(std::size_t r, std::size_t c) { return entries_[r * dim_ + c]; }
  const Complex &operator()(std::size_t r, std::size_t c) const { return entries_[r * dim_ + c]; }

  ComplexMatrix adjoint() const {
    ComplexMatrix out(dim_);
    for (std::size_t r = 0; r < dim_; ++r) {
      for (std::size_t c = 0; c < dim_; ++c) out(c, r) = std::conj((*this)(r, c));
    }
    return out;
  }

  Complex trace() const {
    Complex t = 0.0;
    for (std::size_t i = 0; i < dim_; ++i) t += (*this)(i, i);
    return t;
  }

  double max_abs() const {
    double m = 0.0;
    for (const auto &z : entries_) m = std::max(m, std::abs(z));
    return m;
  }

  double frobenius() const {
    double s = 0.0;
    for (const auto &z : entries_) s += std::norm(z);
    return std::sqrt(s);
  }

  /// Largest |M - M^dagger| entry.
  double hermitian_defect() const {
    double m = 0.0;
    for (std::size_t r = 0; r < dim_; ++r) {
      for (std::size_t c = r; c < dim_; ++c) {
        m = std::max(m, std::abs((*this)(r, c) - std::conj((*this)(c, r))));
      }
    }
    return m;
  }

  bool is_hermitian(double tol) const { return hermitian_defect() <= tol; }

  /// (M + M^dagger) / 2
  ComplexMatrix hermitian_part() const {
    ComplexMatrix out(dim_);
    for (std::size_t r = 0; r < dim_; ++r) {
      for (std::size_t c = 0; c < dim_; ++c) {
        out(r, c) = 0.5 * ((*this)(r, c) + std::conj((*this)(c, r)));
      }
    }
    return out;
  }

  ComplexMatrix &operator+=(const ComplexMatrix &o) {
    check_same(o);
    for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i] += o.entries_[i];
    return *this;
  }
  ComplexMatrix &operator-=(const ComplexMatrix &o) {
    check_same(o);
    for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i] -= o.entries_[i];
    return *this;
  }
  ComplexMatrix &operator*=(Complex s) {
    for (auto &z : entries_) z *= s;
    return *this;
  }

  friend ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix &b) { return a += b; }
  friend ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix &b) { return a -= b; }
  friend ComplexMatrix operator*(ComplexMatrix a, Complex s) { return a *= s; }
  friend ComplexMatrix operator*(Complex s, ComplexMatrix a) { return a *= s; }

  friend ComplexMatrix operator*(const ComplexMatrix &a, const ComplexMatrix &b) {
    a.check_same(b);
    const std::size_t n = a.dim_;
    ComplexMatrix out(n);
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t k = 0; k < n; ++k) {
        const Complex ark = a(r, k);
        if (ark == Complex(0.0)) continue;
        const Complex *brow = &b.entries_[k * n];
        Complex *orow = &out.entries_[r * n];
        for (std::size_t c = 0; c < n; ++c) orow[c] += ark * brow[c];
      }
    }
    return out;
  }

  friend ComplexVector operator*(const ComplexMatrix &a, std::span<const Complex> v) {
    if (v.size() != a.dim_) throw Error(ErrorCode::kDimensionMismatch, "matrix-vector size mismatch");
    ComplexVector out(a.dim_);
    for (std::size_t r = 0; r < a.dim_; ++r) {
      Complex s = 0.0;
      for (std::size_t c = 0; c < a.dim_; ++c) s += a(r, c) * v[c];
      out[r] = s;
    }
    return out;
  }

 private:
  void check_same(const ComplexMatrix &o) const {
    if (o.dim_ != dim_) throw Error(ErrorCode::kDimensionMismatch, "matrix dimensions differ");
  }

  std::size_t dim_ = 0;
  std::vector<Complex> entries_;
};

/// max_ij |A_ij - B_ij|
inline double max_abs_diff(const ComplexMatrix &a, const ComplexMatrix &b) {
  if (a.dim() != b.dim()) throw Error(ErrorCode::kDimensionMismatch, "matrix dimensions differ");
  double m = 0.0;
  for (std::size_t i = 0; i < a.entries().size(); ++i) m = std::max(m, std::abs(a.entries()[i] - b.entries()[i]));
  return m;
}

/// tr(A B) without forming the product.
inline Complex trace_product(const ComplexMatrix &a, const ComplexMatrix &b) {
  if (a.dim() != b.dim()) throw Error(ErrorCode::kDimensionMismatch, "matrix dimensions differ");
  Complex t = 0.0;
  const std::size_t n = a.dim();
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) t += a(r, c) * b(c, r);
  }
  return t;
}

inline ComplexMatrix kron(const ComplexMatrix &a, const ComplexMatrix &b) {
  const std::size_t na = a.dim(), nb = b.dim();
  ComplexMatrix out(na * nb);
  for (std::size_t ra = 0; ra < na; ++ra) {
    for (std::size_t ca = 0; ca < na; ++ca) {
      const Complex s = a(ra, ca);
      if (s == Complex(0.0)) continue;
      for (std::size_t rb = 0; rb < nb; ++rb) {
        for (std::size_t cb = 0; cb < nb; ++cb) out(ra * nb + rb, ca * nb + cb) = s * b(rb, cb);
      }
    }
  }
  return out;
}

inline ComplexVector kron(std::span<const Complex> a, std::span<const Complex> b) {
  ComplexVector out(a.size() * b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) out[i * b.size() + j] = a[i] * b[j];
  }
  return out;
}

inline std::size_t qubit_count(std::size_t dim) {
  std::size_t n = 0;
  while ((std::size_t{1} << n) < dim) ++n;
  if ((std::size_t{1} << n) != dim) throw Error(ErrorCode::kDimensionMismatch, "dimension is not a power of two");
  return n;
}

/// Traces out every qubit not listed in keep_qubits. The kept qubits appear in
/// the output in increasing index order.
inline ComplexMatrix partial_trace(const ComplexMatrix &m, std::vector<std::size_t> keep_qubits) {
  const std::size_t n = qubit_count(m.dim());
  std::sort(keep_qubits.begin(), keep_qubits.end());
  keep_qubits.erase(std::unique(keep_qubits.begin(), keep_qubits.end()), keep_qubits.end());
  for (auto q : keep_qubits) {
    if (q >= n) throw Error(ErrorCode::kDimensionMismatch, "kept qubit index out of range");
  }
  std::vector<std::size_t> traced;
  for (std::size_t q = 0; q < n; ++q) {
    if (!std::binary_search(keep_qubits.begin(), keep_qubits.end(), q)) traced.push_back(q);
  }
  // Bit position of qubit q inside a full index.
  auto bit_of = [n](std::size_t q) { return n - 1 - q; };
  auto scatter = [&](std::size_t value, const std::vector<std::size_t> &qubits) {
    std::size_t idx = 0;
    const std::size_t k = qubits.size();
    for (std::size_t j = 0; j < k; ++j) {
      if ((value >> (k - 1 - j)) & 1u) idx |= std::size_t{1} << bit_of(qubits[j]);
    }
    return idx;
  };

  const std::size_t dk = std::size_t{1} << keep_qubits.size();
  const std::size_t dt = std::size_t{1} << traced.size();
  std::vector<std::size_t> keep_idx(dk), trace_idx(dt);
  for (std::size_t v = 0; v < dk; ++v) keep_idx[v] = scatter(v, keep_qubits);
  for (std::size_t v = 0; v < dt; ++v) trace_idx[v] = scatter(v, traced);

  ComplexMatrix out(dk);
  for (std::size_t r = 0; r < dk; ++r) {
    for (std::size_t c = 0; c < dk; ++c) {
      Complex s = 0.0;
      for (std::size_t t = 0; t < dt; ++t) s += m(keep_idx[r] | trace_idx[t], keep_idx[c] | trace_idx[t]);
      out(r, c) = s;
    }
  }
  return out;
}

inline double vector_norm(std::span<const Complex> v) {
  double s = 0.0;
  for (const auto &z : v) s += std::norm(z);
  return std::sqrt(s);
}

/// <a|b>
inline Complex inner(std::span<const Complex> a, std::span<const Complex> b) {
  if (a.size() != b.size()) throw Error(ErrorCode::kDimensionMismatch, "inner product of unequal vectors");
  Complex s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

/// Largest entry of |U^dagger U - I|.
inline double unitarity_defect(const ComplexMatrix &u) {
  return max_abs_diff(u.adjoint() * u, ComplexMatrix::identity(u.dim()));
}

}  // namespace qdist
