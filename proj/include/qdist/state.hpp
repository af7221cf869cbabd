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
#include <string>
#include <vector>

#include "qdist/eig.hpp"
#include "qdist/matrix.hpp"
#include "qdist/rng.hpp"

namespace qdist {

inline constexpr double kStateTol = 1e-10;
inline constexpr double kPureNormTol = 1e-12;

class PureState {
 public:
  explicit PureState(ComplexVector amplitudes) : amplitudes_(std::move(amplitudes)) {
    n_qubits_ = qubit_count(amplitudes_.size());
    const double nrm = vector_norm(amplitudes_);
    if (std::abs(nrm * nrm - 1.0) > kPureNormTol) {
      throw Error(ErrorCode::kInvalidState, "squared norm " + std::to_string(nrm * nrm) + " is not 1");
    }
  }

  /// Rescales to unit norm before validating.
  static PureState normalized(ComplexVector amplitudes) {
    const double nrm = vector_norm(amplitudes);
    if (nrm == 0.0) throw Error(ErrorCode::kInvalidState, "zero vector");
    for (auto &z : amplitudes) z /= nrm;
    return PureState(std::move(amplitudes));
  }

  static PureState basis(std::size_t n_qubits, std::size_t index) {
    ComplexVector v(std::size_t{1} << n_qubits);
    v.at(index) = 1.0;
    return PureState(std::move(v));
  }

  std::size_t n_qubits() const { return n_qubits_; }
  std::size_t dim() const { return amplitudes_.size(); }
  const ComplexVector &amplitudes() const { return amplitudes_; }

  ComplexMatrix projector() const { return ComplexMatrix::outer(amplitudes_, amplitudes_); }

 private:
  std::size_t n_qubits_ = 0;
  ComplexVector amplitudes_;
};

/// Hermitian, trace-one, PSD operator on n qubits. Eigenvalues in
/// [-1e-10, 0) are clamped to zero when the state is built.
class DensityMatrix {
 public:
  explicit DensityMatrix(const ComplexMatrix &mat) {
    n_qubits_ = qubit_count(mat.dim());
    if (!mat.is_hermitian(kStateTol)) {
      throw Error(ErrorCode::kInvalidState, "not Hermitian (defect " + std::to_string(mat.hermitian_defect()) + ")");
    }
    const Complex tr = mat.trace();
    if (std::abs(tr - Complex(1.0)) > kStateTol) {
      throw Error(ErrorCode::kInvalidState, "trace " + std::to_string(tr.real()) + " is not 1");
    }
    const HermitianEig eig = eig_hermitian(mat);
    if (eig.values.front() < -kStateTol) {
      throw Error(ErrorCode::kInvalidState, "min eigenvalue " + std::to_string(eig.values.front()) + " < -1e-10");
    }
    if (eig.values.front() < 0.0) {
      mat_ = spectral_apply(eig, [](double x) { return x < 0.0 ? 0.0 : x; });
    } else {
      mat_ = mat.hermitian_part();
    }
  }

  static DensityMatrix from_pure(const PureState &psi) { return DensityMatrix(psi.projector()); }

  static DensityMatrix maximally_mixed(std::size_t n_qubits) {
    const std::size_t d = std::size_t{1} << n_qubits;
    return DensityMatrix(ComplexMatrix::identity(d) * Complex(1.0 / static_cast<double>(d)));
  }

  static DensityMatrix diagonal(const std::vector<double> &probs) { return DensityMatrix(ComplexMatrix::diagonal(probs)); }

  std::size_t n_qubits() const { return n_qubits_; }
  std::size_t dim() const { return mat_.dim(); }
  const ComplexMatrix &matrix() const { return mat_; }

  std::vector<double> spectrum() const { return eigenvalues(mat_); }
  int rank() const { return numerical_rank(spectrum()); }
  double purity() const { return trace_product(mat_, mat_).real(); }

 private:
  std::size_t n_qubits_ = 0;
  ComplexMatrix mat_;
};

inline DensityMatrix kron(const DensityMatrix &a, const DensityMatrix &b) {
  return DensityMatrix(kron(a.matrix(), b.matrix()));
}

inline PureState kron(const PureState &a, const PureState &b) { return PureState::normalized(kron(std::span<const Complex>(a.amplitudes()), std::span<const Complex>(b.amplitudes()))); }

/// rho = G G^dagger / tr(G G^dagger), G a 2^n x rank complex Gaussian matrix.
inline DensityMatrix random_density(std::size_t n_qubits, std::size_t rank, std::uint64_t seed) {
  const std::size_t d = std::size_t{1} << n_qubits;
  if (rank < 1 || rank > d) {
    throw Error(ErrorCode::kRankOutOfRange, "rank " + std::to_string(rank) + " not in [1, " + std::to_string(d) + "]");
  }
  Rng rng(seed);
  std::vector<Complex> g(d * rank);
  for (auto &z : g) {
    const double re = rng.normal();
    const double im = rng.normal();
    z = Complex(re, im);
  }
  ComplexMatrix m(d);
  for (std::size_t r = 0; r < d; ++r) {
    for (std::size_t c = 0; c < d; ++c) {
      Complex s = 0.0;
      for (std::size_t k = 0; k < rank; ++k) s += g[r * rank + k] * std::conj(g[c * rank + k]);
      m(r, c) = s;
    }
  }
  m = m.hermitian_part();
  m *= Complex(1.0 / m.trace().real());
  return DensityMatrix(m);
}

inline PureState random_pure(std::size_t n_qubits, std::uint64_t seed) {
  Rng rng(seed);
  ComplexVector v(std::size_t{1} << n_qubits);
  for (auto &z : v) {
    const double re = rng.normal();
    const double im = rng.normal();
    z = Complex(re, im);
  }
  return PureState::normalized(std::move(v));
}

/// Haar-random unitary: Gram-Schmidt on the columns of a complex Gaussian
/// matrix.
inline ComplexMatrix random_unitary(std::size_t dim, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<ComplexVector> cols(dim, ComplexVector(dim));
  for (auto &col : cols) {
    for (auto &z : col) {
      const double re = rng.normal();
      const double im = rng.normal();
      z = Complex(re, im);
    }
  }
  for (std::size_t j = 0; j < dim; ++j) {
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t k = 0; k < j; ++k) {
        const Complex proj = inner(cols[k], cols[j]);
        for (std::size_t i = 0; i < dim; ++i) cols[j][i] -= proj * cols[k][i];
      }
    }
    const double nrm = vector_norm(cols[j]);
    for (auto &z : cols[j]) z /= nrm;
  }
  ComplexMatrix u(dim);
  for (std::size_t j = 0; j < dim; ++j) {
    for (std::size_t i = 0; i < dim; ++i) u(i, j) = cols[j][i];
  }
  return u;
}

/// |psi> = sum_i sqrt(lambda_i) |v_i> (x) |i>, a 2n-qubit state whose
/// reduction onto the leading n qubits is rho.
inline PureState purify(const DensityMatrix &rho) {
  const HermitianEig eig = eig_hermitian(rho.matrix());
  const std::size_t d = rho.dim();
  ComplexVector psi(d * d);
  for (std::size_t j = 0; j < d; ++j) {
    const double w = std::sqrt(std::max(eig.values[j], 0.0));
    if (w == 0.0) continue;
    for (std::size_t i = 0; i < d; ++i) psi[i * d + j] = w * eig.vectors(i, j);
  }
  return PureState::normalized(std::move(psi));
}

inline std::vector<std::size_t> leading_qubits(std::size_t n) {
  std::vector<std::size_t> q(n);
  for (std::size_t i = 0; i < n; ++i) q[i] = i;
  return q;
}

}  // namespace qdist
