// Copyright 2026 The trimest Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Dense kernels shared by the losses, the proximal maps and the simulators.

#pragma once

#include <Eigen/Dense>

namespace trimest {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct CholeskyLogdet {
  Matrix factor;  // lower triangular, M = L L^T
  double logdet = 0.0;
};

/// Cholesky factorization of a symmetric matrix together with its
/// log-determinant. Only the lower triangle of `m` is read. Throws
/// Error(NotPositiveDefinite) when a pivot is not strictly positive.
CholeskyLogdet cholesky_logdet(const Matrix& m);

/// Inverse of the matrix whose Cholesky factor is `chol.factor`.
Matrix spd_inverse(const CholeskyLogdet& chol);

/// (M + M^T) / 2
Matrix symmetrize(const Matrix& m);

/// Largest |M_ij - M_ji| relative to max(1, max |M_ij|).
double asymmetry(const Matrix& m);

/// A symmetric positive-definite matrix, certified at construction by a
/// successful Cholesky factorization. Inputs are symmetrized to absorb
/// round-off; anything asymmetric beyond 1e-12 (relative) is rejected.
class SpdMatrix {
 public:
  explicit SpdMatrix(const Matrix& m);

  Index dim() const { return value_.rows(); }
  const Matrix& matrix() const { return value_; }
  const Matrix& factor() const { return chol_.factor; }
  double logdet() const { return chol_.logdet; }
  Matrix inverse() const { return spd_inverse(chol_); }

 private:
  Matrix value_;
  CholeskyLogdet chol_;
};

/// Thin SVD with singular values in descending order. Each left singular
/// vector is flipped so that its first non-negligible entry is positive
/// (the matching right vector is flipped with it).
struct Svd {
  Matrix u;
  Vector sigma;
  Matrix v;
};

Svd deterministic_svd(const Matrix& m);

/// U diag(max(sigma_i - nu, 0)) V^T.
Matrix svd_soft_threshold(const Matrix& m, double nu);

/// Largest singular value.
double spectral_norm(const Matrix& m);

/// Sum of singular values.
double nuclear_norm(const Matrix& m);

/// Best rank-r approximation via the deterministic SVD.
Matrix best_rank_approximation(const Matrix& m, Index rank);

}  // namespace trimest
