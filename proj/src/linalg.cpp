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

#include "trimest/linalg.hpp"

#include <algorithm>
#include <cmath>

#include "trimest/error.hpp"

namespace trimest {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::IncompatibleShapes: return "IncompatibleShapes";
    case ErrorCode::IncompatibleData: return "IncompatibleData";
    case ErrorCode::InvalidH: return "InvalidH";
    case ErrorCode::LineSearchFailed: return "LineSearchFailed";
    case ErrorCode::TooManySubsets: return "TooManySubsets";
    case ErrorCode::InvalidCounts: return "InvalidCounts";
    case ErrorCode::InvalidTau: return "InvalidTau";
    case ErrorCode::NonPositiveCurvature: return "NonPositiveCurvature";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

CholeskyLogdet cholesky_logdet(const Matrix& m) {
  require(m.rows() == m.cols() && m.rows() > 0, ErrorCode::IncompatibleShapes,
          "cholesky_logdet: matrix must be square and non-empty");
  if (!m.allFinite()) fail(ErrorCode::NotPositiveDefinite, "cholesky_logdet: non-finite entries");
  Eigen::LLT<Matrix> llt(m);
  if (llt.info() != Eigen::Success)
    fail(ErrorCode::NotPositiveDefinite, "cholesky_logdet: matrix is not positive definite");
  CholeskyLogdet out;
  out.factor = llt.matrixL();
  const auto diag = out.factor.diagonal();
  // LLT only rejects non-positive pivots; a denormal pivot still breaks log.
  if ((diag.array() <= 0.0).any() || !diag.allFinite())
    fail(ErrorCode::NotPositiveDefinite, "cholesky_logdet: degenerate pivot");
  out.logdet = 2.0 * diag.array().log().sum();
  if (!std::isfinite(out.logdet))
    fail(ErrorCode::NotPositiveDefinite, "cholesky_logdet: log-determinant overflow");
  return out;
}

Matrix spd_inverse(const CholeskyLogdet& chol) {
  const Index p = chol.factor.rows();
  Matrix inv = Matrix::Identity(p, p);
  const auto l = chol.factor.triangularView<Eigen::Lower>();
  l.solveInPlace(inv);
  l.transpose().solveInPlace(inv);
  return symmetrize(inv);
}

Matrix symmetrize(const Matrix& m) { return 0.5 * (m + m.transpose()); }

double asymmetry(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  return (m - m.transpose()).cwiseAbs().maxCoeff() / scale;
}

SpdMatrix::SpdMatrix(const Matrix& m) {
  require(m.rows() == m.cols() && m.rows() > 0, ErrorCode::IncompatibleShapes,
          "SpdMatrix: matrix must be square and non-empty");
  require(asymmetry(m) <= 1e-12, ErrorCode::InvalidArgument, "SpdMatrix: matrix is not symmetric");
  value_ = symmetrize(m);
  chol_ = cholesky_logdet(value_);
}

Svd deterministic_svd(const Matrix& m) {
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  Svd out{svd.matrixU(), svd.singularValues(), svd.matrixV()};
  for (Index j = 0; j < out.u.cols(); ++j) {
    const double scale = out.u.col(j).cwiseAbs().maxCoeff();
    for (Index i = 0; i < out.u.rows(); ++i) {
      const double x = out.u(i, j);
      if (std::abs(x) > 1e-12 * scale) {
        if (x < 0.0) {
          out.u.col(j) *= -1.0;
          out.v.col(j) *= -1.0;
        }
        break;
      }
    }
  }
  return out;
}

Matrix svd_soft_threshold(const Matrix& m, double nu) {
  require(nu >= 0.0, ErrorCode::InvalidArgument, "svd_soft_threshold: nu must be >= 0");
  if (nu == 0.0) return m;
  const Svd svd = deterministic_svd(m);
  const Vector shrunk = (svd.sigma.array() - nu).max(0.0).matrix();
  return svd.u * shrunk.asDiagonal() * svd.v.transpose();
}

double spectral_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues()(0);
}

double nuclear_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues().sum();
}

Matrix best_rank_approximation(const Matrix& m, Index rank) {
  const Svd svd = deterministic_svd(m);
  const Index r = std::min<Index>(rank, svd.sigma.size());
  return svd.u.leftCols(r) * svd.sigma.head(r).asDiagonal() * svd.v.leftCols(r).transpose();
}

}  // namespace trimest
