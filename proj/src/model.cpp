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

#include "trimest/model.hpp"

#include <cmath>
#include <string>

#include "trimest/error.hpp"

namespace trimest {

namespace {

double softplus(double z) {
  return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

void check_finite(const Matrix& m, const char* what) {
  require(m.allFinite(), ErrorCode::InvalidArgument, std::string(what) + ": non-finite entries");
}

}  // namespace

Dataset::Dataset(DataKind kind, Matrix x, Matrix y) : kind_(kind), x_(std::move(x)), y_(std::move(y)) {
  require(x_.rows() >= 1 && x_.cols() >= 1, ErrorCode::InvalidArgument, "Dataset: need n >= 1 and p >= 1");
  check_finite(x_, "Dataset");
  check_finite(y_, "Dataset");
  if (kind_ != DataKind::ggm)
    require(y_.rows() == x_.rows() && y_.cols() >= 1, ErrorCode::IncompatibleShapes,
            "Dataset: responses must have one row per sample");
}

Dataset Dataset::regression(Matrix x, Vector y) {
  return Dataset(DataKind::regression, std::move(x), Matrix(y));
}

Dataset Dataset::multiresponse(Matrix x, Matrix y) {
  return Dataset(DataKind::multiresponse, std::move(x), std::move(y));
}

Dataset Dataset::ggm(Matrix samples) { return Dataset(DataKind::ggm, std::move(samples), Matrix()); }

Dataset Dataset::rows(std::span<const Index> idx) const {
  Matrix x(static_cast<Index>(idx.size()), x_.cols());
  Matrix y(kind_ == DataKind::ggm ? 0 : static_cast<Index>(idx.size()), y_.cols());
  for (std::size_t k = 0; k < idx.size(); ++k) {
    require(idx[k] >= 0 && idx[k] < n(), ErrorCode::InvalidArgument, "Dataset::rows: index out of range");
    x.row(static_cast<Index>(k)) = x_.row(idx[k]);
    if (kind_ != DataKind::ggm) y.row(static_cast<Index>(k)) = y_.row(idx[k]);
  }
  return Dataset(kind_, std::move(x), std::move(y));
}

LossModel::LossModel(LossKind kind, DatasetPtr data) : kind_(kind), data_(std::move(data)) {
  require(data_ != nullptr, ErrorCode::InvalidArgument, "LossModel: null dataset");
  switch (kind_) {
    case LossKind::squared:
      require(data_->kind() != DataKind::ggm, ErrorCode::IncompatibleData,
              "squared loss needs regression or multiresponse data");
      break;
    case LossKind::logistic:
      require(data_->kind() == DataKind::regression, ErrorCode::IncompatibleData,
              "logistic loss needs single-response regression data");
      for (Index i = 0; i < data_->n(); ++i) {
        const double y = data_->y()(i, 0);
        require(y == 0.0 || y == 1.0, ErrorCode::IncompatibleData, "logistic labels must be 0 or 1");
      }
      break;
    case LossKind::gaussian_loglik:
      require(data_->kind() == DataKind::ggm, ErrorCode::IncompatibleData,
              "Gaussian log-likelihood needs ggm sample data");
      break;
  }
}

ParamKind LossModel::param_kind() const {
  if (kind_ == LossKind::gaussian_loglik) return ParamKind::precision;
  return data_->kind() == DataKind::multiresponse ? ParamKind::matrix : ParamKind::vector;
}

Index LossModel::param_rows() const { return data_->p(); }

Index LossModel::param_cols() const {
  switch (param_kind()) {
    case ParamKind::vector: return 1;
    case ParamKind::matrix: return data_->q();
    case ParamKind::precision: return data_->p();
  }
  return 1;
}

void LossModel::check_parameter(const Parameter& theta) const {
  require(theta.kind == param_kind() && theta.value.rows() == param_rows() &&
              theta.value.cols() == param_cols(),
          ErrorCode::IncompatibleShapes,
          "parameter shape " + std::to_string(theta.value.rows()) + "x" +
              std::to_string(theta.value.cols()) + " does not match the model (" +
              std::to_string(param_rows()) + "x" + std::to_string(param_cols()) + ")");
}

ModelState LossModel::state(const Parameter& theta) const {
  check_parameter(theta);
  const Matrix& x = data_->x();
  ModelState s;
  switch (kind_) {
    case LossKind::squared:
      s.residual = x * theta.value - data_->y();
      s.losses = 0.5 * s.residual.rowwise().squaredNorm();
      break;
    case LossKind::logistic: {
      const Vector z = x * theta.value.col(0);
      s.losses.resize(z.size());
      s.residual.resize(z.size(), 1);
      for (Index i = 0; i < z.size(); ++i) {
        const double y = data_->y()(i, 0);
        s.losses[i] = softplus(z[i]) - y * z[i];
        s.residual(i, 0) = sigmoid(z[i]) - y;
      }
      break;
    }
    case LossKind::gaussian_loglik:
      s.chol = cholesky_logdet(theta.value);
      s.shared = -s.chol.logdet;
      s.losses = (x * theta.value).cwiseProduct(x).rowwise().sum();
      break;
  }
  return s;
}

double LossModel::smooth_value(const ModelState& s, const Vector& w, double h) const {
  require(w.size() == s.losses.size(), ErrorCode::IncompatibleShapes, "smooth_value: weight size mismatch");
  require(h > 0.0, ErrorCode::InvalidH, "smooth_value: h must be positive");
  return w.dot(s.losses) / h + s.shared;
}

Matrix LossModel::smooth_gradient(const ModelState& s, const Vector& w, double h) const {
  require(w.size() == n(), ErrorCode::IncompatibleShapes, "smooth_gradient: weight size mismatch");
  require(h > 0.0, ErrorCode::InvalidH, "smooth_gradient: h must be positive");
  const Matrix& x = data_->x();
  if (kind_ == LossKind::gaussian_loglik) {
    const Matrix s_w = x.transpose() * w.asDiagonal() * x / h;
    return symmetrize(s_w - spd_inverse(s.chol));
  }
  return x.transpose() * (w.asDiagonal() * s.residual) / h;
}

double LossModel::per_sample_loss(const Parameter& theta, Index i) const {
  check_parameter(theta);
  require(i >= 0 && i < n(), ErrorCode::InvalidArgument, "per_sample_loss: sample index out of range");
  const auto xi = data_->x().row(i);
  switch (kind_) {
    case LossKind::squared:
      return 0.5 * (xi * theta.value - data_->y().row(i)).squaredNorm();
    case LossKind::logistic: {
      const double z = xi.dot(theta.value.col(0));
      return softplus(z) - data_->y()(i, 0) * z;
    }
    case LossKind::gaussian_loglik:
      return xi * theta.value * xi.transpose();
  }
  return 0.0;
}

Regularizer::Regularizer(RegKind k, double lam, double rho) : kind(k), lambda(lam), radius(rho) {
  require(lam >= 0.0 && std::isfinite(lam), ErrorCode::InvalidArgument, "regularizer: lambda must be >= 0");
  require(rho > 0.0, ErrorCode::InvalidArgument, "regularizer: radius must be > 0");
}

double Regularizer::value(const Matrix& theta) const {
  switch (kind) {
    case RegKind::l1:
      return theta.cwiseAbs().sum();
    case RegKind::l1_offdiag:
      return theta.cwiseAbs().sum() - theta.diagonal().cwiseAbs().sum();
    case RegKind::trace_norm:
      return nuclear_norm(theta);
  }
  return 0.0;
}

Matrix soft_threshold(const Matrix& u, double nu) {
  return u.unaryExpr([nu](double x) {
    const double a = std::abs(x) - nu;
    return a > 0.0 ? std::copysign(a, x) : 0.0;
  });
}

Matrix Regularizer::prox(const Matrix& u, double step) const {
  require(step > 0.0, ErrorCode::InvalidArgument, "prox: step must be > 0");
  const double nu = step * lambda;
  switch (kind) {
    case RegKind::l1:
      return soft_threshold(u, nu);
    case RegKind::l1_offdiag: {
      Matrix out = soft_threshold(u, nu);
      out.diagonal() = u.diagonal();
      return out;
    }
    case RegKind::trace_norm:
      return svd_soft_threshold(u, nu);
  }
  return u;
}

bool Regularizer::project_to_ball(Matrix& theta) const {
  if (!std::isfinite(radius)) return false;
  const double r = value(theta);
  if (r <= radius) return false;
  theta *= radius / r;
  return true;
}

double Regularizer::dual_norm(const Matrix& v) const {
  switch (kind) {
    case RegKind::l1:
      return v.cwiseAbs().maxCoeff();
    case RegKind::l1_offdiag: {
      Matrix off = v.cwiseAbs();
      off.diagonal().setZero();
      return off.maxCoeff();
    }
    case RegKind::trace_norm:
      return spectral_norm(v);
  }
  return 0.0;
}

double per_sample_loss(const LossModel& model, const Parameter& theta, Index i) {
  return model.per_sample_loss(theta, i);
}

double weighted_objective(const LossModel& model, const Regularizer& reg, const Parameter& theta,
                          const TrimWeights& w) {
  require(static_cast<Index>(w.n()) == model.n(), ErrorCode::IncompatibleShapes,
          "weighted_objective: weights do not match the sample count");
  const ModelState s = model.state(theta);
  return model.smooth_value(s, w.values(), static_cast<double>(w.h())) + reg.penalty(theta.value);
}

Parameter weighted_gradient(const LossModel& model, const Parameter& theta, const TrimWeights& w) {
  require(static_cast<Index>(w.n()) == model.n(), ErrorCode::IncompatibleShapes,
          "weighted_gradient: weights do not match the sample count");
  const ModelState s = model.state(theta);
  return {theta.kind, model.smooth_gradient(s, w.values(), static_cast<double>(w.h()))};
}

Parameter prox(const Regularizer& reg, const Parameter& theta, double step) {
  return {theta.kind, reg.prox(theta.value, step)};
}

double reg_value(const Regularizer& reg, const Parameter& theta) { return reg.value(theta.value); }

}  // namespace trimest
