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

// Per-sample losses, regularizers and proximal maps. The trimmed objective is
//
//   f(w, theta) = (1/h) sum_i w_i l(theta; z_i) + shared(theta) + lambda R(theta)
//
// where shared() is -log det(Theta) for the Gaussian likelihood and zero
// otherwise.

#pragma once

#include <limits>
#include <memory>
#include <span>

#include "trimest/linalg.hpp"
#include "trimest/trimmer.hpp"

namespace trimest {

enum class DataKind { regression, multiresponse, ggm };

/// Immutable sample collection. For regression kinds x() holds covariates and
/// y() the responses (n x 1 or n x q); for ggm x() holds the raw samples and
/// y() is empty.
class Dataset {
 public:
  static Dataset regression(Matrix x, Vector y);
  static Dataset multiresponse(Matrix x, Matrix y);
  static Dataset ggm(Matrix samples);

  DataKind kind() const { return kind_; }
  Index n() const { return x_.rows(); }
  Index p() const { return x_.cols(); }
  Index q() const { return y_.cols(); }
  const Matrix& x() const { return x_; }
  const Matrix& y() const { return y_; }

  /// Dataset restricted to the given rows, in the given order.
  Dataset rows(std::span<const Index> idx) const;

 private:
  Dataset(DataKind kind, Matrix x, Matrix y);

  DataKind kind_;
  Matrix x_;
  Matrix y_;
};

using DatasetPtr = std::shared_ptr<const Dataset>;

enum class ParamKind { vector, matrix, precision };

/// The estimand: a p-vector (stored p x 1), a p x q coefficient matrix, or a
/// p x p precision matrix. Positive definiteness of precision iterates is
/// checked wherever the log-determinant is evaluated.
struct Parameter {
  ParamKind kind = ParamKind::vector;
  Matrix value;

  static Parameter vector(const Vector& v) { return {ParamKind::vector, v}; }
  static Parameter matrix(Matrix m) { return {ParamKind::matrix, std::move(m)}; }
  static Parameter precision(Matrix m) { return {ParamKind::precision, std::move(m)}; }
};

enum class LossKind { squared, logistic, gaussian_loglik };

/// Quantities that depend on theta only; the weighted value and gradient are
/// assembled from them for any weight vector.
struct ModelState {
  Vector losses;         // per-sample loss
  Matrix residual;       // squared: X theta - Y; logistic: sigmoid(z) - y
  CholeskyLogdet chol;   // ggm only
  double shared = 0.0;   // -log det Theta for ggm
};

class LossModel {
 public:
  /// Throws IncompatibleData when the loss does not fit the data kind (or
  /// logistic labels are not in {0,1}).
  LossModel(LossKind kind, DatasetPtr data);

  LossKind kind() const { return kind_; }
  const Dataset& data() const { return *data_; }
  const DatasetPtr& data_ptr() const { return data_; }
  Index n() const { return data_->n(); }

  /// Shape and kind the parameter must have for this model.
  ParamKind param_kind() const;
  Index param_rows() const;
  Index param_cols() const;
  void check_parameter(const Parameter& theta) const;

  /// Throws NotPositiveDefinite for a ggm parameter that fails Cholesky.
  ModelState state(const Parameter& theta) const;

  /// (1/h) sum w_i l_i + shared term, for an arbitrary weight vector.
  double smooth_value(const ModelState& s, const Vector& w, double h) const;

  /// Gradient of smooth_value in theta. ggm reuses the factor cached in `s`.
  Matrix smooth_gradient(const ModelState& s, const Vector& w, double h) const;

  double per_sample_loss(const Parameter& theta, Index i) const;
  Vector sample_losses(const Parameter& theta) const { return state(theta).losses; }

 private:
  LossKind kind_;
  DatasetPtr data_;
};

enum class RegKind { l1, l1_offdiag, trace_norm };

struct Regularizer {
  RegKind kind = RegKind::l1;
  double lambda = 0.0;
  double radius = std::numeric_limits<double>::infinity();

  Regularizer() = default;
  Regularizer(RegKind k, double lam, double rho = std::numeric_limits<double>::infinity());

  /// R(theta), without the lambda factor.
  double value(const Matrix& theta) const;
  double penalty(const Matrix& theta) const { return lambda == 0.0 ? 0.0 : lambda * value(theta); }

  /// argmin_z 1/2 ||z - u||_F^2 + step * lambda * R(z).
  Matrix prox(const Matrix& u, double step) const;

  /// Scales theta back onto {R <= radius}. Returns true if it had to.
  bool project_to_ball(Matrix& theta) const;

  /// Dual norm R*: max-abs for l1, spectral norm for the trace norm and
  /// max-abs off-diagonal entry for l1_offdiag.
  double dual_norm(const Matrix& v) const;
};

/// Elementwise sign(u) max(|u| - nu, 0).
Matrix soft_threshold(const Matrix& u, double nu);

double per_sample_loss(const LossModel& model, const Parameter& theta, Index i);

double weighted_objective(const LossModel& model, const Regularizer& reg, const Parameter& theta,
                          const TrimWeights& w);

Parameter weighted_gradient(const LossModel& model, const Parameter& theta, const TrimWeights& w);

Parameter prox(const Regularizer& reg, const Parameter& theta, double step);

double reg_value(const Regularizer& reg, const Parameter& theta);

}  // namespace trimest
