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

// The four trimmed estimators, wired from a loss, a regularizer and a solver:
//
//   sparse_lts        squared loss,             l1
//   trimmed_logistic  logistic loss (y in 0/1), l1
//   trimmed_glasso    Gaussian log-likelihood,  off-diagonal l1
//   tracenorm_lts     multi-response squared,   trace norm
//
// With h = n every estimator is its classical untrimmed counterpart.

#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "trimest/model.hpp"
#include "trimest/optimizer.hpp"

namespace trimest {

enum class EstimatorKind { sparse_lts, trimmed_logistic, trimmed_glasso, tracenorm_lts };
enum class SolverKind { partial_min, alternate_min };

const char* to_string(EstimatorKind kind);
std::optional<EstimatorKind> parse_estimator_kind(const std::string& name);

struct EstimatorSpec {
  EstimatorKind kind = EstimatorKind::sparse_lts;
  double lambda = 0.0;
  /// At most one of h / trim_fraction; with neither, all samples are kept.
  std::optional<std::size_t> h;
  /// Fraction of samples trimmed: h = n - floor(fraction * n).
  std::optional<double> trim_fraction;
  double rho = std::numeric_limits<double>::infinity();
  SolverKind solver_kind = SolverKind::partial_min;
  SolverConfig solver;
  /// Inner solves of the alternating scheme.
  SolverConfig inner_solver;

  void validate() const;
  std::size_t resolve_h(std::size_t n) const;
};

LossKind loss_kind(EstimatorKind kind);
RegKind reg_kind(EstimatorKind kind);

LossModel make_loss_model(const EstimatorSpec& spec, DatasetPtr data);
Regularizer make_regularizer(const EstimatorSpec& spec);

/// Zero for regression kinds; (S + lambda I)^{-1} for trimmed_glasso, falling
/// back to the identity when that is not positive definite.
Parameter default_initial(const EstimatorSpec& spec, const Dataset& data);

FitResult fit(const EstimatorSpec& spec, DatasetPtr data, const std::optional<Parameter>& init = {});

enum class Scoring { trimmed_mse, deviance, heldout_loglik };
std::optional<Scoring> parse_scoring(const std::string& name);

struct CVPlan {
  std::vector<double> lambda_grid;
  std::vector<std::size_t> h_grid;
  std::size_t folds = 5;
  Scoring scoring = Scoring::trimmed_mse;
  std::uint64_t seed = 0;
  std::size_t threads = 1;

  void validate() const;
};

struct CvCell {
  double lambda = 0.0;
  std::size_t h = 0;
  double score = 0.0;
  std::vector<double> fold_scores;
};

struct CvResult {
  double best_lambda = 0.0;
  std::size_t best_h = 0;
  std::vector<CvCell> table;  // lambda-major grid order
};

/// k-fold selection of (lambda, h). Fold membership is a seeded permutation;
/// the lowest mean held-out score wins, ties going to the earlier grid cell.
CvResult cross_validate(const EstimatorSpec& spec, const CVPlan& plan, DatasetPtr data);

/// Held-out score of a fitted parameter on `test`, for a model trained with
/// trim fraction 1 - h/n. Lower is better.
double heldout_score(const EstimatorSpec& spec, Scoring scoring, const Parameter& theta,
                     const Dataset& test, double trim_fraction);

/// Fits along a non-increasing lambda grid, warm-starting each fit from the
/// previous solution.
std::vector<FitResult> lambda_path(const EstimatorSpec& spec, DatasetPtr data,
                                   std::span<const double> grid);

/// Log-spaced grid from lambda_max down to lambda_max * min_ratio.
std::vector<double> log_grid(double lambda_max, double min_ratio, std::size_t count);

}  // namespace trimest
