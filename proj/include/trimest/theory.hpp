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

// Regularization choices and error bounds for trimmed estimators, and
// numerical checks of the curvature and concentration conditions behind them.
//
// Notation: kappa is the restricted curvature, tau1..tau3 the tolerance terms
// of the curvature (C-1) and incoherence (C-2) conditions, psi the subspace
// compatibility constant, fxb the bound on the outlier design f(X^B).

#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "trimest/linalg.hpp"
#include "trimest/model.hpp"

namespace trimest {

struct TheoryParams {
  double kappa = 1.0;
  double tau1 = 0.0;
  double tau2 = 0.0;
  double tau3 = 0.0;
  double psi = 1.0;
  double alpha = 1.0;
  double fxb = 0.0;
  double k = 1.0;
  double rho = 0.0;
  double lambda = 0.0;
  std::size_t h = 1;
  std::size_t n = 1;
  std::size_t p = 1;
  std::size_t b_size = 0;
};

struct ErrorBounds {
  double l2 = 0.0;
  double r = 0.0;  // regularizer-norm bound (l1 for sparse models)
};

/// l2 <= (3 lambda psi / 2 + tau2) / kappa,
/// R  <= 2 (2 lambda psi + tau2)^2 / (lambda kappa).
/// Does not check the lambda lower bound; see theorem1_lambda_floor.
ErrorBounds theorem1_bounds(const TheoryParams& tp);

/// 4 max(dual_norm, 2 rho tau1 + tau3): the smallest admissible lambda given
/// the dual norm of the loss gradient at the truth.
double theorem1_lambda_floor(double dual_norm, double rho, double tau1, double tau3);

/// Trimmed graphical lasso choice
///   4 max{8 max_i S_ii sqrt(10 tau log p / (h - B)) + (B/h) |S|_max, fxb sqrt(log p / h)}
/// with tau = 3 by default. Throws InvalidCounts unless h > B.
double ggm_lambda_cor1(const Matrix& sigma, std::size_t h, std::size_t b_size, std::size_t p, double fxb,
                       double tau = 3.0);

/// Frobenius bound of the trimmed graphical lasso at lambda = c sqrt(log p / n):
///   (1/kappa) ((3c/2) sqrt((k + p) log p / n) + fxb sqrt(2 B log p / n)).
double ggm_bounds_cor2(double c, double k, std::size_t p, std::size_t n, double fxb, std::size_t b_size,
                       double kappa);

/// Outlier design bound for sub-Gaussian outliers with parameter a:
///   4 sqrt(2) a (1 + sqrt(log p))^2 |Sigma_B|_2 / sqrt(log p).
double ggm_fxb_cor3(double a, std::size_t p, double sigma_b_spectral);

/// c sqrt(log p / h).
double lts_lambda(std::size_t h, std::size_t p, double c);

/// l2 = c1 (sqrt(k log p / h) + c2 sqrt(B log p / h)), l1 = 4 c1 (...)^2.
/// c1 and c2 depend on the design, the noise level and the outlier magnitude
/// and have no closed form; they are inputs here.
ErrorBounds lts_bounds(double c1, double c2, double k, std::size_t b_size, std::size_t h, std::size_t p);

struct RscCheck {
  double lhs = 0.0;  // <inv(T) - inv(T + D), D>
  double rhs = 0.0;  // |D|_F^2 / (|T|_2 + 1)^2
  bool holds = false;
};

/// Curvature of -log det around a PD matrix, for |D|_F <= 1 with T + D PD.
RscCheck check_rsc_lemma(const Matrix& theta_star, const Matrix& delta);

/// Random PD matrices of dimension 2..max_p with random symmetric
/// perturbations (|D|_F <= 1, halved until T + D is PD); returns how many
/// draws satisfy the curvature inequality.
std::size_t rsc_sweep(std::size_t draws, std::size_t max_p, std::uint64_t seed);

struct SampleCovCheck {
  std::size_t trials = 0;
  std::size_t violations = 0;
  double rate = 0.0;
  double bound = 0.0;           // 8 max_i S_ii sqrt(10 tau log p / n)
  double allowed_rate = 0.0;    // 4 / p^(tau - 2)
  double standard_error = 0.0;  // Monte Carlo standard error at allowed_rate
};

/// Frequency with which |S_n - Sigma|_max exceeds its concentration bound
/// over `trials` Gaussian samples of size n. Throws InvalidTau unless tau > 2.
SampleCovCheck check_samplecov_lemma(const Matrix& sigma, std::size_t n, double tau, std::size_t trials,
                                     std::uint64_t seed, std::size_t threads = 1);

struct ConditionReport {
  Vector w_star;             // w_tilde on good samples, 0 on bad ones
  double c1_lhs = 0.0;       // <grad L(t* + D, w*) - grad L(t*, w*), D>
  double c2_lhs = 0.0;       // <grad L(t* + D, w~) - grad L(t* + D, w*), D>
  double delta_norm = 0.0;   // |D|_2 (Frobenius for matrices)
  double delta_reg = 0.0;    // R(D)
  double dual_norm_grad = 0.0;  // R*(grad L(t*, w*))
  double h = 0.0;

  /// Largest kappa satisfying C-1 for a given tau1.
  double kappa_frontier(double tau1) const;
  /// Smallest tau2 satisfying C-2 for a given tau3.
  double tau2_frontier(double tau3) const;
};

ConditionReport diagnose_conditions(const LossModel& model, const Regularizer& reg, const Parameter& theta_tilde,
                                    const Vector& w_tilde, const Parameter& theta_star,
                                    const std::vector<std::size_t>& good_indices);

}  // namespace trimest
