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

// Solvers for the trimmed objective.
//
// fit_partial_min eliminates the weights inside every proximal gradient step:
// at each iterate the h smallest per-sample losses are selected, then one
// prox-gradient step is taken on the objective restricted to that subset.
// fit_alternate_min is the classical scheme that solves every fixed-subset
// problem to completion before re-trimming. Both are monotone in the composite
// objective.

#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "trimest/model.hpp"
#include "trimest/trimmer.hpp"

namespace trimest {

struct SolverConfig {
  std::size_t max_iter = 10000;
  double tol_rel_obj = 1e-10;
  /// Bound on ||theta - prox_1(theta - grad)|| / max(1, ||theta||).
  double tol_grad_map = 1e-7;
  double ls_shrink = 0.5;
  double ls_init_step = 1.0;
  std::size_t weight_stable_iters = 5;
  std::uint64_t seed = 0;

  void validate() const;
  /// Same settings with both tolerances divided by `factor`.
  SolverConfig tightened(double factor) const;
};

struct FitResult {
  Parameter theta;
  TrimWeights weights = TrimWeights::all(1);
  /// f(w_t, theta_t) at every visited iterate, after re-trimming.
  std::vector<double> objective_trace;
  std::size_t iterations = 0;
  bool converged = false;
  /// Iteration from which the weights stayed fixed until the end.
  std::optional<std::size_t> weight_stabilized_at;
  std::size_t ls_backtracks = 0;
  std::size_t pd_rejections = 0;
  std::size_t ball_projections = 0;
  /// The weights cycled among vertices of equal objective.
  bool degenerate = false;
  /// Stopped because the line search hit machine precision at a stationary point.
  bool machine_precision = false;
  double grad_map_residual = std::numeric_limits<double>::infinity();

  double objective() const { return objective_trace.back(); }
};

/// Partial-minimization proximal gradient. Throws LineSearchFailed if the
/// step underflows away from a stationary point; a non-PD precision candidate
/// only shrinks the step.
FitResult fit_partial_min(const LossModel& model, const Regularizer& reg, std::size_t h,
                          const Parameter& theta0, const SolverConfig& cfg);

/// Alternating scheme: solve the fixed-subset problem to `inner_cfg`
/// tolerances, re-trim, repeat until the subset repeats.
FitResult fit_alternate_min(const LossModel& model, const Regularizer& reg, std::size_t h,
                            const Parameter& theta0, const SolverConfig& cfg,
                            const SolverConfig& inner_cfg);

/// Proximal gradient on the convex problem with the weights held at `w`.
FitResult fit_fixed_weights(const LossModel& model, const Regularizer& reg, const TrimWeights& w,
                            const Parameter& theta0, const SolverConfig& cfg);

/// Unit-step prox-gradient residual ||theta - prox_1(theta - grad)|| / max(1, ||theta||)
/// of the objective restricted to `w`.
double grad_map_residual(const LossModel& model, const Regularizer& reg, const Parameter& theta,
                         const TrimWeights& w);

struct LocalMinimumReport {
  bool weights_optimal = false;
  double residual = 0.0;
  double objective = 0.0;
  bool residual_ok = false;
  bool objective_ok = false;
  bool passed() const { return weights_optimal && residual_ok && objective_ok; }
};

struct LocalMinimumThresholds {
  double weight_slack = 1e-12;
  double residual = 1e-6;
  double objective = 1e-8;  // relative gap to the recorded final objective
};

/// Certifies (theta, w) as a local minimum: w solves the weight LP at theta,
/// and theta is stationary for the objective restricted to w.
LocalMinimumReport check_local_minimum(const LossModel& model, const Regularizer& reg, std::size_t h,
                                       const FitResult& result,
                                       const LocalMinimumThresholds& thresholds = {});

}  // namespace trimest
