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

#include "trimest/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "trimest/error.hpp"

namespace trimest {

namespace {

constexpr double kMinStep = 1e-16;
constexpr double kBbMin = 1e-12;
constexpr double kBbMax = 1e6;
constexpr double kMachineResidual = 1e-8;

double scale_of(double f) { return std::max(1.0, std::abs(f)); }

double residual_of(const Regularizer& reg, const Matrix& theta, const Matrix& grad) {
  return (theta - reg.prox(theta - grad, 1.0)).norm() / std::max(1.0, theta.norm());
}

std::uint64_t hash_weights(const TrimWeights& w) {
  std::uint64_t h = 1469598103934665603ULL;
  for (std::uint8_t b : w.indicators()) {
    h ^= b;
    h *= 1099511628211ULL;
  }
  return h;
}

struct SeenVertex {
  std::uint64_t hash;
  double objective;
  TrimWeights weights;
};

// Shared engine. With `fixed` null the weights are re-solved at every iterate
// (partial minimization); otherwise they are held at *fixed.
FitResult run_prox_gradient(const LossModel& model, const Regularizer& reg, std::size_t h,
                            const Parameter& theta0, const SolverConfig& cfg,
                            const TrimWeights* fixed) {
  cfg.validate();
  model.check_parameter(theta0);
  const auto n = static_cast<std::size_t>(model.n());
  if (h < 1 || h > n)
    fail(ErrorCode::InvalidH, "h=" + std::to_string(h) + " outside [1, " + std::to_string(n) + "]");
  if (fixed)
    require(fixed->n() == n && fixed->h() == h, ErrorCode::InvalidArgument,
            "fixed weights do not match (n, h)");
  const double hd = static_cast<double>(h);

  FitResult out;
  Parameter theta = theta0;
  if (reg.project_to_ball(theta.value)) ++out.ball_projections;
  ModelState st = model.state(theta);

  std::optional<TrimWeights> prev_w;
  std::vector<SeenVertex> seen;
  Matrix prev_theta;
  Matrix prev_grad;
  bool have_prev = false;
  double prev_obj = 0.0;
  double step = cfg.ls_init_step;
  std::size_t stable = 0;
  std::size_t last_change = 0;

  for (std::size_t t = 0;; ++t) {
    TrimWeights w = fixed ? *fixed : solve_weights(std::span<const double>(st.losses.data(), n), h);
    const bool changed = prev_w.has_value() && !(*prev_w == w);
    if (!prev_w.has_value()) {
      stable = 0;
    } else if (changed) {
      stable = 0;
      last_change = t;
    } else {
      ++stable;
    }

    const double f = model.smooth_value(st, w.values(), hd);
    const double obj = f + reg.penalty(theta.value);
    const Matrix grad = model.smooth_gradient(st, w.values(), hd);
    out.objective_trace.push_back(obj);

    const double residual = residual_of(reg, theta.value, grad);
    out.grad_map_residual = residual;

    if (!fixed && (t == 0 || changed)) {
      const std::uint64_t hw = hash_weights(w);
      bool cycled = false;
      for (const SeenVertex& v : seen) {
        if (v.hash == hw && v.weights == w && std::abs(v.objective - obj) <= 1e-12 * scale_of(obj)) {
          cycled = true;
          break;
        }
      }
      if (cycled) {
        out.degenerate = true;
        out.converged = true;
        out.theta = theta;
        out.weights = std::move(w);
        return out;
      }
      seen.push_back({hw, obj, w});
    }

    if (t > 0) {
      const double rel = std::abs(obj - prev_obj) / scale_of(prev_obj);
      if (rel < cfg.tol_rel_obj && stable >= cfg.weight_stable_iters && residual < cfg.tol_grad_map) {
        out.converged = true;
        out.weight_stabilized_at = last_change;
        out.theta = theta;
        out.weights = std::move(w);
        return out;
      }
    }
    if (t >= cfg.max_iter) {
      if (stable >= cfg.weight_stable_iters) out.weight_stabilized_at = last_change;
      out.theta = theta;
      out.weights = std::move(w);
      return out;
    }

    if (have_prev) {
      const Matrix ds = theta.value - prev_theta;
      const Matrix dg = grad - prev_grad;
      const double sy = ds.cwiseProduct(dg).sum();
      if (sy > 0.0) step = std::clamp(ds.squaredNorm() / sy, kBbMin, kBbMax);
    }

    // Backtracking on the quadratic upper model of the smooth part; any
    // accepted point also satisfies F(cand) <= F(theta).
    const double slack = 1e-13 * scale_of(obj);
    bool accepted = false;
    Matrix cand;
    ModelState cand_state;
    bool projected = false;
    while (step >= kMinStep) {
      cand = reg.prox(theta.value - step * grad, step);
      projected = reg.project_to_ball(cand);
      bool pd_ok = true;
      try {
        cand_state = model.state({theta.kind, cand});
      } catch (const Error& e) {
        if (e.code() != ErrorCode::NotPositiveDefinite) throw;
        pd_ok = false;
        ++out.pd_rejections;
      }
      if (pd_ok) {
        const double fc = model.smooth_value(cand_state, w.values(), hd);
        const double objc = fc + reg.penalty(cand);
        const Matrix d = cand - theta.value;
        const double model_bound = f + grad.cwiseProduct(d).sum() + d.squaredNorm() / (2.0 * step);
        if (std::isfinite(objc) && fc <= model_bound + slack && objc <= obj + slack) {
          accepted = true;
          break;
        }
      }
      step *= cfg.ls_shrink;
      ++out.ls_backtracks;
    }

    if (!accepted) {
      if (residual < kMachineResidual) {
        out.converged = true;
        out.machine_precision = true;
        out.weight_stabilized_at = last_change;
        out.theta = theta;
        out.weights = std::move(w);
        return out;
      }
      fail(ErrorCode::LineSearchFailed,
           "line search failed at iteration " + std::to_string(t) + " (residual " +
               std::to_string(residual) + ")");
    }

    prev_theta = theta.value;
    prev_grad = grad;
    have_prev = true;
    theta.value = std::move(cand);
    st = std::move(cand_state);
    if (projected) ++out.ball_projections;
    prev_w = std::move(w);
    prev_obj = obj;
    out.iterations = t + 1;
  }
}

}  // namespace

void SolverConfig::validate() const {
  require(max_iter >= 1, ErrorCode::InvalidArgument, "solver: max_iter must be >= 1");
  require(tol_rel_obj >= 0.0 && tol_grad_map >= 0.0, ErrorCode::InvalidArgument,
          "solver: tolerances must be >= 0");
  require(ls_shrink > 0.0 && ls_shrink < 1.0, ErrorCode::InvalidArgument,
          "solver: ls_shrink must lie in (0, 1)");
  require(ls_init_step > 0.0 && std::isfinite(ls_init_step), ErrorCode::InvalidArgument,
          "solver: ls_init_step must be > 0");
}

SolverConfig SolverConfig::tightened(double factor) const {
  SolverConfig c = *this;
  c.tol_rel_obj /= factor;
  c.tol_grad_map /= factor;
  return c;
}

FitResult fit_partial_min(const LossModel& model, const Regularizer& reg, std::size_t h,
                          const Parameter& theta0, const SolverConfig& cfg) {
  return run_prox_gradient(model, reg, h, theta0, cfg, nullptr);
}

FitResult fit_fixed_weights(const LossModel& model, const Regularizer& reg, const TrimWeights& w,
                            const Parameter& theta0, const SolverConfig& cfg) {
  return run_prox_gradient(model, reg, w.h(), theta0, cfg, &w);
}

FitResult fit_alternate_min(const LossModel& model, const Regularizer& reg, std::size_t h,
                            const Parameter& theta0, const SolverConfig& cfg,
                            const SolverConfig& inner_cfg) {
  cfg.validate();
  inner_cfg.validate();
  model.check_parameter(theta0);
  const auto n = static_cast<std::size_t>(model.n());
  if (h < 1 || h > n)
    fail(ErrorCode::InvalidH, "h=" + std::to_string(h) + " outside [1, " + std::to_string(n) + "]");

  FitResult out;
  Parameter theta = theta0;
  ModelState st = model.state(theta);
  std::vector<TrimWeights> history;

  for (std::size_t outer = 0;; ++outer) {
    TrimWeights w = solve_weights(std::span<const double>(st.losses.data(), n), h);
    if (!history.empty()) {
      if (history.back() == w) {
        out.converged = true;
        break;
      }
      if (std::find(history.begin(), history.end(), w) != history.end()) {
        // Subset cycle: keep theta, report the re-trimmed vertex.
        out.degenerate = true;
        out.converged = true;
        out.objective_trace.push_back(
            model.smooth_value(st, w.values(), static_cast<double>(h)) + reg.penalty(theta.value));
        history.push_back(std::move(w));
        break;
      }
    }
    if (outer >= cfg.max_iter) break;

    FitResult inner = fit_fixed_weights(model, reg, w, theta, inner_cfg);
    out.weight_stabilized_at = out.iterations;
    out.objective_trace.insert(out.objective_trace.end(), inner.objective_trace.begin(),
                               inner.objective_trace.end());
    out.iterations += inner.iterations;
    out.ls_backtracks += inner.ls_backtracks;
    out.pd_rejections += inner.pd_rejections;
    out.ball_projections += inner.ball_projections;
    out.grad_map_residual = inner.grad_map_residual;
    out.machine_precision = inner.machine_precision;
    theta = std::move(inner.theta);
    st = model.state(theta);
    history.push_back(std::move(w));
  }
  out.theta = std::move(theta);
  out.weights = history.empty() ? solve_weights(std::span<const double>(st.losses.data(), n), h)
                                : history.back();
  if (out.objective_trace.empty())
    out.objective_trace.push_back(weighted_objective(model, reg, out.theta, out.weights));
  if (!out.converged) out.weight_stabilized_at.reset();
  return out;
}

double grad_map_residual(const LossModel& model, const Regularizer& reg, const Parameter& theta,
                         const TrimWeights& w) {
  const ModelState st = model.state(theta);
  const Matrix grad = model.smooth_gradient(st, w.values(), static_cast<double>(w.h()));
  return residual_of(reg, theta.value, grad);
}

LocalMinimumReport check_local_minimum(const LossModel& model, const Regularizer& reg, std::size_t h,
                                       const FitResult& result,
                                       const LocalMinimumThresholds& thresholds) {
  require(result.weights.h() == h, ErrorCode::InvalidH, "check_local_minimum: weights do not select h samples");
  LocalMinimumReport rep;
  const ModelState st = model.state(result.theta);
  double max_in = -std::numeric_limits<double>::infinity();
  double min_out = std::numeric_limits<double>::infinity();
  for (Index i = 0; i < st.losses.size(); ++i) {
    if (result.weights.included(static_cast<std::size_t>(i)))
      max_in = std::max(max_in, st.losses[i]);
    else
      min_out = std::min(min_out, st.losses[i]);
  }
  rep.weights_optimal = max_in <= min_out + thresholds.weight_slack;
  const Vector& w = result.weights.values();
  const Matrix grad = model.smooth_gradient(st, w, static_cast<double>(h));
  rep.residual = residual_of(reg, result.theta.value, grad);
  rep.residual_ok = rep.residual < thresholds.residual;
  rep.objective = model.smooth_value(st, w, static_cast<double>(h)) + reg.penalty(result.theta.value);
  rep.objective_ok = result.objective_trace.empty() ||
                     std::abs(rep.objective - result.objective()) <= thresholds.objective * scale_of(rep.objective);
  return rep;
}

}  // namespace trimest
