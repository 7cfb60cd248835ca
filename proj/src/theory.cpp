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

#include "trimest/theory.hpp"

#include <algorithm>
#include <cmath>

#include "trimest/error.hpp"
#include "trimest/parallel.hpp"
#include "trimest/rng.hpp"

namespace trimest {

namespace {

double log_of(std::size_t p) { return std::log(static_cast<double>(p)); }

void require_nonneg(double v, const char* what) {
  require(v >= 0.0 && std::isfinite(v), ErrorCode::InvalidArgument, std::string(what) + " must be finite and >= 0");
}

}  // namespace

ErrorBounds theorem1_bounds(const TheoryParams& tp) {
  if (!(tp.kappa > 0.0)) fail(ErrorCode::NonPositiveCurvature, "kappa must be > 0");
  require_nonneg(tp.lambda, "lambda");
  require_nonneg(tp.psi, "psi");
  require_nonneg(tp.tau2, "tau2");
  ErrorBounds b;
  b.l2 = (1.5 * tp.lambda * tp.psi + tp.tau2) / tp.kappa;
  const double s = 2.0 * tp.lambda * tp.psi + tp.tau2;
  b.r = tp.lambda > 0.0 ? 2.0 * s * s / (tp.lambda * tp.kappa) : std::numeric_limits<double>::infinity();
  return b;
}

double theorem1_lambda_floor(double dual_norm, double rho, double tau1, double tau3) {
  return 4.0 * std::max(dual_norm, 2.0 * rho * tau1 + tau3);
}

double ggm_lambda_cor1(const Matrix& sigma, std::size_t h, std::size_t b_size, std::size_t p, double fxb,
                       double tau) {
  require(sigma.rows() == sigma.cols() && sigma.rows() > 0, ErrorCode::IncompatibleShapes,
          "sigma must be square and non-empty");
  if (h <= b_size) fail(ErrorCode::InvalidCounts, "need h > |B|");
  require(p >= 2, ErrorCode::InvalidCounts, "need p >= 2");
  require_nonneg(fxb, "fxb");
  const double max_diag = sigma.diagonal().maxCoeff();
  const double max_abs = sigma.cwiseAbs().maxCoeff();
  const double hd = static_cast<double>(h);
  const double bd = static_cast<double>(b_size);
  const double first = 8.0 * max_diag * std::sqrt(10.0 * tau * log_of(p) / (hd - bd)) + (bd / hd) * max_abs;
  const double second = fxb * std::sqrt(log_of(p) / hd);
  return 4.0 * std::max(first, second);
}

double ggm_bounds_cor2(double c, double k, std::size_t p, std::size_t n, double fxb, std::size_t b_size,
                       double kappa) {
  if (!(kappa > 0.0)) fail(ErrorCode::NonPositiveCurvature, "kappa must be > 0");
  require(n >= 1, ErrorCode::InvalidCounts, "need n >= 1");
  const double lp = log_of(p);
  const double nd = static_cast<double>(n);
  return (1.5 * c * std::sqrt((k + static_cast<double>(p)) * lp / nd) +
          fxb * std::sqrt(2.0 * static_cast<double>(b_size) * lp / nd)) /
         kappa;
}

double ggm_fxb_cor3(double a, std::size_t p, double sigma_b_spectral) {
  require(p >= 2, ErrorCode::InvalidCounts, "need p >= 2");
  const double sl = std::sqrt(log_of(p));
  return 4.0 * std::sqrt(2.0) * a * (1.0 + sl) * (1.0 + sl) * sigma_b_spectral / sl;
}

double lts_lambda(std::size_t h, std::size_t p, double c) {
  require(h >= 1, ErrorCode::InvalidCounts, "need h >= 1");
  return c * std::sqrt(log_of(p) / static_cast<double>(h));
}

ErrorBounds lts_bounds(double c1, double c2, double k, std::size_t b_size, std::size_t h, std::size_t p) {
  require(h >= 1, ErrorCode::InvalidCounts, "need h >= 1");
  const double lp = log_of(p);
  const double hd = static_cast<double>(h);
  const double s = std::sqrt(k * lp / hd) + c2 * std::sqrt(static_cast<double>(b_size) * lp / hd);
  return {c1 * s, 4.0 * c1 * s * s};
}

RscCheck check_rsc_lemma(const Matrix& theta_star, const Matrix& delta) {
  require(theta_star.rows() == theta_star.cols() && delta.rows() == theta_star.rows() &&
              delta.cols() == theta_star.cols(),
          ErrorCode::IncompatibleShapes, "rsc: shapes differ");
  require(delta.norm() <= 1.0 + 1e-12, ErrorCode::InvalidArgument, "rsc: need |delta|_F <= 1");
  const CholeskyLogdet c0 = cholesky_logdet(theta_star);
  const CholeskyLogdet c1 = cholesky_logdet(theta_star + delta);
  RscCheck out;
  out.lhs = (spd_inverse(c0) - spd_inverse(c1)).cwiseProduct(delta).sum();
  const double s = spectral_norm(theta_star) + 1.0;
  out.rhs = delta.squaredNorm() / (s * s);
  out.holds = out.lhs - out.rhs >= -1e-10;
  return out;
}

std::size_t rsc_sweep(std::size_t draws, std::size_t max_p, std::uint64_t seed) {
  require(max_p >= 2, ErrorCode::InvalidCounts, "rsc_sweep: need max_p >= 2");
  Rng rng(seed);
  std::size_t passed = 0;
  for (std::size_t d = 0; d < draws; ++d) {
    const auto p = static_cast<Index>(2 + rng.index(max_p - 1));
    Matrix a(p, p);
    for (Index i = 0; i < p; ++i)
      for (Index j = 0; j < p; ++j) a(i, j) = rng.normal();
    Matrix theta = a * a.transpose() / static_cast<double>(p);
    theta.diagonal().array() += rng.uniform(0.05, 1.0);
    Matrix delta(p, p);
    for (Index i = 0; i < p; ++i)
      for (Index j = 0; j < p; ++j) delta(i, j) = rng.normal();
    delta = symmetrize(delta);
    delta *= rng.uniform() / delta.norm();
    for (;;) {
      try {
        cholesky_logdet(theta + delta);
        break;
      } catch (const Error&) {
        delta *= 0.5;
      }
    }
    if (check_rsc_lemma(theta, delta).holds) ++passed;
  }
  return passed;
}

SampleCovCheck check_samplecov_lemma(const Matrix& sigma, std::size_t n, double tau, std::size_t trials,
                                     std::uint64_t seed, std::size_t threads) {
  if (!(tau > 2.0)) fail(ErrorCode::InvalidTau, "tau must be > 2");
  require(trials >= 1, ErrorCode::InvalidCounts, "need trials >= 1");
  const Index p = sigma.rows();
  require(p >= 2 && sigma.cols() == p, ErrorCode::IncompatibleShapes, "sigma must be square with p >= 2");
  const double max_diag = sigma.diagonal().maxCoeff();
  require(static_cast<double>(n) >= 40.0 * max_diag, ErrorCode::InvalidCounts, "need n >= 40 max_i sigma_ii");
  const Matrix lower = cholesky_logdet(sigma).factor;
  const double pd = static_cast<double>(p);

  SampleCovCheck out;
  out.trials = trials;
  out.bound = 8.0 * max_diag * std::sqrt(10.0 * tau * std::log(pd) / static_cast<double>(n));
  out.allowed_rate = std::min(1.0, 4.0 / std::pow(pd, tau - 2.0));
  out.standard_error = std::sqrt(out.allowed_rate * (1.0 - out.allowed_rate) / static_cast<double>(trials));

  std::vector<std::uint8_t> violated(trials, 0);
  parallel_for(trials, threads, [&](std::size_t t) {
    Rng rng(Rng::derive(seed, t));
    Matrix z(static_cast<Index>(n), p);
    for (Index i = 0; i < z.rows(); ++i)
      for (Index j = 0; j < p; ++j) z(i, j) = rng.normal();
    const Matrix x = z * lower.transpose();
    const Matrix s = x.transpose() * x / static_cast<double>(n);
    violated[t] = (s - sigma).cwiseAbs().maxCoeff() > out.bound ? 1 : 0;
  });
  for (auto v : violated) out.violations += v;
  out.rate = static_cast<double>(out.violations) / static_cast<double>(trials);
  return out;
}

double ConditionReport::kappa_frontier(double tau1) const {
  if (delta_norm == 0.0) return std::numeric_limits<double>::infinity();
  return (c1_lhs + tau1 * delta_reg * delta_reg) / (delta_norm * delta_norm);
}

double ConditionReport::tau2_frontier(double tau3) const {
  if (delta_norm == 0.0) return 0.0;
  return std::max(0.0, -(c2_lhs + tau3 * delta_reg) / delta_norm);
}

ConditionReport diagnose_conditions(const LossModel& model, const Regularizer& reg, const Parameter& theta_tilde,
                                    const Vector& w_tilde, const Parameter& theta_star,
                                    const std::vector<std::size_t>& good_indices) {
  model.check_parameter(theta_tilde);
  model.check_parameter(theta_star);
  const Index n = model.n();
  require(w_tilde.size() == n, ErrorCode::IncompatibleShapes, "w_tilde must have one entry per sample");
  std::vector<std::uint8_t> good(static_cast<std::size_t>(n), 0);
  for (std::size_t i : good_indices) {
    require(i < static_cast<std::size_t>(n), ErrorCode::InvalidArgument, "good index out of range");
    good[i] = 1;
  }

  ConditionReport r;
  r.w_star = Vector::Zero(n);
  for (Index i = 0; i < n; ++i)
    if (good[static_cast<std::size_t>(i)]) r.w_star(i) = w_tilde(i);
  r.h = w_tilde.sum();
  require(r.h > 0.0, ErrorCode::InvalidH, "w_tilde must have positive mass");

  const Matrix delta = theta_tilde.value - theta_star.value;
  const ModelState s_star = model.state(theta_star);
  const ModelState s_tilde = model.state(theta_tilde);
  const Matrix g_star = model.smooth_gradient(s_star, r.w_star, r.h);
  const Matrix g_tilde_star = model.smooth_gradient(s_tilde, r.w_star, r.h);
  const Matrix g_tilde = model.smooth_gradient(s_tilde, w_tilde, r.h);

  r.c1_lhs = (g_tilde_star - g_star).cwiseProduct(delta).sum();
  r.c2_lhs = (g_tilde - g_tilde_star).cwiseProduct(delta).sum();
  r.delta_norm = delta.norm();
  r.delta_reg = reg.value(delta);
  r.dual_norm_grad = reg.dual_norm(g_star);
  return r;
}

}  // namespace trimest
