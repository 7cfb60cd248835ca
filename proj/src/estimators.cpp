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

#include "trimest/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "trimest/error.hpp"
#include "trimest/parallel.hpp"
#include "trimest/rng.hpp"

namespace trimest {

const char* to_string(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::sparse_lts: return "sparse_lts";
    case EstimatorKind::trimmed_logistic: return "trimmed_logistic";
    case EstimatorKind::trimmed_glasso: return "trimmed_glasso";
    case EstimatorKind::tracenorm_lts: return "tracenorm_lts";
  }
  return "unknown";
}

std::optional<EstimatorKind> parse_estimator_kind(const std::string& name) {
  for (auto k : {EstimatorKind::sparse_lts, EstimatorKind::trimmed_logistic,
                 EstimatorKind::trimmed_glasso, EstimatorKind::tracenorm_lts})
    if (name == to_string(k)) return k;
  return std::nullopt;
}

void EstimatorSpec::validate() const {
  require(lambda >= 0.0 && std::isfinite(lambda), ErrorCode::InvalidArgument, "lambda must be a finite value >= 0");
  require(!(h && trim_fraction), ErrorCode::InvalidArgument, "give either h or trim_fraction, not both");
  if (h) require(*h >= 1, ErrorCode::InvalidH, "h must be >= 1");
  if (trim_fraction)
    require(*trim_fraction >= 0.0 && *trim_fraction < 1.0, ErrorCode::InvalidArgument,
            "trim_fraction must lie in [0, 1)");
  require(rho > 0.0, ErrorCode::InvalidArgument, "rho must be > 0");
  solver.validate();
  inner_solver.validate();
}

std::size_t EstimatorSpec::resolve_h(std::size_t n) const {
  std::size_t out = n;
  if (h) out = *h;
  if (trim_fraction)
    out = n - static_cast<std::size_t>(std::floor(*trim_fraction * static_cast<double>(n) + 1e-12));
  if (out < 1 || out > n)
    fail(ErrorCode::InvalidH, "h=" + std::to_string(out) + " outside [1, " + std::to_string(n) + "]");
  return out;
}

LossKind loss_kind(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::sparse_lts:
    case EstimatorKind::tracenorm_lts: return LossKind::squared;
    case EstimatorKind::trimmed_logistic: return LossKind::logistic;
    case EstimatorKind::trimmed_glasso: return LossKind::gaussian_loglik;
  }
  return LossKind::squared;
}

RegKind reg_kind(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::sparse_lts:
    case EstimatorKind::trimmed_logistic: return RegKind::l1;
    case EstimatorKind::trimmed_glasso: return RegKind::l1_offdiag;
    case EstimatorKind::tracenorm_lts: return RegKind::trace_norm;
  }
  return RegKind::l1;
}

LossModel make_loss_model(const EstimatorSpec& spec, DatasetPtr data) {
  require(data != nullptr, ErrorCode::InvalidArgument, "null dataset");
  const DataKind dk = data->kind();
  switch (spec.kind) {
    case EstimatorKind::sparse_lts:
    case EstimatorKind::trimmed_logistic:
      require(dk == DataKind::regression, ErrorCode::IncompatibleData,
              std::string(to_string(spec.kind)) + " needs single-response regression data");
      break;
    case EstimatorKind::tracenorm_lts:
      require(dk != DataKind::ggm, ErrorCode::IncompatibleData, "tracenorm_lts needs regression data");
      break;
    case EstimatorKind::trimmed_glasso:
      require(dk == DataKind::ggm, ErrorCode::IncompatibleData, "trimmed_glasso needs ggm sample data");
      break;
  }
  if (spec.kind == EstimatorKind::tracenorm_lts && dk == DataKind::regression)
    return LossModel(LossKind::squared,
                     std::make_shared<const Dataset>(Dataset::multiresponse(data->x(), data->y())));
  return LossModel(loss_kind(spec.kind), std::move(data));
}

Regularizer make_regularizer(const EstimatorSpec& spec) {
  return Regularizer(reg_kind(spec.kind), spec.lambda, spec.rho);
}

Parameter default_initial(const EstimatorSpec& spec, const Dataset& data) {
  const Index p = data.p();
  switch (spec.kind) {
    case EstimatorKind::sparse_lts:
    case EstimatorKind::trimmed_logistic:
      return Parameter::vector(Vector::Zero(p));
    case EstimatorKind::tracenorm_lts:
      return Parameter::matrix(Matrix::Zero(p, data.q()));
    case EstimatorKind::trimmed_glasso: {
      const Matrix s = data.x().transpose() * data.x() / static_cast<double>(data.n());
      try {
        const CholeskyLogdet chol = cholesky_logdet(s + spec.lambda * Matrix::Identity(p, p));
        Matrix inv = spd_inverse(chol);
        cholesky_logdet(inv);
        return Parameter::precision(std::move(inv));
      } catch (const Error& e) {
        if (e.code() != ErrorCode::NotPositiveDefinite) throw;
      }
      return Parameter::precision(Matrix::Identity(p, p));
    }
  }
  return Parameter::vector(Vector::Zero(p));
}

FitResult fit(const EstimatorSpec& spec, DatasetPtr data, const std::optional<Parameter>& init) {
  spec.validate();
  const LossModel model = make_loss_model(spec, data);
  const Regularizer reg = make_regularizer(spec);
  const std::size_t h = spec.resolve_h(static_cast<std::size_t>(model.n()));
  const Parameter theta0 = init ? *init : default_initial(spec, model.data());
  if (spec.solver_kind == SolverKind::alternate_min)
    return fit_alternate_min(model, reg, h, theta0, spec.solver, spec.inner_solver);
  return fit_partial_min(model, reg, h, theta0, spec.solver);
}

std::optional<Scoring> parse_scoring(const std::string& name) {
  if (name == "trimmed_mse") return Scoring::trimmed_mse;
  if (name == "deviance") return Scoring::deviance;
  if (name == "heldout_loglik") return Scoring::heldout_loglik;
  return std::nullopt;
}

void CVPlan::validate() const {
  require(!lambda_grid.empty() && !h_grid.empty(), ErrorCode::InvalidArgument, "cv: grids must be non-empty");
  require(folds >= 2, ErrorCode::InvalidArgument, "cv: folds must be >= 2");
  for (double l : lambda_grid)
    require(l >= 0.0 && std::isfinite(l), ErrorCode::InvalidArgument, "cv: lambda values must be >= 0");
  for (std::size_t h : h_grid) require(h >= 1, ErrorCode::InvalidH, "cv: h values must be >= 1");
}

double heldout_score(const EstimatorSpec& spec, Scoring scoring, const Parameter& theta,
                     const Dataset& test, double trim_fraction) {
  const Index m = test.n();
  Vector per(m);
  switch (scoring) {
    case Scoring::trimmed_mse: {
      require(spec.kind != EstimatorKind::trimmed_glasso, ErrorCode::IncompatibleData,
              "trimmed_mse needs a regression estimator");
      Matrix pred = test.x() * theta.value;
      if (spec.kind == EstimatorKind::trimmed_logistic)
        pred = pred.unaryExpr([](double z) { return 1.0 / (1.0 + std::exp(-z)); });
      per = (test.y() - pred).rowwise().squaredNorm();
      std::sort(per.data(), per.data() + m);
      const auto drop = static_cast<Index>(
          std::ceil(std::max(0.0, trim_fraction * static_cast<double>(m) - 1e-12)));
      const Index keep = std::max<Index>(1, m - drop);
      return per.head(keep).mean();
    }
    case Scoring::deviance: {
      require(spec.kind != EstimatorKind::trimmed_glasso, ErrorCode::IncompatibleData,
              "deviance needs a regression estimator");
      const LossModel model = make_loss_model(spec, std::make_shared<const Dataset>(test));
      return 2.0 * model.sample_losses(theta).mean();
    }
    case Scoring::heldout_loglik: {
      require(spec.kind == EstimatorKind::trimmed_glasso, ErrorCode::IncompatibleData,
              "heldout_loglik needs trimmed_glasso");
      const LossModel model(LossKind::gaussian_loglik, std::make_shared<const Dataset>(test));
      const ModelState st = model.state(theta);
      return st.losses.mean() + st.shared;
    }
  }
  return 0.0;
}

CvResult cross_validate(const EstimatorSpec& spec, const CVPlan& plan, DatasetPtr data) {
  spec.validate();
  plan.validate();
  require(data != nullptr, ErrorCode::InvalidArgument, "null dataset");
  const auto n = static_cast<std::size_t>(data->n());
  require(plan.folds <= n, ErrorCode::InvalidArgument, "cv: more folds than samples");
  for (std::size_t h : plan.h_grid)
    require(h <= n, ErrorCode::InvalidH, "cv: h larger than the sample count");

  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  Rng rng(plan.seed);
  rng.shuffle(perm);
  std::vector<std::vector<Index>> train(plan.folds), test(plan.folds);
  for (std::size_t pos = 0; pos < n; ++pos) {
    const std::size_t fold = pos % plan.folds;
    for (std::size_t f = 0; f < plan.folds; ++f)
      (f == fold ? test[f] : train[f]).push_back(static_cast<Index>(perm[pos]));
  }
  for (std::size_t f = 0; f < plan.folds; ++f) {
    std::sort(train[f].begin(), train[f].end());
    std::sort(test[f].begin(), test[f].end());
  }

  const std::size_t nl = plan.lambda_grid.size();
  const std::size_t nh = plan.h_grid.size();
  const std::size_t cells = nl * nh * plan.folds;
  std::vector<double> scores(cells);
  parallel_for(cells, plan.threads, [&](std::size_t c) {
    const std::size_t f = c % plan.folds;
    const std::size_t ih = (c / plan.folds) % nh;
    const std::size_t il = c / (plan.folds * nh);
    const double frac = 1.0 - static_cast<double>(plan.h_grid[ih]) / static_cast<double>(n);
    auto tr = std::make_shared<const Dataset>(data->rows(train[f]));
    const Dataset te = data->rows(test[f]);
    EstimatorSpec s = spec;
    s.lambda = plan.lambda_grid[il];
    s.h.reset();
    s.trim_fraction = frac;
    const FitResult r = fit(s, tr);
    scores[c] = heldout_score(s, plan.scoring, r.theta, te, frac);
  });

  CvResult out;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t il = 0; il < nl; ++il) {
    for (std::size_t ih = 0; ih < nh; ++ih) {
      CvCell cell;
      cell.lambda = plan.lambda_grid[il];
      cell.h = plan.h_grid[ih];
      const std::size_t base = (il * nh + ih) * plan.folds;
      cell.fold_scores.assign(scores.begin() + static_cast<std::ptrdiff_t>(base),
                              scores.begin() + static_cast<std::ptrdiff_t>(base + plan.folds));
      cell.score = std::accumulate(cell.fold_scores.begin(), cell.fold_scores.end(), 0.0) /
                   static_cast<double>(plan.folds);
      if (cell.score < best) {
        best = cell.score;
        out.best_lambda = cell.lambda;
        out.best_h = cell.h;
      }
      out.table.push_back(std::move(cell));
    }
  }
  if (!std::isfinite(best)) {
    out.best_lambda = plan.lambda_grid.front();
    out.best_h = plan.h_grid.front();
  }
  return out;
}

std::vector<FitResult> lambda_path(const EstimatorSpec& spec, DatasetPtr data,
                                   std::span<const double> grid) {
  require(!grid.empty(), ErrorCode::InvalidArgument, "lambda_path: empty grid");
  for (std::size_t i = 1; i < grid.size(); ++i)
    require(grid[i] <= grid[i - 1], ErrorCode::InvalidArgument, "lambda_path: grid must be non-increasing");
  std::vector<FitResult> out;
  out.reserve(grid.size());
  std::optional<Parameter> warm;
  for (double lam : grid) {
    EstimatorSpec s = spec;
    s.lambda = lam;
    out.push_back(fit(s, data, warm));
    warm = out.back().theta;
  }
  return out;
}

std::vector<double> log_grid(double lambda_max, double min_ratio, std::size_t count) {
  require(lambda_max > 0.0 && min_ratio > 0.0 && min_ratio <= 1.0 && count >= 1, ErrorCode::InvalidArgument,
          "log_grid: need lambda_max > 0, min_ratio in (0, 1], count >= 1");
  std::vector<double> g(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double t = count == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(count - 1);
    g[i] = lambda_max * std::pow(min_ratio, t);
  }
  return g;
}

}  // namespace trimest
