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

#include "trimest/simulation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <optional>
#include <ostream>

#include <Eigen/Eigenvalues>

#include "trimest/csv.hpp"
#include "trimest/error.hpp"
#include "trimest/parallel.hpp"

namespace trimest {

namespace {

Matrix standard_normal(Index rows, Index cols, Rng& rng) {
  Matrix z(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) z(i, j) = rng.normal();
  return z;
}

// Rows distributed N(0, sigma): Z L^T with sigma = L L^T.
Matrix gaussian_rows(Index rows, const Matrix& sigma, Rng& rng) {
  const Matrix lower = cholesky_logdet(sigma).factor;
  return standard_normal(rows, sigma.rows(), rng) * lower.transpose();
}

std::vector<std::size_t> sorted(std::vector<std::size_t> v) {
  std::sort(v.begin(), v.end());
  return v;
}

Vector sparse_truth(std::size_t p, std::size_t k, Rng& rng, bool gaussian, double signal) {
  Vector theta = Vector::Zero(static_cast<Index>(p));
  for (std::size_t j : sorted(rng.sample(p, k))) {
    if (gaussian)
      theta(static_cast<Index>(j)) = rng.normal();
    else
      theta(static_cast<Index>(j)) = rng.bernoulli(0.5) ? signal : -signal;
  }
  return theta;
}

Scenario make_logistic(const ScenarioSpec& s, Rng& rng, Rng& truth_rng) {
  const auto n = static_cast<Index>(s.n);
  const Matrix x = standard_normal(n, static_cast<Index>(s.p), rng);
  const Vector theta = sparse_truth(s.p, s.sparsity(), truth_rng, true, 1.0);
  const Vector z = x * theta;
  Vector y(n);
  for (Index i = 0; i < n; ++i) y(i) = rng.bernoulli(1.0 / (1.0 + std::exp(-z(i)))) ? 1.0 : 0.0;

  std::vector<std::size_t> order(s.n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(z(static_cast<Index>(a))) > std::abs(z(static_cast<Index>(b)));
  });
  order.resize(s.corrupted_count());
  for (std::size_t i : order) y(static_cast<Index>(i)) = 1.0 - y(static_cast<Index>(i));
  return {std::make_shared<const Dataset>(Dataset::regression(x, y)), Parameter::vector(theta), sorted(order)};
}

Scenario make_tracenorm(const ScenarioSpec& s, Rng& rng, Rng& truth_rng) {
  const auto n = static_cast<Index>(s.n);
  const Matrix x = standard_normal(n, static_cast<Index>(s.p), rng);
  const Matrix raw = standard_normal(static_cast<Index>(s.p), static_cast<Index>(s.q), truth_rng);
  const Matrix theta = best_rank_approximation(raw, static_cast<Index>(s.rank));
  const auto bad = sorted(rng.sample(s.n, s.corrupted_count()));
  std::vector<std::uint8_t> is_bad(s.n, 0);
  for (std::size_t i : bad) is_bad[i] = 1;
  Matrix noise(n, static_cast<Index>(s.q));
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < noise.cols(); ++j)
      noise(i, j) = is_bad[static_cast<std::size_t>(i)] ? rng.normal(s.outlier_mean, s.outlier_sd)
                                                         : rng.normal(0.0, s.noise_sd);
  return {std::make_shared<const Dataset>(Dataset::multiresponse(x, x * theta + noise)),
          Parameter::matrix(theta), bad};
}

Scenario make_ggm(const ScenarioSpec& s, Rng& rng, Rng& truth_rng) {
  const auto p = static_cast<Index>(s.p);
  const Matrix theta = hub_precision(s.p, truth_rng);
  const bool structured = s.variant == GgmVariant::M1 || s.variant == GgmVariant::M2;
  const Matrix theta_o = structured ? hub_precision(s.p, truth_rng) : Matrix(Matrix::Identity(p, p));
  const double mu = (s.variant == GgmVariant::M1 || s.variant == GgmVariant::M3) ? 1.0 : 1.5;

  const auto bad = sorted(rng.sample(s.n, s.corrupted_count()));
  std::vector<std::uint8_t> is_bad(s.n, 0);
  for (std::size_t i : bad) is_bad[i] = 1;

  Matrix x = gaussian_rows(static_cast<Index>(s.n), spd_inverse(cholesky_logdet(theta)), rng);
  if (!bad.empty()) {
    const Matrix out = gaussian_rows(static_cast<Index>(bad.size()), spd_inverse(cholesky_logdet(theta_o)), rng);
    for (std::size_t r = 0; r < bad.size(); ++r) {
      const double sign = rng.bernoulli(0.5) ? 1.0 : -1.0;
      x.row(static_cast<Index>(bad[r])) = out.row(static_cast<Index>(r)).array() + sign * mu;
    }
  }
  return {std::make_shared<const Dataset>(Dataset::ggm(std::move(x))), Parameter::precision(theta), bad};
}

Scenario make_linear(const ScenarioSpec& s, Rng& rng, Rng& truth_rng) {
  const auto n = static_cast<Index>(s.n);
  const auto p = static_cast<Index>(s.p);
  Matrix sigma(p, p);
  for (Index i = 0; i < p; ++i)
    for (Index j = 0; j < p; ++j) sigma(i, j) = std::pow(s.ar_rho, static_cast<double>(std::abs(i - j)));
  Matrix x = gaussian_rows(n, sigma, rng);
  const Vector theta = sparse_truth(s.p, s.sparsity(), truth_rng, false, s.signal);
  Vector y = x * theta;
  for (Index i = 0; i < n; ++i) y(i) += rng.normal(0.0, s.linear_noise_sd);
  const auto bad = sorted(rng.sample(s.n, s.corrupted_count()));
  for (std::size_t i : bad) {
    const auto r = static_cast<Index>(i);
    if (s.outlier_model == OutlierModel::leverage)
      for (Index j = 0; j < p; ++j) x(r, j) = rng.normal(s.outlier_shift / 4.0, 1.0);
    y(r) += rng.normal(s.outlier_shift, 1.0);
  }
  return {std::make_shared<const Dataset>(Dataset::regression(std::move(x), y)), Parameter::vector(theta), bad};
}

double mean_of(const std::vector<double>& v) {
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

}  // namespace

const char* to_string(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::logistic_flip: return "logistic_flip";
    case ScenarioKind::tracenorm: return "tracenorm";
    case ScenarioKind::ggm_mixture: return "ggm_mixture";
    case ScenarioKind::linear_generic: return "linear_generic";
  }
  return "unknown";
}

std::optional<ScenarioKind> parse_scenario_kind(const std::string& name) {
  for (auto k : {ScenarioKind::logistic_flip, ScenarioKind::tracenorm, ScenarioKind::ggm_mixture,
                 ScenarioKind::linear_generic})
    if (name == to_string(k)) return k;
  return std::nullopt;
}

void ScenarioSpec::validate() const {
  require(n >= 1 && p >= 1, ErrorCode::InvalidCounts, "scenario: n and p must be positive");
  auto frac_ok = [](double f) { return f >= 0.0 && f <= 1.0; };
  require(frac_ok(flip_frac) && frac_ok(contamination_frac) && frac_ok(p_o), ErrorCode::InvalidArgument,
          "scenario: fractions must lie in [0, 1]");
  require(sparsity() <= p, ErrorCode::InvalidCounts, "scenario: k exceeds p");
  require(noise_sd >= 0.0 && outlier_sd >= 0.0 && linear_noise_sd >= 0.0, ErrorCode::InvalidArgument,
          "scenario: standard deviations must be >= 0");
  require(std::abs(ar_rho) < 1.0, ErrorCode::InvalidArgument, "scenario: need |ar_rho| < 1");
  if (kind == ScenarioKind::tracenorm)
    require(q >= 1 && rank >= 1 && rank <= std::min(p, q), ErrorCode::InvalidCounts,
            "scenario: need 1 <= rank <= min(p, q)");
  if (kind == ScenarioKind::ggm_mixture) require(p >= 2, ErrorCode::InvalidCounts, "scenario: ggm needs p >= 2");
}

std::size_t ScenarioSpec::corrupted_count() const {
  const double nd = static_cast<double>(n);
  switch (kind) {
    case ScenarioKind::logistic_flip:
      return flip_rule == FlipRule::sqrt_n ? static_cast<std::size_t>(std::floor(std::sqrt(nd) + 1e-12))
                                           : static_cast<std::size_t>(std::floor(flip_frac * nd + 1e-12));
    case ScenarioKind::ggm_mixture:
      return static_cast<std::size_t>(std::floor(p_o * nd + 1e-12));
    case ScenarioKind::tracenorm:
    case ScenarioKind::linear_generic:
      return static_cast<std::size_t>(std::floor(contamination_frac * nd + 1e-12));
  }
  return 0;
}

std::size_t ScenarioSpec::sparsity() const {
  return k != 0 ? k : static_cast<std::size_t>(std::lround(std::sqrt(static_cast<double>(p))));
}

Matrix hub_precision(std::size_t p, Rng& rng) {
  const auto pi = static_cast<Index>(p);
  Matrix a = Matrix::Zero(pi, pi);
  for (Index i = 0; i < pi; ++i)
    for (Index j = i + 1; j < pi; ++j)
      if (rng.bernoulli(0.03)) a(i, j) = a(j, i) = 1.0;
  for (std::size_t hub : sorted(rng.sample(p, std::min<std::size_t>(9, p)))) {
    const auto hi = static_cast<Index>(hub);
    for (Index j = 0; j < pi; ++j) {
      if (j == hi) continue;
      a(hi, j) = a(j, hi) = rng.bernoulli(0.4) ? 1.0 : 0.0;
    }
  }
  Matrix e = Matrix::Zero(pi, pi);
  for (Index i = 0; i < pi; ++i)
    for (Index j = 0; j < pi; ++j)
      if (a(i, j) != 0.0) {
        const double mag = rng.uniform(0.25, 0.75);
        e(i, j) = rng.bernoulli(0.5) ? mag : -mag;
      }
  e = symmetrize(e);
  const double lmin = Eigen::SelfAdjointEigenSolver<Matrix>(e, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
  e.diagonal().array() += 0.1 - lmin;
  return e;
}

Scenario generate(const ScenarioSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  std::optional<Rng> own_truth;
  Rng& truth_rng = spec.truth_seed ? own_truth.emplace(*spec.truth_seed) : rng;
  switch (spec.kind) {
    case ScenarioKind::logistic_flip: return make_logistic(spec, rng, truth_rng);
    case ScenarioKind::tracenorm: return make_tracenorm(spec, rng, truth_rng);
    case ScenarioKind::ggm_mixture: return make_ggm(spec, rng, truth_rng);
    case ScenarioKind::linear_generic: return make_linear(spec, rng, truth_rng);
  }
  fail(ErrorCode::InvalidArgument, "unknown scenario kind");
}

MetricsReport score(const Parameter& estimate, const Parameter& truth, double support_threshold) {
  require(estimate.value.rows() == truth.value.rows() && estimate.value.cols() == truth.value.cols(),
          ErrorCode::IncompatibleShapes, "score: estimate and truth shapes differ");
  require(support_threshold >= 0.0, ErrorCode::InvalidArgument, "score: threshold must be >= 0");
  const Matrix d = estimate.value - truth.value;
  MetricsReport m;
  m.frobenius_error = d.norm();
  m.l2_error = m.frobenius_error;
  m.l1_error = d.cwiseAbs().sum();
  const bool precision = truth.kind == ParamKind::precision;
  m.offdiag_l1_error = precision ? m.l1_error - d.diagonal().cwiseAbs().sum() : m.l1_error;

  std::size_t tp = 0, fp = 0, pos = 0, neg = 0;
  for (Index i = 0; i < d.rows(); ++i) {
    for (Index j = 0; j < d.cols(); ++j) {
      if (precision && j <= i) continue;
      const bool t = std::abs(truth.value(i, j)) > support_threshold;
      const bool e = std::abs(estimate.value(i, j)) > support_threshold;
      (t ? pos : neg) += 1;
      if (e && t) ++tp;
      if (e && !t) ++fp;
    }
  }
  m.tpr = pos ? static_cast<double>(tp) / static_cast<double>(pos) : 1.0;
  m.fpr = neg ? static_cast<double>(fp) / static_cast<double>(neg) : 0.0;
  m.roc_points.emplace_back(m.fpr, m.tpr);
  m.trimmed_mse = std::numeric_limits<double>::quiet_NaN();
  return m;
}

double trimmed_mse(const Parameter& theta, const Dataset& data, std::size_t h) {
  require(data.kind() != DataKind::ggm, ErrorCode::IncompatibleData, "trimmed_mse needs regression data");
  require(h >= 1 && h <= static_cast<std::size_t>(data.n()), ErrorCode::InvalidH, "trimmed_mse: h out of range");
  Vector r = (data.y() - data.x() * theta.value).rowwise().squaredNorm();
  std::sort(r.data(), r.data() + r.size());
  return r.head(static_cast<Index>(h)).mean();
}

double roc_auc(std::vector<std::pair<double, double>> points) {
  points.emplace_back(0.0, 0.0);
  points.emplace_back(1.0, 1.0);
  std::sort(points.begin(), points.end());
  double area = 0.0;
  for (std::size_t i = 1; i < points.size(); ++i)
    area += (points[i].first - points[i - 1].first) * 0.5 * (points[i].second + points[i - 1].second);
  return area;
}

void ExperimentSpec::validate() const {
  scenario.validate();
  require(replications >= 1, ErrorCode::InvalidCounts, "experiment: replications must be >= 1");
  require(!estimators.empty(), ErrorCode::InvalidArgument, "experiment: no estimators");
  require(!lambda_grid.empty(), ErrorCode::InvalidArgument, "experiment: empty lambda grid");
  for (std::size_t i = 1; i < lambda_grid.size(); ++i)
    require(lambda_grid[i] <= lambda_grid[i - 1], ErrorCode::InvalidArgument,
            "experiment: lambda grid must be non-increasing");
  for (const auto& e : estimators) e.spec.validate();
}

ExperimentReport run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  const std::size_t reps = spec.replications;
  const std::size_t ne = spec.estimators.size();
  const std::size_t nl = spec.lambda_grid.size();

  std::vector<std::vector<RunRecord>> rec(reps);
  std::vector<std::vector<TimingRecord>> times(reps);
  parallel_for(reps, spec.threads, [&](std::size_t r) {
    ScenarioSpec sc = spec.scenario;
    sc.seed = Rng::derive(spec.scenario.seed, r);
    const Scenario s = generate(sc);
    const auto n = static_cast<std::size_t>(s.data->n());
    for (const auto& entry : spec.estimators) {
      const std::size_t h = entry.spec.resolve_h(n);
      const auto t0 = std::chrono::steady_clock::now();
      const auto path = lambda_path(entry.spec, s.data, spec.lambda_grid);
      const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      TimingRecord tr{r, entry.label, secs, 0};
      for (std::size_t l = 0; l < nl; ++l) {
        RunRecord rr;
        rr.replication = r;
        rr.estimator = entry.label;
        rr.lambda = spec.lambda_grid[l];
        rr.h = h;
        rr.metrics = score(path[l].theta, s.truth, spec.support_threshold);
        if (s.data->kind() != DataKind::ggm) rr.metrics.trimmed_mse = trimmed_mse(path[l].theta, *s.data, h);
        rr.metrics.wall_time_seconds = secs / static_cast<double>(nl);
        rr.objective = path[l].objective();
        rr.iterations = path[l].iterations;
        rr.converged = path[l].converged;
        tr.total_iterations += path[l].iterations;
        rec[r].push_back(std::move(rr));
      }
      times[r].push_back(tr);
    }
  });

  ExperimentReport out;
  for (std::size_t r = 0; r < reps; ++r) {
    for (auto& x : rec[r]) out.records.push_back(x);
    for (auto& t : times[r]) out.timings.push_back(t);
  }
  const auto at = [&](std::size_t r, std::size_t e, std::size_t l) -> const RunRecord& {
    return out.records[(r * ne + e) * nl + l];
  };
  for (std::size_t e = 0; e < ne; ++e) {
    for (std::size_t l = 0; l < nl; ++l) {
      SummaryRow row;
      row.estimator = spec.estimators[e].label;
      row.lambda = spec.lambda_grid[l];
      row.h = at(0, e, l).h;
      std::vector<double> l2, l1, fro, off, tpr, fpr, tm, wt;
      for (std::size_t r = 0; r < reps; ++r) {
        const auto& m = at(r, e, l).metrics;
        l2.push_back(m.l2_error);
        l1.push_back(m.l1_error);
        fro.push_back(m.frobenius_error);
        off.push_back(m.offdiag_l1_error);
        tpr.push_back(m.tpr);
        fpr.push_back(m.fpr);
        tm.push_back(m.trimmed_mse);
        wt.push_back(m.wall_time_seconds);
      }
      row.mean.l2_error = mean_of(l2);
      row.mean.l1_error = mean_of(l1);
      row.mean.frobenius_error = mean_of(fro);
      row.mean.offdiag_l1_error = mean_of(off);
      row.mean.tpr = mean_of(tpr);
      row.mean.fpr = mean_of(fpr);
      row.mean.trimmed_mse = mean_of(tm);
      row.mean.wall_time_seconds = mean_of(wt);
      row.mean.roc_points.emplace_back(row.mean.fpr, row.mean.tpr);
      out.summary.push_back(std::move(row));
    }
  }
  for (std::size_t e = 0; e < ne; ++e) {
    std::vector<double> aucs;
    for (std::size_t r = 0; r < reps; ++r) {
      std::vector<std::pair<double, double>> pts;
      for (std::size_t l = 0; l < nl; ++l) pts.emplace_back(at(r, e, l).metrics.fpr, at(r, e, l).metrics.tpr);
      aucs.push_back(roc_auc(std::move(pts)));
    }
    out.mean_auc.emplace_back(spec.estimators[e].label, mean_of(aucs));
    for (std::size_t r = 0; r < reps; ++r) out.aucs.push_back({r, spec.estimators[e].label, aucs[r]});
  }
  std::stable_sort(out.aucs.begin(), out.aucs.end(),
                   [](const AucRecord& a, const AucRecord& b) { return a.replication < b.replication; });
  return out;
}

void write_records_csv(std::ostream& out, const ExperimentReport& report) {
  out << "replication,estimator,lambda,h,l2_error,l1_error,frobenius_error,offdiag_l1_error,tpr,fpr,"
         "trimmed_mse,objective,iterations,converged\n";
  for (const auto& r : report.records) {
    const auto& m = r.metrics;
    out << r.replication << ',' << r.estimator << ',' << format_double(r.lambda) << ',' << r.h << ','
        << format_double(m.l2_error) << ',' << format_double(m.l1_error) << ',' << format_double(m.frobenius_error)
        << ',' << format_double(m.offdiag_l1_error) << ',' << format_double(m.tpr) << ',' << format_double(m.fpr)
        << ',' << format_double(m.trimmed_mse) << ',' << format_double(r.objective) << ',' << r.iterations << ','
        << (r.converged ? 1 : 0) << '\n';
  }
}

void write_summary_csv(std::ostream& out, const ExperimentReport& report) {
  out << "estimator,lambda,h,mean_l2_error,mean_l1_error,mean_frobenius_error,mean_offdiag_l1_error,mean_tpr,"
         "mean_fpr,mean_trimmed_mse\n";
  for (const auto& s : report.summary) {
    const auto& m = s.mean;
    out << s.estimator << ',' << format_double(s.lambda) << ',' << s.h << ',' << format_double(m.l2_error) << ','
        << format_double(m.l1_error) << ',' << format_double(m.frobenius_error) << ','
        << format_double(m.offdiag_l1_error) << ',' << format_double(m.tpr) << ',' << format_double(m.fpr) << ','
        << format_double(m.trimmed_mse) << '\n';
  }
}

void write_auc_csv(std::ostream& out, const ExperimentReport& report) {
  out << "replication,estimator,auc\n";
  for (const auto& a : report.aucs) out << a.replication << ',' << a.estimator << ',' << format_double(a.auc) << '\n';
}

void write_timing_csv(std::ostream& out, const ExperimentReport& report) {
  out << "replication,estimator,path_seconds,total_iterations\n";
  for (const auto& t : report.timings)
    out << t.replication << ',' << t.estimator << ',' << format_double(t.path_seconds) << ',' << t.total_iterations
        << '\n';
}

}  // namespace trimest
