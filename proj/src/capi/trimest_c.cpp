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

#include "trimest/trimest.h"

#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <memory>
#include <new>
#include <string>

#include "trimest/csv.hpp"
#include "trimest/error.hpp"
#include "trimest/estimators.hpp"
#include "trimest/simulation.hpp"
#include "trimest/theory.hpp"

using namespace trimest;

struct trimest_dataset {
  DatasetPtr data;
};

struct trimest_spec {
  EstimatorSpec spec;
};

struct trimest_fit {
  FitResult result;
  Vector losses;
};

struct trimest_cv {
  CvResult result;
};

struct trimest_experiment {
  ExperimentSpec spec;
};

struct trimest_report {
  ExperimentReport report;
};

namespace {

thread_local std::string last_error;

trimest_status status_of(ErrorCode code) {
  switch (code) {
    case ErrorCode::ParseError: return TRIMEST_ERR_PARSE;
    case ErrorCode::IncompatibleShapes:
    case ErrorCode::IncompatibleData: return TRIMEST_ERR_INCOMPATIBLE;
    case ErrorCode::NotPositiveDefinite: return TRIMEST_ERR_NOT_PD;
    case ErrorCode::LineSearchFailed: return TRIMEST_ERR_LINE_SEARCH;
    case ErrorCode::TooManySubsets: return TRIMEST_ERR_TOO_MANY_SUBSETS;
    case ErrorCode::Io: return TRIMEST_ERR_IO;
    case ErrorCode::InvalidArgument:
    case ErrorCode::InvalidH:
    case ErrorCode::InvalidCounts:
    case ErrorCode::InvalidTau:
    case ErrorCode::NonPositiveCurvature: return TRIMEST_ERR_INVALID_ARGUMENT;
  }
  return TRIMEST_ERR_INTERNAL;
}

template <class F>
trimest_status guarded(F&& f) {
  try {
    last_error.clear();
    f();
    return TRIMEST_OK;
  } catch (const Error& e) {
    last_error = e.what();
    return status_of(e.code());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
  } catch (const std::exception& e) {
    last_error = e.what();
  } catch (...) {
    last_error = "unknown failure";
  }
  return TRIMEST_ERR_INTERNAL;
}

void require_ptr(const void* p, const char* what) {
  require(p != nullptr, ErrorCode::InvalidArgument, std::string("null ") + what);
}

double parse_real(const std::string& key, const char* value) {
  require_ptr(value, "value");
  const std::string s(value);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size())
    fail(ErrorCode::InvalidArgument, key + ": not a number: '" + s + "'");
  return v;
}

std::uint64_t parse_count(const std::string& key, const char* value) {
  require_ptr(value, "value");
  const std::string s(value);
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size())
    fail(ErrorCode::InvalidArgument, key + ": not a non-negative integer: '" + s + "'");
  return v;
}

DataKind data_kind_of(trimest_data_kind kind) {
  switch (kind) {
    case TRIMEST_DATA_REGRESSION: return DataKind::regression;
    case TRIMEST_DATA_MULTIRESPONSE: return DataKind::multiresponse;
    case TRIMEST_DATA_GGM: return DataKind::ggm;
  }
  fail(ErrorCode::InvalidArgument, "unknown data kind");
}

bool set_solver_key(SolverConfig& cfg, const std::string& key, const char* value) {
  if (key == "max_iter") cfg.max_iter = parse_count(key, value);
  else if (key == "tol_rel_obj") cfg.tol_rel_obj = parse_real(key, value);
  else if (key == "tol_grad_map") cfg.tol_grad_map = parse_real(key, value);
  else if (key == "ls_shrink") cfg.ls_shrink = parse_real(key, value);
  else if (key == "ls_init_step") cfg.ls_init_step = parse_real(key, value);
  else if (key == "weight_stable_iters") cfg.weight_stable_iters = parse_count(key, value);
  else return false;
  return true;
}

void copy_row_major(const Matrix& m, double* out) {
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j) *out++ = m(i, j);
}

}  // namespace

extern "C" {

const char* trimest_last_error(void) { return last_error.c_str(); }

const char* trimest_version(void) { return "1.0.0"; }

trimest_status trimest_dataset_load_csv(const char* path, trimest_data_kind kind, size_t q, trimest_dataset** out) {
  return guarded([&] {
    require_ptr(path, "path");
    require_ptr(out, "out");
    *out = nullptr;
    const DataKind dk = data_kind_of(kind);
    auto data = std::make_shared<const Dataset>(dataset_from_table(read_csv_file(path), dk, q));
    *out = new trimest_dataset{std::move(data)};
  });
}

trimest_status trimest_dataset_from_arrays(trimest_data_kind kind, size_t n, size_t p, size_t q, const double* x,
                                           const double* y, trimest_dataset** out) {
  return guarded([&] {
    require_ptr(out, "out");
    *out = nullptr;
    require_ptr(x, "x");
    require(n >= 1 && p >= 1, ErrorCode::InvalidArgument, "need n >= 1 and p >= 1");
    const auto ni = static_cast<Index>(n);
    const auto pi = static_cast<Index>(p);
    Matrix xm(ni, pi);
    for (Index i = 0; i < ni; ++i)
      for (Index j = 0; j < pi; ++j) xm(i, j) = x[i * pi + j];
    const DataKind dk = data_kind_of(kind);
    if (dk == DataKind::ggm) {
      *out = new trimest_dataset{std::make_shared<const Dataset>(Dataset::ggm(std::move(xm)))};
      return;
    }
    require_ptr(y, "y");
    const auto qi = static_cast<Index>(dk == DataKind::regression ? 1 : q);
    require(qi >= 1, ErrorCode::InvalidArgument, "need q >= 1");
    Matrix ym(ni, qi);
    for (Index i = 0; i < ni; ++i)
      for (Index j = 0; j < qi; ++j) ym(i, j) = y[i * qi + j];
    *out = new trimest_dataset{std::make_shared<const Dataset>(
        dk == DataKind::regression ? Dataset::regression(std::move(xm), ym.col(0))
                                   : Dataset::multiresponse(std::move(xm), std::move(ym)))};
  });
}

void trimest_dataset_free(trimest_dataset* data) { delete data; }
size_t trimest_dataset_n(const trimest_dataset* data) { return static_cast<size_t>(data->data->n()); }
size_t trimest_dataset_p(const trimest_dataset* data) { return static_cast<size_t>(data->data->p()); }
size_t trimest_dataset_q(const trimest_dataset* data) { return static_cast<size_t>(data->data->q()); }

trimest_status trimest_spec_create(const char* estimator, trimest_spec** out) {
  return guarded([&] {
    require_ptr(estimator, "estimator");
    require_ptr(out, "out");
    *out = nullptr;
    const auto kind = parse_estimator_kind(estimator);
    require(kind.has_value(), ErrorCode::InvalidArgument, std::string("unknown estimator '") + estimator + "'");
    auto s = std::make_unique<trimest_spec>();
    s->spec.kind = *kind;
    *out = s.release();
  });
}

trimest_status trimest_spec_set(trimest_spec* spec, const char* key, const char* value) {
  return guarded([&] {
    require_ptr(spec, "spec");
    require_ptr(key, "key");
    require_ptr(value, "value");
    const std::string k(key);
    EstimatorSpec& s = spec->spec;
    if (k == "lambda") {
      s.lambda = parse_real(k, value);
    } else if (k == "h") {
      s.h = parse_count(k, value);
      s.trim_fraction.reset();
    } else if (k == "trim_frac") {
      s.trim_fraction = parse_real(k, value);
      s.h.reset();
    } else if (k == "rho") {
      s.rho = parse_real(k, value);
    } else if (k == "solver") {
      const std::string v(value);
      if (v == "partial") s.solver_kind = SolverKind::partial_min;
      else if (v == "alternate") s.solver_kind = SolverKind::alternate_min;
      else fail(ErrorCode::InvalidArgument, "solver must be partial or alternate");
    } else if (k.rfind("inner_", 0) == 0) {
      if (!set_solver_key(s.inner_solver, k.substr(6), value))
        fail(ErrorCode::InvalidArgument, "unknown estimator key '" + k + "'");
    } else if (!set_solver_key(s.solver, k, value)) {
      fail(ErrorCode::InvalidArgument, "unknown estimator key '" + k + "'");
    }
  });
}

void trimest_spec_free(trimest_spec* spec) { delete spec; }

trimest_status trimest_fit_run(const trimest_spec* spec, const trimest_dataset* data, trimest_fit** out) {
  return guarded([&] {
    require_ptr(spec, "spec");
    require_ptr(data, "data");
    require_ptr(out, "out");
    *out = nullptr;
    auto f = std::make_unique<trimest_fit>();
    f->result = fit(spec->spec, data->data);
    f->losses = make_loss_model(spec->spec, data->data).sample_losses(f->result.theta);
    *out = f.release();
  });
}

void trimest_fit_free(trimest_fit* fit) { delete fit; }

void trimest_fit_theta_shape(const trimest_fit* fit, size_t* rows, size_t* cols) {
  if (rows) *rows = static_cast<size_t>(fit->result.theta.value.rows());
  if (cols) *cols = static_cast<size_t>(fit->result.theta.value.cols());
}

void trimest_fit_theta(const trimest_fit* fit, double* out) { copy_row_major(fit->result.theta.value, out); }
size_t trimest_fit_n(const trimest_fit* fit) { return fit->result.weights.n(); }
size_t trimest_fit_h(const trimest_fit* fit) { return fit->result.weights.h(); }

void trimest_fit_weights(const trimest_fit* fit, uint8_t* out) {
  const auto ind = fit->result.weights.indicators();
  std::copy(ind.begin(), ind.end(), out);
}

void trimest_fit_losses(const trimest_fit* fit, double* out) {
  std::copy(fit->losses.data(), fit->losses.data() + fit->losses.size(), out);
}

size_t trimest_fit_trace_length(const trimest_fit* fit) { return fit->result.objective_trace.size(); }

void trimest_fit_trace(const trimest_fit* fit, double* out) {
  std::copy(fit->result.objective_trace.begin(), fit->result.objective_trace.end(), out);
}

double trimest_fit_objective(const trimest_fit* fit) { return fit->result.objective(); }
size_t trimest_fit_iterations(const trimest_fit* fit) { return fit->result.iterations; }
int trimest_fit_converged(const trimest_fit* fit) { return fit->result.converged ? 1 : 0; }
int trimest_fit_degenerate(const trimest_fit* fit) { return fit->result.degenerate ? 1 : 0; }

long long trimest_fit_stabilized_at(const trimest_fit* fit) {
  return fit->result.weight_stabilized_at ? static_cast<long long>(*fit->result.weight_stabilized_at) : -1;
}

size_t trimest_fit_backtracks(const trimest_fit* fit) { return fit->result.ls_backtracks; }
size_t trimest_fit_pd_rejections(const trimest_fit* fit) { return fit->result.pd_rejections; }
double trimest_fit_grad_map_residual(const trimest_fit* fit) { return fit->result.grad_map_residual; }

trimest_status trimest_cv_run(const trimest_spec* spec, const trimest_dataset* data, const double* lambdas,
                              size_t n_lambdas, const size_t* hs, size_t n_hs, size_t folds, const char* scoring,
                              uint64_t seed, size_t threads, trimest_cv** out) {
  return guarded([&] {
    require_ptr(spec, "spec");
    require_ptr(data, "data");
    require_ptr(out, "out");
    *out = nullptr;
    require_ptr(lambdas, "lambdas");
    require_ptr(hs, "hs");
    require_ptr(scoring, "scoring");
    CVPlan plan;
    plan.lambda_grid.assign(lambdas, lambdas + n_lambdas);
    plan.h_grid.assign(hs, hs + n_hs);
    plan.folds = folds;
    const auto sc = parse_scoring(scoring);
    require(sc.has_value(), ErrorCode::InvalidArgument, std::string("unknown scoring '") + scoring + "'");
    plan.scoring = *sc;
    plan.seed = seed;
    plan.threads = threads;
    auto c = std::make_unique<trimest_cv>();
    c->result = cross_validate(spec->spec, plan, data->data);
    *out = c.release();
  });
}

void trimest_cv_free(trimest_cv* cv) { delete cv; }
double trimest_cv_best_lambda(const trimest_cv* cv) { return cv->result.best_lambda; }
size_t trimest_cv_best_h(const trimest_cv* cv) { return cv->result.best_h; }
size_t trimest_cv_cells(const trimest_cv* cv) { return cv->result.table.size(); }

void trimest_cv_cell(const trimest_cv* cv, size_t index, double* lambda, size_t* h, double* score) {
  const CvCell& c = cv->result.table.at(index);
  if (lambda) *lambda = c.lambda;
  if (h) *h = c.h;
  if (score) *score = c.score;
}

trimest_status trimest_experiment_create(const char* scenario, trimest_experiment** out) {
  return guarded([&] {
    require_ptr(scenario, "scenario");
    require_ptr(out, "out");
    *out = nullptr;
    const auto kind = parse_scenario_kind(scenario);
    require(kind.has_value(), ErrorCode::InvalidArgument, std::string("unknown scenario '") + scenario + "'");
    auto e = std::make_unique<trimest_experiment>();
    e->spec.scenario.kind = *kind;
    *out = e.release();
  });
}

trimest_status trimest_experiment_set(trimest_experiment* exp, const char* key, const char* value) {
  return guarded([&] {
    require_ptr(exp, "experiment");
    require_ptr(key, "key");
    require_ptr(value, "value");
    const std::string k(key);
    const std::string v(value);
    ScenarioSpec& s = exp->spec.scenario;
    if (k == "n") s.n = parse_count(k, value);
    else if (k == "p") s.p = parse_count(k, value);
    else if (k == "seed") s.seed = parse_count(k, value);
    else if (k == "k") s.k = parse_count(k, value);
    else if (k == "flip_rule") {
      if (v == "sqrt_n") s.flip_rule = FlipRule::sqrt_n;
      else if (v == "frac") s.flip_rule = FlipRule::frac;
      else fail(ErrorCode::InvalidArgument, "flip_rule must be sqrt_n or frac");
    } else if (k == "flip_frac") s.flip_frac = parse_real(k, value);
    else if (k == "q") s.q = parse_count(k, value);
    else if (k == "rank") s.rank = parse_count(k, value);
    else if (k == "contamination") s.contamination_frac = parse_real(k, value);
    else if (k == "noise_sd") s.noise_sd = parse_real(k, value);
    else if (k == "outlier_mean") s.outlier_mean = parse_real(k, value);
    else if (k == "outlier_sd") s.outlier_sd = parse_real(k, value);
    else if (k == "p_o") s.p_o = parse_real(k, value);
    else if (k == "variant") {
      if (v == "M1") s.variant = GgmVariant::M1;
      else if (v == "M2") s.variant = GgmVariant::M2;
      else if (v == "M3") s.variant = GgmVariant::M3;
      else if (v == "M4") s.variant = GgmVariant::M4;
      else fail(ErrorCode::InvalidArgument, "variant must be one of M1, M2, M3, M4");
    } else if (k == "ar_rho") s.ar_rho = parse_real(k, value);
    else if (k == "signal") s.signal = parse_real(k, value);
    else if (k == "linear_noise_sd") s.linear_noise_sd = parse_real(k, value);
    else if (k == "outlier_shift") s.outlier_shift = parse_real(k, value);
    else if (k == "outlier_model") {
      if (v == "vertical") s.outlier_model = OutlierModel::vertical;
      else if (v == "leverage") s.outlier_model = OutlierModel::leverage;
      else fail(ErrorCode::InvalidArgument, "outlier_model must be vertical or leverage");
    } else if (k == "reps") exp->spec.replications = parse_count(k, value);
    else if (k == "threads") exp->spec.threads = parse_count(k, value);
    else if (k == "support_threshold") exp->spec.support_threshold = parse_real(k, value);
    else fail(ErrorCode::InvalidArgument, "unknown scenario key '" + k + "'");
  });
}

trimest_status trimest_experiment_add_estimator(trimest_experiment* exp, const char* label, const trimest_spec* spec) {
  return guarded([&] {
    require_ptr(exp, "experiment");
    require_ptr(label, "label");
    require_ptr(spec, "spec");
    exp->spec.estimators.push_back({label, spec->spec});
  });
}

trimest_status trimest_experiment_set_lambda_grid(trimest_experiment* exp, const double* grid, size_t count) {
  return guarded([&] {
    require_ptr(exp, "experiment");
    require_ptr(grid, "grid");
    exp->spec.lambda_grid.assign(grid, grid + count);
  });
}

trimest_status trimest_experiment_generate(const trimest_experiment* exp, trimest_dataset** out) {
  return guarded([&] {
    require_ptr(exp, "experiment");
    require_ptr(out, "out");
    *out = nullptr;
    *out = new trimest_dataset{generate(exp->spec.scenario).data};
  });
}

trimest_status trimest_experiment_run(const trimest_experiment* exp, trimest_report** out) {
  return guarded([&] {
    require_ptr(exp, "experiment");
    require_ptr(out, "out");
    *out = nullptr;
    auto r = std::make_unique<trimest_report>();
    r->report = run_experiment(exp->spec);
    *out = r.release();
  });
}

void trimest_experiment_free(trimest_experiment* exp) { delete exp; }

trimest_status trimest_report_write(const trimest_report* report, const char* which, const char* path) {
  return guarded([&] {
    require_ptr(report, "report");
    require_ptr(which, "which");
    require_ptr(path, "path");
    const std::string w(which);
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorCode::Io, std::string("cannot write '") + path + "'");
    if (w == "records") write_records_csv(out, report->report);
    else if (w == "summary") write_summary_csv(out, report->report);
    else if (w == "auc") write_auc_csv(out, report->report);
    else if (w == "timing") write_timing_csv(out, report->report);
    else fail(ErrorCode::InvalidArgument, "unknown report '" + w + "'");
    if (!out) fail(ErrorCode::Io, std::string("failed writing '") + path + "'");
  });
}

size_t trimest_report_estimators(const trimest_report* report) { return report->report.mean_auc.size(); }

double trimest_report_mean_auc(const trimest_report* report, size_t estimator) {
  return report->report.mean_auc.at(estimator).second;
}

void trimest_report_free(trimest_report* report) { delete report; }

trimest_status trimest_bench_run(const trimest_spec* spec, const trimest_dataset* data, trimest_bench_result* out) {
  return guarded([&] {
    require_ptr(spec, "spec");
    require_ptr(data, "data");
    require_ptr(out, "out");
    using clock = std::chrono::steady_clock;
    EstimatorSpec s = spec->spec;
    s.solver_kind = SolverKind::partial_min;
    auto t0 = clock::now();
    const FitResult a = fit(s, data->data);
    out->partial_seconds = std::chrono::duration<double>(clock::now() - t0).count();
    s.solver_kind = SolverKind::alternate_min;
    t0 = clock::now();
    const FitResult b = fit(s, data->data);
    out->alternate_seconds = std::chrono::duration<double>(clock::now() - t0).count();
    out->partial_objective = a.objective();
    out->alternate_objective = b.objective();
    out->partial_iterations = a.iterations;
    out->alternate_iterations = b.iterations;
  });
}

trimest_status trimest_theory_theorem1(double kappa, double psi, double lambda, double tau2, double* l2_bound,
                                       double* r_bound) {
  return guarded([&] {
    TheoryParams tp;
    tp.kappa = kappa;
    tp.psi = psi;
    tp.lambda = lambda;
    tp.tau2 = tau2;
    const ErrorBounds b = theorem1_bounds(tp);
    if (l2_bound) *l2_bound = b.l2;
    if (r_bound) *r_bound = b.r;
  });
}

trimest_status trimest_theory_ggm_lambda(const double* sigma, size_t dim, size_t h, size_t b_size, double fxb,
                                         double tau, double* out) {
  return guarded([&] {
    require_ptr(sigma, "sigma");
    require_ptr(out, "out");
    const auto d = static_cast<Index>(dim);
    Matrix s(d, d);
    for (Index i = 0; i < d; ++i)
      for (Index j = 0; j < d; ++j) s(i, j) = sigma[i * d + j];
    *out = ggm_lambda_cor1(s, h, b_size, dim, fxb, tau);
  });
}

trimest_status trimest_theory_ggm_bound(double c, double k, size_t p, size_t n, double fxb, size_t b_size,
                                        double kappa, double* out) {
  return guarded([&] {
    require_ptr(out, "out");
    *out = ggm_bounds_cor2(c, k, p, n, fxb, b_size, kappa);
  });
}

trimest_status trimest_theory_ggm_fxb(double a, size_t p, double sigma_b_spectral, double* out) {
  return guarded([&] {
    require_ptr(out, "out");
    *out = ggm_fxb_cor3(a, p, sigma_b_spectral);
  });
}

trimest_status trimest_theory_lts_lambda(size_t h, size_t p, double c, double* out) {
  return guarded([&] {
    require_ptr(out, "out");
    *out = lts_lambda(h, p, c);
  });
}

trimest_status trimest_theory_lts_bounds(double c1, double c2, double k, size_t b_size, size_t h, size_t p,
                                         double* l2, double* l1) {
  return guarded([&] {
    const ErrorBounds b = lts_bounds(c1, c2, k, b_size, h, p);
    if (l2) *l2 = b.l2;
    if (l1) *l1 = b.r;
  });
}

trimest_status trimest_theory_rsc_sweep(size_t draws, size_t max_p, uint64_t seed, size_t* passed) {
  return guarded([&] {
    require_ptr(passed, "passed");
    *passed = rsc_sweep(draws, max_p, seed);
  });
}

trimest_status trimest_theory_samplecov(size_t n, size_t p, double tau, size_t trials, uint64_t seed, size_t threads,
                                        trimest_samplecov_result* out) {
  return guarded([&] {
    require_ptr(out, "out");
    const auto pi = static_cast<Index>(p);
    const SampleCovCheck c = check_samplecov_lemma(Matrix::Identity(pi, pi), n, tau, trials, seed, threads);
    out->trials = c.trials;
    out->violations = c.violations;
    out->rate = c.rate;
    out->bound = c.bound;
    out->allowed_rate = c.allowed_rate;
    out->standard_error = c.standard_error;
  });
}

}  // extern "C"
