/* Copyright 2026 The trimest Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/* C interface to the trimmed estimators.
 *
 * Every fallible call returns a trimest_status; on failure the message is
 * available from trimest_last_error() on the same thread until the next call.
 * Handles are opaque and owned by the caller, who releases them with the
 * matching *_free function (NULL is accepted). Matrices cross the boundary
 * row-major. */

#ifndef TRIMEST_TRIMEST_H_
#define TRIMEST_TRIMEST_H_

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define TRIMEST_API __declspec(dllexport)
#else
#define TRIMEST_API __attribute__((visibility("default")))
#endif

typedef enum trimest_status {
  TRIMEST_OK = 0,
  TRIMEST_ERR_INVALID_ARGUMENT = 1,
  TRIMEST_ERR_PARSE = 2,
  TRIMEST_ERR_INCOMPATIBLE = 3,
  TRIMEST_ERR_NOT_PD = 4,
  TRIMEST_ERR_LINE_SEARCH = 5,
  TRIMEST_ERR_TOO_MANY_SUBSETS = 6,
  TRIMEST_ERR_IO = 7,
  TRIMEST_ERR_INTERNAL = 8
} trimest_status;

typedef enum trimest_data_kind {
  TRIMEST_DATA_REGRESSION = 0,
  TRIMEST_DATA_MULTIRESPONSE = 1,
  TRIMEST_DATA_GGM = 2
} trimest_data_kind;

typedef struct trimest_dataset trimest_dataset;
typedef struct trimest_spec trimest_spec;
typedef struct trimest_fit trimest_fit;
typedef struct trimest_cv trimest_cv;
typedef struct trimest_experiment trimest_experiment;
typedef struct trimest_report trimest_report;

TRIMEST_API const char* trimest_last_error(void);
TRIMEST_API const char* trimest_version(void);

/* Datasets. CSV needs a header row: x1..xp,y (regression), x1..xp,y1..yq
 * (multiresponse) or x1..xp (ggm). */
TRIMEST_API trimest_status trimest_dataset_load_csv(const char* path, trimest_data_kind kind, size_t q,
                                                    trimest_dataset** out);
TRIMEST_API trimest_status trimest_dataset_from_arrays(trimest_data_kind kind, size_t n, size_t p, size_t q,
                                                       const double* x, const double* y, trimest_dataset** out);
TRIMEST_API void trimest_dataset_free(trimest_dataset* data);
TRIMEST_API size_t trimest_dataset_n(const trimest_dataset* data);
TRIMEST_API size_t trimest_dataset_p(const trimest_dataset* data);
TRIMEST_API size_t trimest_dataset_q(const trimest_dataset* data);

/* Estimator settings. estimator: sparse_lts, trimmed_logistic, trimmed_glasso
 * or tracenorm_lts. Keys: lambda, h, trim_frac, rho, solver (partial or
 * alternate), max_iter, tol_rel_obj, tol_grad_map, ls_shrink, ls_init_step,
 * weight_stable_iters, inner_max_iter, inner_tol_rel_obj, inner_tol_grad_map.
 * Setting h clears trim_frac and the other way round. */
TRIMEST_API trimest_status trimest_spec_create(const char* estimator, trimest_spec** out);
TRIMEST_API trimest_status trimest_spec_set(trimest_spec* spec, const char* key, const char* value);
TRIMEST_API void trimest_spec_free(trimest_spec* spec);

/* Fitting. */
TRIMEST_API trimest_status trimest_fit_run(const trimest_spec* spec, const trimest_dataset* data, trimest_fit** out);
TRIMEST_API void trimest_fit_free(trimest_fit* fit);
TRIMEST_API void trimest_fit_theta_shape(const trimest_fit* fit, size_t* rows, size_t* cols);
TRIMEST_API void trimest_fit_theta(const trimest_fit* fit, double* out);
TRIMEST_API size_t trimest_fit_n(const trimest_fit* fit);
TRIMEST_API size_t trimest_fit_h(const trimest_fit* fit);
TRIMEST_API void trimest_fit_weights(const trimest_fit* fit, uint8_t* out);
/* Per-sample losses at the final estimate. */
TRIMEST_API void trimest_fit_losses(const trimest_fit* fit, double* out);
TRIMEST_API size_t trimest_fit_trace_length(const trimest_fit* fit);
TRIMEST_API void trimest_fit_trace(const trimest_fit* fit, double* out);
TRIMEST_API double trimest_fit_objective(const trimest_fit* fit);
TRIMEST_API size_t trimest_fit_iterations(const trimest_fit* fit);
TRIMEST_API int trimest_fit_converged(const trimest_fit* fit);
TRIMEST_API int trimest_fit_degenerate(const trimest_fit* fit);
/* -1 when the weights never stabilized. */
TRIMEST_API long long trimest_fit_stabilized_at(const trimest_fit* fit);
TRIMEST_API size_t trimest_fit_backtracks(const trimest_fit* fit);
TRIMEST_API size_t trimest_fit_pd_rejections(const trimest_fit* fit);
TRIMEST_API double trimest_fit_grad_map_residual(const trimest_fit* fit);

/* Cross-validation. scoring: trimmed_mse, deviance or heldout_loglik. */
TRIMEST_API trimest_status trimest_cv_run(const trimest_spec* spec, const trimest_dataset* data,
                                          const double* lambdas, size_t n_lambdas, const size_t* hs,
                                          size_t n_hs, size_t folds, const char* scoring, uint64_t seed,
                                          size_t threads, trimest_cv** out);
TRIMEST_API void trimest_cv_free(trimest_cv* cv);
TRIMEST_API double trimest_cv_best_lambda(const trimest_cv* cv);
TRIMEST_API size_t trimest_cv_best_h(const trimest_cv* cv);
TRIMEST_API size_t trimest_cv_cells(const trimest_cv* cv);
TRIMEST_API void trimest_cv_cell(const trimest_cv* cv, size_t index, double* lambda, size_t* h, double* score);

/* Simulation. scenario: logistic_flip, tracenorm, ggm_mixture or
 * linear_generic. Keys: n, p, seed, k, flip_rule (sqrt_n or frac), flip_frac,
 * q, rank, contamination, noise_sd, outlier_mean, outlier_sd, p_o, variant
 * (M1..M4), ar_rho, signal, linear_noise_sd, outlier_shift, outlier_model
 * (vertical or leverage), reps, threads, support_threshold. */
TRIMEST_API trimest_status trimest_experiment_create(const char* scenario, trimest_experiment** out);
TRIMEST_API trimest_status trimest_experiment_set(trimest_experiment* exp, const char* key, const char* value);
TRIMEST_API trimest_status trimest_experiment_add_estimator(trimest_experiment* exp, const char* label,
                                                            const trimest_spec* spec);
TRIMEST_API trimest_status trimest_experiment_set_lambda_grid(trimest_experiment* exp, const double* grid,
                                                              size_t count);
/* Draws the scenario's dataset at the configured seed. */
TRIMEST_API trimest_status trimest_experiment_generate(const trimest_experiment* exp, trimest_dataset** out);
TRIMEST_API trimest_status trimest_experiment_run(const trimest_experiment* exp, trimest_report** out);
TRIMEST_API void trimest_experiment_free(trimest_experiment* exp);

/* which: records, summary, auc or timing. */
TRIMEST_API trimest_status trimest_report_write(const trimest_report* report, const char* which, const char* path);
TRIMEST_API size_t trimest_report_estimators(const trimest_report* report);
TRIMEST_API double trimest_report_mean_auc(const trimest_report* report, size_t estimator);
TRIMEST_API void trimest_report_free(trimest_report* report);

/* Partial minimization against full alternating minimization on one dataset. */
typedef struct trimest_bench_result {
  double partial_seconds;
  double alternate_seconds;
  double partial_objective;
  double alternate_objective;
  size_t partial_iterations;
  size_t alternate_iterations;
} trimest_bench_result;

TRIMEST_API trimest_status trimest_bench_run(const trimest_spec* spec, const trimest_dataset* data,
                                             trimest_bench_result* out);

/* Theory calculators. */
TRIMEST_API trimest_status trimest_theory_theorem1(double kappa, double psi, double lambda, double tau2,
                                                   double* l2_bound, double* r_bound);
/* sigma is dim x dim row-major. */
TRIMEST_API trimest_status trimest_theory_ggm_lambda(const double* sigma, size_t dim, size_t h, size_t b_size,
                                                     double fxb, double tau, double* out);
TRIMEST_API trimest_status trimest_theory_ggm_bound(double c, double k, size_t p, size_t n, double fxb,
                                                    size_t b_size, double kappa, double* out);
TRIMEST_API trimest_status trimest_theory_ggm_fxb(double a, size_t p, double sigma_b_spectral, double* out);
TRIMEST_API trimest_status trimest_theory_lts_lambda(size_t h, size_t p, double c, double* out);
TRIMEST_API trimest_status trimest_theory_lts_bounds(double c1, double c2, double k, size_t b_size, size_t h,
                                                     size_t p, double* l2, double* l1);
TRIMEST_API trimest_status trimest_theory_rsc_sweep(size_t draws, size_t max_p, uint64_t seed, size_t* passed);

typedef struct trimest_samplecov_result {
  size_t trials;
  size_t violations;
  double rate;
  double bound;
  double allowed_rate;
  double standard_error;
} trimest_samplecov_result;

/* Identity covariance of dimension p. */
TRIMEST_API trimest_status trimest_theory_samplecov(size_t n, size_t p, double tau, size_t trials, uint64_t seed,
                                                    size_t threads, trimest_samplecov_result* out);

#ifdef __cplusplus
}
#endif

#endif /* TRIMEST_TRIMEST_H_ */
