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

#include <catch_amalgamated.hpp>

#include <cmath>
#include <cstring>
#include <string>
#include <vector>

#include "trimest/trimest.h"

TEST_CASE("version and error reporting", "[capi]") {
  CHECK(std::string(trimest_version()).size() > 0);
  trimest_spec* spec = nullptr;
  CHECK(trimest_spec_create("no_such_estimator", &spec) == TRIMEST_ERR_INVALID_ARGUMENT);
  CHECK(spec == nullptr);
  CHECK(std::strlen(trimest_last_error()) > 0);
  REQUIRE(trimest_spec_create("sparse_lts", &spec) == TRIMEST_OK);
  CHECK(trimest_spec_set(spec, "lambda", "0.1") == TRIMEST_OK);
  CHECK(trimest_spec_set(spec, "lambda", "abc") == TRIMEST_ERR_INVALID_ARGUMENT);
  CHECK(trimest_spec_set(spec, "colour", "red") == TRIMEST_ERR_INVALID_ARGUMENT);
  CHECK(trimest_spec_set(spec, "solver", "alternate") == TRIMEST_OK);
  CHECK(trimest_spec_set(spec, "solver", "sideways") == TRIMEST_ERR_INVALID_ARGUMENT);
  trimest_spec_free(spec);
}

TEST_CASE("fit through opaque handles", "[capi]") {
  const double x[] = {1, 0, 0, 1, 1, 1, 2, 1, 1, 3, 3, 2};
  const double y[] = {1, -2, -1, 50, -5, -1};
  trimest_dataset* data = nullptr;
  REQUIRE(trimest_dataset_from_arrays(TRIMEST_DATA_REGRESSION, 6, 2, 1, x, y, &data) == TRIMEST_OK);
  CHECK(trimest_dataset_n(data) == 6);
  CHECK(trimest_dataset_p(data) == 2);

  trimest_spec* spec = nullptr;
  REQUIRE(trimest_spec_create("sparse_lts", &spec) == TRIMEST_OK);
  REQUIRE(trimest_spec_set(spec, "lambda", "1e-6") == TRIMEST_OK);
  REQUIRE(trimest_spec_set(spec, "h", "5") == TRIMEST_OK);
  trimest_fit* fit = nullptr;
  REQUIRE(trimest_fit_run(spec, data, &fit) == TRIMEST_OK);
  size_t rows = 0, cols = 0;
  trimest_fit_theta_shape(fit, &rows, &cols);
  REQUIRE(rows == 2);
  REQUIRE(cols == 1);
  double theta[2];
  trimest_fit_theta(fit, theta);
  CHECK(std::abs(theta[0] - 1.0) < 1e-4);
  CHECK(std::abs(theta[1] + 2.0) < 1e-4);
  uint8_t w[6];
  trimest_fit_weights(fit, w);
  CHECK(w[3] == 0);
  CHECK(trimest_fit_h(fit) == 5);
  CHECK(trimest_fit_converged(fit) == 1);
  const size_t len = trimest_fit_trace_length(fit);
  std::vector<double> trace(len);
  trimest_fit_trace(fit, trace.data());
  CHECK(trace.back() == trimest_fit_objective(fit));
  CHECK(trimest_fit_stabilized_at(fit) >= 0);
  trimest_fit_free(fit);

  // a ggm estimator on regression data is refused
  trimest_spec* g = nullptr;
  REQUIRE(trimest_spec_create("trimmed_glasso", &g) == TRIMEST_OK);
  CHECK(trimest_fit_run(g, data, &fit) == TRIMEST_ERR_INCOMPATIBLE);
  trimest_spec_free(g);

  CHECK(trimest_spec_set(spec, "h", "9") == TRIMEST_OK);
  CHECK(trimest_fit_run(spec, data, &fit) == TRIMEST_ERR_INVALID_ARGUMENT);
  trimest_spec_free(spec);
  trimest_dataset_free(data);
}

TEST_CASE("cross-validation and theory through the C layer", "[capi]") {
  std::vector<double> x(40 * 2), y(40);
  for (size_t i = 0; i < 40; ++i) {
    x[2 * i] = std::sin(1.0 + i);
    x[2 * i + 1] = std::cos(3.0 * i);
    y[i] = x[2 * i] - x[2 * i + 1] + (i % 10 == 0 ? 25.0 : 0.0);
  }
  trimest_dataset* data = nullptr;
  REQUIRE(trimest_dataset_from_arrays(TRIMEST_DATA_REGRESSION, 40, 2, 1, x.data(), y.data(), &data) == TRIMEST_OK);
  trimest_spec* spec = nullptr;
  REQUIRE(trimest_spec_create("sparse_lts", &spec) == TRIMEST_OK);
  const double lambdas[] = {0.1, 0.01};
  const size_t hs[] = {32, 36, 40};
  trimest_cv* cv = nullptr;
  REQUIRE(trimest_cv_run(spec, data, lambdas, 2, hs, 3, 4, "trimmed_mse", 1, 2, &cv) == TRIMEST_OK);
  CHECK(trimest_cv_cells(cv) == 6);
  CHECK(trimest_cv_best_h(cv) <= 36);
  trimest_cv_free(cv);
  CHECK(trimest_cv_run(spec, data, lambdas, 2, hs, 3, 4, "bogus", 1, 1, &cv) == TRIMEST_ERR_INVALID_ARGUMENT);
  trimest_spec_free(spec);
  trimest_dataset_free(data);

  double l2 = 0, r = 0;
  CHECK(trimest_theory_theorem1(0.0, 1, 1, 0, &l2, &r) == TRIMEST_ERR_INVALID_ARGUMENT);
  CHECK(trimest_theory_theorem1(1.0, 2, 0.5, 0, &l2, &r) == TRIMEST_OK);
  CHECK(l2 == Catch::Approx(1.5));
  trimest_samplecov_result sc;
  CHECK(trimest_theory_samplecov(500, 5, 2.0, 10, 1, 1, &sc) == TRIMEST_ERR_INVALID_ARGUMENT);
  size_t passed = 0;
  CHECK(trimest_theory_rsc_sweep(50, 6, 3, &passed) == TRIMEST_OK);
  CHECK(passed == 50);
}

TEST_CASE("experiments through the C layer", "[capi]") {
  trimest_experiment* exp = nullptr;
  REQUIRE(trimest_experiment_create("linear_generic", &exp) == TRIMEST_OK);
  CHECK(trimest_experiment_set(exp, "n", "40") == TRIMEST_OK);
  CHECK(trimest_experiment_set(exp, "p", "8") == TRIMEST_OK);
  CHECK(trimest_experiment_set(exp, "reps", "2") == TRIMEST_OK);
  CHECK(trimest_experiment_set(exp, "nonsense", "2") == TRIMEST_ERR_INVALID_ARGUMENT);
  trimest_spec* spec = nullptr;
  REQUIRE(trimest_spec_create("sparse_lts", &spec) == TRIMEST_OK);
  REQUIRE(trimest_experiment_add_estimator(exp, "untrimmed", spec) == TRIMEST_OK);
  const double grid[] = {0.5, 0.1};
  REQUIRE(trimest_experiment_set_lambda_grid(exp, grid, 2) == TRIMEST_OK);
  trimest_report* rep = nullptr;
  REQUIRE(trimest_experiment_run(exp, &rep) == TRIMEST_OK);
  CHECK(trimest_report_estimators(rep) == 1);
  const double auc = trimest_report_mean_auc(rep, 0);
  CHECK(auc >= 0.0);
  CHECK(auc <= 1.0);
  CHECK(trimest_report_write(rep, "nothing", "/tmp/x.csv") == TRIMEST_ERR_INVALID_ARGUMENT);
  trimest_report_free(rep);
  trimest_spec_free(spec);
  trimest_experiment_free(exp);
}
