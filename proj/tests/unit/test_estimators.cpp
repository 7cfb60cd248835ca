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
#include <memory>
#include <numeric>
#include <random>

#include "reference.hpp"
#include "trimest/error.hpp"
#include "trimest/estimators.hpp"
#include "trimest/simulation.hpp"

using namespace trimest;

namespace {

DatasetPtr share(Dataset d) { return std::make_shared<const Dataset>(std::move(d)); }

std::size_t support_size(const Matrix& m) {
  return static_cast<std::size_t>((m.array().abs() > 1e-10).count());
}

}  // namespace

TEST_CASE("estimator names round-trip", "[estimators]") {
  for (auto k : {EstimatorKind::sparse_lts, EstimatorKind::trimmed_logistic, EstimatorKind::trimmed_glasso,
                 EstimatorKind::tracenorm_lts})
    CHECK(parse_estimator_kind(to_string(k)) == k);
  CHECK_FALSE(parse_estimator_kind("lasso").has_value());
}

TEST_CASE("h resolution from a trim fraction", "[estimators]") {
  EstimatorSpec s;
  CHECK(s.resolve_h(10) == 10);
  s.trim_fraction = 0.2;
  CHECK(s.resolve_h(10) == 8);
  CHECK(s.resolve_h(7) == 6);  // floor(1.4) = 1 trimmed
  s.trim_fraction = 0.1;
  CHECK(s.resolve_h(100) == 90);
  s.h = 5;
  CHECK_THROWS_AS(s.validate(), Error);
  s.trim_fraction.reset();
  CHECK_THROWS_AS(s.resolve_h(4), Error);
  s.h.reset();
  s.trim_fraction = 1.0;
  CHECK_THROWS_AS(s.validate(), Error);
  s.trim_fraction.reset();
  s.lambda = -1;
  CHECK_THROWS_AS(s.validate(), Error);
}

TEST_CASE("sparse_lts recovers noiseless data exactly", "[estimators]") {
  std::mt19937_64 gen(41);
  const Matrix x = testing::random_gaussian(30, 5, gen);
  Vector t(5);
  t << 1, 0, -2, 0.5, 0;
  EstimatorSpec s;
  s.lambda = 1e-9;
  const FitResult r = fit(s, share(Dataset::regression(x, x * t)));
  CHECK((r.theta.value.col(0) - t).norm() < 1e-5);
}

TEST_CASE("trimmed_glasso with a huge lambda is the diagonal MLE", "[estimators]") {
  std::mt19937_64 gen(42);
  const Matrix x = testing::random_gaussian(50, 6, gen);
  EstimatorSpec s;
  s.kind = EstimatorKind::trimmed_glasso;
  s.lambda = 1e3;
  const FitResult r = fit(s, share(Dataset::ggm(x)));
  const Matrix sc = x.transpose() * x / 50.0;
  for (Index i = 0; i < 6; ++i) {
    CHECK(std::abs(r.theta.value(i, i) - 1.0 / sc(i, i)) < 1e-6);
    for (Index j = 0; j < 6; ++j)
      if (i != j) CHECK(r.theta.value(i, j) == 0.0);
  }
}

TEST_CASE("trimmed_glasso output is symmetric positive definite", "[estimators]") {
  ScenarioSpec sc;
  sc.kind = ScenarioKind::ggm_mixture;
  sc.n = 80;
  sc.p = 12;
  sc.seed = 5;
  sc.variant = GgmVariant::M2;
  const Scenario data = generate(sc);
  EstimatorSpec s;
  s.kind = EstimatorKind::trimmed_glasso;
  s.lambda = 0.05;
  s.trim_fraction = 0.1;
  const FitResult r = fit(s, data.data);
  CHECK(asymmetry(r.theta.value) == 0.0);
  CHECK_NOTHROW(cholesky_logdet(r.theta.value));
}

TEST_CASE("estimators refuse incompatible data", "[estimators]") {
  std::mt19937_64 gen(43);
  const Matrix x = testing::random_gaussian(10, 3, gen);
  EstimatorSpec s;
  s.kind = EstimatorKind::trimmed_glasso;
  s.lambda = 0.1;
  try {
    fit(s, share(Dataset::regression(x, x.col(0))));
    FAIL("expected IncompatibleData");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::IncompatibleData);
  }
  s.kind = EstimatorKind::trimmed_logistic;
  CHECK_THROWS_AS(fit(s, share(Dataset::regression(x, x.col(0)))), Error);
}

TEST_CASE("permuting samples permutes the weights and keeps theta", "[estimators]") {
  ScenarioSpec sc;
  sc.n = 60;
  sc.p = 8;
  sc.k = 3;
  sc.contamination_frac = 0.15;
  sc.seed = 9;
  const Scenario data = generate(sc);
  std::vector<Index> perm(60);
  std::iota(perm.begin(), perm.end(), Index{0});
  std::mt19937_64 gen(44);
  std::shuffle(perm.begin(), perm.end(), gen);
  auto permuted = share(data.data->rows(perm));

  EstimatorSpec s;
  s.lambda = 0.05;
  s.trim_fraction = 0.2;
  s.solver.tol_rel_obj = 1e-14;
  s.solver.tol_grad_map = 1e-12;
  const FitResult a = fit(s, data.data);
  const FitResult b = fit(s, permuted);
  CHECK((a.theta.value - b.theta.value).norm() < 1e-8);
  for (std::size_t i = 0; i < 60; ++i) CHECK(b.weights.included(i) == a.weights.included(static_cast<std::size_t>(perm[i])));
}

TEST_CASE("cross-validation over a single point returns it", "[estimators]") {
  std::mt19937_64 gen(45);
  const Matrix x = testing::random_gaussian(30, 4, gen);
  const Vector y = x * Vector::Ones(4);
  CVPlan plan;
  plan.lambda_grid = {0.3};
  plan.h_grid = {27};
  const CvResult r = cross_validate(EstimatorSpec{}, plan, share(Dataset::regression(x, y)));
  CHECK(r.best_lambda == 0.3);
  CHECK(r.best_h == 27);
  REQUIRE(r.table.size() == 1);
  CHECK(r.table[0].fold_scores.size() == 5);
}

TEST_CASE("cross-validation picks a trimmed h under 20% corruption", "[estimators]") {
  int hits = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    ScenarioSpec sc;
    sc.n = 100;
    sc.p = 10;
    sc.k = 3;
    sc.contamination_frac = 0.2;
    sc.seed = 1000 + seed;
    const Scenario data = generate(sc);
    CVPlan plan;
    plan.lambda_grid = {0.1};
    plan.h_grid = {70, 80, 90, 100};
    plan.seed = seed;
    const CvResult r = cross_validate(EstimatorSpec{}, plan, data.data);
    if (r.best_h <= 80) ++hits;
  }
  INFO("seeds selecting h <= 0.8n: " << hits);
  CHECK(hits >= 16);
}

TEST_CASE("cross-validation is independent of the thread count", "[estimators]") {
  ScenarioSpec sc;
  sc.n = 60;
  sc.p = 6;
  sc.contamination_frac = 0.1;
  sc.seed = 3;
  const Scenario data = generate(sc);
  CVPlan plan;
  plan.lambda_grid = {0.5, 0.1, 0.02};
  plan.h_grid = {48, 54, 60};
  plan.folds = 3;
  plan.seed = 8;
  const CvResult one = cross_validate(EstimatorSpec{}, plan, data.data);
  plan.threads = 4;
  const CvResult four = cross_validate(EstimatorSpec{}, plan, data.data);
  REQUIRE(one.table.size() == 9);
  for (std::size_t c = 0; c < 9; ++c) CHECK(one.table[c].score == four.table[c].score);
  CHECK(one.best_lambda == four.best_lambda);
  CHECK(one.best_h == four.best_h);
}

TEST_CASE("held-out scores", "[estimators]") {
  Matrix x(4, 1);
  x << 1, 1, 1, 1;
  Vector y(4);
  y << 1, 2, 1, 11;
  const Dataset d = Dataset::regression(x, y);
  const Parameter t = Parameter::vector(Vector::Ones(1));
  EstimatorSpec s;
  // residuals^2 = 0, 1, 0, 100; trimming 25% drops the largest
  CHECK(heldout_score(s, Scoring::trimmed_mse, t, d, 0.25) == Catch::Approx(1.0 / 3.0));
  CHECK(heldout_score(s, Scoring::trimmed_mse, t, d, 0.0) == Catch::Approx(101.0 / 4.0));
  CHECK(heldout_score(s, Scoring::deviance, t, d, 0.25) == Catch::Approx(101.0 / 4.0));

  EstimatorSpec g;
  g.kind = EstimatorKind::trimmed_glasso;
  const Dataset gd = Dataset::ggm(Matrix::Identity(2, 2));
  CHECK(heldout_score(g, Scoring::heldout_loglik, Parameter::precision(Matrix::Identity(2, 2)), gd, 0.0) ==
        Catch::Approx(1.0));
  CHECK_THROWS_AS(heldout_score(g, Scoring::trimmed_mse, Parameter::precision(Matrix::Identity(2, 2)), gd, 0.0),
                  Error);
}

TEST_CASE("lambda path basics", "[estimators]") {
  std::mt19937_64 gen(46);
  const Matrix x = testing::random_gaussian(40, 10, gen);
  Vector t = Vector::Zero(10);
  t.head(3) << 2, -1, 1;
  const Vector y = x * t + 0.3 * testing::random_gaussian(40, 1, gen).col(0);
  auto data = share(Dataset::regression(x, y));
  EstimatorSpec s;
  s.trim_fraction = 0.1;

  const std::vector<double> huge{1e6};
  const auto zero = lambda_path(s, data, huge);
  CHECK(zero[0].theta.value.isZero(0.0));

  const std::vector<double> one{0.1};
  s.lambda = 0.1;
  const FitResult direct = fit(s, data);
  const auto path1 = lambda_path(s, data, one);
  CHECK(path1[0].theta.value == direct.theta.value);

  const std::vector<double> up{0.1, 0.2};
  CHECK_THROWS_AS(lambda_path(s, data, up), Error);

  const auto grid = log_grid(2.0, 0.01, 15);
  CHECK(grid.front() == 2.0);
  CHECK(grid.back() == Catch::Approx(0.02));
  const auto path = lambda_path(s, data, grid);
  REQUIRE(path.size() == 15);
  std::size_t monotone_pairs = 0;
  for (std::size_t i = 1; i < path.size(); ++i)
    if (support_size(path[i].theta.value) >= support_size(path[i - 1].theta.value)) ++monotone_pairs;
  // diagnostic only: support growth along the path
  WARN("support non-increasing in lambda on " << monotone_pairs << " of 14 adjacent pairs");
}
