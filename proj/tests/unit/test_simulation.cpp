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

#include <algorithm>
#include <cmath>
#include <sstream>

#include "trimest/rng.hpp"
#include "trimest/simulation.hpp"

using namespace trimest;

TEST_CASE("rng streams are reproducible", "[simulation]") {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.normal() == b.normal());
  CHECK(Rng::derive(1, 0) != Rng::derive(1, 1));
  Rng c(7);
  const auto s = c.sample(10, 4);
  std::vector<std::size_t> sorted = s;
  std::sort(sorted.begin(), sorted.end());
  CHECK(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end());
  CHECK(sorted.back() < 10);
}

TEST_CASE("generation is a pure function of spec and seed", "[simulation]") {
  for (auto kind : {ScenarioKind::logistic_flip, ScenarioKind::tracenorm, ScenarioKind::ggm_mixture,
                    ScenarioKind::linear_generic}) {
    ScenarioSpec s;
    s.kind = kind;
    s.n = 40;
    s.p = 12;
    s.q = 4;
    s.contamination_frac = 0.2;
    s.seed = 99;
    const Scenario a = generate(s), b = generate(s);
    CHECK(a.data->x() == b.data->x());
    CHECK(a.data->y() == b.data->y());
    CHECK(a.truth.value == b.truth.value);
    CHECK(a.corrupted == b.corrupted);
    s.seed = 100;
    CHECK(generate(s).data->x() != a.data->x());
  }
}

TEST_CASE("a truth seed shares the truth across sample seeds", "[simulation]") {
  for (auto kind : {ScenarioKind::logistic_flip, ScenarioKind::tracenorm, ScenarioKind::ggm_mixture,
                    ScenarioKind::linear_generic}) {
    ScenarioSpec s;
    s.kind = kind;
    s.n = 40;
    s.p = 12;
    s.q = 4;
    s.truth_seed = 7;
    s.seed = 1;
    const Scenario a = generate(s);
    s.seed = 2;
    const Scenario b = generate(s);
    CHECK(a.truth.value == b.truth.value);
    CHECK(a.data->x() != b.data->x());
    s.truth_seed = 8;
    CHECK(generate(s).truth.value != a.truth.value);
  }
}

TEST_CASE("corruption counts", "[simulation]") {
  ScenarioSpec s;
  s.n = 50;
  s.p = 10;
  s.contamination_frac = 0.0;
  CHECK(generate(s).corrupted.empty());
  s.contamination_frac = 0.25;
  CHECK(generate(s).corrupted.size() == 12);
  s.kind = ScenarioKind::tracenorm;
  CHECK(generate(s).corrupted.size() == 12);

  s.kind = ScenarioKind::logistic_flip;
  s.n = 200;
  s.flip_rule = FlipRule::frac;
  CHECK(generate(s).corrupted.size() == 20);
  s.flip_rule = FlipRule::sqrt_n;
  CHECK(generate(s).corrupted.size() == 14);

  s.kind = ScenarioKind::ggm_mixture;
  s.p_o = 0.1;
  CHECK(generate(s).corrupted.size() == 20);
}

TEST_CASE("logistic flips hit the largest margins", "[simulation]") {
  ScenarioSpec s;
  s.kind = ScenarioKind::logistic_flip;
  s.n = 100;
  s.p = 20;
  s.k = 4;
  s.seed = 3;
  const Scenario sc = generate(s);
  const Vector z = (sc.data->x() * sc.truth.value).col(0).cwiseAbs();
  double min_flipped = INFINITY, max_kept = 0.0;
  for (Index i = 0; i < 100; ++i) {
    const bool flipped = std::binary_search(sc.corrupted.begin(), sc.corrupted.end(), static_cast<std::size_t>(i));
    (flipped ? min_flipped : max_kept) = flipped ? std::min(min_flipped, z(i)) : std::max(max_kept, z(i));
  }
  CHECK(min_flipped >= max_kept);
  CHECK((sc.truth.value.array() != 0.0).count() == 4);
  for (Index i = 0; i < 100; ++i) CHECK((sc.data->y()(i, 0) == 0.0 || sc.data->y()(i, 0) == 1.0));
}

TEST_CASE("trace-norm truth has rank exactly three", "[simulation]") {
  ScenarioSpec s;
  s.kind = ScenarioKind::tracenorm;
  s.n = 50;
  s.p = 30;
  s.q = 8;
  s.rank = 3;
  const Scenario sc = generate(s);
  Eigen::JacobiSVD<Matrix> svd(sc.truth.value);
  CHECK((svd.singularValues().array() > 1e-8).count() == 3);
}

TEST_CASE("hub precision is positive definite with smallest eigenvalue 0.1", "[simulation]") {
  // E is symmetrized as (E + E^T) / 2 after sampling, so magnitudes below 0.25 occur.
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    Rng rng(seed);
    const Matrix t = hub_precision(50, rng);
    CHECK(asymmetry(t) == 0.0);
    Eigen::SelfAdjointEigenSolver<Matrix> es(t);
    CHECK(es.eigenvalues().minCoeff() >= 0.1 - 1e-9);
    CHECK(es.eigenvalues().minCoeff() <= 0.1 + 1e-9);
    for (Index i = 0; i < 50; ++i)
      for (Index j = 0; j < 50; ++j)
        if (i != j) CHECK(std::abs(t(i, j)) <= 0.75 + 1e-12);
  }
}

TEST_CASE("M3 outliers have unit mean shift and identity precision", "[simulation]") {
  ScenarioSpec s;
  s.kind = ScenarioKind::ggm_mixture;
  s.variant = GgmVariant::M3;
  s.n = 4000;
  s.p = 10;
  s.p_o = 0.5;
  s.seed = 12;
  const Scenario sc = generate(s);
  double shift = 0.0;
  Matrix centered(static_cast<Index>(sc.corrupted.size()), 10);
  for (std::size_t r = 0; r < sc.corrupted.size(); ++r) {
    const auto row = sc.data->x().row(static_cast<Index>(sc.corrupted[r]));
    const double sign = row.mean() > 0 ? 1.0 : -1.0;
    shift += sign * row.mean();
    centered.row(static_cast<Index>(r)) = row.array() - sign;
  }
  shift /= static_cast<double>(sc.corrupted.size());
  CHECK(std::abs(shift - 1.0) < 0.05);
  const Matrix cov = centered.transpose() * centered / static_cast<double>(centered.rows());
  CHECK((cov - Matrix::Identity(10, 10)).cwiseAbs().maxCoeff() < 0.15);
}

TEST_CASE("score examples", "[simulation]") {
  Vector t(5);
  t << 1, 0, -2, 0, 0;
  const Parameter truth = Parameter::vector(t);
  const MetricsReport same = score(truth, truth);
  CHECK(same.l2_error == 0.0);
  CHECK(same.l1_error == 0.0);
  CHECK(same.tpr == 1.0);
  CHECK(same.fpr == 0.0);

  const MetricsReport zero = score(Parameter::vector(Vector::Zero(5)), truth);
  CHECK(zero.tpr == 0.0);
  CHECK(zero.fpr == 0.0);
  CHECK(zero.l2_error == Catch::Approx(std::sqrt(5.0)));

  Matrix a(5, 5), b(5, 5);
  Rng rng(4);
  for (Index i = 0; i < 5; ++i)
    for (Index j = 0; j < 5; ++j) {
      a(i, j) = rng.normal();
      b(i, j) = rng.normal();
    }
  double direct = 0.0;
  for (Index i = 0; i < 5; ++i)
    for (Index j = 0; j < 5; ++j) direct += (a(i, j) - b(i, j)) * (a(i, j) - b(i, j));
  CHECK(score(Parameter::matrix(a), Parameter::matrix(b)).frobenius_error == Catch::Approx(std::sqrt(direct)).epsilon(1e-14));

  // precision support counts the upper triangle only
  Matrix pt = Matrix::Identity(3, 3), pe = Matrix::Identity(3, 3);
  pt(0, 1) = pt(1, 0) = 0.5;
  pe(0, 2) = pe(2, 0) = 0.5;
  const MetricsReport pr = score(Parameter::precision(pe), Parameter::precision(pt));
  CHECK(pr.tpr == 0.0);
  CHECK(pr.fpr == 0.5);
}

TEST_CASE("roc area", "[simulation]") {
  CHECK(roc_auc({}) == Catch::Approx(0.5));
  CHECK(roc_auc({{0.0, 1.0}}) == Catch::Approx(1.0));
  CHECK(roc_auc({{0.5, 0.5}}) == Catch::Approx(0.5));
  CHECK(roc_auc({{0.2, 0.6}, {0.0, 0.4}}) == Catch::Approx(0.2 * 0.5 + 0.8 * 0.8));
}

TEST_CASE("trimmed in-sample error", "[simulation]") {
  Matrix x = Matrix::Ones(4, 1);
  Vector y(4);
  y << 1, 2, 0, 11;
  const Dataset d = Dataset::regression(x, y);
  // squared residuals at theta = 1: 0, 1, 1, 100
  CHECK(trimmed_mse(Parameter::vector(Vector::Ones(1)), d, 3) == Catch::Approx(2.0 / 3.0));
  CHECK(trimmed_mse(Parameter::vector(Vector::Ones(1)), d, 4) == Catch::Approx(102.0 / 4.0));
}

namespace {

ExperimentSpec small_experiment(std::size_t reps, std::size_t threads) {
  ExperimentSpec e;
  e.scenario.kind = ScenarioKind::linear_generic;
  e.scenario.n = 40;
  e.scenario.p = 10;
  e.scenario.contamination_frac = 0.1;
  e.scenario.seed = 77;
  EstimatorSpec plain;
  EstimatorSpec trimmed;
  trimmed.trim_fraction = 0.1;
  e.estimators = {{"untrimmed", plain}, {"trim_0.1", trimmed}};
  e.lambda_grid = {1.0, 0.3, 0.1};
  e.replications = reps;
  e.threads = threads;
  return e;
}

std::string csv_of(const ExperimentReport& r) {
  std::ostringstream out;
  write_records_csv(out, r);
  write_summary_csv(out, r);
  write_auc_csv(out, r);
  return out.str();
}

}  // namespace

TEST_CASE("one replication aggregates to itself", "[simulation]") {
  const ExperimentReport r = run_experiment(small_experiment(1, 1));
  REQUIRE(r.records.size() == 6);
  REQUIRE(r.summary.size() == 6);
  for (std::size_t i = 0; i < 6; ++i) {
    CHECK(r.summary[i].mean.l2_error == r.records[i].metrics.l2_error);
    CHECK(r.summary[i].mean.tpr == r.records[i].metrics.tpr);
  }
  REQUIRE(r.aucs.size() == 2);
  CHECK(r.mean_auc[0].second == r.aucs[0].auc);
}

TEST_CASE("experiments are deterministic across runs and thread counts", "[simulation]") {
  const std::string a = csv_of(run_experiment(small_experiment(4, 1)));
  const std::string b = csv_of(run_experiment(small_experiment(4, 1)));
  const std::string c = csv_of(run_experiment(small_experiment(4, 3)));
  CHECK(a == b);
  CHECK(a == c);
  CHECK(a.find("wall") == std::string::npos);
}
