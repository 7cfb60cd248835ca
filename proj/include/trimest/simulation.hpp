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

// Synthetic contaminated data, error/support metrics and replicated
// experiments over lambda paths.

#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "trimest/estimators.hpp"
#include "trimest/rng.hpp"

namespace trimest {

enum class ScenarioKind { logistic_flip, tracenorm, ggm_mixture, linear_generic };
enum class FlipRule { sqrt_n, frac };
enum class GgmVariant { M1, M2, M3, M4 };
enum class OutlierModel { vertical, leverage };

const char* to_string(ScenarioKind kind);
std::optional<ScenarioKind> parse_scenario_kind(const std::string& name);

struct ScenarioSpec {
  ScenarioKind kind = ScenarioKind::linear_generic;
  std::size_t n = 100;
  std::size_t p = 20;
  std::uint64_t seed = 0;
  /// When set, the truth (and the GGM outlier precision) is drawn from this
  /// seed instead, so datasets with different `seed` share one truth.
  std::optional<std::uint64_t> truth_seed;

  /// Nonzeros of the truth (logistic_flip, linear_generic); 0 means round(sqrt(p)).
  std::size_t k = 0;
  FlipRule flip_rule = FlipRule::frac;
  double flip_frac = 0.1;

  std::size_t q = 10;
  std::size_t rank = 3;
  /// Fraction of corrupted samples (tracenorm, linear_generic); count is floor(frac * n).
  double contamination_frac = 0.0;
  double noise_sd = 0.1;  // tracenorm clean noise; linear_generic uses linear_noise_sd
  double outlier_mean = 2.0;
  double outlier_sd = 1.0;

  double p_o = 0.1;
  GgmVariant variant = GgmVariant::M1;

  double ar_rho = 0.5;  // Sigma_ij = ar_rho^|i-j|
  double signal = 1.0;  // magnitude of the nonzeros, with random signs
  double linear_noise_sd = 1.0;
  double outlier_shift = 20.0;
  OutlierModel outlier_model = OutlierModel::vertical;

  void validate() const;
  std::size_t corrupted_count() const;
  std::size_t sparsity() const;
};

struct Scenario {
  DatasetPtr data;
  Parameter truth;
  std::vector<std::size_t> corrupted;  // sorted
};

Scenario generate(const ScenarioSpec& spec);

/// Hub-network precision matrix: 9 hubs, background edge probability 0.03,
/// hub row probability 0.4, entries uniform on +-[0.25, 0.75], symmetrized and
/// shifted so the smallest eigenvalue is 0.1.
Matrix hub_precision(std::size_t p, Rng& rng);

struct MetricsReport {
  double l2_error = 0.0;
  double l1_error = 0.0;
  double frobenius_error = 0.0;
  double offdiag_l1_error = 0.0;
  double tpr = 0.0;
  double fpr = 0.0;
  std::vector<std::pair<double, double>> roc_points;  // (fpr, tpr)
  double trimmed_mse = 0.0;
  double wall_time_seconds = 0.0;
};

/// Support is |value| > threshold, off-diagonal only for precision matrices.
/// With an empty true support tpr is 1; with an empty complement fpr is 0.
MetricsReport score(const Parameter& estimate, const Parameter& truth, double support_threshold = 1e-6);

/// In-sample mean squared residual after dropping the n - h largest.
double trimmed_mse(const Parameter& theta, const Dataset& data, std::size_t h);

/// Trapezoidal area under a ROC path closed with (0,0) and (1,1).
double roc_auc(std::vector<std::pair<double, double>> points);

struct EstimatorEntry {
  std::string label;
  EstimatorSpec spec;  // lambda is taken from the experiment grid
};

struct ExperimentSpec {
  ScenarioSpec scenario;
  std::vector<EstimatorEntry> estimators;
  std::vector<double> lambda_grid;  // shared, non-increasing
  std::size_t replications = 1;
  double support_threshold = 1e-6;
  std::size_t threads = 1;

  void validate() const;
};

struct RunRecord {
  std::size_t replication = 0;
  std::string estimator;
  double lambda = 0.0;
  std::size_t h = 0;
  MetricsReport metrics;
  double objective = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
};

struct SummaryRow {
  std::string estimator;
  double lambda = 0.0;
  std::size_t h = 0;
  MetricsReport mean;
};

struct AucRecord {
  std::size_t replication = 0;
  std::string estimator;
  double auc = 0.0;
};

struct TimingRecord {
  std::size_t replication = 0;
  std::string estimator;
  double path_seconds = 0.0;
  std::size_t total_iterations = 0;
};

struct ExperimentReport {
  std::vector<RunRecord> records;     // replication, estimator, lambda order
  std::vector<SummaryRow> summary;    // estimator, lambda order
  std::vector<AucRecord> aucs;        // replication, estimator order
  std::vector<std::pair<std::string, double>> mean_auc;
  std::vector<TimingRecord> timings;
};

/// Replication r uses seed Rng::derive(scenario.seed, r). Results do not
/// depend on the thread count.
ExperimentReport run_experiment(const ExperimentSpec& spec);

/// Deterministic CSV outputs; timings go to their own file.
void write_records_csv(std::ostream& out, const ExperimentReport& report);
void write_summary_csv(std::ostream& out, const ExperimentReport& report);
void write_auc_csv(std::ostream& out, const ExperimentReport& report);
void write_timing_csv(std::ostream& out, const ExperimentReport& report);

}  // namespace trimest
