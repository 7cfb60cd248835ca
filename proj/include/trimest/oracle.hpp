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

// Brute-force global minimum of the trimmed problem over every h-subset.

#pragma once

#include <cstddef>
#include <vector>

#include "trimest/estimators.hpp"

namespace trimest {

struct OracleResult {
  std::vector<std::size_t> best_subset;  // sorted, size h
  Parameter best_theta;
  double best_objective = 0.0;
  /// One entry per subset, in colexicographic order.
  std::vector<double> per_subset_objectives;
  std::vector<std::vector<std::size_t>> subsets;
  /// Subsets other than the best whose objective is within 1e-10 of it.
  std::vector<std::size_t> degenerate;
};

/// Number of h-subsets of n items, saturating at SIZE_MAX.
std::size_t choose(std::size_t n, std::size_t k);

/// All h-subsets of {0..n-1} in colexicographic order.
std::vector<std::vector<std::size_t>> colex_subsets(std::size_t n, std::size_t h);

/// Solves the fixed-subset problem: closed form for squared loss with
/// lambda = 0, otherwise the proximal solver at 100x tighter tolerances.
FitResult solve_subset(const EstimatorSpec& spec, const LossModel& model, const TrimWeights& w);

OracleResult enumerate_global(const EstimatorSpec& spec, DatasetPtr data,
                              std::size_t subset_limit = 5000, std::size_t threads = 1);

}  // namespace trimest
