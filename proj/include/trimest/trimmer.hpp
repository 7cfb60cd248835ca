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

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "trimest/linalg.hpp"

namespace trimest {

/// A vertex of the h-capped simplex {w in [0,1]^n : sum w = h}: exactly h
/// samples are selected. Fractional weights are not representable.
class TrimWeights {
 public:
  /// h is the number of ones; throws InvalidH when no sample is selected.
  explicit TrimWeights(std::vector<std::uint8_t> indicators);

  static TrimWeights all(std::size_t n);

  std::size_t n() const { return indicators_.size(); }
  std::size_t h() const { return h_; }
  bool included(std::size_t i) const { return indicators_[i] != 0; }
  std::span<const std::uint8_t> indicators() const { return indicators_; }
  /// Indicators as 0.0 / 1.0 for weighted sums.
  const Vector& values() const { return values_; }
  std::vector<std::size_t> selected() const;

  friend bool operator==(const TrimWeights& a, const TrimWeights& b) {
    return a.indicators_ == b.indicators_;
  }

 private:
  std::vector<std::uint8_t> indicators_;
  Vector values_;
  std::size_t h_ = 0;
};

/// Global minimizer of sum_i w_i * losses_i over the h-capped simplex: the h
/// smallest losses are kept, ties going to the smaller sample index.
TrimWeights solve_weights(std::span<const double> losses, std::size_t h);

/// True iff every selected loss is <= every unselected loss (+1e-12).
bool is_weight_optimal(std::span<const double> losses, const TrimWeights& w);

}  // namespace trimest
