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

#include "trimest/trimmer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "trimest/error.hpp"

namespace trimest {

TrimWeights::TrimWeights(std::vector<std::uint8_t> indicators)
    : indicators_(std::move(indicators)) {
  values_.resize(static_cast<Index>(indicators_.size()));
  for (std::size_t i = 0; i < indicators_.size(); ++i) {
    require(indicators_[i] <= 1, ErrorCode::InvalidArgument, "TrimWeights: indicators must be 0 or 1");
    values_[static_cast<Index>(i)] = indicators_[i];
    h_ += indicators_[i];
  }
  require(h_ >= 1, ErrorCode::InvalidH, "TrimWeights: at least one sample must be selected");
}

TrimWeights TrimWeights::all(std::size_t n) {
  return TrimWeights(std::vector<std::uint8_t>(n, 1));
}

std::vector<std::size_t> TrimWeights::selected() const {
  std::vector<std::size_t> out;
  out.reserve(h_);
  for (std::size_t i = 0; i < indicators_.size(); ++i)
    if (indicators_[i]) out.push_back(i);
  return out;
}

TrimWeights solve_weights(std::span<const double> losses, std::size_t h) {
  const std::size_t n = losses.size();
  if (h < 1 || h > n)
    fail(ErrorCode::InvalidH, "solve_weights: h=" + std::to_string(h) + " outside [1, " +
                                  std::to_string(n) + "]");
  for (double l : losses)
    require(!std::isnan(l), ErrorCode::InvalidArgument, "solve_weights: NaN loss");

  std::vector<std::uint8_t> ind(n, 0);
  if (h == n) {
    std::fill(ind.begin(), ind.end(), 1);
    return TrimWeights(std::move(ind));
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  const auto less = [&](std::size_t a, std::size_t b) {
    return losses[a] < losses[b] || (losses[a] == losses[b] && a < b);
  };
  std::nth_element(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(h - 1), order.end(), less);
  for (std::size_t k = 0; k < h; ++k) ind[order[k]] = 1;
  return TrimWeights(std::move(ind));
}

bool is_weight_optimal(std::span<const double> losses, const TrimWeights& w) {
  require(losses.size() == w.n(), ErrorCode::IncompatibleShapes, "is_weight_optimal: size mismatch");
  double max_in = -std::numeric_limits<double>::infinity();
  double min_out = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < losses.size(); ++i) {
    if (w.included(i))
      max_in = std::max(max_in, losses[i]);
    else
      min_out = std::min(min_out, losses[i]);
  }
  return max_in <= min_out + 1e-12;
}

}  // namespace trimest
