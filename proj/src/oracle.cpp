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

#include "trimest/oracle.hpp"

#include <cmath>
#include <cstdint>
#include <limits>

#include <Eigen/Cholesky>

#include "trimest/error.hpp"
#include "trimest/parallel.hpp"

namespace trimest {

std::size_t choose(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  unsigned __int128 acc = 1;
  for (std::size_t i = 1; i <= k; ++i) {
    acc = acc * (n - k + i) / i;
    if (acc > SIZE_MAX) return SIZE_MAX;
  }
  return static_cast<std::size_t>(acc);
}

std::vector<std::vector<std::size_t>> colex_subsets(std::size_t n, std::size_t h) {
  std::vector<std::vector<std::size_t>> out;
  if (h > n) return out;
  std::vector<std::size_t> c(h);
  for (std::size_t i = 0; i < h; ++i) c[i] = i;
  for (;;) {
    out.push_back(c);
    // Advance the lowest position that can move up without colliding.
    std::size_t j = 0;
    while (j < h && c[j] + 1 == (j + 1 < h ? c[j + 1] : n)) ++j;
    if (j == h) break;
    ++c[j];
    for (std::size_t i = 0; i < j; ++i) c[i] = i;
  }
  return out;
}

FitResult solve_subset(const EstimatorSpec& spec, const LossModel& model, const TrimWeights& w) {
  const Regularizer reg = make_regularizer(spec);
  if (model.kind() == LossKind::squared && spec.lambda == 0.0) {
    const auto sel = w.selected();
    std::vector<Index> idx(sel.begin(), sel.end());
    const Dataset sub = model.data().rows(idx);
    Matrix gram = sub.x().transpose() * sub.x();
    const Matrix rhs = sub.x().transpose() * sub.y();
    Eigen::LLT<Matrix> llt(gram);
    if (llt.info() != Eigen::Success) {
      gram.diagonal().array() += 1e-12;
      llt.compute(gram);
    }
    Matrix theta = llt.info() == Eigen::Success ? Matrix(llt.solve(rhs))
                                                : Matrix(gram.completeOrthogonalDecomposition().solve(rhs));
    FitResult r;
    r.theta = model.param_kind() == ParamKind::vector ? Parameter::vector(theta.col(0))
                                                     : Parameter::matrix(std::move(theta));
    r.weights = w;
    r.objective_trace.push_back(weighted_objective(model, reg, r.theta, w));
    r.converged = true;
    r.grad_map_residual = grad_map_residual(model, reg, r.theta, w);
    return r;
  }
  const SolverConfig cfg = spec.solver.tightened(100.0);
  return fit_fixed_weights(model, reg, w, default_initial(spec, model.data()), cfg);
}

OracleResult enumerate_global(const EstimatorSpec& spec, DatasetPtr data, std::size_t subset_limit,
                              std::size_t threads) {
  spec.validate();
  const LossModel model = make_loss_model(spec, std::move(data));
  const auto n = static_cast<std::size_t>(model.n());
  const std::size_t h = spec.resolve_h(n);
  const std::size_t count = choose(n, h);
  if (count > subset_limit)
    fail(ErrorCode::TooManySubsets, "oracle: " + std::to_string(count) + " subsets exceed the limit of " +
                                        std::to_string(subset_limit));

  OracleResult out;
  out.subsets = colex_subsets(n, h);
  std::vector<FitResult> fits(out.subsets.size());
  parallel_for(out.subsets.size(), threads, [&](std::size_t s) {
    std::vector<std::uint8_t> ind(n, 0);
    for (std::size_t i : out.subsets[s]) ind[i] = 1;
    fits[s] = solve_subset(spec, model, TrimWeights(std::move(ind)));
  });

  std::size_t best = 0;
  out.per_subset_objectives.reserve(fits.size());
  for (std::size_t s = 0; s < fits.size(); ++s) {
    out.per_subset_objectives.push_back(fits[s].objective());
    if (fits[s].objective() < fits[best].objective()) best = s;
  }
  out.best_subset = out.subsets[best];
  out.best_theta = fits[best].theta;
  out.best_objective = fits[best].objective();
  const double tie = 1e-10 * std::max(1.0, std::abs(out.best_objective));
  for (std::size_t s = 0; s < fits.size(); ++s)
    if (s != best && out.per_subset_objectives[s] - out.best_objective < tie) out.degenerate.push_back(s);
  return out;
}

}  // namespace trimest
