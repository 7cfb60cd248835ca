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

// Test-side oracles written without the library's loss, prox or solver code.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace trimest::testing {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

enum class RefKind { lasso, logistic_lasso, glasso, tracenorm };

inline double ref_softplus(double z) { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

// Untrimmed smooth part and its gradient.
struct RefProblem {
  RefKind kind;
  Mat x;
  Mat y;  // n x q; unused for glasso
  double lambda;

  double n() const { return static_cast<double>(x.rows()); }

  bool smooth(const Mat& t, double& value, Mat* grad) const {
    switch (kind) {
      case RefKind::lasso:
      case RefKind::tracenorm: {
        const Mat r = x * t - y;
        value = 0.5 * r.squaredNorm() / n();
        if (grad) *grad = x.transpose() * r / n();
        return true;
      }
      case RefKind::logistic_lasso: {
        const Vec z = x * t;
        value = 0.0;
        Vec r(z.size());
        for (Eigen::Index i = 0; i < z.size(); ++i) {
          value += ref_softplus(z(i)) - y(i, 0) * z(i);
          r(i) = 1.0 / (1.0 + std::exp(-z(i))) - y(i, 0);
        }
        value /= n();
        if (grad) *grad = x.transpose() * r / n();
        return true;
      }
      case RefKind::glasso: {
        Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (t + t.transpose()));
        if (es.eigenvalues().minCoeff() <= 0.0) return false;
        const Mat s = x.transpose() * x / n();
        value = (s.cwiseProduct(t)).sum() - es.eigenvalues().array().log().sum();
        if (grad) {
          const Mat inv = es.eigenvectors() * es.eigenvalues().cwiseInverse().asDiagonal() * es.eigenvectors().transpose();
          *grad = s - inv;
          *grad = 0.5 * (*grad + grad->transpose());
        }
        return true;
      }
    }
    return false;
  }

  double penalty(const Mat& t) const {
    switch (kind) {
      case RefKind::lasso:
      case RefKind::logistic_lasso: return lambda * t.cwiseAbs().sum();
      case RefKind::glasso: return lambda * (t.cwiseAbs().sum() - t.diagonal().cwiseAbs().sum());
      case RefKind::tracenorm: {
        Eigen::JacobiSVD<Mat> svd(t);
        return lambda * svd.singularValues().sum();
      }
    }
    return 0.0;
  }

  Mat prox(const Mat& u, double step) const {
    const double nu = step * lambda;
    auto shrink = [nu](double v) { return v > nu ? v - nu : (v < -nu ? v + nu : 0.0); };
    switch (kind) {
      case RefKind::lasso:
      case RefKind::logistic_lasso: return u.unaryExpr(shrink);
      case RefKind::glasso: {
        Mat out = u.unaryExpr(shrink);
        out.diagonal() = u.diagonal();
        return out;
      }
      case RefKind::tracenorm: {
        Eigen::JacobiSVD<Mat> svd(u, Eigen::ComputeThinU | Eigen::ComputeThinV);
        Vec s = svd.singularValues();
        for (Eigen::Index i = 0; i < s.size(); ++i) s(i) = std::max(0.0, s(i) - nu);
        return svd.matrixU() * s.asDiagonal() * svd.matrixV().transpose();
      }
    }
    return u;
  }

  double objective(const Mat& t) const {
    double v = 0.0;
    if (!smooth(t, v, nullptr)) return INFINITY;
    return v + penalty(t);
  }
};

// Proximal gradient with backtracking on the quadratic upper model, run until
// the iterate stops moving.
inline Mat reference_solve(const RefProblem& prob, Mat t, int max_iter = 200000) {
  double step = 1.0;
  for (int it = 0; it < max_iter; ++it) {
    double f = 0.0;
    Mat g;
    prob.smooth(t, f, &g);
    Mat cand;
    for (;;) {
      cand = prob.prox(t - step * g, step);
      double fc = 0.0;
      const Mat d = cand - t;
      if (prob.smooth(cand, fc, nullptr) && fc <= f + (g.cwiseProduct(d)).sum() + d.squaredNorm() / (2 * step) + 1e-15)
        break;
      step *= 0.5;
      if (step < 1e-20) return t;
    }
    const double move = (cand - t).norm();
    t = cand;
    if (move <= 1e-14 * std::max(1.0, t.norm())) break;
    step *= 2.0;  // let the step recover
  }
  return t;
}

inline Mat random_gaussian(Eigen::Index r, Eigen::Index c, std::mt19937_64& gen) {
  std::normal_distribution<double> nd(0.0, 1.0);
  Mat m(r, c);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < c; ++j) m(i, j) = nd(gen);
  return m;
}

inline Mat random_spd(Eigen::Index p, std::mt19937_64& gen) {
  const Mat a = random_gaussian(p, p, gen);
  return a.transpose() * a + Mat::Identity(p, p);
}

// Dominant singular value by power iteration on M^T M.
inline double power_iteration_norm(const Mat& m, int iters = 10000) {
  Vec v = Vec::Ones(m.cols()).normalized();
  double prev = 0.0;
  for (int i = 0; i < iters; ++i) {
    Vec w = m.transpose() * (m * v);
    const double nrm = w.norm();
    if (nrm == 0.0) return 0.0;
    v = w / nrm;
    if (std::abs(nrm - prev) <= 1e-15 * nrm) break;
    prev = nrm;
  }
  return (m * v).norm();
}

// Minimizes a convex function of one or two variables on a box by repeatedly
// refining a uniform grid around the best point found.
template <class F>
Vec grid_minimize(F&& f, Vec lo, Vec hi, int points = 201, int rounds = 8) {
  const Eigen::Index d = lo.size();
  Vec best = 0.5 * (lo + hi);
  for (int r = 0; r < rounds; ++r) {
    double best_val = INFINITY;
    Vec cell = (hi - lo) / (points - 1);
    Vec z(d);
    const int jmax = d == 2 ? points : 1;
    for (int i = 0; i < points; ++i) {
      for (int j = 0; j < jmax; ++j) {
        z(0) = lo(0) + i * cell(0);
        if (d == 2) z(1) = lo(1) + j * cell(1);
        const double v = f(z);
        if (v < best_val) {
          best_val = v;
          best = z;
        }
      }
    }
    lo = best - 2.0 * cell;
    hi = best + 2.0 * cell;
  }
  return best;
}

}  // namespace trimest::testing
