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
#include <random>

#include "reference.hpp"
#include "trimest/error.hpp"
#include "trimest/linalg.hpp"

using namespace trimest;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("cholesky_logdet of simple matrices", "[linalg]") {
  CHECK_THAT(cholesky_logdet(Matrix::Identity(3, 3)).logdet, WithinAbs(0.0, 1e-15));
  Matrix d = Matrix::Zero(2, 2);
  d(0, 0) = 2;
  d(1, 1) = 8;
  CHECK_THAT(cholesky_logdet(d).logdet, WithinRel(std::log(16.0), 1e-14));
}

TEST_CASE("cholesky_logdet matches eigenvalue sum", "[linalg]") {
  std::mt19937_64 gen(7);
  for (int p : {5, 12, 20}) {
    const Matrix m = testing::random_spd(p, gen);
    const auto c = cholesky_logdet(m);
    Eigen::SelfAdjointEigenSolver<Matrix> es(m);
    CHECK_THAT(c.logdet, WithinAbs(es.eigenvalues().array().log().sum(), 1e-8));
    CHECK((c.factor * c.factor.transpose() - m).norm() < 1e-9 * m.norm());
    CHECK(c.factor.isLowerTriangular());
  }
}

TEST_CASE("negative eigenvalue is rejected", "[linalg]") {
  std::mt19937_64 gen(3);
  Matrix m = testing::random_spd(6, gen);
  Eigen::SelfAdjointEigenSolver<Matrix> es(m);
  Vector ev = es.eigenvalues();
  ev(0) = -0.5;
  m = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
  try {
    cholesky_logdet(m);
    FAIL("expected NotPositiveDefinite");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotPositiveDefinite);
  }
  CHECK_THROWS_AS(SpdMatrix(m), Error);
}

TEST_CASE("SpdMatrix symmetrizes round-off and rejects asymmetry", "[linalg]") {
  Matrix m = Matrix::Identity(3, 3);
  m(0, 1) = 1e-14;
  SpdMatrix s(m);
  CHECK(s.matrix()(0, 1) == s.matrix()(1, 0));
  CHECK_THAT(s.logdet(), WithinAbs(0.0, 1e-12));
  m(0, 1) = 0.3;
  CHECK_THROWS_AS(SpdMatrix(m), Error);
}

TEST_CASE("svd_soft_threshold examples", "[linalg]") {
  Matrix d = Matrix::Zero(2, 2);
  d(0, 0) = 3;
  d(1, 1) = 1;
  Matrix expect = Matrix::Zero(2, 2);
  expect(0, 0) = 2;
  CHECK((svd_soft_threshold(d, 1.0) - expect).norm() < 1e-12);

  std::mt19937_64 gen(11);
  const Matrix m = testing::random_gaussian(4, 3, gen);
  CHECK((svd_soft_threshold(m, 0.0) - m).norm() < 1e-10);

  Vector u = testing::random_gaussian(4, 1, gen).col(0).normalized();
  Vector v = testing::random_gaussian(3, 1, gen).col(0).normalized();
  const Matrix r1 = u * v.transpose();
  CHECK((svd_soft_threshold(r1, 0.5) - 0.5 * r1).norm() < 1e-10);
}

TEST_CASE("svd_soft_threshold is non-expansive", "[linalg]") {
  std::mt19937_64 gen(5);
  for (int t = 0; t < 50; ++t) {
    const Matrix a = testing::random_gaussian(5, 4, gen);
    const Matrix b = testing::random_gaussian(5, 4, gen);
    const double nu = 0.1 * (t % 10);
    CHECK((svd_soft_threshold(a, nu) - svd_soft_threshold(b, nu)).norm() <= (a - b).norm() + 1e-12);
  }
}

TEST_CASE("deterministic_svd sign convention", "[linalg]") {
  std::mt19937_64 gen(9);
  const Matrix m = testing::random_gaussian(6, 4, gen);
  const Svd s = deterministic_svd(m);
  CHECK((s.u * s.sigma.asDiagonal() * s.v.transpose() - m).norm() < 1e-10);
  for (Index j = 0; j < s.u.cols(); ++j) {
    Index first = 0;
    while (std::abs(s.u(first, j)) < 1e-12) ++first;
    CHECK(s.u(first, j) > 0);
  }
  for (Index j = 1; j < s.sigma.size(); ++j) CHECK(s.sigma(j) <= s.sigma(j - 1));
  const Svd again = deterministic_svd(m);
  CHECK(again.u == s.u);
}

TEST_CASE("spectral_norm examples", "[linalg]") {
  CHECK_THAT(spectral_norm(Matrix::Identity(4, 4)), WithinRel(1.0, 1e-12));
  Matrix d = Matrix::Zero(2, 2);
  d(0, 0) = -3;
  d(1, 1) = 2;
  CHECK_THAT(spectral_norm(d), WithinRel(3.0, 1e-12));
  std::mt19937_64 gen(13);
  for (int t = 0; t < 10; ++t) {
    const Matrix m = testing::random_gaussian(5, 3, gen);
    CHECK_THAT(spectral_norm(m), WithinRel(testing::power_iteration_norm(m), 1e-8));
  }
}

TEST_CASE("nuclear norm and best rank approximation", "[linalg]") {
  Matrix d = Matrix::Zero(3, 3);
  d(0, 0) = 3;
  d(1, 1) = 1;
  d(2, 2) = 0.5;
  CHECK_THAT(nuclear_norm(d), WithinRel(4.5, 1e-12));
  const Matrix r2 = best_rank_approximation(d, 2);
  CHECK_THAT(r2(2, 2), WithinAbs(0.0, 1e-12));
  CHECK_THAT(r2(0, 0), WithinRel(3.0, 1e-12));
  std::mt19937_64 gen(17);
  const Matrix m = testing::random_gaussian(8, 6, gen);
  Eigen::JacobiSVD<Matrix> svd(best_rank_approximation(m, 3));
  const Vector sv = svd.singularValues();
  CHECK(sv(2) > 1e-8);
  CHECK(sv(3) < 1e-8);
}

TEST_CASE("asymmetry and symmetrize", "[linalg]") {
  Matrix m(2, 2);
  m << 1, 2, 4, 1;
  CHECK_THAT(asymmetry(m), WithinRel(0.5, 1e-12));
  CHECK(asymmetry(symmetrize(m)) == 0.0);
}
