// Copyright 2026 The torusreal Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


// Generators of lifts that satisfy every integral condition, built from
// eigenspace blocks in a random unimodular basis.

#pragma once

#include "oracles.hpp"
#include "torusreal/reconstruction.hpp"

namespace torusreal::testing {

struct RealFixture {
  BundleDatum datum;
  RealStructureData data;
  QMatrix P1, P2;  // unimodular eigenbases, + columns first
  std::size_t p1 = 0, p2 = 0;
};

/// m = d = 1 example: hyperbola B1 B2 = 2 of compatible structures.
inline RealFixture kodaira_fixture() {
  RealFixture fx;
  fx.datum = make_bundle(1, 1, {QMatrix{{0, 1}, {-1, 0}}, QMatrix(2, 2)});
  fx.data.A1 = QMatrix{{-1, 0}, {0, 1}};
  fx.data.A2 = QMatrix{{1, 0}, {0, -1}};
  fx.data.L = QMatrix{{1, 0}, {0, 2}};
  fx.data.d1 = QVector(2);
  fx.data.d2 = QVector(2);
  fx.P1 = QMatrix{{0, 1}, {1, 0}};
  fx.P2 = QMatrix::identity(2);
  fx.p1 = fx.p2 = 1;
  return fx;
}

inline QMatrix change_basis(const QMatrix& p, std::size_t plus) {
  QMatrix d(p.rows(), p.rows());
  for (std::size_t i = 0; i < p.rows(); ++i) d(i, i) = i < plus ? 1 : -1;
  return p * d * *inverse(p);
}

/// Random lift for a nondegenerate A with eigenspaces of dimensions
/// (p2, 2m - p2) and (p1, 2d - p1). Returns nullopt when the draw misses
/// one of the conditions that are not arranged by construction.
inline std::optional<RealFixture> try_random_fixture(Rng& rng, int m, int d, std::size_t p2, std::size_t p1,
                                                     long long bound = 2, bool translations = true) {
  const std::size_t n = static_cast<std::size_t>(2 * m), f = static_cast<std::size_t>(2 * d);
  const std::size_t q2 = n - p2, q1 = f - p1;
  RealFixture fx;
  fx.P1 = random_unimodular(rng, f, static_cast<int>(2 * f));
  fx.P2 = random_unimodular(rng, n, static_cast<int>(2 * n));
  fx.p1 = p1;
  fx.p2 = p2;
  const QMatrix p2_inv = *inverse(fx.P2);

  // eigen-coordinate forms: U+ valued on V+ x V+ and V- x V-, U- valued on the mixed blocks
  std::vector<QMatrix> eig;
  for (std::size_t l = 0; l < f; ++l) {
    QMatrix a(n, n);
    if (l < p1) {
      QMatrix plus = random_antisymmetric(rng, p2, bound), minus = random_antisymmetric(rng, q2, bound);
      for (std::size_t i = 0; i < p2; ++i)
        for (std::size_t j = 0; j < p2; ++j) a(i, j) = plus(i, j);
      for (std::size_t i = 0; i < q2; ++i)
        for (std::size_t j = 0; j < q2; ++j) a(p2 + i, p2 + j) = minus(i, j);
    } else {
      QMatrix dm = random_integer_matrix(rng, q2, p2, bound);
      for (std::size_t i = 0; i < q2; ++i)
        for (std::size_t j = 0; j < p2; ++j) {
          a(p2 + i, j) = dm(i, j);
          a(j, p2 + i) = -dm(i, j);
        }
    }
    eig.push_back(std::move(a));
  }
  std::vector<QMatrix> comps;
  for (std::size_t k = 0; k < f; ++k) {
    QMatrix acc(n, n);
    for (std::size_t l = 0; l < f; ++l) acc += eig[l] * fx.P1(k, l);
    comps.push_back(p2_inv.transpose() * acc * p2_inv);
  }
  fx.datum = make_bundle(m, d, comps);
  if (!is_nondegenerate(fx.datum)) return std::nullopt;
  fx.data.A1 = change_basis(fx.P1, p1);
  fx.data.A2 = change_basis(fx.P2, p2);

  // d2 with A2 d2 + d2 integral: half-integral on V+, free on V-
  QVector coords(n);
  if (translations)
    for (std::size_t i = 0; i < n; ++i) coords[i] = i < p2 ? Rational(rng.integer(-2, 2), 2) : rng.rational(-1, 1, 3);
  const QVector d2 = fx.P2 * coords;
  QVector c(p2);  // d2 + A2 d2 in V+ coordinates
  for (std::size_t j = 0; j < p2; ++j) c[j] = 2 * coords[j];

  // L = N + A(d2, A2 .) with N integral; sigma^2 closes in the group when
  // its shear is A(., d2 + A2 d2), which fixes the diagonal blocks of N
  QMatrix n_eig(f, n);
  for (std::size_t l = 0; l < f; ++l)
    for (std::size_t i = 0; i < n; ++i) {
      const bool plus_row = l < p1, plus_col = i < p2;
      if (plus_row != plus_col) {
        n_eig(l, i) = rng.integer(-bound, bound);
        continue;
      }
      Rational acc = 0;
      for (std::size_t j = 0; j < p2; ++j) acc += eig[l](i, j) * c[j];
      n_eig(l, i) = plus_row ? acc : -acc;
    }
  const QMatrix integral = fx.P1 * n_eig * p2_inv;
  fx.data.d2 = d2;
  fx.data.L = integral;
  for (std::size_t j = 0; j < n; ++j) {
    QVector ej(n);
    ej[j] = 1;
    QVector col = form(fx.datum, d2, fx.data.A2 * ej);
    for (std::size_t i = 0; i < f; ++i) fx.data.L(i, j) += col[i];
  }

  // d1: (A1 + I) d1 = w - L d2 with w integral
  const QMatrix If = QMatrix::identity(f);
  QVector target = fx.data.L * d2;
  auto w = solve(fx.data.A1 - If, fx.data.A1 * target - target);
  if (!w) return std::nullopt;
  if (!is_integral(*w)) return std::nullopt;
  // w - L d2 is fixed by A1; add an integral fixed vector and a free U- part
  QVector plus_coords(f), minus_coords(f);
  for (std::size_t i = 0; i < f; ++i) {
    if (i < p1) plus_coords[i] = rng.integer(-1, 1);
    else if (translations) minus_coords[i] = rng.rational(-1, 1, 4);
  }
  QVector d1 = Rational(1, 2) * (*w + fx.P1 * plus_coords - target) + fx.P1 * minus_coords;
  fx.data.d1 = d1;
  if (!check_integral_conditions(fx.data, fx.datum).all()) return std::nullopt;
  return fx;
}

inline RealFixture random_fixture(Rng& rng, int m, int d, bool translations = true) {
  while (true) {
    auto fx = try_random_fixture(rng, m, d, static_cast<std::size_t>(m), static_cast<std::size_t>(d), 2, translations);
    if (fx) return *fx;
  }
}


// Antiholomorphy checked on the group itself: the right-invariant structure at
// w is S_w J S_w^-1 with S_w = [[I, A(., x_w)], [0, I]], and the lift must
// send it to minus the structure at sigma(w).
inline Eigen::MatrixXd group_shear(const BundleDatum& datum, const Eigen::VectorXd& x) {
  const int f = static_cast<int>(datum.fibre_rank()), n = static_cast<int>(datum.base_rank());
  Eigen::MatrixXd s = Eigen::MatrixXd::Identity(f + n, f + n);
  const auto comps = to_eigen(datum.components);
  for (int k = 0; k < f; ++k) s.block(k, f, 1, n) = (comps[k] * x).transpose();
  return s;
}

inline double group_antiholomorphy_residual(const RealFixture& fx, const ComplexStructurePair& pair, Rng& rng,
                                            int points = 5) {
  const int f = static_cast<int>(fx.datum.fibre_rank()), n = static_cast<int>(fx.datum.base_rank());
  Eigen::MatrixXd lift = Eigen::MatrixXd::Zero(f + n, f + n), j = lift;
  lift.topLeftCorner(f, f) = fx.data.A1.to_eigen();
  lift.topRightCorner(f, n) = fx.data.L.to_eigen();
  lift.bottomRightCorner(n, n) = fx.data.A2.to_eigen();
  j.topLeftCorner(f, f) = pair.J1;
  j.bottomRightCorner(n, n) = pair.J2;
  const Eigen::MatrixXd a2 = fx.data.A2.to_eigen();
  const Eigen::VectorXd d2 = to_eigen(fx.data.d2);
  double worst = 0;
  for (int s = 0; s < points; ++s) {
    Eigen::VectorXd x(n);
    for (int i = 0; i < n; ++i) x(i) = rng.uniform(-2, 2);
    const Eigen::MatrixXd sw = group_shear(fx.datum, x), ss = group_shear(fx.datum, a2 * x + d2);
    const Eigen::MatrixXd jw = sw * j * sw.inverse(), js = ss * j * ss.inverse();
    worst = std::max(worst, (lift * jw + js * lift).cwiseAbs().maxCoeff());
  }
  return worst;
}

}  // namespace torusreal::testing
