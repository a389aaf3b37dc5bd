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


#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "torusreal/real_structure.hpp"

namespace torusreal {

/// w -> M w + b on (Lambda (x) R) + (Gamma (x) R), fibre coordinates first.
struct AffineMap {
  QMatrix M;
  QVector b;
};

inline AffineMap compose(const AffineMap& f, const AffineMap& g) {  // f after g
  return {f.M * g.M, f.M * g.b + f.b};
}

inline AffineMap invert(const AffineMap& f) {
  auto inv = inverse(f.M);
  if (!inv) throw PreconditionError("affine map is not invertible");
  return {*inv, -(*inv * f.b)};
}

inline AffineMap lift_map(const RealStructureData& data) {
  const std::size_t f = data.A1.rows(), n = data.A2.rows();
  AffineMap s{QMatrix(f + n, f + n), QVector(f + n)};
  for (std::size_t i = 0; i < f; ++i) {
    for (std::size_t j = 0; j < f; ++j) s.M(i, j) = data.A1(i, j);
    for (std::size_t j = 0; j < n; ++j) s.M(i, f + j) = data.L(i, j);
    s.b[i] = data.d1[i];
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) s.M(f + i, f + j) = data.A2(i, j);
    s.b[f + i] = data.d2[i];
  }
  return s;
}

/// The lattice element over gamma with fibre part l: (y, x) -> (y + A(x, gamma) + l, x + gamma).
inline AffineMap lattice_map(const BundleDatum& datum, const QVector& l, const QVector& gamma) {
  const std::size_t f = datum.fibre_rank(), n = datum.base_rank();
  AffineMap g{QMatrix::identity(f + n), QVector(f + n)};
  const QMatrix phi = form_against(datum.components, gamma);
  for (std::size_t i = 0; i < f; ++i) {
    for (std::size_t j = 0; j < n; ++j) g.M(i, f + j) = phi(i, j);
    g.b[i] = l[i];
  }
  for (std::size_t i = 0; i < n; ++i) g.b[f + i] = gamma[i];
  return g;
}

/// What conjugation by the lift reveals about the orbifold group.
struct ConjugationData {
  QMatrix central_images;               // column k: fibre translation of sigma e_k sigma^-1
  QMatrix base_linear;                  // A2
  QVector base_translation;             // d2
  std::vector<QVector> generator_lifts; // l_j of the chosen lift (l_j, e_j)
  std::vector<QMatrix> generator_shears;        // top-right block of sigma g_j sigma^-1
  std::vector<QVector> generator_translations;  // fibre translation of sigma g_j sigma^-1
  QVector square_translation;           // translation of sigma^2, fibre coordinates first
};

inline ConjugationData emit_conjugation_data(const RealStructureData& data, const BundleDatum& datum,
                                             const std::vector<QVector>& lifts = {}) {
  validate(datum);
  require_shape(data, datum);
  const std::size_t f = datum.fibre_rank(), n = datum.base_rank();
  const AffineMap s = lift_map(data), s_inv = invert(s);
  ConjugationData out;
  out.central_images = QMatrix(f, f);
  for (std::size_t k = 0; k < f; ++k) {
    QVector lambda(f);
    lambda[k] = 1;
    AffineMap c = compose(compose(s, lattice_map(datum, lambda, QVector(n))), s_inv);
    for (std::size_t i = 0; i < f; ++i) out.central_images(i, k) = c.b[i];
  }
  out.base_linear = data.A2;
  out.base_translation = data.d2;
  for (std::size_t j = 0; j < n; ++j) {
    QVector gamma(n);
    gamma[j] = 1;
    QVector l = j < lifts.size() ? lifts[j] : QVector(f);
    AffineMap c = compose(compose(s, lattice_map(datum, l, gamma)), s_inv);
    out.generator_lifts.push_back(l);
    out.generator_shears.push_back(c.M.block(0, f, f, n));
    out.generator_translations.push_back(QVector(c.b.begin(), c.b.begin() + static_cast<std::ptrdiff_t>(f)));
  }
  out.square_translation = compose(s, s).b;
  return out;
}

/// Recovers A1, A2, L, d2 exactly and d1 up to an origin translation in the
/// fibre: the returned d1 is (d1 + A1 d1) / 2, the +1-eigencomponent.
inline RealStructureData reconstruct_from_orbifold(const ConjugationData& conj, const BundleDatum& datum) {
  validate(datum);
  const std::size_t f = datum.fibre_rank(), n = datum.base_rank();
  auto fail = [](const std::string& what) { throw InconsistentDataError(what); };
  if (conj.central_images.rows() != f || conj.central_images.cols() != f) fail("central images must be 2d x 2d");
  if (conj.base_linear.rows() != n || conj.base_linear.cols() != n) fail("base linear part must be 2m x 2m");
  if (conj.base_translation.size() != n) fail("base translation must have length 2m");
  if (conj.generator_translations.size() != n || conj.generator_shears.size() != n || conj.generator_lifts.size() != n)
    fail("need one conjugated generator per base lattice vector");
  if (conj.square_translation.size() != f + n) fail("square translation must have length 2d + 2m");

  RealStructureData data;
  data.A1 = conj.central_images;
  data.A2 = conj.base_linear;
  data.d2 = conj.base_translation;
  if (!data.A1.is_integral() || !(data.A1 * data.A1 == QMatrix::identity(f))) fail("A1 is not an integral involution");
  if (!data.A2.is_integral() || !(data.A2 * data.A2 == QMatrix::identity(n))) fail("A2 is not an integral involution");
  const QMatrix a2_inv = data.A2;  // involution

  data.L = QMatrix(f, n);
  for (std::size_t j = 0; j < n; ++j) {
    QVector gamma(n);
    gamma[j] = 1;
    const QMatrix shear = data.A1 * form_against(datum.components, gamma) * a2_inv;
    if (!(shear == conj.generator_shears[j]))
      fail("shear of conjugated generator " + std::to_string(j) + " differs from A1 A(., e_j) A2^-1");
    if (conj.generator_lifts[j].size() != f || !is_integral(conj.generator_lifts[j]))
      fail("generator lift " + std::to_string(j) + " is not in the fibre lattice");
    QVector column = conj.generator_translations[j] + shear * data.d2 - data.A1 * conj.generator_lifts[j];
    for (std::size_t i = 0; i < f; ++i) data.L(i, j) = column[i];
  }

  const QVector square_y(conj.square_translation.begin(), conj.square_translation.begin() + static_cast<std::ptrdiff_t>(f));
  const QVector square_x(conj.square_translation.begin() + static_cast<std::ptrdiff_t>(f), conj.square_translation.end());
  if (!(square_x == data.A2 * data.d2 + data.d2)) fail("base part of the square is not A2 d2 + d2");
  const QVector fixed = square_y - data.L * data.d2;  // A1 d1 + d1
  if (!(data.A1 * fixed == fixed)) fail("A1 d1 + d1 is not fixed by A1");
  data.d1 = Rational(1, 2) * fixed;
  return data;
}

/// The representative of d1 chosen by reconstruct_from_orbifold.
inline QVector normalize_fibre_translation(const QMatrix& a1, const QVector& d1) {
  return Rational(1, 2) * (d1 + a1 * d1);
}

}  // namespace torusreal
