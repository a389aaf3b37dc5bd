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
#include <utility>
#include <vector>

#include "torusreal/pfaffian.hpp"
#include "torusreal/polynomial.hpp"
#include "torusreal/rational.hpp"

namespace torusreal {

/// Ranks (m, d) and the alternating form A : Gamma x Gamma -> Lambda, stored
/// as 2d integer antisymmetric 2m x 2m matrices, one per standard basis vector
/// of Lambda: A(x, y)_k = x^T components[k] y.
struct BundleDatum {
  int m = 0;
  int d = 0;
  std::vector<QMatrix> components;

  std::size_t base_rank() const { return static_cast<std::size_t>(2 * m); }
  std::size_t fibre_rank() const { return static_cast<std::size_t>(2 * d); }
};

/// Throws InputError naming the first offending entry.
inline void validate(const BundleDatum& datum) {
  if (datum.m <= 0 || datum.d <= 0) throw InputError("m and d must be positive", "bundle");
  if (datum.components.size() != datum.fibre_rank())
    throw InputError("expected " + std::to_string(datum.fibre_rank()) + " component matrices, got " +
                         std::to_string(datum.components.size()),
                     "bundle.A");
  for (std::size_t k = 0; k < datum.components.size(); ++k) {
    const QMatrix& a = datum.components[k];
    const std::string where = "bundle.A[" + std::to_string(k) + "]";
    if (a.rows() != datum.base_rank() || a.cols() != datum.base_rank())
      throw InputError("component must be " + std::to_string(datum.base_rank()) + "x" +
                           std::to_string(datum.base_rank()),
                       where);
    for (std::size_t i = 0; i < a.rows(); ++i)
      for (std::size_t j = 0; j < a.cols(); ++j) {
        if (!is_integer(a(i, j)))
          throw InputError("entry (" + std::to_string(i) + "," + std::to_string(j) + ") is not an integer",
                           where);
        if (a(i, j) != -a(j, i))
          throw InputError("not antisymmetric at entry (" + std::to_string(i) + "," + std::to_string(j) +
                               "): " + to_string(a(i, j)) + " vs " + to_string(a(j, i)),
                           where);
      }
  }
}

inline BundleDatum make_bundle(int m, int d, std::vector<QMatrix> components) {
  BundleDatum datum{m, d, std::move(components)};
  validate(datum);
  return datum;
}

/// A(x, y) as a vector of length 2d.
inline QVector form(const BundleDatum& datum, const QVector& x, const QVector& y) {
  QVector out(datum.fibre_rank());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = bilinear(x, datum.components[k], y);
  return out;
}

/// Same form evaluated with the given component list (used for T-, S).
inline QVector form(const std::vector<QMatrix>& comps, const QVector& x, const QVector& y) {
  QVector out(comps.size());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = bilinear(x, comps[k], y);
  return out;
}

/// Matrix of x -> A(x, gamma), size 2d x 2m.
inline QMatrix form_with_fixed_right(const BundleDatum& datum, const QVector& gamma) {
  QMatrix phi(datum.fibre_rank(), datum.base_rank());
  for (std::size_t k = 0; k < datum.fibre_rank(); ++k) {
    QVector row = datum.components[k] * gamma;
    for (std::size_t j = 0; j < row.size(); ++j) phi(k, j) = row[j];
  }
  return phi;
}

struct NormalizationDatum {
  std::vector<QMatrix> T_minus;  // strictly lower triangular parts
  std::vector<QMatrix> S;        // -(T- + T-^T)/4
};

inline NormalizationDatum lower_triangular_split(const BundleDatum& datum) {
  NormalizationDatum norm;
  for (const QMatrix& a : datum.components) {
    QMatrix t(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
      for (std::size_t j = 0; j < i; ++j) t(i, j) = a(i, j);
    QMatrix s = (t + t.transpose()) * Rational(-1, 4);
    norm.T_minus.push_back(std::move(t));
    norm.S.push_back(std::move(s));
  }
  return norm;
}

/// Point (y, x) of the real Lie group; y in Lambda (x) R, x in Gamma (x) R.
struct GroupElement {
  QVector y;
  QVector x;
  bool is_lattice = false;

  static GroupElement lattice(QVector y, QVector x) {
    if (!is_integral(y) || !is_integral(x)) throw PreconditionError("lattice element needs integer coordinates");
    return {std::move(y), std::move(x), true};
  }
  static GroupElement point(QVector y, QVector x) { return {std::move(y), std::move(x), false}; }

  friend bool operator==(const GroupElement& a, const GroupElement& b) { return a.y == b.y && a.x == b.x; }
};

namespace detail {
inline void require_shape(const GroupElement& g, const NormalizationDatum& norm) {
  const std::size_t fibre = norm.T_minus.size();
  const std::size_t base = fibre ? norm.T_minus.front().rows() : 0;
  if (g.y.size() != fibre || g.x.size() != base) throw DimensionError("group element has wrong dimensions");
}
}  // namespace detail

/// (y, x)(y', x') = (y + y' + T-(x, x'), x + x').
inline GroupElement group_multiply(const GroupElement& g, const GroupElement& h, const NormalizationDatum& norm) {
  detail::require_shape(g, norm);
  detail::require_shape(h, norm);
  GroupElement out{g.y + h.y + form(norm.T_minus, g.x, h.x), g.x + h.x, g.is_lattice && h.is_lattice};
  return out;
}

inline GroupElement group_inverse(const GroupElement& g, const NormalizationDatum& norm) {
  detail::require_shape(g, norm);
  return {-g.y + form(norm.T_minus, g.x, g.x), -g.x, g.is_lattice};
}

/// g h g^-1 h^-1
inline GroupElement commutator(const GroupElement& g, const GroupElement& h, const NormalizationDatum& norm) {
  return group_multiply(group_multiply(g, h, norm), group_multiply(group_inverse(g, norm), group_inverse(h, norm), norm),
                        norm);
}

/// Psi(y, x) = (2(y + S(x, x)), x) and its inverse.
inline GroupElement psi(const GroupElement& p, const NormalizationDatum& norm) {
  return {Rational(2) * (p.y + form(norm.S, p.x, p.x)), p.x, false};
}
inline GroupElement psi_inverse(const GroupElement& p, const NormalizationDatum& norm) {
  return {Rational(1, 2) * p.y - form(norm.S, p.x, p.x), p.x, false};
}

/// Right action of a lattice element (l, gamma) in the normalized chart:
/// (eta, x) -> (eta + 2l + A(x, gamma) + 2S(gamma, gamma), x + gamma).
/// For l = 0 this is the textbook formula; a nonzero l enters doubled because
/// the chart scales the fibre by 2.
inline GroupElement normalized_action(const GroupElement& gamma_hat, const GroupElement& p, const BundleDatum& datum,
                                      const NormalizationDatum& norm) {
  if (!gamma_hat.is_lattice) throw PreconditionError("normalized_action needs a lattice element");
  detail::require_shape(gamma_hat, norm);
  detail::require_shape(p, norm);
  const QVector& gamma = gamma_hat.x;
  QVector y = p.y + Rational(2) * gamma_hat.y + form(datum, p.x, gamma) + Rational(2) * form(norm.S, gamma, gamma);
  return {std::move(y), p.x + gamma, false};
}

/// Stacked matrix of all components has full column rank 2m over Q.
inline bool is_nondegenerate(const BundleDatum& datum) {
  const std::size_t n = datum.base_rank();
  QMatrix stacked(n * datum.components.size(), n);
  for (std::size_t k = 0; k < datum.components.size(); ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) stacked(k * n + i, j) = datum.components[k](i, j);
  return rank(stacked) == n;
}

/// Coefficients of the binary form Pf(l1 A_1 + l2 A_2) in the dehomogenized
/// variable t = l1 / l2: p(t) = Pf(t A_1 + A_2), degree <= m. Found by exact
/// interpolation at t = 0..m.
inline Polynomial pfaffian_pencil(const BundleDatum& datum) {
  if (datum.d != 1) throw PreconditionError("pfaffian reality is defined for d = 1");
  const auto m = static_cast<std::size_t>(datum.m);
  std::vector<Rational> xs, ys;
  for (std::size_t t = 0; t <= m; ++t) {
    Rational tq(static_cast<long long>(t));
    xs.push_back(tq);
    ys.push_back(pfaffian(datum.components[0] * tq + datum.components[1]));
  }
  return interpolate(xs, ys);
}

/// Exact decision through a Sturm chain, valid for every m.
inline bool pfaffian_reality_sturm(const BundleDatum& datum) {
  Polynomial p = pfaffian_pencil(datum);
  if (p.is_zero()) return true;
  // The l1^m coefficient is Pf(A_1); if it vanishes (1, 0) is a root.
  if (p.degree() < datum.m) return true;
  return count_real_roots(p) > 0;
}

/// Binary quadratic form a l1^2 + b l1 l2 + c l2^2 for m = 2.
struct PfaffianQuadratic {
  Rational a, b, c;
  Rational discriminant() const { return b * b - 4 * a * c; }
};

inline PfaffianQuadratic pfaffian_quadratic(const BundleDatum& datum) {
  if (datum.d != 1 || datum.m != 2) throw PreconditionError("quadratic Pfaffian form needs m = 2, d = 1");
  const QMatrix& a1 = datum.components[0];
  const QMatrix& a2 = datum.components[1];
  Rational a = pfaffian(a1), c = pfaffian(a2);
  return {a, pfaffian(a1 + a2) - a - c, c};
}

/// True iff Pf(l1 A_1 + l2 A_2) has a nonzero real root (l1, l2).
inline bool pfaffian_reality(const BundleDatum& datum) {
  if (datum.d != 1) throw PreconditionError("pfaffian reality is defined for d = 1");
  if (datum.m == 2) return pfaffian_quadratic(datum).discriminant() >= 0;
  return pfaffian_reality_sturm(datum);
}

}  // namespace torusreal
