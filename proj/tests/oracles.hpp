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


// Independent reference computations and seeded generators shared by tests.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

#include "torusreal/rational.hpp"

namespace torusreal::testing {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  long long integer(long long lo, long long hi) {
    return std::uniform_int_distribution<long long>(lo, hi)(engine_);
  }
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
  Rational rational(long long lo, long long hi, long long max_den) {
    return Rational(integer(lo * max_den, hi * max_den), integer(1, max_den));
  }
  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

inline QMatrix random_integer_matrix(Rng& rng, std::size_t r, std::size_t c, long long bound) {
  QMatrix m(r, c);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) m(i, j) = rng.integer(-bound, bound);
  return m;
}

inline QMatrix random_antisymmetric(Rng& rng, std::size_t n, long long bound) {
  QMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      m(i, j) = rng.integer(-bound, bound);
      m(j, i) = -m(i, j);
    }
  return m;
}

inline QVector random_integer_vector(Rng& rng, std::size_t n, long long bound) {
  QVector v(n);
  for (auto& q : v) q = rng.integer(-bound, bound);
  return v;
}

inline QVector random_rational_vector(Rng& rng, std::size_t n, long long bound, long long den) {
  QVector v(n);
  for (auto& q : v) q = rng.rational(-bound, bound, den);
  return v;
}

/// Random unimodular integer matrix as a product of elementary operations.
inline QMatrix random_unimodular(Rng& rng, std::size_t n, int steps) {
  QMatrix u = QMatrix::identity(n);
  for (int s = 0; s < steps; ++s) {
    auto i = static_cast<std::size_t>(rng.integer(0, static_cast<long long>(n) - 1));
    auto j = static_cast<std::size_t>(rng.integer(0, static_cast<long long>(n) - 1));
    if (i == j) continue;
    Rational f = rng.integer(-1, 1);
    for (std::size_t c = 0; c < n; ++c) u(i, c) += f * u(j, c);
  }
  return u;
}

/// Integer involution U diag(signs) U^-1 with U unimodular.
inline QMatrix random_involution(Rng& rng, const std::vector<int>& signs) {
  const std::size_t n = signs.size();
  QMatrix u = random_unimodular(rng, n, 3 * static_cast<int>(n));
  QMatrix d(n, n);
  for (std::size_t i = 0; i < n; ++i) d(i, i) = signs[i];
  return u * d * *inverse(u);
}

/// Pfaffian from the permutation-sum definition
/// Pf(A) = 1/(2^n n!) sum_sigma sgn(sigma) prod a_{sigma(2i-1) sigma(2i)}.
inline Rational pfaffian_by_permutations(const QMatrix& a) {
  const std::size_t n = a.rows();
  if (n % 2 == 1) return 0;
  std::vector<std::size_t> p(n);
  std::iota(p.begin(), p.end(), 0);
  Rational total = 0;
  do {
    int inversions = 0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        if (p[i] > p[j]) ++inversions;
    Rational term = inversions % 2 == 0 ? 1 : -1;
    for (std::size_t i = 0; i < n; i += 2) term *= a(p[i], p[i + 1]);
    total += term;
  } while (std::next_permutation(p.begin(), p.end()));
  Rational norm = 1;
  for (std::size_t k = 1; k <= n / 2; ++k) norm *= 2 * static_cast<long long>(k);
  return total / norm;
}

inline double pfaffian4(const Eigen::Matrix4d& a) {
  return a(0, 1) * a(2, 3) - a(0, 2) * a(1, 3) + a(0, 3) * a(1, 2);
}

/// Sweep of the projective line (l1, l2) = (cos t, sin t), t in [0, pi),
/// looking for sign changes, exact zeros, and near-zero local minima of |q|.
/// Local minima are refined by ternary search and accepted when they fall
/// below kRelativeRootTolerance times max |q|.
inline bool pencil_has_real_root_by_sweep(const QMatrix& a1, const QMatrix& a2, int points = 10000) {
  constexpr double kRelativeRootTolerance = 1e-9;
  const Eigen::Matrix4d m1 = a1.to_eigen(), m2 = a2.to_eigen();
  auto q = [&](double t) { return pfaffian4(std::cos(t) * m1 + std::sin(t) * m2); };
  const double step = M_PI / points;
  std::vector<double> vals(static_cast<std::size_t>(points) + 1);
  double scale = 0;
  for (int i = 0; i <= points; ++i) {
    vals[static_cast<std::size_t>(i)] = q(i * step);
    scale = std::max(scale, std::abs(vals[static_cast<std::size_t>(i)]));
  }
  if (scale == 0) return true;
  for (int i = 0; i <= points; ++i) {
    const double v = vals[static_cast<std::size_t>(i)];
    if (v == 0) return true;
    if (i > 0 && (v > 0) != (vals[static_cast<std::size_t>(i - 1)] > 0)) return true;
  }
  // q(t + pi) = q(t) for m = 2, so the sweep closes up; minima may sit at the seam.
  for (int i = 0; i <= points; ++i) {
    const double left = std::abs(vals[static_cast<std::size_t>(i == 0 ? points - 1 : i - 1)]);
    const double right = std::abs(vals[static_cast<std::size_t>(i == points ? 1 : i + 1)]);
    const double mid = std::abs(vals[static_cast<std::size_t>(i)]);
    if (mid > left || mid > right) continue;
    double lo = (i - 1) * step, hi = (i + 1) * step;
    for (int it = 0; it < 200; ++it) {
      const double t1 = lo + (hi - lo) / 3, t2 = hi - (hi - lo) / 3;
      if (std::abs(q(t1)) < std::abs(q(t2))) hi = t2;
      else lo = t1;
    }
    if (std::abs(q(0.5 * (lo + hi))) <= kRelativeRootTolerance * scale) return true;
  }
  return false;
}

}  // namespace torusreal::testing
