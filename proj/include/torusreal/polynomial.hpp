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
#include <vector>

#include "torusreal/rational.hpp"

namespace torusreal {

/// Univariate polynomial over Q, coefficients from low to high degree.
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(std::vector<Rational> coeffs) : c_(std::move(coeffs)) { trim(); }

  int degree() const { return static_cast<int>(c_.size()) - 1; }  // -1 for zero
  bool is_zero() const { return c_.empty(); }
  const std::vector<Rational>& coefficients() const { return c_; }
  Rational coefficient(std::size_t k) const { return k < c_.size() ? c_[k] : Rational(0); }
  const Rational& leading() const { return c_.back(); }

  Rational operator()(const Rational& x) const {
    Rational acc = 0;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + *it;
    return acc;
  }
  double operator()(double x) const {
    double acc = 0;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + to_double(*it);
    return acc;
  }

  Polynomial derivative() const {
    std::vector<Rational> d;
    for (std::size_t k = 1; k < c_.size(); ++k) d.push_back(c_[k] * static_cast<long long>(k));
    return Polynomial(std::move(d));
  }

  /// Remainder of division by a nonzero divisor.
  Polynomial remainder(const Polynomial& divisor) const {
    if (divisor.is_zero()) throw PreconditionError("polynomial division by zero");
    std::vector<Rational> r = c_;
    const int dd = divisor.degree();
    while (static_cast<int>(r.size()) - 1 >= dd && !r.empty()) {
      Rational f = r.back() / divisor.leading();
      const std::size_t shift = r.size() - 1 - static_cast<std::size_t>(dd);
      for (int k = 0; k <= dd; ++k) r[shift + static_cast<std::size_t>(k)] -= f * divisor.c_[static_cast<std::size_t>(k)];
      r.pop_back();
      while (!r.empty() && r.back() == 0) r.pop_back();
    }
    return Polynomial(std::move(r));
  }

  Polynomial operator-() const {
    std::vector<Rational> n = c_;
    for (auto& q : n) q = -q;
    return Polynomial(std::move(n));
  }

 private:
  void trim() {
    while (!c_.empty() && c_.back() == 0) c_.pop_back();
  }
  std::vector<Rational> c_;
};

/// Sturm chain p, p', -rem(p, p'), ...
inline std::vector<Polynomial> sturm_chain(const Polynomial& p) {
  std::vector<Polynomial> chain;
  if (p.is_zero()) return chain;
  chain.push_back(p);
  Polynomial d = p.derivative();
  if (d.is_zero()) return chain;
  chain.push_back(d);
  while (true) {
    Polynomial r = -chain[chain.size() - 2].remainder(chain.back());
    if (r.is_zero()) break;
    chain.push_back(std::move(r));
  }
  return chain;
}

namespace detail {
inline int sign_changes(const std::vector<int>& signs) {
  int changes = 0, last = 0;
  for (int s : signs) {
    if (s == 0) continue;
    if (last != 0 && s != last) ++changes;
    last = s;
  }
  return changes;
}
}  // namespace detail

/// Number of distinct real roots of a nonzero polynomial.
inline int count_real_roots(const Polynomial& p) {
  if (p.is_zero()) throw PreconditionError("zero polynomial has infinitely many roots");
  auto chain = sturm_chain(p);
  std::vector<int> at_minus, at_plus;
  for (const auto& q : chain) {
    const int lead = sign(q.leading());
    at_plus.push_back(lead);
    at_minus.push_back(q.degree() % 2 == 0 ? lead : -lead);
  }
  return detail::sign_changes(at_minus) - detail::sign_changes(at_plus);
}

/// Exact Lagrange interpolation through (xs[i], ys[i]) with distinct xs.
inline Polynomial interpolate(const std::vector<Rational>& xs, const std::vector<Rational>& ys) {
  const std::size_t n = xs.size();
  QMatrix vandermonde(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    Rational pw = 1;
    for (std::size_t j = 0; j < n; ++j) {
      vandermonde(i, j) = pw;
      pw *= xs[i];
    }
  }
  auto c = solve(vandermonde, ys);
  if (!c) throw PreconditionError("interpolation nodes are not distinct");
  return Polynomial(*c);
}

}  // namespace torusreal
