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

/// Pfaffian by expansion along the first row. Exponential in size, meant for
/// 2n <= 8. Odd sizes give 0.
inline Rational pfaffian(const QMatrix& a) {
  if (!a.is_square()) throw DimensionError("pfaffian of non-square matrix");
  const std::size_t n = a.rows();
  if (n == 0) return 1;
  if (n % 2 == 1) return 0;
  if (n == 2) return a(0, 1);
  Rational total = 0;
  for (std::size_t j = 1; j < n; ++j) {
    if (a(0, j) == 0) continue;
    std::vector<std::size_t> keep;
    for (std::size_t k = 1; k < n; ++k)
      if (k != j) keep.push_back(k);
    QMatrix minor(n - 2, n - 2);
    for (std::size_t r = 0; r < keep.size(); ++r)
      for (std::size_t c = 0; c < keep.size(); ++c) minor(r, c) = a(keep[r], keep[c]);
    const Rational term = a(0, j) * pfaffian(minor);
    if (j % 2 == 1) total += term;
    else total -= term;
  }
  return total;
}

}  // namespace torusreal
