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


#include "torusreal/lattice.hpp"

#include <gtest/gtest.h>

#include "oracles.hpp"

namespace torusreal {
namespace {

const QMatrix kJstd{{0, 1}, {-1, 0}};

BundleDatum kodaira_datum() { return make_bundle(1, 1, {kJstd, QMatrix(2, 2)}); }

BundleDatum random_datum(testing::Rng& rng, int m, int d, long long bound) {
  std::vector<QMatrix> comps;
  for (int k = 0; k < 2 * d; ++k) comps.push_back(testing::random_antisymmetric(rng, 2 * m, bound));
  return make_bundle(m, d, comps);
}

QVector unit(std::size_t n, std::size_t i) {
  QVector v(n);
  v[i] = 1;
  return v;
}

TEST(Validate, RejectsNonAntisymmetricWithEntryCoordinates) {
  QMatrix bad{{0, 1}, {1, 0}};
  try {
    make_bundle(1, 1, {bad, QMatrix(2, 2)});
    FAIL() << "expected InputError";
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("bundle.A[0]"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("(0,1)"), std::string::npos);
  }
  EXPECT_THROW(make_bundle(1, 1, {kJstd}), InputError);
  EXPECT_THROW(make_bundle(1, 1, {QMatrix{{0, Rational(1, 2)}, {Rational(-1, 2), 0}}, QMatrix(2, 2)}), InputError);
}

TEST(LowerTriangularSplit, ZeroForm) {
  auto norm = lower_triangular_split(make_bundle(1, 1, {QMatrix(2, 2), QMatrix(2, 2)}));
  for (const auto& t : norm.T_minus) EXPECT_TRUE(t.is_zero());
  for (const auto& s : norm.S) EXPECT_TRUE(s.is_zero());
}

TEST(LowerTriangularSplit, StandardSymplecticByHand) {
  auto norm = lower_triangular_split(kodaira_datum());
  EXPECT_EQ(norm.T_minus[0], (QMatrix{{0, 0}, {-1, 0}}));
  EXPECT_EQ(norm.S[0], (QMatrix{{0, Rational(1, 4)}, {Rational(1, 4), 0}}));
  EXPECT_EQ(norm.T_minus[0] - norm.T_minus[0].transpose(), kJstd);
}

TEST(LowerTriangularSplit, ReassemblyAndHalfIntegrality) {
  testing::Rng rng(101);
  for (int trial = 0; trial < 30; ++trial) {
    auto datum = random_datum(rng, 3, 2, 5);
    auto norm = lower_triangular_split(datum);
    for (std::size_t k = 0; k < datum.components.size(); ++k) {
      EXPECT_EQ(norm.T_minus[k] - norm.T_minus[k].transpose(), datum.components[k]);
      EXPECT_EQ(norm.S[k], (norm.T_minus[k] + norm.T_minus[k].transpose()) * Rational(-1, 4));
    }
    const std::size_t n = datum.base_rank();
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i; j < n; ++j) {
        QVector g = unit(n, i) + unit(n, j);
        EXPECT_TRUE(is_integral(Rational(2) * form(norm.S, g, g)));
      }
  }
}

TEST(GroupLaw, IdentityInverseCommutator) {
  auto datum = kodaira_datum();
  auto norm = lower_triangular_split(datum);
  GroupElement e = GroupElement::lattice({0, 0}, {0, 0});
  GroupElement g = GroupElement::point({Rational(1, 3), -2}, {Rational(5, 2), 7});
  EXPECT_EQ(group_multiply(e, g, norm), g);
  EXPECT_EQ(group_multiply(g, group_inverse(g, norm), norm), e);
  EXPECT_EQ(group_multiply(group_inverse(g, norm), g, norm), e);

  GroupElement a = GroupElement::lattice({0, 0}, {1, 0});
  GroupElement b = GroupElement::lattice({0, 0}, {0, 1});
  GroupElement ab = group_multiply(a, b, norm), ba = group_multiply(b, a, norm);
  EXPECT_EQ(ab.x, ba.x);
  // ab = (ba)(A(e1, e2), 0): the two products differ by the central element A(e1, e2) = (1, 0).
  EXPECT_EQ(ab.y - ba.y, (QVector{1, 0}));
  EXPECT_EQ(commutator(a, b, norm), GroupElement::lattice({1, 0}, {0, 0}));
  EXPECT_TRUE(ab.is_lattice);
  EXPECT_FALSE(group_multiply(a, g, norm).is_lattice);
}

TEST(GroupLaw, DimensionMismatchThrows) {
  auto norm = lower_triangular_split(kodaira_datum());
  GroupElement bad = GroupElement::point({0}, {0, 0});
  EXPECT_THROW(group_multiply(bad, bad, norm), DimensionError);
}

TEST(NormalizedAction, TrivialTranslation) {
  auto datum = kodaira_datum();
  auto norm = lower_triangular_split(datum);
  GroupElement p = GroupElement::point({3, Rational(-1, 2)}, {Rational(2, 3), 1});
  GroupElement zero = GroupElement::lattice({0, 0}, {0, 0});
  EXPECT_EQ(normalized_action(zero, p, datum, norm), p);
  EXPECT_THROW(normalized_action(p, p, datum, norm), PreconditionError);
}

TEST(NormalizedAction, HandValueAndPsiCrossCheck) {
  auto datum = kodaira_datum();
  auto norm = lower_triangular_split(datum);
  GroupElement gamma = GroupElement::lattice({0, 0}, {1, 0});
  GroupElement p = GroupElement::point({0, 0}, {0, 1});
  auto out = normalized_action(gamma, p, datum, norm);
  // A(e2, e1) + 2 S(e1, e1) = (-1, 0) + 0
  EXPECT_EQ(out.y, (QVector{-1, 0}));
  EXPECT_EQ(out.x, (QVector{1, 1}));
  auto via_group = psi(group_multiply(psi_inverse(p, norm), gamma, norm), norm);
  EXPECT_EQ(out, via_group);
}

TEST(IsNondegenerate, Examples) {
  EXPECT_FALSE(is_nondegenerate(make_bundle(1, 1, {QMatrix(2, 2), QMatrix(2, 2)})));
  EXPECT_TRUE(is_nondegenerate(kodaira_datum()));
  // Both components vanish on the common kernel vector e4.
  QMatrix a1{{0, 1, 0, 0}, {-1, 0, 2, 0}, {0, -2, 0, 0}, {0, 0, 0, 0}};
  QMatrix a2{{0, 0, 3, 0}, {0, 0, 0, 0}, {-3, 0, 0, 0}, {0, 0, 0, 0}};
  auto datum = make_bundle(2, 1, {a1, a2});
  EXPECT_TRUE(is_zero(a1 * QVector{0, 0, 0, 1}));
  EXPECT_TRUE(is_zero(a2 * QVector{0, 0, 0, 1}));
  EXPECT_FALSE(is_nondegenerate(datum));
}

QMatrix antisym4(const Rational& a01, const Rational& a02, const Rational& a03, const Rational& a12,
                 const Rational& a13, const Rational& a23) {
  return QMatrix{{0, a01, a02, a03}, {-a01, 0, a12, a13}, {-a02, -a12, 0, a23}, {-a03, -a13, -a23, 0}};
}

TEST(PfaffianReality, Examples) {
  QMatrix sym = antisym4(1, 0, 0, 0, 0, 1);  // Pf = 1
  EXPECT_TRUE(pfaffian_reality(make_bundle(2, 1, {sym, QMatrix(4, 4)})));

  // Pf(l1 A1 + l2 A2) = l1^2 + l2^2
  QMatrix b2 = antisym4(0, 1, 0, 0, -1, 0);
  auto positive = make_bundle(2, 1, {sym, b2});
  auto q = pfaffian_quadratic(positive);
  EXPECT_EQ(q.a, Rational(1));
  EXPECT_EQ(q.b, Rational(0));
  EXPECT_EQ(q.c, Rational(1));
  EXPECT_FALSE(pfaffian_reality(positive));
  EXPECT_FALSE(pfaffian_reality_sturm(positive));

  // Pf = l1 l2
  auto hyperbolic = make_bundle(2, 1, {antisym4(1, 0, 0, 0, 0, 0), antisym4(0, 0, 0, 0, 0, 1)});
  q = pfaffian_quadratic(hyperbolic);
  EXPECT_EQ(q.a, Rational(0));
  EXPECT_EQ(q.b, Rational(1));
  EXPECT_EQ(q.c, Rational(0));
  EXPECT_TRUE(pfaffian_reality(hyperbolic));
  EXPECT_TRUE(pfaffian_reality_sturm(hyperbolic));

  testing::Rng rng(1);
  EXPECT_THROW(pfaffian_reality(random_datum(rng, 1, 2, 2)), PreconditionError);
}

TEST(PfaffianReality, KodairaDatumHasRoot) { EXPECT_TRUE(pfaffian_reality(kodaira_datum())); }

// ---------------------------------------------------------------------------
// Properties

TEST(GroupLawProperty, AssociativityCentralityCommutator) {
  testing::Rng rng(2024);
  for (int trial = 0; trial < 100; ++trial) {
    auto datum = random_datum(rng, 2, 1, 4);
    auto norm = lower_triangular_split(datum);
    auto rp = [&] {
      return GroupElement::point(testing::random_rational_vector(rng, 2, 5, 6),
                                 testing::random_rational_vector(rng, 4, 5, 6));
    };
    GroupElement g = rp(), h = rp(), k = rp();
    EXPECT_EQ(group_multiply(group_multiply(g, h, norm), k, norm), group_multiply(g, group_multiply(h, k, norm), norm));
    GroupElement c = GroupElement::point(testing::random_rational_vector(rng, 2, 5, 6), QVector(4));
    EXPECT_EQ(group_multiply(c, g, norm), group_multiply(g, c, norm));
    GroupElement lg = GroupElement::lattice(testing::random_integer_vector(rng, 2, 4),
                                            testing::random_integer_vector(rng, 4, 4));
    GroupElement lh = GroupElement::lattice(testing::random_integer_vector(rng, 2, 4),
                                            testing::random_integer_vector(rng, 4, 4));
    EXPECT_EQ(commutator(lg, lh, norm), GroupElement::lattice(form(datum, lg.x, lh.x), QVector(4)));
  }
}

TEST(GroupLawProperty, CommutatorOnBasisPairs) {
  testing::Rng rng(7);
  auto datum = random_datum(rng, 3, 1, 5);
  auto norm = lower_triangular_split(datum);
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t j = 0; j < 6; ++j) {
      auto g = GroupElement::lattice(QVector(2), unit(6, i));
      auto h = GroupElement::lattice(QVector(2), unit(6, j));
      EXPECT_EQ(commutator(g, h, norm).y, form(datum, unit(6, i), unit(6, j)));
    }
}

TEST(NormalizedActionProperty, PsiConjugation) {
  testing::Rng rng(99);
  for (int trial = 0; trial < 100; ++trial) {
    auto datum = random_datum(rng, 2, 1, 4);
    auto norm = lower_triangular_split(datum);
    auto gamma = GroupElement::lattice(testing::random_integer_vector(rng, 2, 3),
                                       testing::random_integer_vector(rng, 4, 3));
    auto p = GroupElement::point(testing::random_rational_vector(rng, 2, 5, 7),
                                 testing::random_rational_vector(rng, 4, 5, 7));
    auto conj = psi(group_multiply(psi_inverse(p, norm), gamma, norm), norm);
    EXPECT_EQ(normalized_action(gamma, p, datum, norm), conj);
  }
}

TEST(PfaffianRealityProperty, MatchesDiscriminantSignOracle) {
  testing::Rng rng(404);
  int real = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    auto datum = random_datum(rng, 2, 1, 2);
    const QMatrix& a1 = datum.components[0];
    const QMatrix& a2 = datum.components[1];
    // Mixed coefficient from the explicit 4x4 Pfaffian expansion.
    auto pf = [](const QMatrix& a) { return a(0, 1) * a(2, 3) - a(0, 2) * a(1, 3) + a(0, 3) * a(1, 2); };
    Rational mixed = a1(0, 1) * a2(2, 3) + a2(0, 1) * a1(2, 3) - a1(0, 2) * a2(1, 3) - a2(0, 2) * a1(1, 3) +
                     a1(0, 3) * a2(1, 2) + a2(0, 3) * a1(1, 2);
    const bool expected = mixed * mixed - 4 * pf(a1) * pf(a2) >= 0;
    EXPECT_EQ(pfaffian_reality(datum), expected);
    EXPECT_EQ(pfaffian_reality_sturm(datum), expected);
    real += expected;
  }
  EXPECT_GT(real, 0);
  EXPECT_LT(real, 1000);
}

TEST(PfaffianRealityProperty, SturmOnBlockDiagonalPencils) {
  // Pf(t A1 + A2) of a block-diagonal pencil is the product of the block
  // entries, so the roots are known. m = 3 forms have odd degree; m = 4 can
  // have none.
  auto block3 = [](const Rational& x, const Rational& y, const Rational& z) {
    QMatrix a(6, 6);
    a(0, 1) = x; a(1, 0) = -x;
    a(2, 3) = y; a(3, 2) = -y;
    a(4, 5) = z; a(5, 4) = -z;
    return a;
  };
  // (t + 1)(t + 2)(t + 3): real roots
  EXPECT_TRUE(pfaffian_reality(make_bundle(3, 1, {block3(1, 1, 1), block3(1, 2, 3)})));
  // A pencil with Pf(t A1 + A2) = t^3 + ... : odd degree always has a root.
  EXPECT_TRUE(pfaffian_reality(make_bundle(3, 1, {block3(1, 1, 1), block3(0, 0, 1)})));

  auto block4 = [](const std::vector<Rational>& e) {
    QMatrix a(8, 8);
    for (std::size_t k = 0; k < 4; ++k) {
      a(2 * k, 2 * k + 1) = e[k];
      a(2 * k + 1, 2 * k) = -e[k];
    }
    return a;
  };
  // (t^2 + 1)^2 written as (t + i)(t - i)(t + i)(t - i) is not block diagonal
  // over Q; use a rotation block pair instead: Pf of [[0, t, 1, 0], ...].
  QMatrix r1(8, 8), r2(8, 8);
  for (std::size_t b = 0; b < 2; ++b) {
    const std::size_t o = 4 * b;
    // 4x4 block with Pf = t^2 + 1: a01 = t, a23 = t, a02 = 1, a13 = -1
    r1(o, o + 1) = 1; r1(o + 2, o + 3) = 1;
    r2(o, o + 2) = 1; r2(o + 1, o + 3) = -1;
  }
  r1 = r1 - r1.transpose();
  r2 = r2 - r2.transpose();
  auto no_root = make_bundle(4, 1, {r1, r2});
  EXPECT_EQ(pfaffian_pencil(no_root).coefficients(), (std::vector<Rational>{1, 0, 2, 0, 1}));
  EXPECT_FALSE(pfaffian_reality(no_root));
  EXPECT_TRUE(pfaffian_reality(make_bundle(4, 1, {block4({1, 1, 1, 1}), block4({1, -2, 3, 0})})));
}

}  // namespace
}  // namespace torusreal
