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

// Acceptance suite: one line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "real_oracles.hpp"
#include "solver_oracles.hpp"
#include "structure_oracles.hpp"
#include "torusreal/torusreal.hpp"

namespace {

using namespace torusreal;
using testing::Rng;

struct Outcome {
  bool pass = true;
  std::string detail;
};

// Tolerances and limits of the criteria.
constexpr double kTensorTrigger = 1e-10;
constexpr double kTensorBound = 1e-8;
constexpr double kKodairaGridThreshold = 1e-6;
constexpr double kQuadricBound = 1e-9;
constexpr double kQuadricGridGap = 1e-3;
constexpr double kRiemannAgreement = 1e-10;
constexpr double kRiemannVanishing = 1e-12;
constexpr double kDecompositionBound = 1e-12;
constexpr int kSweepPoints = 10000;
constexpr int kCertificateSamples = 20;

std::string format(const char* fmt, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, fmt, args...);
  return buf;
}

// Paths must stay on the solution set and inside b > 0, det B > 0 by the
// oracle's own residual formulas.
bool paths_verify(const ConstraintSystem& sys, const ConnectivityCertificate& cert) {
  const testing::Blocks k = testing::blocks_of(sys);
  for (const auto& p : cert.paths)
    for (const auto& z : p.vertices) {
      if (testing::block_residual(k, z).cwiseAbs().maxCoeff() > kPathTolerance) return false;
      const Eigen::MatrixXd B = to_structure(z, sys.m).B2;
      if (z(0) <= 0 || B.determinant() <= 0) return false;
    }
  return true;
}

Outcome tensor_equivalence() {
  Rng rng(1);
  int triggered = 0, violations = 0;
  double worst = 0;
  using M = Eigen::MatrixXd;
  for (int trial = 0; trial < 1000; ++trial) {
    const Eigen::Matrix2d b2 = testing::random_frame(rng, 2);
    const M b1 = M::Constant(1, 1, rng.uniform(0.2, 3));
    const Eigen::Matrix2d d = Eigen::Matrix2d::NullaryExpr([&](Eigen::Index, Eigen::Index) { return rng.uniform(-2, 2); });
    const double a_plus = rng.uniform(-2, 2);
    Eigen::Matrix2d ap;
    ap << 0, a_plus, -a_plus, 0;
    Eigen::Matrix2d am;
    if (trial % 2 == 0) {
      // on the solution set: A- chosen through (b1, b2)
      const Eigen::Matrix2d db = d * b2;
      am = b2.transpose() * ap * b2 - b1(0, 0) * (db - db.transpose());
    } else {
      const double a_minus = rng.uniform(-2, 2);
      am << 0, a_minus, -a_minus, 0;
    }
    const auto split = split_from_blocks({ap}, {am}, {d}, M::Zero(1, 2), M::Zero(1, 2), M::Zero(1, 2), M::Zero(1, 2));
    const TensorResiduals t = tensor_equations_residuals(split, {b1, b2});
    if (t.values[1] > kTensorTrigger) continue;
    ++triggered;
    for (int e : {0, 2, 3}) {
      worst = std::max(worst, t.values[static_cast<std::size_t>(e)]);
      if (t.values[static_cast<std::size_t>(e)] > kTensorBound) ++violations;
    }
  }
  return {violations == 0 && triggered >= 400,
          format("%d of 1000 with eq2 <= 1e-10, worst other residual %.2e", triggered, worst)};
}

Outcome kodaira_connectivity() {
  Rng rng(2);
  int mismatches = 0, nonempty = 0, disconnected = 0;
  std::map<std::string, int> shapes;
  for (int trial = 0; trial < 100; ++trial) {
    ConstraintSystem sys = testing::random_kodaira_system(rng);
    auto magnitude = [&] { return Rational(rng.integer(1, 3)); };
    auto sign = [&] { return Rational(rng.integer(0, 1) == 0 ? 1 : -1); };
    if (trial % 4 == 1) {
      // dense draws: every block a nonzero integer in [-3, 3]
      sys.l_pp = {sign() * magnitude()};
      sys.l_pm = {sign() * magnitude()};
      sys.l_mp = {sign() * magnitude()};
      sys.l_mm = {sign() * magnitude()};
    } else if (trial % 4 == 3) {
      // sign patterns with solutions: a point, a hyperbola, a half-line
      const Rational s1 = sign(), s2 = sign();
      const int pattern = (trial / 4) % 3;
      sys.l_pp = {pattern == 1 ? Rational(0) : s1 * magnitude()};
      sys.l_mm = {pattern == 1 ? Rational(0) : -s1 * magnitude()};
      sys.l_pm = {pattern == 2 ? Rational(0) : s2 * magnitude()};
      sys.l_mp = {pattern == 2 ? Rational(0) : s2 * magnitude()};
    }
    const SolutionSet set = solve_kodaira(sys, static_cast<std::uint64_t>(trial));
    const testing::KodairaGridResult grid = testing::kodaira_grid(sys, kKodairaGridThreshold);
    const std::string shape = testing::kodaira_shape(set);
    ++shapes[shape];
    if (shape != grid.shape || set.empty != (grid.shape == "empty")) ++mismatches;
    if (set.empty) continue;
    ++nonempty;
    const auto cert = connectivity_certificate(sys, kCertificateSamples, static_cast<std::uint64_t>(trial));
    if (cert.component_count != 1 || !paths_verify(sys, cert)) ++disconnected;
  }
  std::string mix;
  for (const auto& [shape, count] : shapes) mix += " " + shape + "=" + std::to_string(count);
  return {mismatches == 0 && disconnected == 0,
          format("%d grid mismatches, %d nonempty, %d not certified;", mismatches, nonempty, disconnected) + mix};
}

Outcome threefold_connectivity() {
  Rng rng(3);
  int nonempty = 0, disconnected = 0, tried = 0;
  std::map<std::string, int> leaves;
  for (; tried < 2000 && nonempty < 60; ++tried) {
    const ConstraintSystem sys = testing::random_threefold_system(rng, tried);
    if (solve_threefold(sys).empty) continue;
    ++nonempty;
    const auto cert = connectivity_certificate(sys, kCertificateSamples, static_cast<std::uint64_t>(tried));
    ++leaves[cert.case_label];
    if (cert.component_count != 1 || !paths_verify(sys, cert)) ++disconnected;
  }
  return {nonempty >= 50 && disconnected == 0,
          format("%d nonempty of %d drawn, %d not certified, %zu leaves", nonempty, tried, disconnected, leaves.size())};
}

Outcome untwisted_quadric() {
  int failures = 0, samples = 0;
  double worst = 0;
  for (long long a_plus = -3; a_plus <= 3; ++a_plus)
    for (long long a_minus = -3; a_minus <= 3; ++a_minus) {
      ConstraintSystem sys;
      sys.a_plus = a_plus;
      sys.a_minus = a_minus;
      sys.D = QMatrix(2, 2);
      sys.l_pp = sys.l_pm = sys.l_mp = sys.l_mm = QVector(2);
      const SolutionSet set = solve_threefold(sys);
      if (a_plus == 0) {
        if (set.empty != (a_minus != 0)) ++failures;
        continue;
      }
      const double ratio = static_cast<double>(a_minus) / static_cast<double>(a_plus);
      if (ratio > 0) {
        if (set.empty) {
          ++failures;
          continue;
        }
        for (const auto& w : sample_solutions(sys, set, 100, static_cast<std::uint64_t>(a_plus * 10 + a_minus)).witnesses) {
          ++samples;
          worst = std::max(worst, std::abs(w.cs.B2.determinant() - ratio));
        }
        continue;
      }
      if (!set.empty) ++failures;
      // grid oracle: nothing with b in {1/4, 1, 4}, B in [-5, 5]^4, det B > 0 solves the equation
      const testing::Blocks k = testing::blocks_of(sys);
      double best = 1e9;
      Eigen::VectorXd z(5);
      for (double b : {0.25, 1.0, 4.0})
        for (int i = 0; i <= 20; ++i)
          for (int j = 0; j <= 20; ++j)
            for (int l = 0; l <= 20; ++l)
              for (int n = 0; n <= 20; ++n) {
                z << b, -5 + 0.5 * i, -5 + 0.5 * j, -5 + 0.5 * l, -5 + 0.5 * n;
                if (z(1) * z(4) - z(2) * z(3) <= 0) continue;
                best = std::min(best, testing::block_residual(k, z).cwiseAbs().maxCoeff());
              }
      if (best <= kQuadricGridGap) ++failures;
    }
  return {failures == 0 && worst <= kQuadricBound && samples > 0,
          format("%d samples, worst |det B - a-/a+| %.2e, %d case failures", samples, worst, failures)};
}

Outcome reconstruction_round_trip() {
  Rng rng(5);
  int failures = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const int m = trial % 3 == 0 ? 1 : 2, d = trial % 5 == 0 ? 2 : 1;
    const auto fx = testing::random_fixture(rng, m, d);
    std::vector<QVector> lifts;
    for (std::size_t j = 0; j < fx.datum.base_rank(); ++j)
      lifts.push_back(testing::random_integer_vector(rng, fx.datum.fibre_rank(), 2));
    const auto back = reconstruct_from_orbifold(emit_conjugation_data(fx.data, fx.datum, lifts), fx.datum);
    const bool same = back.A1 == fx.data.A1 && back.A2 == fx.data.A2 && back.L == fx.data.L &&
                      back.d2 == fx.data.d2 && back.d1 == normalize_fibre_translation(fx.data.A1, fx.data.d1);
    failures += !same;
  }
  return {failures == 0, format("%d of 100 differ after normalizing d1", failures)};
}

Outcome riemann_formulations() {
  Rng rng(6);
  double worst_gap = 0, worst_rank_one = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int m = trial % 2 == 0 ? 2 : 1;
    const BundleDatum datum = testing::random_bundle(rng, m, 1, 3);
    std::optional<ComplexStructurePair> pair;
    if (m == 2 && trial % 4 == 0) pair = testing::random_valid_pair(rng, datum);
    if (!pair)
      pair = make_structure_pair(testing::random_complex_structure(rng, 2), testing::random_complex_structure(rng, 2 * m));
    const RiemannResidual r = riemann_residuals(datum, *pair);
    worst_gap = std::max(worst_gap, std::abs(r.component_route - r.identity_route));
    if (m == 1) worst_rank_one = std::max(worst_rank_one, r.value());
  }
  return {worst_gap <= kRiemannAgreement && worst_rank_one <= kRiemannVanishing,
          format("largest disagreement %.2e, largest m = 1 residual %.2e", worst_gap, worst_rank_one)};
}

Outcome decomposition_fidelity() {
  Rng rng(7);
  double worst = 0, worst_skew = 0;
  for (int done = 0; done < 100;) {
    const BundleDatum datum = testing::random_bundle(rng, 2, 1, 3);
    const auto pair = testing::random_valid_pair(rng, datum);
    if (!pair) continue;
    ++done;
    const HodgeDecomposition dec = decompose(datum, *pair);
    const auto back = reassemble_form(dec);
    const auto comps = to_eigen(datum.components);
    double norm = 0, err = 0;
    for (std::size_t k = 0; k < comps.size(); ++k) {
      norm = std::max(norm, max_abs(comps[k]));
      err = std::max(err, max_abs(Eigen::MatrixXd(comps[k] - back[k])));
    }
    worst = std::max(worst, err / std::max(norm, 1.0));
    for (Eigen::Index i = 0; i < 2; ++i)
      for (Eigen::Index j = 0; j < 2; ++j) {
        const CVector swapped = u_component(dec, complex_form(comps, dec.V.col(j).conjugate(), dec.V.col(i)));
        worst_skew = std::max(worst_skew, std::abs(dec.B_doubleprime[0](i, j) + swapped(0)) / std::max(norm, 1.0));
      }
  }
  return {worst <= kDecompositionBound && worst_skew <= kDecompositionBound,
          format("relative reassembly error %.2e, skew defect %.2e", worst, worst_skew)};
}

Outcome pfaffian_reality_sweep() {
  Rng rng(8);
  int disagreements = 0, real = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const BundleDatum datum = testing::random_bundle(rng, 2, 1, 2);
    const bool sturm = pfaffian_reality_sturm(datum);
    const bool sweep = testing::pencil_has_real_root_by_sweep(datum.components[0], datum.components[1], kSweepPoints);
    disagreements += sturm != sweep;
    real += sturm;
  }
  return {disagreements == 0, format("%d disagreements, %d of 1000 real", disagreements, real)};
}

Outcome group_law() {
  Rng rng(9);
  int failures = 0;
  const BundleDatum datum = testing::random_bundle(rng, 2, 1, 4);
  const NormalizationDatum norm = lower_triangular_split(datum);
  auto unit = [](std::size_t n, std::size_t i) {
    QVector v(n);
    v[i] = 1;
    return v;
  };
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) {
      const auto g = GroupElement::lattice(QVector(2), unit(4, i)), h = GroupElement::lattice(QVector(2), unit(4, j));
      failures += !(commutator(g, h, norm) == GroupElement::lattice(form(datum, unit(4, i), unit(4, j)), QVector(4)));
    }
  auto point = [&] {
    return GroupElement::point(testing::random_rational_vector(rng, 2, 5, 6), testing::random_rational_vector(rng, 4, 5, 6));
  };
  auto lattice = [&] {
    return GroupElement::lattice(testing::random_integer_vector(rng, 2, 4), testing::random_integer_vector(rng, 4, 4));
  };
  for (int trial = 0; trial < 100; ++trial) {
    const GroupElement g = point(), h = point(), k = point();
    failures += !(group_multiply(group_multiply(g, h, norm), k, norm) == group_multiply(g, group_multiply(h, k, norm), norm));
    const GroupElement c = GroupElement::point(testing::random_rational_vector(rng, 2, 5, 6), QVector(4));
    failures += !(group_multiply(c, g, norm) == group_multiply(g, c, norm));
    const GroupElement lg = lattice(), lh = lattice();
    failures += !(commutator(lg, lh, norm) == GroupElement::lattice(form(datum, lg.x, lh.x), QVector(4)));
  }
  for (int trial = 0; trial < 100; ++trial) {
    const GroupElement gamma = lattice();
    const GroupElement p = GroupElement::point(testing::random_rational_vector(rng, 2, 5, 7),
                                               testing::random_rational_vector(rng, 4, 5, 7));
    failures += !(normalized_action(gamma, p, datum, norm) ==
                  psi(group_multiply(psi_inverse(p, norm), gamma, norm), norm));
  }
  return {failures == 0, format("%d exact identities failed of 516", failures)};
}

struct Criterion {
  int id;
  const char* name;
  double limit_seconds;
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "tensor-equation equivalence", 10, tensor_equivalence},
      {2, "kodaira connectivity", 120, kodaira_connectivity},
      {3, "threefold connectivity", 600, threefold_connectivity},
      {4, "untwisted quadric", 600, untwisted_quadric},
      {5, "reconstruction round trip", 600, reconstruction_round_trip},
      {6, "riemann formulations", 600, riemann_formulations},
      {7, "decomposition fidelity", 600, decomposition_fidelity},
      {8, "pfaffian reality", 600, pfaffian_reality_sweep},
      {9, "group law", 600, group_law},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool pass = o.pass && seconds <= c.limit_seconds;
    failed += !pass;
    std::printf("[%s] %d %-28s %7.2fs  %s\n", pass ? "PASS" : "FAIL", c.id, c.name, seconds, o.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
