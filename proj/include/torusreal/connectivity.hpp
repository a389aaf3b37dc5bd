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

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <string>
#include <tuple>
#include <vector>

#include <Eigen/Dense>

#include "torusreal/solver.hpp"

namespace torusreal {

constexpr double kPathTolerance = 1e-7;
constexpr double kInitialStep = 0.1;
constexpr double kMaxStep = 1.0;
constexpr double kStepFloor = 1e-6;
constexpr int kCorrectorIterations = 50;
constexpr int kPathBudget = 20000;

/// Equalities of the compatibility system as polynomials in z = (b, B):
/// L++ B + b L--, b L-+ B - L+-, and for m = 2 the scalar
/// a_minus - a_plus det B + b b'(B).
class SystemEquations {
 public:
  explicit SystemEquations(const ConstraintSystem& sys) : m_(sys.m) {
    auto row = [](const QVector& v) { return Eigen::RowVectorXd(to_eigen(v).transpose()); };
    lp_ = row(sys.l_pp);
    np_ = row(sys.l_pm);
    lm_ = row(sys.l_mp);
    nm_ = row(sys.l_mm);
    d_ = sys.D.to_eigen();
    a_plus_ = to_double(sys.a_plus);
    a_minus_ = to_double(sys.a_minus);
  }

  int count() const { return 2 * m_ + (m_ == 2 ? 1 : 0); }
  int unknowns() const { return 1 + m_ * m_; }

  Eigen::VectorXd value(const SystemPoint& z) const {
    const double b = z(0);
    const Eigen::MatrixXd B = matrix(z);
    Eigen::VectorXd out(count());
    out.head(m_) = (lp_ * B + b * nm_).transpose();
    out.segment(m_, m_) = (b * lm_ * B - np_).transpose();
    if (m_ == 2) out(2 * m_) = a_minus_ - a_plus_ * B.determinant() + b * twist(B);
    return out;
  }

  Eigen::MatrixXd jacobian(const SystemPoint& z) const {
    const double b = z(0);
    const Eigen::MatrixXd B = matrix(z);
    Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(count(), unknowns());
    const Eigen::RowVectorXd lmB = lm_ * B;
    for (int j = 0; j < m_; ++j) {
      jac(j, 0) = nm_(j);
      jac(m_ + j, 0) = lmB(j);
      for (int i = 0; i < m_; ++i) {
        jac(j, 1 + i * m_ + j) = lp_(i);
        jac(m_ + j, 1 + i * m_ + j) = b * lm_(i);
      }
    }
    if (m_ == 2) {
      const int r = 2 * m_;
      jac(r, 0) = twist(B);
      const double cof[4] = {B(1, 1), -B(1, 0), -B(0, 1), B(0, 0)};
      const double w[4] = {-d_(1, 0), d_(0, 0), -d_(1, 1), d_(0, 1)};
      for (int k = 0; k < 4; ++k) jac(r, 1 + k) = -a_plus_ * cof[k] + b * w[k];
    }
    return jac;
  }

 private:
  Eigen::MatrixXd matrix(const SystemPoint& z) const {
    Eigen::MatrixXd B(m_, m_);
    for (int i = 0; i < m_; ++i)
      for (int j = 0; j < m_; ++j) B(i, j) = z(1 + i * m_ + j);
    return B;
  }
  double twist(const Eigen::MatrixXd& B) const {
    return d_(0, 0) * B(0, 1) + d_(0, 1) * B(1, 1) - d_(1, 0) * B(0, 0) - d_(1, 1) * B(1, 0);
  }

  int m_;
  Eigen::RowVectorXd lp_, np_, lm_, nm_;
  Eigen::MatrixXd d_;
  double a_plus_ = 0, a_minus_ = 0;
};

inline bool in_open_region(const SystemPoint& z, int m) {
  return z(0) > 0 && to_structure(z, m).B2.determinant() > 0;
}

/// Damped Gauss-Newton with minimum-norm steps; never leaves the open region.
inline std::optional<SystemPoint> correct(const SystemEquations& eq, SystemPoint z, int m) {
  if (!in_open_region(z, m)) return std::nullopt;
  const double scale = 1 + z.lpNorm<Eigen::Infinity>();
  for (int it = 0; it < kCorrectorIterations; ++it) {
    Eigen::VectorXd f = eq.value(z);
    if (f.lpNorm<Eigen::Infinity>() <= 1e-13 * scale * scale) return z;
    Eigen::VectorXd step = eq.jacobian(z).completeOrthogonalDecomposition().solve(f);
    double damping = 1;
    while (damping > 1e-4 && !in_open_region(z - damping * step, m)) damping /= 2;
    if (damping <= 1e-4) return std::nullopt;
    z -= damping * step;
  }
  if (eq.value(z).lpNorm<Eigen::Infinity>() <= 1e-10 * scale * scale) return z;
  return std::nullopt;
}

struct PathResult {
  bool connected = false;
  std::vector<SystemPoint> vertices;
  std::string failure;  // empty on success; otherwise the reason, with the last vertex in vertices
};

namespace detail {

inline Eigen::VectorXd tangent_toward(const SystemEquations& eq, const SystemPoint& z, const Eigen::VectorXd& target) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(eq.jacobian(z), Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double cut = 1e-9 * std::max(1.0, sv.size() > 0 ? sv(0) : 0.0);
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > cut) ++rank;
  const Eigen::MatrixXd null = svd.matrixV().rightCols(svd.matrixV().cols() - rank);
  return null * (null.transpose() * target);
}

}  // namespace detail

/// Tracks from p to q: predictor steps along the projection of the chord onto
/// the tangent space, corrector back onto the equalities, every vertex checked
/// through the residual operations of the real structure module.
inline PathResult connect(const SolutionWitness& p, const SolutionWitness& q, const ConstraintSystem& sys) {
  const int m = sys.m;
  const SystemEquations eq(sys);
  const EigenSplit split = as_split(sys);
  const SystemPoint target = q.point();
  PathResult out;
  SystemPoint x = p.point();
  out.vertices.push_back(x);
  auto vertex_ok = [&](const SystemPoint& z) { return check_point(split, z).ok(kPathTolerance); };
  if (!vertex_ok(x) || !vertex_ok(target)) {
    out.failure = "endpoint fails the residual check";
    return out;
  }
  double h = kInitialStep;
  for (int step = 0; step < kPathBudget; ++step) {
    const Eigen::VectorXd chord = target - x;
    const double dist = chord.norm();
    if (dist <= 1e-12) {
      out.connected = true;
      return out;
    }
    if (dist <= h) {
      // last leg: the chord midpoint must project close to itself
      auto mid = correct(eq, x + 0.5 * chord, m);
      if (mid && (*mid - (x + 0.5 * chord)).norm() <= 0.25 * dist && vertex_ok(*mid)) {
        if ((*mid - x).norm() > 1e-9 && (*mid - target).norm() > 1e-9) out.vertices.push_back(*mid);
        out.vertices.push_back(target);
        out.connected = true;
        return out;
      }
    }
    Eigen::VectorXd dir = detail::tangent_toward(eq, x, chord);
    if (dir.norm() < 0.1 * dist) dir = chord;
    dir.normalize();
    const SystemPoint pred = x + std::min(h, dist) * dir;
    auto next = correct(eq, pred, m);
    const bool accepted = next && (*next - pred).norm() <= 0.5 * h && (*next - x).norm() > 0.1 * std::min(h, dist) &&
                          (*next - target).norm() < dist && vertex_ok(*next);
    if (accepted) {
      x = *next;
      out.vertices.push_back(x);
      h = std::min(2 * h, kMaxStep);
    } else {
      h /= 2;
      if (h < kStepFloor) {
        out.failure = "step size fell below the floor";
        return out;
      }
    }
  }
  out.failure = "step budget exhausted";
  return out;
}

// ---------------------------------------------------------------------------
// Certificates.

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), std::size_t{0}); }
  std::size_t add() {
    parent_.push_back(parent_.size());
    return parent_.size() - 1;
  }
  std::size_t find(std::size_t i) {
    while (parent_[i] != i) i = parent_[i] = parent_[parent_[i]];
    return i;
  }
  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent_[std::max(a, b)] = std::min(a, b);
    return true;
  }
  std::size_t size() const { return parent_.size(); }

 private:
  std::vector<std::size_t> parent_;
};

struct CertificatePath {
  std::size_t from = 0, to = 0;  // node indices; witnesses first, then bridges
  std::vector<SystemPoint> vertices;
};

struct CertificateFailure {
  std::size_t from = 0, to = 0;
  std::string reason;
  SystemPoint last;
};

struct ConnectivityCertificate {
  std::uint64_t seed = 0;
  int requested = 0;
  std::string case_label;
  std::vector<SolutionWitness> witnesses;
  std::vector<SolutionWitness> bridges;  // extra samples that joined components
  int component_count = 0;               // over witnesses only
  std::vector<CertificatePath> paths;
  std::vector<CertificateFailure> failures;
};

constexpr int kBridgeRounds = 3;

/// Samples witnesses, connects them along a spanning set of pairs in order of
/// distance, and merges with union-find. When components remain, extra
/// samples are drawn and connected to each component as bridges.
inline ConnectivityCertificate connectivity_certificate(const ConstraintSystem& sys, int samples, std::uint64_t seed) {
  ConnectivityCertificate cert;
  cert.seed = seed;
  cert.requested = samples;
  const SolutionSet set = sys.m == 1 ? analyze_kodaira(sys) : analyze_threefold(sys);
  cert.case_label = set.info.leaf;
  if (set.empty) return cert;
  cert.witnesses = sample_solutions(sys, set, samples, seed).witnesses;
  const std::size_t n = cert.witnesses.size();
  if (n == 0) return cert;

  std::vector<SystemPoint> nodes;
  for (const auto& w : cert.witnesses) nodes.push_back(w.point());
  UnionFind uf(n);
  auto try_join = [&](std::size_t i, std::size_t j, const SolutionWitness& a, const SolutionWitness& b) {
    PathResult path = connect(a, b, sys);
    if (path.connected) {
      uf.unite(i, j);
      cert.paths.push_back({i, j, std::move(path.vertices)});
      return true;
    }
    cert.failures.push_back({i, j, path.failure, path.vertices.back()});
    return false;
  };
  auto node_witness = [&](std::size_t i) -> const SolutionWitness& {
    return i < n ? cert.witnesses[i] : cert.bridges[i - n];
  };
  auto components = [&] {
    std::vector<std::size_t> roots;
    for (std::size_t i = 0; i < n; ++i) roots.push_back(uf.find(i));
    std::sort(roots.begin(), roots.end());
    return static_cast<int>(std::unique(roots.begin(), roots.end()) - roots.begin());
  };

  std::vector<std::tuple<double, std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) pairs.emplace_back((nodes[i] - nodes[j]).norm(), i, j);
  std::sort(pairs.begin(), pairs.end());
  for (const auto& [dist, i, j] : pairs) {
    if (components() == 1) break;
    if (uf.find(i) == uf.find(j)) continue;
    try_join(i, j, node_witness(i), node_witness(j));
  }

  for (int round = 1; round <= kBridgeRounds && components() > 1; ++round) {
    auto extra = sample_solutions(sys, set, samples, seed + static_cast<std::uint64_t>(round)).witnesses;
    for (auto& w : extra) {
      if (components() == 1) break;
      const SystemPoint z = w.point();
      cert.bridges.push_back(std::move(w));
      const std::size_t k = uf.add();
      nodes.push_back(z);
      // nearest node of every other component
      std::vector<std::pair<double, std::size_t>> order;
      for (std::size_t i = 0; i < k; ++i) order.emplace_back((nodes[i] - z).norm(), i);
      std::sort(order.begin(), order.end());
      std::vector<std::size_t> tried;
      for (const auto& [dist, i] : order) {
        const std::size_t root = uf.find(i);
        if (root == uf.find(k) || std::find(tried.begin(), tried.end(), root) != tried.end()) continue;
        tried.push_back(root);
        try_join(k, i, node_witness(k), node_witness(i));
      }
    }
  }
  cert.component_count = components();
  return cert;
}

}  // namespace torusreal
