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
#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "torusreal/complex_structure.hpp"

namespace torusreal {

/// Affine lift sigma(y, x) = (A1 y + L x + d1, A2 x + d2) of an
/// antiholomorphic involution. A1 and A2 are integral.
struct RealStructureData {
  QMatrix A1;  // 2d x 2d
  QMatrix A2;  // 2m x 2m
  QMatrix L;   // 2d x 2m
  QVector d1;
  QVector d2;
};

inline void require_shape(const RealStructureData& data, const BundleDatum& datum) {
  const std::size_t n = datum.base_rank(), f = datum.fibre_rank();
  if (data.A1.rows() != f || data.A1.cols() != f) throw DimensionError("A1 must be 2d x 2d");
  if (data.A2.rows() != n || data.A2.cols() != n) throw DimensionError("A2 must be 2m x 2m");
  if (data.L.rows() != f || data.L.cols() != n) throw DimensionError("L must be 2d x 2m");
  if (data.d1.size() != f) throw DimensionError("d1 must have length 2d");
  if (data.d2.size() != n) throw DimensionError("d2 must have length 2m");
}

struct ConditionResult {
  std::string label;
  bool holds = false;
  std::string detail;
};

inline bool all_hold(const std::vector<ConditionResult>& conditions) {
  return std::all_of(conditions.begin(), conditions.end(), [](const ConditionResult& c) { return c.holds; });
}

// ---------------------------------------------------------------------------
// Integral conditions on the lift (exact).

struct IntegralConditionReport {
  std::vector<ConditionResult> conditions;  // eight entries, in order
  bool nondegenerate = false;
  std::optional<QVector> witness;  // gamma with L A2 + A1 L = -A(., gamma)
  bool all() const { return all_hold(conditions); }
};

/// The matrix x -> A(x, gamma), rows indexed by Lambda coordinates.
inline QMatrix form_against(const std::vector<QMatrix>& comps, const QVector& gamma) {
  QMatrix out(comps.size(), gamma.size());
  for (std::size_t k = 0; k < comps.size(); ++k) {
    QVector col = comps[k] * gamma;
    for (std::size_t j = 0; j < gamma.size(); ++j) out(k, j) = col[j];
  }
  return out;
}

namespace detail {

inline std::string involution_problem(const QMatrix& a, const char* name) {
  if (!a.is_integral()) return std::string(name) + " has non-integer entries";
  if (!(a * a == QMatrix::identity(a.rows()))) return std::string(name) + " does not square to the identity";
  return {};
}

}  // namespace detail

inline IntegralConditionReport check_integral_conditions(const RealStructureData& data, const BundleDatum& datum) {
  validate(datum);
  require_shape(data, datum);
  const std::size_t n = datum.base_rank(), f = datum.fibre_rank();
  IntegralConditionReport report;
  report.nondegenerate = is_nondegenerate(datum);
  auto add = [&](std::string label, bool holds, std::string detail) {
    report.conditions.push_back({std::move(label), holds, std::move(detail)});
  };

  std::string p1 = detail::involution_problem(data.A1, "A1");
  add("fibre involution", p1.empty(), p1);
  std::string p2 = detail::involution_problem(data.A2, "A2");
  add("base involution", p2.empty(), p2);

  // sum_k (A1)_{lk} A_k = A2^T A_l A2 for every l
  std::string compat;
  for (std::size_t l = 0; l < f && compat.empty(); ++l) {
    QMatrix lhs(n, n);
    for (std::size_t k = 0; k < f; ++k) lhs += datum.components[k] * data.A1(l, k);
    if (!(lhs == data.A2.transpose() * datum.components[l] * data.A2))
      compat = "A1 A(x, y) != A(A2 x, A2 y) in component " + std::to_string(l);
  }
  add("form compatibility", compat.empty(), compat);

  std::string shifted;
  for (std::size_t j = 0; j < n && shifted.empty(); ++j) {
    QVector ej(n);
    ej[j] = 1;
    QVector image = data.L * ej - form(datum, data.d2, data.A2 * ej);
    if (!is_integral(image)) shifted = "L e_" + std::to_string(j) + " - A(d2, A2 e_" + std::to_string(j) + ") not integral";
  }
  add("shifted linear part integral", shifted.empty(), shifted);

  bool base_square = is_integral(data.A2 * data.d2 + data.d2);
  add("base translation square", base_square, base_square ? "" : "A2 d2 + d2 not integral");
  bool fibre_square = is_integral(data.L * data.d2 + data.A1 * data.d1 + data.d1);
  add("fibre translation square", fibre_square, fibre_square ? "" : "L d2 + A1 d1 + d1 not integral");

  // L A2 + A1 L = -A(., gamma): stack A_k gamma = -(row k)^T
  QMatrix target = data.L * data.A2 + data.A1 * data.L;
  QMatrix stacked(f * n, n);
  QVector rhs(f * n);
  for (std::size_t k = 0; k < f; ++k)
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) stacked(k * n + i, j) = datum.components[k](i, j);
      rhs[k * n + i] = -target(k, i);
    }
  std::optional<QVector> gamma = solve(stacked, rhs);
  std::string linear;
  if (!gamma) {
    linear = "L A2 + A1 L is not of the form -A(., gamma)";
  } else {
    report.witness = gamma;
    if (!is_integral(*gamma)) linear = "witness gamma is not integral";
  }
  add("linear square witness", linear.empty(), linear);

  // sigma^2 lies over d2 + A2 d2, so its shear must be A(., d2 + A2 d2)
  const bool closes = target == form_against(datum.components, data.d2 + data.A2 * data.d2);
  add("square in lattice group", closes, closes ? "" : "L A2 + A1 L differs from A(., d2 + A2 d2)");
  return report;
}

/// x -> L x - A(A2 x, d2). This is the part of the lift that has to be
/// antiholomorphic; it does not depend on which lift of the involution is used.
inline QMatrix effective_linear_part(const RealStructureData& data, const BundleDatum& datum) {
  return data.L - form_against(datum.components, data.d2) * data.A2;
}

// ---------------------------------------------------------------------------
// Eigenspace splitting.

/// Exact blocks in the integer eigenbases.
struct ExactSplit {
  QMatrix P1, P2;  // [U+ | U-], [V+ | V-]
  std::vector<QMatrix> A_plus, A_minus, D;
  QMatrix L_pp, L_pm, L_mp, L_mm;
  QVector gamma_hat_plus;  // V+ coordinates
};

/// Blocks of A and of the effective linear part in the eigenbases of A1 and
/// A2. A_plus and A_minus are indexed by U+ coordinates, D by U- coordinates.
/// D[l](i, j) = A-(v-_i, v+_j).
struct EigenSplit {
  Eigen::MatrixXd V_plus, V_minus, U_plus, U_minus;
  std::vector<Eigen::MatrixXd> A_plus, A_minus, D;
  Eigen::MatrixXd L_pp, L_pm, L_mp, L_mm;
  Eigen::VectorXd gamma_hat_plus;  // V+ coordinates
  Eigen::VectorXd gamma_hat;       // same vector in Gamma coordinates
  std::optional<ExactSplit> exact;

  Eigen::Index dim_V_plus() const { return V_plus.cols(); }
  Eigen::Index dim_V_minus() const { return V_minus.cols(); }
  Eigen::Index dim_U_plus() const { return U_plus.cols(); }
  Eigen::Index dim_U_minus() const { return U_minus.cols(); }
  bool degenerate() const {
    return dim_V_plus() == 0 || dim_V_minus() == 0 || dim_U_plus() == 0 || dim_U_minus() == 0;
  }
};

namespace detail {

inline Eigen::MatrixXd columns_to_eigen(const std::vector<QVector>& cols, std::size_t rows) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j)
    for (std::size_t i = 0; i < rows; ++i)
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = to_double(cols[j][i]);
  return out;
}

inline std::vector<Eigen::MatrixXd> to_eigen_list(const std::vector<QMatrix>& list) {
  std::vector<Eigen::MatrixXd> out;
  for (const auto& m : list) out.push_back(m.to_eigen());
  return out;
}

inline Eigen::VectorXd to_eigen_vector(const QVector& v) { return torusreal::to_eigen(v); }

}  // namespace detail

/// Needs the involution and form-compatibility conditions. Throws
/// InconsistentDataError when the mixed blocks of A do not vanish and
/// PreconditionError when no integral gamma-hat solves the block equations
/// for the linear part of L.
inline EigenSplit eigensplit(const RealStructureData& data, const BundleDatum& datum) {
  validate(datum);
  require_shape(data, datum);
  for (const char* name : {"A1", "A2"}) {
    std::string problem = detail::involution_problem(name[1] == '1' ? data.A1 : data.A2, name);
    if (!problem.empty()) throw PreconditionError(problem);
  }
  const std::size_t n = datum.base_rank(), f = datum.fibre_rank();
  const QMatrix In = QMatrix::identity(n), If = QMatrix::identity(f);
  const auto v_plus = integer_kernel(data.A2 - In), v_minus = integer_kernel(data.A2 + In);
  const auto u_plus = integer_kernel(data.A1 - If), u_minus = integer_kernel(data.A1 + If);
  const std::size_t p2 = v_plus.size(), q2 = v_minus.size(), p1 = u_plus.size(), q1 = u_minus.size();

  ExactSplit ex;
  std::vector<QVector> cols2 = v_plus, cols1 = u_plus;
  cols2.insert(cols2.end(), v_minus.begin(), v_minus.end());
  cols1.insert(cols1.end(), u_minus.begin(), u_minus.end());
  ex.P2 = QMatrix::from_columns(cols2, n);
  ex.P1 = QMatrix::from_columns(cols1, f);
  const auto p1_inv = inverse(ex.P1);
  const auto p2_inv = inverse(ex.P2);
  if (!p1_inv || !p2_inv) throw InconsistentDataError("eigenbases do not span");

  // A'_l = sum_k (P1^-1)_{lk} P2^T A_k P2
  std::vector<QMatrix> a_prime;
  for (std::size_t l = 0; l < f; ++l) {
    QMatrix acc(n, n);
    for (std::size_t k = 0; k < f; ++k) acc += datum.components[k] * (*p1_inv)(l, k);
    a_prime.push_back(ex.P2.transpose() * acc * ex.P2);
  }
  for (std::size_t l = 0; l < f; ++l) {
    const QMatrix& a = a_prime[l];
    if (l < p1) {
      if (!a.block(0, p2, p2, q2).is_zero())
        throw InconsistentDataError("A+ does not vanish on V+ x V-");
    } else {
      if (!a.block(0, 0, p2, p2).is_zero()) throw InconsistentDataError("A- does not vanish on V+ x V+");
      if (!a.block(p2, p2, q2, q2).is_zero()) throw InconsistentDataError("A- does not vanish on V- x V-");
    }
  }
  for (std::size_t l = 0; l < p1; ++l) {
    ex.A_plus.push_back(a_prime[l].block(0, 0, p2, p2));
    ex.A_minus.push_back(a_prime[l].block(p2, p2, q2, q2));
  }
  for (std::size_t l = p1; l < f; ++l) ex.D.push_back(a_prime[l].block(p2, 0, q2, p2));

  const QMatrix l_prime = (*p1_inv) * effective_linear_part(data, datum) * ex.P2;
  ex.L_pp = l_prime.block(0, 0, p1, p2);
  ex.L_pm = l_prime.block(0, p2, p1, q2);
  ex.L_mp = l_prime.block(p1, 0, q1, p2);
  ex.L_mm = l_prime.block(p1, p2, q1, q2);

  // L++[l, i] = -1/2 sum_j A_plus[l](i, j) g_j ; L--[l', i] = 1/2 sum_j D[l'](i, j) g_j
  QMatrix system(p1 * p2 + q1 * q2, p2);
  QVector rhs(p1 * p2 + q1 * q2);
  std::size_t row = 0;
  for (std::size_t l = 0; l < p1; ++l)
    for (std::size_t i = 0; i < p2; ++i, ++row) {
      for (std::size_t j = 0; j < p2; ++j) system(row, j) = ex.A_plus[l](i, j);
      rhs[row] = Rational(-2) * ex.L_pp(l, i);
    }
  for (std::size_t l = 0; l < q1; ++l)
    for (std::size_t i = 0; i < q2; ++i, ++row) {
      for (std::size_t j = 0; j < p2; ++j) system(row, j) = ex.D[l](i, j);
      rhs[row] = Rational(2) * ex.L_mm(l, i);
    }
  std::optional<QVector> g = p2 == 0 ? std::optional<QVector>(QVector{}) : solve(system, rhs);
  if (!g) throw PreconditionError("no gamma-hat solves the block equations of the linear square condition");
  ex.gamma_hat_plus = *g;
  QVector gamma(n);
  for (std::size_t j = 0; j < p2; ++j) gamma = gamma + ex.gamma_hat_plus[j] * v_plus[j];
  if (!is_integral(gamma)) throw PreconditionError("gamma-hat is not integral");

  EigenSplit split;
  split.V_plus = detail::columns_to_eigen(v_plus, n);
  split.V_minus = detail::columns_to_eigen(v_minus, n);
  split.U_plus = detail::columns_to_eigen(u_plus, f);
  split.U_minus = detail::columns_to_eigen(u_minus, f);
  split.A_plus = detail::to_eigen_list(ex.A_plus);
  split.A_minus = detail::to_eigen_list(ex.A_minus);
  split.D = detail::to_eigen_list(ex.D);
  split.L_pp = ex.L_pp.to_eigen();
  split.L_pm = ex.L_pm.to_eigen();
  split.L_mp = ex.L_mp.to_eigen();
  split.L_mm = ex.L_mm.to_eigen();
  split.gamma_hat_plus = detail::to_eigen_vector(ex.gamma_hat_plus);
  split.gamma_hat = detail::to_eigen_vector(gamma);
  split.exact = std::move(ex);
  return split;
}

/// A split given directly by its blocks, with standard coordinate bases
/// (V+ first, then V-; likewise for U).
inline EigenSplit split_from_blocks(std::vector<Eigen::MatrixXd> a_plus, std::vector<Eigen::MatrixXd> a_minus,
                                    std::vector<Eigen::MatrixXd> d, Eigen::MatrixXd l_pp, Eigen::MatrixXd l_pm,
                                    Eigen::MatrixXd l_mp, Eigen::MatrixXd l_mm) {
  const Eigen::Index p1 = static_cast<Eigen::Index>(a_plus.size()), q1 = static_cast<Eigen::Index>(d.size());
  if (a_minus.size() != a_plus.size()) throw DimensionError("A_plus and A_minus need the same number of components");
  const Eigen::Index p2 = a_plus.empty() ? l_pp.cols() : a_plus.front().rows();
  const Eigen::Index q2 = a_minus.empty() ? l_mm.cols() : a_minus.front().rows();
  auto check = [](const Eigen::MatrixXd& m, Eigen::Index r, Eigen::Index c, const char* name) {
    if (m.rows() != r || m.cols() != c) throw DimensionError(std::string(name) + " has the wrong shape");
  };
  for (const auto& a : a_plus) check(a, p2, p2, "A_plus");
  for (const auto& a : a_minus) check(a, q2, q2, "A_minus");
  for (const auto& a : d) check(a, q2, p2, "D");
  check(l_pp, p1, p2, "L_pp");
  check(l_pm, p1, q2, "L_pm");
  check(l_mp, q1, p2, "L_mp");
  check(l_mm, q1, q2, "L_mm");
  EigenSplit split;
  const Eigen::Index n = p2 + q2, f = p1 + q1;
  split.V_plus = Eigen::MatrixXd::Identity(n, n).leftCols(p2);
  split.V_minus = Eigen::MatrixXd::Identity(n, n).rightCols(q2);
  split.U_plus = Eigen::MatrixXd::Identity(f, f).leftCols(p1);
  split.U_minus = Eigen::MatrixXd::Identity(f, f).rightCols(q1);
  split.A_plus = std::move(a_plus);
  split.A_minus = std::move(a_minus);
  split.D = std::move(d);
  split.L_pp = std::move(l_pp);
  split.L_pm = std::move(l_pm);
  split.L_mp = std::move(l_mp);
  split.L_mm = std::move(l_mm);
  split.gamma_hat_plus = Eigen::VectorXd::Zero(p2);
  split.gamma_hat = Eigen::VectorXd::Zero(n);
  return split;
}

/// Form A rebuilt from the blocks, in Gamma and Lambda coordinates.
inline std::vector<Eigen::MatrixXd> reassemble_from_split(const EigenSplit& split) {
  const Eigen::Index p2 = split.dim_V_plus(), q2 = split.dim_V_minus();
  const Eigen::Index p1 = split.dim_U_plus(), q1 = split.dim_U_minus();
  const Eigen::Index n = p2 + q2, f = p1 + q1;
  Eigen::MatrixXd p2m(n, n), p1m(f, f);
  p2m << split.V_plus, split.V_minus;
  p1m << split.U_plus, split.U_minus;
  const Eigen::MatrixXd p2_inv = p2m.inverse();
  // value in eigen-coordinates, then mapped back by P1
  std::vector<Eigen::MatrixXd> eig(static_cast<std::size_t>(f), Eigen::MatrixXd::Zero(n, n));
  for (Eigen::Index l = 0; l < p1; ++l) {
    eig[static_cast<std::size_t>(l)].topLeftCorner(p2, p2) = split.A_plus[static_cast<std::size_t>(l)];
    eig[static_cast<std::size_t>(l)].bottomRightCorner(q2, q2) = split.A_minus[static_cast<std::size_t>(l)];
  }
  for (Eigen::Index l = 0; l < q1; ++l) {
    const Eigen::MatrixXd& dl = split.D[static_cast<std::size_t>(l)];
    eig[static_cast<std::size_t>(p1 + l)].bottomLeftCorner(q2, p2) = dl;
    eig[static_cast<std::size_t>(p1 + l)].topRightCorner(p2, q2) = -dl.transpose();
  }
  std::vector<Eigen::MatrixXd> out(static_cast<std::size_t>(f), Eigen::MatrixXd::Zero(n, n));
  for (Eigen::Index k = 0; k < f; ++k)
    for (Eigen::Index l = 0; l < f; ++l)
      out[static_cast<std::size_t>(k)] +=
          p1m(k, l) * p2_inv.transpose() * eig[static_cast<std::size_t>(l)] * p2_inv;
  return out;
}

// ---------------------------------------------------------------------------
// Compatible complex structures.

/// B1: U- -> U+, B2: V- -> V+, as matrices in the eigenbases.
struct CompatibleStructure {
  Eigen::MatrixXd B1;
  Eigen::MatrixXd B2;
};

namespace detail {

inline Eigen::MatrixXd block_structure(const Eigen::MatrixXd& plus, const Eigen::MatrixXd& minus,
                                       const Eigen::MatrixXd& b, const char* what) {
  const Eigen::Index p = plus.cols(), q = minus.cols();
  if (p != q) throw DimensionError(std::string(what) + ": eigenspaces of different dimension admit no compatible structure");
  if (b.rows() != p || b.cols() != q) throw DimensionError(std::string(what) + ": block has the wrong shape");
  Eigen::FullPivLU<Eigen::MatrixXd> lu(b);
  if (!lu.isInvertible()) throw PreconditionError(std::string(what) + ": block is not invertible");
  const Eigen::Index n = p + q;
  Eigen::MatrixXd j_hat = Eigen::MatrixXd::Zero(n, n);
  j_hat.topRightCorner(p, q) = -b;
  j_hat.bottomLeftCorner(q, p) = lu.inverse();
  Eigen::MatrixXd basis(plus.rows(), n);
  basis << plus, minus;
  return basis * j_hat * basis.inverse();
}

}  // namespace detail

/// J(x+, x-) = (-B x-, B^-1 x+) on both lattices, in the original coordinates.
inline ComplexStructurePair build_J(const EigenSplit& split, const CompatibleStructure& cs) {
  Eigen::MatrixXd j1 = detail::block_structure(split.U_plus, split.U_minus, cs.B1, "fibre");
  Eigen::MatrixXd j2 = detail::block_structure(split.V_plus, split.V_minus, cs.B2, "base");
  return make_structure_pair(std::move(j1), std::move(j2));
}

struct AntiholomorphyResidual {
  double first_form = 0;   // L++ B2 + B1 L--, L+- B2^-1 - B1 L-+
  double second_form = 0;  // L-+ B2 - B1^-1 L+-, L-- B2^-1 + B1^-1 L++
  double value() const { return first_form; }
};

inline AntiholomorphyResidual antiholomorphy_residual(const EigenSplit& split, const CompatibleStructure& cs) {
  const Eigen::MatrixXd b1_inv = cs.B1.inverse(), b2_inv = cs.B2.inverse();
  AntiholomorphyResidual r;
  r.first_form = std::max(max_abs(split.L_pp * cs.B2 + cs.B1 * split.L_mm),
                          max_abs(split.L_pm * b2_inv - cs.B1 * split.L_mp));
  r.second_form = std::max(max_abs(split.L_mp * cs.B2 - b1_inv * split.L_pm),
                           max_abs(split.L_mm * b2_inv + b1_inv * split.L_pp));
  return r;
}

namespace detail {

using FormStack = std::vector<Eigen::MatrixXd>;

/// (M X)_l = sum_k M(l, k) X_k, acting on the value index.
inline FormStack mix(const Eigen::MatrixXd& m, const FormStack& x, Eigen::Index rows, Eigen::Index cols) {
  FormStack out(static_cast<std::size_t>(m.rows()), Eigen::MatrixXd::Zero(rows, cols));
  for (Eigen::Index l = 0; l < m.rows(); ++l)
    for (Eigen::Index k = 0; k < m.cols(); ++k) out[static_cast<std::size_t>(l)] += m(l, k) * x[static_cast<std::size_t>(k)];
  return out;
}

inline double stack_norm(const FormStack& x) {
  double worst = 0;
  for (const auto& m : x)
    if (m.size() > 0) worst = std::max(worst, max_abs(m));
  return worst;
}

}  // namespace detail

/// Per U+ coordinate: A- - B2^T A+ B2 + B1 (D B2 - (D B2)^T).
inline std::vector<Eigen::MatrixXd> rbr2_residual_matrices(const EigenSplit& split, const CompatibleStructure& cs) {
  const Eigen::Index q2 = split.dim_V_minus();
  detail::FormStack skew;
  for (const auto& d : split.D) {
    Eigen::MatrixXd db = d * cs.B2;
    skew.push_back(db - db.transpose());
  }
  detail::FormStack mixed = detail::mix(cs.B1, skew, q2, q2);
  std::vector<Eigen::MatrixXd> out;
  for (std::size_t l = 0; l < split.A_plus.size(); ++l)
    out.push_back(split.A_minus[l] - cs.B2.transpose() * split.A_plus[l] * cs.B2 + mixed[l]);
  return out;
}

inline double rbr2_residual(const EigenSplit& split, const CompatibleStructure& cs) {
  return detail::stack_norm(rbr2_residual_matrices(split, cs));
}

struct TensorResiduals {
  std::array<double, 4> values{};
  double conditioning = 1;  // max(|B2|, |B2^-1|)^2 max(|B1|, |B1^-1|), operator 2-norms
};

/// The four bilinear-type equations, each evaluated from its own formula.
inline TensorResiduals tensor_equations_residuals(const EigenSplit& split, const CompatibleStructure& cs) {
  const Eigen::MatrixXd b2 = cs.B2, b2_inv = b2.inverse(), b2_inv_t = b2_inv.transpose();
  const Eigen::MatrixXd b1_inv = cs.B1.inverse();
  const Eigen::Index p2 = split.dim_V_plus(), q2 = split.dim_V_minus();
  detail::FormStack d_t, d_conj, d_left, d_right, d_plain;
  for (const auto& d : split.D) {
    d_t.push_back(d.transpose());                              // p2 x q2
    d_conj.push_back(b2_inv_t * d * b2);                       // p2 x q2
    d_left.push_back(b2.transpose() * d.transpose() * b2_inv); // q2 x p2
    d_plain.push_back(d);                                      // q2 x p2
    d_right.push_back(-d.transpose() * b2_inv + b2_inv_t * d); // p2 x p2
  }
  TensorResiduals out;
  {
    detail::FormStack rhs = detail::mix(cs.B1, d_t, p2, q2), corr = detail::mix(cs.B1, d_conj, p2, q2);
    detail::FormStack r;
    for (std::size_t l = 0; l < split.A_plus.size(); ++l)
      r.push_back(-split.A_plus[l] * b2 + b2_inv_t * split.A_minus[l] - rhs[l] + corr[l]);
    out.values[0] = detail::stack_norm(r);
  }
  {
    detail::FormStack plain = detail::mix(cs.B1, d_plain, q2, p2), left = detail::mix(cs.B1, d_left, q2, p2);
    detail::FormStack r;
    for (std::size_t l = 0; l < split.A_plus.size(); ++l)
      r.push_back(split.A_minus[l] * b2_inv - b2.transpose() * split.A_plus[l] + plain[l] - left[l]);
    out.values[1] = detail::stack_norm(r);
  }
  {
    detail::FormStack plus;
    for (std::size_t l = 0; l < split.A_plus.size(); ++l)
      plus.push_back(split.A_plus[l] - b2_inv_t * split.A_minus[l] * b2_inv);
    detail::FormStack mapped = detail::mix(b1_inv, plus, p2, p2);
    detail::FormStack r;
    for (std::size_t l = 0; l < split.D.size(); ++l) r.push_back(d_right[l] - mapped[l]);
    out.values[2] = detail::stack_norm(r);
  }
  {
    detail::FormStack minus;
    for (std::size_t l = 0; l < split.A_plus.size(); ++l)
      minus.push_back(split.A_minus[l] - b2.transpose() * split.A_plus[l] * b2);
    detail::FormStack mapped = detail::mix(b1_inv, minus, q2, q2);
    detail::FormStack r;
    for (std::size_t l = 0; l < split.D.size(); ++l)
      r.push_back(b2.transpose() * split.D[l].transpose() - split.D[l] * b2 - mapped[l]);
    out.values[3] = detail::stack_norm(r);
  }
  auto op_norm = [](const Eigen::MatrixXd& m) {
    return m.size() == 0 ? 1.0 : Eigen::JacobiSVD<Eigen::MatrixXd>(m).singularValues()(0);
  };
  const double s2 = std::max(op_norm(b2), op_norm(b2_inv)), s1 = std::max(op_norm(cs.B1), op_norm(b1_inv));
  out.conditioning = s2 * s2 * s1;
  return out;
}

// ---------------------------------------------------------------------------
// Conditions in the complex coordinates (u, v), u = p_U(y) + B''(v, conj v),
// where the lattice acts by (u + F_gamma(v) + p_U(lambda), v + p_V(gamma)).

/// sigma(u, v) = (A1 conj u + L conj v + d1, A2 conj v + d2) plus the parts
/// that must vanish for sigma to be antiholomorphic in these coordinates.
struct ComplexAffineForm {
  CMatrix A1, A2, L;
  CVector d1, d2;
  double holomorphic_defect = 0;  // largest u-, v-linear or quadratic holomorphic coefficient
};

struct DianalyticReport {
  std::vector<ConditionResult> conditions;  // eight entries, in order
  ComplexAffineForm coefficients;
  std::optional<Eigen::VectorXd> square_witness;  // gamma with linear part of F_gamma
  bool all() const { return all_hold(conditions); }
};

namespace detail {

/// Rows extracting the coordinates along the columns of p in [p | conj p].
inline CMatrix hodge_coordinates(const CMatrix& p) {
  CMatrix full(p.rows(), 2 * p.cols());
  full << p, p.conjugate();
  return full.inverse().topRows(p.cols());
}

inline std::optional<Eigen::VectorXd> lattice_preimage_of(const CMatrix& basis, const CVector& alpha, double tol) {
  return projected_lattice_preimage(basis, alpha, tol);
}

}  // namespace detail

inline ComplexAffineForm complex_coefficients(const RealStructureData& data, const HodgeDecomposition& dec) {
  const CMatrix qu = detail::hodge_coordinates(dec.U), qv = detail::hodge_coordinates(dec.V);
  const CMatrix a1 = data.A1.to_eigen().cast<Complex>(), a2 = data.A2.to_eigen().cast<Complex>();
  const CMatrix l = data.L.to_eigen().cast<Complex>();
  const Eigen::Index d = dec.U.cols();
  ComplexAffineForm out;
  out.A1 = qu * a1 * dec.U.conjugate();
  out.A2 = qv * a2 * dec.V.conjugate();
  out.d2 = qv * detail::to_eigen_vector(data.d2).cast<Complex>();
  CMatrix l_anti = qu * l * dec.V.conjugate();
  CMatrix l_holo = qu * l * dec.V;
  for (Eigen::Index k = 0; k < d; ++k) {
    const CMatrix& b = dec.B_doubleprime[static_cast<std::size_t>(k)];
    // B''(A2 conj v, conj d2) and B''(d2, conj(A2 conj v))
    l_anti.row(k) += (b * out.d2.conjugate()).transpose() * out.A2;
    l_holo.row(k) += out.d2.transpose() * b * out.A2.conjugate();
  }
  out.L = l_anti;
  out.d1 = qu * detail::to_eigen_vector(data.d1).cast<Complex>() + b_doubleprime(dec, out.d2, out.d2);
  double defect = std::max(max_abs(CMatrix(qu * a1 * dec.U)), max_abs(CMatrix(qv * a2 * dec.V)));
  defect = std::max(defect, max_abs(l_holo));
  // quadratic part: B''(A2 conj v, conj(A2 conj v)) - A1 conj B''(v, conj v), on basis pairs
  const Eigen::Index m = dec.V.cols();
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < m; ++j) {
      for (Eigen::Index k = 0; k < d; ++k) {
        // coefficient of conj(v_i) v_j
        Complex lhs = 0;
        for (Eigen::Index a = 0; a < m; ++a)
          for (Eigen::Index b = 0; b < m; ++b)
            lhs += out.A2(a, i) * dec.B_doubleprime[static_cast<std::size_t>(k)](a, b) * std::conj(out.A2(b, j));
        Complex rhs = 0;
        for (Eigen::Index kk = 0; kk < d; ++kk)
          rhs += out.A1(k, kk) * std::conj(dec.B_doubleprime[static_cast<std::size_t>(kk)](i, j));
        defect = std::max(defect, std::abs(lhs - rhs));
      }
    }
  out.holomorphic_defect = defect;
  return out;
}

inline DianalyticReport check_dianalytic_conditions(const RealStructureData& data, const HodgeDecomposition& dec,
                                                    const ComplexStructurePair& pair,
                                                    double tolerance = kLatticeTolerance) {
  if (!squares_to_minus_identity(pair.J1) || !squares_to_minus_identity(pair.J2))
    throw PreconditionError("complex structure does not square to -1");
  const Eigen::Index n = dec.V.rows(), f = dec.U.rows(), m = dec.V.cols(), d = dec.U.cols();
  if (data.A1.rows() != static_cast<std::size_t>(f) || data.A2.rows() != static_cast<std::size_t>(n))
    throw DimensionError("real structure does not match the decomposition");
  DianalyticReport report;
  report.coefficients = complex_coefficients(data, dec);
  const ComplexAffineForm& c = report.coefficients;
  const CMatrix qu = detail::hodge_coordinates(dec.U), qv = detail::hodge_coordinates(dec.V);
  double scale = 1;
  for (const auto& b : dec.B_prime) scale = std::max(scale, max_abs(b));
  for (const auto& b : dec.B_doubleprime) scale = std::max(scale, max_abs(b));
  const double tol = tolerance * scale;
  auto add = [&](std::string label, bool holds, std::string detail) {
    report.conditions.push_back({std::move(label), holds, std::move(detail)});
  };
  auto p_v = [&](const Eigen::VectorXd& g) -> CVector { return qv * g.cast<Complex>(); };
  auto unimodular = [](const Eigen::MatrixXd& cols) {
    return std::abs(std::abs(cols.determinant()) - 1.0) <= 1e-8;
  };

  // lattice images
  {
    std::string why;
    Eigen::MatrixXd pre_u(f, f), pre_v(n, n);
    for (Eigen::Index k = 0; k < f && why.empty(); ++k) {
      auto pre = detail::lattice_preimage_of(dec.U, c.A1 * qu.col(k).conjugate(), tolerance);
      if (!pre) why = "A1 maps a fibre lattice vector off the lattice";
      else pre_u.col(k) = *pre;
    }
    for (Eigen::Index k = 0; k < n && why.empty(); ++k) {
      auto pre = detail::lattice_preimage_of(dec.V, c.A2 * qv.col(k).conjugate(), tolerance);
      if (!pre) why = "A2 maps a base lattice vector off the lattice";
      else pre_v.col(k) = *pre;
    }
    if (why.empty() && !(unimodular(pre_u) && unimodular(pre_v))) why = "lattice image is a proper sublattice";
    add("lattice images", why.empty(), why);
  }

  std::vector<Eigen::VectorXd> samples;  // e_i and e_i + e_j
  for (Eigen::Index i = 0; i < n; ++i) {
    samples.push_back(Eigen::VectorXd::Unit(n, i));
    for (Eigen::Index j = i + 1; j < n; ++j) samples.push_back(Eigen::VectorXd::Unit(n, i) + Eigen::VectorXd::Unit(n, j));
  }

  // quadratic term
  {
    double worst = 0;
    for (const auto& g : samples) {
      const CVector a = p_v(g), a2 = c.A2 * a.conjugate();
      worst = std::max(worst, max_abs(CVector(c.A1 * b_doubleprime(dec, a, a).conjugate() - b_doubleprime(dec, a2, a2))));
    }
    add("quadratic term", worst <= tol, worst <= tol ? "" : "residual " + std::to_string(worst));
  }

  // linear term in v
  {
    double worst = 0;
    for (Eigen::Index i = 0; i < m; ++i)
      for (Eigen::Index j = 0; j < n; ++j) {
        const CVector v = CVector::Unit(m, i), a = p_v(Eigen::VectorXd::Unit(n, j));
        const CVector a2 = c.A2 * a.conjugate(), v2 = c.A2 * v.conjugate();
        CVector lhs = c.A1 * (b_prime(dec, v, a) + 2.0 * b_doubleprime(dec, v, a)).conjugate();
        CVector rhs = b_prime(dec, v2, a2) + 2.0 * b_doubleprime(dec, v2, a2);
        worst = std::max(worst, max_abs(CVector(lhs - rhs)));
      }
    add("linear term", worst <= tol, worst <= tol ? "" : "residual " + std::to_string(worst));
  }

  // translation of conjugated generators: L conj a - B'(d2, a') - 2 B''(d2, conj a') in p_U(Lambda)
  {
    std::string why;
    for (Eigen::Index j = 0; j < n && why.empty(); ++j) {
      const CVector a = p_v(Eigen::VectorXd::Unit(n, j)), a2 = c.A2 * a.conjugate();
      const CVector value = c.L * a.conjugate() - b_prime(dec, c.d2, a2) - 2.0 * b_doubleprime(dec, c.d2, a2);
      if (!detail::lattice_preimage_of(dec.U, value, tol))
        why = "generator " + std::to_string(j) + " lands off p_U(Lambda)";
    }
    add("generator translations", why.empty(), why);
  }

  // fibre square
  {
    double r = max_abs(CMatrix(c.A1 * c.A1.conjugate() - CMatrix::Identity(d, d)));
    add("fibre square", r <= tolerance, r <= tolerance ? "" : "|A1 conj A1 - I| = " + std::to_string(r));
  }

  // A1 conj L + L conj A2 = linear part of F_gamma, gamma solved over the reals
  {
    const CMatrix lhs = c.A1 * c.L.conjugate() + c.L * c.A2.conjugate();
    // unknown gamma in R^n; equations: real and imaginary parts of d x m entries
    Eigen::MatrixXd sys(2 * d * m, n);
    Eigen::VectorXd rhs(2 * d * m);
    for (Eigen::Index j = 0; j < n; ++j) {
      const CVector a = p_v(Eigen::VectorXd::Unit(n, j));
      for (Eigen::Index i = 0; i < m; ++i) {
        const CVector v = CVector::Unit(m, i);
        const CVector col = b_prime(dec, v, a) + 2.0 * b_doubleprime(dec, v, a);
        for (Eigen::Index k = 0; k < d; ++k) {
          sys(2 * (k * m + i), j) = col(k).real();
          sys(2 * (k * m + i) + 1, j) = col(k).imag();
        }
      }
    }
    for (Eigen::Index k = 0; k < d; ++k)
      for (Eigen::Index i = 0; i < m; ++i) {
        rhs(2 * (k * m + i)) = lhs(k, i).real();
        rhs(2 * (k * m + i) + 1) = lhs(k, i).imag();
      }
    Eigen::VectorXd gamma = sys.completeOrthogonalDecomposition().solve(rhs);
    const double res = (sys * gamma - rhs).cwiseAbs().maxCoeff();
    const Eigen::VectorXd rounded = gamma.array().round();
    std::string why;
    if (res > tol) why = "no gamma reproduces the linear part, residual " + std::to_string(res);
    else if ((sys * rounded - rhs).cwiseAbs().maxCoeff() > tol) why = "no integral gamma reproduces the linear part";
    else report.square_witness = rounded;
    add("linear square", why.empty(), why);
  }

  // base square
  {
    double r = max_abs(CMatrix(c.A2 * c.A2.conjugate() - CMatrix::Identity(m, m)));
    std::string why;
    if (r > tolerance) why = "|A2 conj A2 - I| = " + std::to_string(r);
    else if (!detail::lattice_preimage_of(dec.V, CVector(c.A2 * c.d2.conjugate() + c.d2), tol))
      why = "A2 conj d2 + d2 not in p_V(Gamma)";
    add("base square", why.empty(), why);
  }

  // translation of sigma^2 equals F_g(0) + p_U(lambda), g = A2 conj d2 + d2
  {
    const CVector g = c.A2 * c.d2.conjugate() + c.d2;
    const CVector value = c.A1 * c.d1.conjugate() + c.L * c.d2.conjugate() + c.d1 - b_doubleprime(dec, g, g);
    bool ok = detail::lattice_preimage_of(dec.U, value, tol).has_value();
    add("fibre translation square", ok, ok ? "" : "translation of the square is not in p_U(Lambda)");
  }
  return report;
}

}  // namespace torusreal
