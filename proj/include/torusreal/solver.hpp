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
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "torusreal/real_structure.hpp"

namespace torusreal {

/// Compatibility system for d = 1, m in {1, 2}. With one-dimensional U+ and
/// U-, B1 is a scalar b and B2 =: B is m x m. For m = 2, A+ = a_plus J and
/// A- = a_minus J with J = [[0, 1], [-1, 0]].
struct ConstraintSystem {
  int m = 2;
  Rational a_plus, a_minus;
  QMatrix D;                       // m x m, D(i, j) = A-(v-_i, v+_j)
  QVector l_pp, l_pm, l_mp, l_mm;  // the four L blocks, each a row of length m
  bool exact = true;               // false when built from floating point blocks
};

constexpr double kWitnessTolerance = 1e-9;
constexpr double kDecisionTolerance = 1e-10;
constexpr double kChartHalfWidth = 10.0;
constexpr double kLogRange = 2.0;  // free b is drawn as exp(U[-2, 2])

inline void require_shape(const ConstraintSystem& sys) {
  if (sys.m != 1 && sys.m != 2) throw PreconditionError("solvers cover m = 1 and m = 2 only");
  const std::size_t m = static_cast<std::size_t>(sys.m);
  if (sys.D.rows() != m || sys.D.cols() != m) throw DimensionError("D must be m x m");
  for (const QVector* row : {&sys.l_pp, &sys.l_pm, &sys.l_mp, &sys.l_mm})
    if (row->size() != m) throw DimensionError("L blocks must have length m");
  if (sys.m == 1 && (sys.a_plus != 0 || sys.a_minus != 0))
    throw PreconditionError("for m = 1 the forms A+ and A- vanish");
}

inline ConstraintSystem system_from_split(const EigenSplit& split) {
  if (split.dim_U_plus() != 1 || split.dim_U_minus() != 1) throw PreconditionError("solvers need d = 1");
  const Eigen::Index m = split.dim_V_plus();
  if (split.dim_V_minus() != m || (m != 1 && m != 2))
    throw PreconditionError("solvers need dim V+ = dim V- in {1, 2}");
  ConstraintSystem sys;
  sys.m = static_cast<int>(m);
  auto row = [](const QMatrix& q) { return q.row_vector(0); };
  if (split.exact) {
    const ExactSplit& ex = *split.exact;
    sys.D = ex.D[0];
    sys.l_pp = row(ex.L_pp);
    sys.l_pm = row(ex.L_pm);
    sys.l_mp = row(ex.L_mp);
    sys.l_mm = row(ex.L_mm);
    if (m == 2) {
      sys.a_plus = ex.A_plus[0](0, 1);
      sys.a_minus = ex.A_minus[0](0, 1);
    }
  } else {
    sys.exact = false;
    sys.D = from_eigen(split.D[0]);
    sys.l_pp = row(from_eigen(split.L_pp));
    sys.l_pm = row(from_eigen(split.L_pm));
    sys.l_mp = row(from_eigen(split.L_mp));
    sys.l_mm = row(from_eigen(split.L_mm));
    if (m == 2) {
      sys.a_plus = from_double(split.A_plus[0](0, 1));
      sys.a_minus = from_double(split.A_minus[0](0, 1));
    }
  }
  require_shape(sys);
  return sys;
}

/// The blocks of sys as an EigenSplit in standard coordinates.
inline EigenSplit as_split(const ConstraintSystem& sys) {
  require_shape(sys);
  const Eigen::Index m = sys.m;
  Eigen::MatrixXd ap = Eigen::MatrixXd::Zero(m, m), am = Eigen::MatrixXd::Zero(m, m);
  if (m == 2) {
    ap(0, 1) = to_double(sys.a_plus);
    ap(1, 0) = -ap(0, 1);
    am(0, 1) = to_double(sys.a_minus);
    am(1, 0) = -am(0, 1);
  }
  auto row = [](const QVector& v) { return Eigen::MatrixXd(to_eigen(v).transpose()); };
  return split_from_blocks({ap}, {am}, {sys.D.to_eigen()}, row(sys.l_pp), row(sys.l_pm), row(sys.l_mp),
                           row(sys.l_mm));
}

// ---------------------------------------------------------------------------
// Points (b, B) and verification.

/// z = (b, B row-major); for m = 1 this is (B1, B2).
using SystemPoint = Eigen::VectorXd;

inline CompatibleStructure to_structure(const SystemPoint& z, int m) {
  CompatibleStructure cs{Eigen::MatrixXd::Constant(1, 1, z(0)), Eigen::MatrixXd(m, m)};
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) cs.B2(i, j) = z(1 + i * m + j);
  return cs;
}

inline SystemPoint to_point(double b, const Eigen::MatrixXd& B) {
  const Eigen::Index m = B.rows();
  SystemPoint z(1 + m * m);
  z(0) = b;
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < m; ++j) z(1 + i * m + j) = B(i, j);
  return z;
}

struct SolutionWitness {
  CompatibleStructure cs;
  double antiholomorphy = 0;
  double rbr2 = 0;
  std::string case_label;
  SystemPoint point() const { return to_point(cs.B1(0, 0), cs.B2); }
};

struct PointCheck {
  double antiholomorphy = std::numeric_limits<double>::infinity();
  double rbr2 = std::numeric_limits<double>::infinity();
  bool in_region = false;  // b > 0 and det B > 0
  bool ok(double tolerance) const { return in_region && antiholomorphy <= tolerance && rbr2 <= tolerance; }
};

inline PointCheck check_point(const EigenSplit& split, const SystemPoint& z) {
  const int m = static_cast<int>(split.dim_V_plus());
  CompatibleStructure cs = to_structure(z, m);
  PointCheck out;
  out.in_region = z(0) > 0 && cs.B2.determinant() > 0;
  if (!out.in_region || !std::isfinite(z.norm())) return out;
  out.antiholomorphy = antiholomorphy_residual(split, cs).value();
  out.rbr2 = rbr2_residual(split, cs);
  return out;
}

// ---------------------------------------------------------------------------
// Case analysis.

/// Allowed values of b: an open interval (lo, hi) or a single point.
struct BDomain {
  double lo = 0;
  double hi = std::numeric_limits<double>::infinity();
  bool point = false;
  static BDomain at(double b) { return {b, b, true}; }
};

enum class ChartKind {
  empty,
  region,      // no equation: b > 0, det B > 0
  quadric,     // det B = value, b free
  entry_solve, // one scalar equation, affine in every entry of B
  curve,       // B = b P + b^-1 Q
  fibered,     // B = u w(b) + v y, one equation affine in y
  kodaira,     // b = coef B^power (m = 1)
  quadrant     // m = 1 with L = 0
};

/// Numeric description of the solution set used by the samplers.
struct Chart {
  ChartKind kind = ChartKind::empty;
  BDomain b;
  double value = 0;             // quadric: det B = value
  Eigen::Matrix2d P, Q;         // curve
  Eigen::Vector2d u, v;         // fibered: columns
  Eigen::RowVector2d n;         // fibered: w(b) = scale b^power n
  double scale = 0;
  int power = 0;
  bool y_free = false;          // fibered: equation holds for every y at admissible b
  double coef = 0;              // kodaira
};

struct CaseInfo {
  std::string leaf;
  std::vector<std::pair<std::string, Rational>> constants;
  std::string reason;  // why the set is empty, if it is
};

struct SolutionSet {
  CaseInfo info;
  bool empty = true;
  int dimension = -1;        // of the solution set in (b, B) space
  int fibre_dimension = -1;  // of the slice at one admissible b
  std::string shape;
  Chart chart;
  std::vector<SolutionWitness> witnesses;
};

namespace detail {

struct Decider {
  bool exact = true;
  bool zero(const Rational& x) const { return exact ? x == 0 : std::abs(to_double(x)) <= kDecisionTolerance; }
  bool positive(const Rational& x) const { return x > 0 && !zero(x); }
  bool negative(const Rational& x) const { return x < 0 && !zero(x); }
  bool zero(const QVector& v) const {
    return std::all_of(v.begin(), v.end(), [this](const Rational& x) { return zero(x); });
  }
};

inline Rational det2(const QVector& r0, const QVector& r1) { return r0[0] * r1[1] - r0[1] * r1[0]; }

/// b'(B) = d11 b12 + d12 b22 - d21 b11 - d22 b21.
inline Rational twist(const QMatrix& d, const QMatrix& b) {
  return d(0, 0) * b(0, 1) + d(0, 1) * b(1, 1) - d(1, 0) * b(0, 0) - d(1, 1) * b(1, 0);
}

inline QMatrix outer(const QVector& col, const QVector& row) {
  QMatrix out(col.size(), row.size());
  for (std::size_t i = 0; i < col.size(); ++i)
    for (std::size_t j = 0; j < row.size(); ++j) out(i, j) = col[i] * row[j];
  return out;
}

/// The linear form y -> b'(v y) as a coefficient vector.
inline QVector twist_form(const QMatrix& d, const QVector& v) {
  QVector out(2);
  for (std::size_t k = 0; k < 2; ++k) {
    QVector e(2);
    e[k] = 1;
    out[k] = twist(d, outer(v, e));
  }
  return out;
}

/// {b > 0 : p + q b^2 < 0}.
inline std::optional<BDomain> strict_square_domain(const Rational& p, const Rational& q, const Decider& dec) {
  if (dec.zero(q)) {
    if (dec.negative(p)) return BDomain{};
    return std::nullopt;
  }
  const double s = -to_double(p) / to_double(q);
  if (q > 0) {
    if (!(dec.positive(-p / q))) return std::nullopt;
    return BDomain{0, std::sqrt(s), false};
  }
  return BDomain{dec.positive(-p / q) ? std::sqrt(s) : 0.0, std::numeric_limits<double>::infinity(), false};
}

/// {b > 0 : p + q b^2 = 0} as a domain, or nullopt when empty.
inline std::optional<BDomain> square_root_domain(const Rational& p, const Rational& q, const Decider& dec) {
  if (dec.zero(q)) {
    if (dec.zero(p)) return BDomain{};
    return std::nullopt;
  }
  if (!dec.positive(-p / q)) return std::nullopt;
  return BDomain::at(std::sqrt(-to_double(p) / to_double(q)));
}

inline Eigen::Vector2d to_vec2(const QVector& v) { return {to_double(v[0]), to_double(v[1])}; }

inline Eigen::Matrix2d to_mat2(const QMatrix& q) {
  Eigen::Matrix2d out;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) out(i, j) = to_double(q(static_cast<std::size_t>(i), static_cast<std::size_t>(j)));
  return out;
}

}  // namespace detail

/// Case tree for m = 2, d = 1. Leaves: L0.D0, L0.D.hyperboloid,
/// L0.D.paraboloid, L.indep, L.mpzero.case{1,2,3}, L.prop.{independent,
/// parallel,zero}, L.ppzero.case{1,2.1,2.2,2.3}, L.nolinear.
inline SolutionSet analyze_threefold(const ConstraintSystem& sys) {
  require_shape(sys);
  if (sys.m != 2) throw PreconditionError("threefold case analysis needs m = 2");
  const detail::Decider dec{sys.exact};
  SolutionSet out;
  CaseInfo& info = out.info;
  Chart& chart = out.chart;
  auto constant = [&](const char* name, const Rational& value) { info.constants.emplace_back(name, value); };
  auto empty = [&](std::string why) {
    out.empty = true;
    out.dimension = -1;
    out.shape = "empty";
    chart.kind = ChartKind::empty;
    info.reason = std::move(why);
    return out;
  };
  auto nonempty = [&](int dimension, std::string shape) {
    out.empty = false;
    out.dimension = dimension;
    out.shape = std::move(shape);
    return out;
  };
  const QVector &lp = sys.l_pp, &np = sys.l_pm, &lm = sys.l_mp, &nm = sys.l_mm;
  const bool l_zero = dec.zero(lp) && dec.zero(np) && dec.zero(lm) && dec.zero(nm);

  if (l_zero) {
    const bool d_zero = dec.zero(sys.D(0, 0)) && dec.zero(sys.D(0, 1)) && dec.zero(sys.D(1, 0)) && dec.zero(sys.D(1, 1));
    if (d_zero) {
      info.leaf = "L0.D0";
      if (dec.zero(sys.a_plus)) {
        if (!dec.zero(sys.a_minus)) return empty("a_minus != 0 = a_plus det B");
        chart.kind = ChartKind::region;
        return nonempty(5, "open region b > 0, det B > 0");
      }
      const Rational a = sys.a_minus / sys.a_plus;
      constant("a", a);
      if (!dec.positive(a)) return empty("det B = a_minus / a_plus must be positive");
      chart.kind = ChartKind::quadric;
      chart.value = to_double(a);
      return nonempty(4, "half-line b > 0 times the quadric det B = a");
    }
    const Rational det_d = determinant(sys.D);
    constant("det_D", det_d);
    info.leaf = dec.zero(det_d) ? "L0.D.paraboloid" : "L0.D.hyperboloid";
    chart.kind = ChartKind::entry_solve;
    return nonempty(4, "hypersurface a_minus - a_plus det B + b b'(B) = 0 in b > 0, det B > 0");
  }

  const bool lp_zero = dec.zero(lp), lm_zero = dec.zero(lm);
  if (lp_zero && lm_zero) {
    info.leaf = "L.nolinear";
    return empty("L++ = L-+ = 0 forces L+- = L-- = 0, but L != 0");
  }

  const Rational det_m = detail::det2(lp, lm);
  if (!dec.zero(det_m)) {
    info.leaf = "L.indep";
    QMatrix mi = *inverse(QMatrix{{lp[0], lp[1]}, {lm[0], lm[1]}});
    QMatrix p = mi * QMatrix{{-nm[0], -nm[1]}, {0, 0}};
    QMatrix q = mi * QMatrix{{0, 0}, {np[0], np[1]}};
    const Rational alpha = -detail::det2(nm, np) / det_m;
    const Rational c1 = detail::twist(sys.D, p);
    const Rational c = sys.a_minus - sys.a_plus * alpha + detail::twist(sys.D, q);
    constant("alpha", alpha);
    constant("c1", c1);
    constant("c", c);
    if (!dec.positive(alpha)) return empty("det B = alpha must be positive");
    auto domain = detail::square_root_domain(c, c1, dec);
    if (!domain) return empty("c1 b^2 + c = 0 has no positive root");
    chart.kind = ChartKind::curve;
    chart.b = *domain;
    chart.P = detail::to_mat2(p);
    chart.Q = detail::to_mat2(q);
    return domain->point ? nonempty(0, "single point") : nonempty(1, "curve B = b P + Q / b, b > 0");
  }

  auto frame = [&](const QVector& l) {
    const Rational len2 = l[0] * l[0] + l[1] * l[1];
    return std::make_pair(QVector{l[0] / len2, l[1] / len2}, QVector{-l[1], l[0]});
  };

  if (lm_zero) {
    info.leaf = "L.mpzero";
    if (!dec.zero(np)) return empty("L-+ = 0 forces L+- = 0");
    if (dec.zero(nm)) return empty("L-- = 0 forces det B = 0");
    auto [u, v] = frame(lp);
    const Rational c1 = -detail::twist(sys.D, detail::outer(u, nm));
    const QVector rho{nm[1], -nm[0]};  // -det[n; y]
    const QVector sigma = detail::twist_form(sys.D, v);
    const QVector tau{sigma[0] - sys.a_plus * rho[0], sigma[1] - sys.a_plus * rho[1]};
    constant("c1", c1);
    constant("rho_0", rho[0]);
    constant("rho_1", rho[1]);
    constant("tau_0", tau[0]);
    constant("tau_1", tau[1]);
    chart.kind = ChartKind::fibered;
    chart.u = detail::to_vec2(u);
    chart.v = detail::to_vec2(v);
    chart.n = detail::to_vec2(nm).transpose();
    chart.scale = -1;
    chart.power = 1;
    if (!dec.zero(detail::det2(rho, tau))) {
      info.leaf += ".case1";
      return nonempty(2, "quadrant: b > 0, rho > 0, tau fixed by b");
    }
    const Rational c = (tau[0] * rho[0] + tau[1] * rho[1]) / (rho[0] * rho[0] + rho[1] * rho[1]);
    constant("c", c);
    if (!dec.zero(c)) {
      info.leaf += ".case2";
      auto domain = detail::strict_square_domain(c * sys.a_minus, c * c1, dec);
      if (!domain) return empty("c (a_minus + c1 b^2) < 0 has no solution b > 0");
      chart.b = *domain;
      return nonempty(2, "line times the interval c (a_minus + c1 b^2) < 0");
    }
    info.leaf += ".case3";
    auto domain = detail::square_root_domain(sys.a_minus, c1, dec);
    if (!domain) return empty("a_minus + c1 b^2 = 0 has no positive root");
    chart.b = *domain;
    chart.y_free = true;
    return domain->point ? nonempty(2, "half-plane rho > 0 at one value of b") : nonempty(3, "half-plane times b > 0");
  }

  if (!lp_zero) {
    info.leaf = "L.prop";
    const Rational beta = (lp[0] * lm[0] + lp[1] * lm[1]) / (lm[0] * lm[0] + lm[1] * lm[1]);
    constant("beta", beta);
    if (dec.zero(nm)) return empty("L-- = 0 forces L+- = 0 and then det B = 0");
    if (!dec.zero(detail::det2(np, nm))) return empty("L+- is not a multiple of L--");
    const Rational kappa = (np[0] * nm[0] + np[1] * nm[1]) / (nm[0] * nm[0] + nm[1] * nm[1]);
    constant("kappa", kappa);
    if (!dec.positive(-beta * kappa)) return empty("b^2 = -beta kappa has no positive root");
    const Rational b2 = -beta * kappa;
    constant("b_squared", b2);
    auto [u, v] = frame(lm);
    const QVector rho{-np[1], np[0]};  // det[n+; y]
    const QVector sigma = detail::twist_form(sys.D, v);
    const QVector tau{b2 * sigma[0] - sys.a_plus * rho[0], b2 * sigma[1] - sys.a_plus * rho[1]};
    const Rational k0 = sys.a_minus + detail::twist(sys.D, detail::outer(u, np));
    constant("K0", k0);
    chart.kind = ChartKind::fibered;
    chart.b = BDomain::at(std::sqrt(to_double(b2)));
    chart.u = detail::to_vec2(u);
    chart.v = detail::to_vec2(v);
    chart.n = detail::to_vec2(np).transpose();
    chart.scale = 1;
    chart.power = -1;
    if (!dec.zero(detail::det2(rho, tau))) {
      info.leaf += ".independent";
      return nonempty(1, "half-line");
    }
    const Rational c = (tau[0] * rho[0] + tau[1] * rho[1]) / (rho[0] * rho[0] + rho[1] * rho[1]);
    constant("c", c);
    if (!dec.zero(c)) {
      info.leaf += ".parallel";
      if (!dec.positive(-k0 / c)) return empty("rho = -b K0 / c must be positive");
      return nonempty(1, "line");
    }
    info.leaf += ".zero";
    if (!dec.zero(k0)) return empty("K0 must vanish");
    chart.y_free = true;
    return nonempty(2, "half-plane");
  }

  info.leaf = "L.ppzero";
  if (!dec.zero(nm)) return empty("L++ = 0 forces L-- = 0");
  if (dec.zero(np)) return empty("L+- = 0 forces det B = 0");
  auto [u, v] = frame(lm);
  const QVector rho{-np[1], np[0]};  // det[n+; y]
  const QVector sigma = detail::twist_form(sys.D, v);
  const Rational k = sys.a_minus + detail::twist(sys.D, detail::outer(u, np));
  constant("K", k);
  chart.kind = ChartKind::fibered;
  chart.u = detail::to_vec2(u);
  chart.v = detail::to_vec2(v);
  chart.n = detail::to_vec2(np).transpose();
  chart.scale = 1;
  chart.power = -1;
  if (!dec.zero(detail::det2(sigma, rho))) {
    info.leaf += ".case1";
    return nonempty(2, "quadrant: b > 0, x > 0");
  }
  const Rational c = (sigma[0] * rho[0] + sigma[1] * rho[1]) / (rho[0] * rho[0] + rho[1] * rho[1]);
  constant("c", c);
  if (dec.zero(k)) {
    info.leaf += ".case2.1";
    auto domain = detail::square_root_domain(-sys.a_plus, c, dec);
    if (!domain) return empty("c b^2 = a_plus has no positive root");
    chart.b = *domain;
    chart.y_free = true;
    return domain->point ? nonempty(2, "half-plane at one value of b") : nonempty(3, "half-plane times b > 0");
  }
  if (dec.zero(c)) {
    info.leaf += ".case2.2";
    if (!dec.positive(sys.a_plus == 0 ? Rational(0) : k / sys.a_plus)) return empty("rho = b K / a_plus must be positive");
    return nonempty(2, "line times b > 0");
  }
  info.leaf += ".case2.3";
  auto domain = detail::strict_square_domain(-k * sys.a_plus, k * c, dec);
  if (!domain) return empty("K (c b^2 - a_plus) < 0 has no solution b > 0");
  chart.b = *domain;
  return nonempty(2, "line times the interval K (c b^2 - a_plus) < 0");
}

/// m = d = 1 with b = B1, B = B2, both positive. Leaves: K.L0, K.point,
/// K.halfline, K.hyperbola, K.empty.
inline SolutionSet analyze_kodaira(const ConstraintSystem& sys) {
  require_shape(sys);
  if (sys.m != 1) throw PreconditionError("Kodaira case analysis needs m = 1");
  const detail::Decider dec{sys.exact};
  const Rational lpp = sys.l_pp[0], lpm = sys.l_pm[0], lmp = sys.l_mp[0], lmm = sys.l_mm[0];
  SolutionSet out;
  auto empty = [&](std::string why) {
    out.info.leaf = "K.empty";
    out.info.reason = std::move(why);
    out.shape = "empty";
    return out;
  };
  auto nonempty = [&](const char* leaf, int dimension, const char* shape) {
    out.info.leaf = leaf;
    out.empty = false;
    out.dimension = dimension;
    out.shape = shape;
    return out;
  };
  if (!dec.zero(lmm)) {
    const Rational ratio = -lpp / lmm;  // b = ratio B
    out.info.constants.emplace_back("ratio", ratio);
    if (!dec.positive(ratio)) return empty("B1 = -B2 L++ / L-- must be positive");
    out.chart.kind = ChartKind::kodaira;
    out.chart.coef = to_double(ratio);
    out.chart.power = 1;
    if (!dec.zero(lmp)) {
      const Rational sq = -lpm * lmm / (lpp * lmp);
      out.info.constants.emplace_back("B_squared", sq);
      if (!dec.positive(sq)) return empty("B2^2 = -L+- L-- / (L++ L-+) has no positive root");
      out.chart.b = BDomain::at(std::sqrt(to_double(sq)));
      return nonempty("K.point", 0, "single point");
    }
    if (!dec.zero(lpm)) return empty("L-+ = 0 forces L+- = 0");
    return nonempty("K.halfline", 1, "half-line B1 = ratio B2");
  }
  if (!dec.zero(lpp)) return empty("L-- = 0 forces L++ = 0");
  if (!dec.zero(lmp)) {
    const Rational product = lpm / lmp;
    out.info.constants.emplace_back("product", product);
    if (!dec.positive(product)) return empty("B1 B2 = L+- / L-+ must be positive");
    out.chart.kind = ChartKind::kodaira;
    out.chart.coef = to_double(product);
    out.chart.power = -1;
    return nonempty("K.hyperbola", 1, "hyperbola B1 B2 = L+- / L-+");
  }
  if (!dec.zero(lpm)) return empty("L-+ = 0 forces L+- = 0");
  out.chart.kind = ChartKind::quadrant;
  return nonempty("K.L0", 2, "quadrant B1 > 0, B2 > 0");
}

inline CaseInfo classify_case(const ConstraintSystem& sys) {
  return sys.m == 1 ? analyze_kodaira(sys).info : analyze_threefold(sys).info;
}

// ---------------------------------------------------------------------------
// Sampling in the charts.

namespace detail {

inline double draw_b(std::mt19937_64& rng, const BDomain& domain) {
  if (domain.point) return domain.lo;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const bool lo_open = domain.lo <= 0, hi_open = !std::isfinite(domain.hi);
  if (lo_open && hi_open) return std::exp(kLogRange * (2 * unit(rng) - 1));
  if (hi_open) return domain.lo * std::exp(kLogRange * (1e-3 + unit(rng)));
  if (lo_open) return domain.hi * std::exp(-kLogRange * (1e-3 + unit(rng)));
  const double a = std::log(domain.lo), b = std::log(domain.hi);
  const double t = 1e-3 + (1 - 2e-3) * unit(rng);
  return std::exp(a + t * (b - a));
}

inline Eigen::Matrix2d draw_positive_matrix(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> box(-kChartHalfWidth, kChartHalfWidth);
  while (true) {
    Eigen::Matrix2d b;
    b << box(rng), box(rng), box(rng), box(rng);
    const double det = b.determinant();
    if (std::abs(det) < 1e-3) continue;
    if (det < 0) b.row(0) *= -1;
    return b;
  }
}

inline double equation_value(const ConstraintSystem& sys, double b, const Eigen::Matrix2d& B) {
  const Eigen::Matrix2d d = to_mat2(sys.D);
  const double twist = d(0, 0) * B(0, 1) + d(0, 1) * B(1, 1) - d(1, 0) * B(0, 0) - d(1, 1) * B(1, 0);
  return to_double(sys.a_minus) - to_double(sys.a_plus) * B.determinant() + b * twist;
}

/// One draw from the chart; nullopt when the draw is rejected.
inline std::optional<SystemPoint> draw_point(const ConstraintSystem& sys, const Chart& chart, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  switch (chart.kind) {
    case ChartKind::empty:
      return std::nullopt;
    case ChartKind::quadrant: {
      SystemPoint z(2);
      z << draw_b(rng, {}), draw_b(rng, {});
      return z;
    }
    case ChartKind::kodaira: {
      const double B = draw_b(rng, chart.b);
      SystemPoint z(2);
      z << chart.coef * std::pow(B, chart.power), B;
      return z;
    }
    case ChartKind::region:
      return to_point(draw_b(rng, {}), draw_positive_matrix(rng));
    case ChartKind::quadric: {
      Eigen::Matrix2d B = draw_positive_matrix(rng);
      B *= std::sqrt(chart.value / B.determinant());
      return to_point(draw_b(rng, {}), B);
    }
    case ChartKind::entry_solve: {
      const double b = draw_b(rng, {});
      Eigen::Matrix2d B = draw_positive_matrix(rng);
      // f is affine in each entry; solve along the entry with the largest slope
      const double f0 = equation_value(sys, b, B);
      int best = 0;
      double slope = 0;
      for (int k = 0; k < 4; ++k) {
        Eigen::Matrix2d e = Eigen::Matrix2d::Zero();
        e(k / 2, k % 2) = 1;
        const double s = equation_value(sys, b, B + e) - f0;
        if (std::abs(s) > std::abs(slope)) {
          slope = s;
          best = k;
        }
      }
      if (std::abs(slope) < 1e-9) return std::nullopt;
      B(best / 2, best % 2) -= f0 / slope;
      if (B.determinant() <= 0 || B.cwiseAbs().maxCoeff() > kChartHalfWidth) return std::nullopt;
      return to_point(b, B);
    }
    case ChartKind::curve: {
      const double b = draw_b(rng, chart.b);
      return to_point(b, Eigen::Matrix2d(b * chart.P + chart.Q / b));
    }
    case ChartKind::fibered: {
      const double b = draw_b(rng, chart.b);
      const Eigen::RowVector2d w = chart.scale * std::pow(b, chart.power) * chart.n;
      auto matrix = [&](const Eigen::RowVector2d& y) {
        return Eigen::Matrix2d(chart.u * w + chart.v * y);
      };
      const Eigen::RowVector2d r(-w(1), w(0));  // det B = r . y
      std::uniform_real_distribution<double> box(-kChartHalfWidth, kChartHalfWidth);
      Eigen::RowVector2d y;
      if (chart.y_free) {
        y << box(rng), box(rng);
        if (r.dot(y) < 0) y = -y;
      } else {
        const double f0 = equation_value(sys, b, matrix(Eigen::RowVector2d::Zero()));
        const Eigen::RowVector2d g(equation_value(sys, b, matrix(Eigen::RowVector2d(1, 0))) - f0,
                                   equation_value(sys, b, matrix(Eigen::RowVector2d(0, 1))) - f0);
        if (g.norm() < 1e-12) return std::nullopt;
        const Eigen::RowVector2d y0 = -f0 * g / g.squaredNorm();
        const Eigen::RowVector2d t = Eigen::RowVector2d(-g(1), g(0)) / g.norm();
        double lo = -kChartHalfWidth, hi = kChartHalfWidth;
        const double base = r.dot(y0), rate = r.dot(t);
        if (std::abs(rate) < 1e-12) {
          if (base <= 0) return std::nullopt;
        } else if (rate > 0) {
          lo = std::max(lo, -base / rate);
        } else {
          hi = std::min(hi, -base / rate);
        }
        if (!(lo < hi)) return std::nullopt;
        const double s = lo + (hi - lo) * (1e-3 + (1 - 2e-3) * unit(rng));
        y = y0 + s * t;
      }
      return to_point(b, matrix(y));
    }
  }
  return std::nullopt;
}

}  // namespace detail

struct SampleReport {
  std::vector<SolutionWitness> witnesses;
  int rejected = 0;
};

/// Seeded draws from the chart of set, each re-verified through the residual
/// operations on the blocks of sys. Throws EmptySolutionSetError when empty.
inline SampleReport sample_solutions(const ConstraintSystem& sys, const SolutionSet& set, int count,
                                     std::uint64_t seed) {
  if (set.empty) throw EmptySolutionSetError("solution set is empty: " + set.info.reason);
  const EigenSplit split = as_split(sys);
  std::mt19937_64 rng(seed);
  SampleReport report;
  const int budget = 200 * std::max(count, 1);
  for (int attempt = 0; attempt < budget && static_cast<int>(report.witnesses.size()) < count; ++attempt) {
    auto z = detail::draw_point(sys, set.chart, rng);
    if (!z) {
      ++report.rejected;
      continue;
    }
    PointCheck check = check_point(split, *z);
    if (!check.ok(kWitnessTolerance)) {
      ++report.rejected;
      continue;
    }
    report.witnesses.push_back({to_structure(*z, sys.m), check.antiholomorphy, check.rbr2, set.info.leaf});
  }
  return report;
}

inline SolutionSet solve_with_witnesses(SolutionSet set, const ConstraintSystem& sys, int count, std::uint64_t seed) {
  if (set.empty) return set;
  const bool b_moves = !(set.chart.b.point && (set.chart.kind == ChartKind::curve || set.chart.kind == ChartKind::fibered ||
                                               set.chart.kind == ChartKind::kodaira));
  set.fibre_dimension = set.dimension - (b_moves ? 1 : 0);
  set.witnesses = sample_solutions(sys, set, count, seed).witnesses;
  return set;
}

inline SolutionSet solve_kodaira(const ConstraintSystem& sys, std::uint64_t seed = 0) {
  return solve_with_witnesses(analyze_kodaira(sys), sys, 3, seed);
}

inline SolutionSet solve_threefold(const ConstraintSystem& sys, std::uint64_t seed = 0) {
  return solve_with_witnesses(analyze_threefold(sys), sys, 3, seed);
}

inline SolutionSet solve_system(const ConstraintSystem& sys, std::uint64_t seed = 0) {
  return sys.m == 1 ? solve_kodaira(sys, seed) : solve_threefold(sys, seed);
}

}  // namespace torusreal
