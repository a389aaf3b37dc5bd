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
#include <complex>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "torusreal/lattice.hpp"

namespace torusreal {

using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using Complex = std::complex<double>;

/// J^2 = -I is accepted when ||J^2 + I||_max <= kSquareTolerance * max(1, ||J||_max^2).
constexpr double kSquareTolerance = 1e-12;
/// Default tolerance for "this residual vanishes".
constexpr double kResidualTolerance = 1e-9;
/// Lattice membership: preimage coordinates must be within this of integers.
constexpr double kLatticeTolerance = 1e-8;

template <class Derived>
double max_abs(const Eigen::MatrixBase<Derived>& m) {
  return m.size() ? static_cast<double>(m.cwiseAbs().maxCoeff()) : 0.0;
}

inline bool squares_to_minus_identity(const Eigen::MatrixXd& j) {
  if (j.rows() != j.cols() || j.rows() % 2 != 0) return false;
  const double scale = std::max(1.0, max_abs(j) * max_abs(j));
  return max_abs(j * j + Eigen::MatrixXd::Identity(j.rows(), j.cols())) <= kSquareTolerance * scale;
}

namespace detail {
/// Indices of the first columns of (I - iJ) that are linearly independent.
inline std::vector<Eigen::Index> hodge_columns(const Eigen::MatrixXd& j) {
  const Eigen::Index n = j.rows();
  CMatrix all = CMatrix::Identity(n, n) - Complex(0, 1) * j.cast<Complex>();
  std::vector<Eigen::Index> picked;
  CMatrix current(n, 0);
  const double scale = std::max(1.0, max_abs(j));
  for (Eigen::Index c = 0; c < n && static_cast<Eigen::Index>(picked.size()) < n / 2; ++c) {
    CMatrix trial(n, current.cols() + 1);
    trial << current, all.col(c);
    Eigen::FullPivLU<CMatrix> lu(trial);
    lu.setThreshold(1e-10 * scale);
    if (lu.rank() == trial.cols()) {
      current = trial;
      picked.push_back(c);
    }
  }
  return picked;
}
}  // namespace detail

/// Basis x_j - iJx_j of V over the first complex-independent standard basis
/// vectors x_j. Convention: J acts by +i on every returned column.
inline CMatrix hodge_subspace(const Eigen::MatrixXd& j) {
  if (!squares_to_minus_identity(j)) throw PreconditionError("hodge_subspace needs J^2 = -I");
  const Eigen::Index n = j.rows();
  CMatrix all = CMatrix::Identity(n, n) - Complex(0, 1) * j.cast<Complex>();
  auto cols = detail::hodge_columns(j);
  CMatrix basis(n, static_cast<Eigen::Index>(cols.size()));
  for (std::size_t k = 0; k < cols.size(); ++k) basis.col(static_cast<Eigen::Index>(k)) = all.col(cols[k]);
  return basis;
}

/// Sign of det(x_1, J x_1, ..., x_m, J x_m) for the real vectors behind the
/// Hodge basis; positive means J induces the standard orientation.
inline bool induces_standard_orientation(const Eigen::MatrixXd& j) {
  auto cols = detail::hodge_columns(j);
  const Eigen::Index n = j.rows();
  Eigen::MatrixXd frame(n, n);
  for (std::size_t k = 0; k < cols.size(); ++k) {
    Eigen::VectorXd x = Eigen::VectorXd::Unit(n, cols[k]);
    frame.col(static_cast<Eigen::Index>(2 * k)) = x;
    frame.col(static_cast<Eigen::Index>(2 * k + 1)) = j * x;
  }
  return frame.determinant() > 0;
}

/// (J1, J2): complex structures on Lambda (x) R and Gamma (x) R.
struct ComplexStructurePair {
  Eigen::MatrixXd J1;
  Eigen::MatrixXd J2;
  bool orientation_ok = false;
};

inline ComplexStructurePair make_structure_pair(Eigen::MatrixXd j1, Eigen::MatrixXd j2) {
  if (!squares_to_minus_identity(j1)) throw PreconditionError("J1^2 != -I");
  if (!squares_to_minus_identity(j2)) throw PreconditionError("J2^2 != -I");
  const bool ok = induces_standard_orientation(j1) && induces_standard_orientation(j2);
  return {std::move(j1), std::move(j2), ok};
}

inline std::vector<Eigen::MatrixXd> to_eigen(const std::vector<QMatrix>& comps) {
  std::vector<Eigen::MatrixXd> out;
  for (const auto& c : comps) out.push_back(c.to_eigen());
  return out;
}

/// Complex bilinear extension of the form: A(v, w)_k = v^T A_k w.
inline CVector complex_form(const std::vector<Eigen::MatrixXd>& comps, const CVector& v, const CVector& w) {
  CVector out(static_cast<Eigen::Index>(comps.size()));
  for (std::size_t k = 0; k < comps.size(); ++k)
    out(static_cast<Eigen::Index>(k)) = v.transpose() * comps[k].cast<Complex>() * w;
  return out;
}

inline Eigen::VectorXd real_form(const std::vector<Eigen::MatrixXd>& comps, const Eigen::VectorXd& x,
                                 const Eigen::VectorXd& y) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(comps.size()));
  for (std::size_t k = 0; k < comps.size(); ++k) out(static_cast<Eigen::Index>(k)) = x.dot(comps[k] * y);
  return out;
}

/// Coordinates (alpha, beta) of z in the basis [P | conj(P)]; alpha is the
/// component along the subspace spanned by P, taken along its conjugate.
inline std::pair<CVector, CVector> split_along_conjugate(const CMatrix& p, const CVector& z) {
  CMatrix full(p.rows(), 2 * p.cols());
  full << p, p.conjugate();
  CVector c = full.fullPivLu().solve(z);
  return {c.head(p.cols()), c.tail(p.cols())};
}

struct RiemannResidual {
  double component_route = 0;  // component of A(conj V, conj V) in U, mapped to real coordinates
  double identity_route = 0;   // A(x, J2 y) + A(J2 x, y) - J1 A(x, y) + J1 A(J2 x, J2 y)
  double value() const { return std::max(component_route, identity_route); }
};

/// Both formulations of the first Riemann relation, evaluated on all pairs
/// of standard basis vectors, max-norm.
inline RiemannResidual riemann_residuals(const BundleDatum& datum, const ComplexStructurePair& pair) {
  const auto comps = to_eigen(datum.components);
  const Eigen::Index n = pair.J2.rows();
  if (n != static_cast<Eigen::Index>(datum.base_rank()) || pair.J1.rows() != static_cast<Eigen::Index>(datum.fibre_rank()))
    throw DimensionError("complex structure does not match bundle ranks");
  const CMatrix u_basis = hodge_subspace(pair.J1);
  RiemannResidual out;
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index b = 0; b < n; ++b) {
      const Eigen::VectorXd x = Eigen::VectorXd::Unit(n, a), y = Eigen::VectorXd::Unit(n, b);
      const Eigen::VectorXd jx = pair.J2 * x, jy = pair.J2 * y;
      Eigen::VectorXd r = real_form(comps, x, jy) + real_form(comps, jx, y) - pair.J1 * real_form(comps, x, y) +
                          pair.J1 * real_form(comps, jx, jy);
      out.identity_route = std::max(out.identity_route, r.cwiseAbs().maxCoeff());

      const CVector vbar = x.cast<Complex>() + Complex(0, 1) * jx.cast<Complex>();
      const CVector wbar = y.cast<Complex>() + Complex(0, 1) * jy.cast<Complex>();
      const CVector alpha = split_along_conjugate(u_basis, complex_form(comps, vbar, wbar)).first;
      const Eigen::VectorXd real_part = (u_basis * alpha).real();
      Eigen::VectorXd mapped = -2.0 * pair.J1 * real_part;
      out.component_route = std::max(out.component_route, mapped.cwiseAbs().maxCoeff());
    }
  return out;
}

/// Largest of the two formulations; throws if they disagree, which would
/// signal a bug or a hopelessly ill-conditioned pair.
inline double riemann_residual(const BundleDatum& datum, const ComplexStructurePair& pair) {
  const RiemannResidual r = riemann_residuals(datum, pair);
  constexpr double kAgreement = 1e-8;
  if (std::abs(r.component_route - r.identity_route) > kAgreement * std::max(1.0, r.value()))
    throw Error("Riemann residual formulations disagree");
  return r.value();
}

/// A = B' + B'' + conjugates. Matrices are in the Hodge bases: for each
/// U-coordinate k, B_prime[k](i, j) = B'(v_i, v_j)_k and
/// B_doubleprime[k](i, j) = B''(v_i, conj v_j)_k.
struct HodgeDecomposition {
  CMatrix V;  // 2m x m
  CMatrix U;  // 2d x d
  std::vector<CMatrix> B_prime;
  std::vector<CMatrix> B_doubleprime;
};

/// U-coordinates of the U-component of z (taken along conj U).
inline CVector u_component(const HodgeDecomposition& dec, const CVector& z) {
  return split_along_conjugate(dec.U, z).first;
}

/// V-coordinates of p_V(x) for a real vector x.
inline CVector v_coordinates(const HodgeDecomposition& dec, const Eigen::VectorXd& x) {
  return split_along_conjugate(dec.V, x.cast<Complex>()).first;
}

inline HodgeDecomposition decompose(const BundleDatum& datum, const ComplexStructurePair& pair,
                                    double tolerance = kResidualTolerance) {
  const auto comps = to_eigen(datum.components);
  double scale = 1.0;
  for (const auto& c : comps) scale = std::max(scale, max_abs(c));
  if (riemann_residual(datum, pair) > tolerance * scale) throw PreconditionError("Riemann relation violated");
  HodgeDecomposition dec{hodge_subspace(pair.J2), hodge_subspace(pair.J1), {}, {}};
  const Eigen::Index m = dec.V.cols(), d = dec.U.cols();
  dec.B_prime.assign(static_cast<std::size_t>(d), CMatrix::Zero(m, m));
  dec.B_doubleprime.assign(static_cast<std::size_t>(d), CMatrix::Zero(m, m));
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < m; ++j) {
      const CVector holo = u_component(dec, complex_form(comps, dec.V.col(i), dec.V.col(j)));
      const CVector mixed = u_component(dec, complex_form(comps, dec.V.col(i), dec.V.col(j).conjugate()));
      for (Eigen::Index k = 0; k < d; ++k) {
        dec.B_prime[static_cast<std::size_t>(k)](i, j) = holo(k);
        dec.B_doubleprime[static_cast<std::size_t>(k)](i, j) = mixed(k);
      }
    }
  return dec;
}

/// B'(xi, eta) as U-coordinates, xi and eta in V-coordinates.
inline CVector b_prime(const HodgeDecomposition& dec, const CVector& xi, const CVector& eta) {
  CVector out(static_cast<Eigen::Index>(dec.B_prime.size()));
  for (std::size_t k = 0; k < dec.B_prime.size(); ++k)
    out(static_cast<Eigen::Index>(k)) = xi.transpose() * dec.B_prime[k] * eta;
  return out;
}

/// B''(xi, conj eta) as U-coordinates.
inline CVector b_doubleprime(const HodgeDecomposition& dec, const CVector& xi, const CVector& eta) {
  CVector out(static_cast<Eigen::Index>(dec.B_doubleprime.size()));
  for (std::size_t k = 0; k < dec.B_doubleprime.size(); ++k)
    out(static_cast<Eigen::Index>(k)) = xi.transpose() * dec.B_doubleprime[k] * eta.conjugate();
  return out;
}

/// Real components of B' + B'' + conjugates, evaluated back on Gamma (x) R.
inline std::vector<Eigen::MatrixXd> reassemble_form(const HodgeDecomposition& dec) {
  const Eigen::Index n = dec.V.rows(), fibre = dec.U.rows();
  std::vector<Eigen::MatrixXd> out(static_cast<std::size_t>(fibre), Eigen::MatrixXd::Zero(n, n));
  std::vector<CVector> coords;
  for (Eigen::Index a = 0; a < n; ++a) coords.push_back(v_coordinates(dec, Eigen::VectorXd::Unit(n, a)));
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index b = 0; b < n; ++b) {
      const CVector& xi = coords[static_cast<std::size_t>(a)];
      const CVector& eta = coords[static_cast<std::size_t>(b)];
      CVector alpha = b_prime(dec, xi, eta) + b_doubleprime(dec, xi, eta) - b_doubleprime(dec, eta, xi);
      Eigen::VectorXd value = 2.0 * (dec.U * alpha).real();
      for (Eigen::Index k = 0; k < fibre; ++k) out[static_cast<std::size_t>(k)](a, b) = value(k);
    }
  return out;
}

inline bool is_parallelizable(const HodgeDecomposition& dec, double tolerance = kResidualTolerance) {
  double worst = 0;
  for (const auto& b : dec.B_doubleprime) worst = std::max(worst, max_abs(b));
  return worst <= tolerance;
}

/// Points with B'' = 0 are singular in the family when d = 1 and m >= 3; for
/// m <= 2 the family is smooth.
inline bool is_singular_point(const BundleDatum& datum, const HodgeDecomposition& dec,
                              double tolerance = kResidualTolerance) {
  if (datum.d != 1) throw PreconditionError("singular locus criterion needs d = 1");
  return datum.m >= 3 && is_parallelizable(dec, tolerance);
}

/// F_gamma(v) = B'(v, a) + 2 B''(v, conj a) + B''(a, conj a), a = p_V(gamma);
/// v in V-coordinates, result in U-coordinates.
inline CVector cocycle_F(const HodgeDecomposition& dec, const CVector& v, const Eigen::VectorXd& gamma) {
  if (v.size() != dec.V.cols() || gamma.size() != dec.V.rows()) throw DimensionError("cocycle_F shape mismatch");
  const CVector a = v_coordinates(dec, gamma);
  return b_prime(dec, v, a) + 2.0 * b_doubleprime(dec, v, a) + b_doubleprime(dec, a, a);
}

/// If the U-vector with coordinates alpha equals p_U(lambda) for an integer
/// lambda, returns lambda (rounded). The preimage is 2 Re(U alpha).
inline std::optional<Eigen::VectorXd> projected_lattice_preimage(const CMatrix& u_basis, const CVector& alpha,
                                                                 double tolerance = kLatticeTolerance) {
  const CVector z = u_basis * alpha;
  const Eigen::VectorXd lambda = 2.0 * z.real();
  const Eigen::VectorXd rounded = lambda.array().round();
  if ((lambda - rounded).cwiseAbs().maxCoeff() > tolerance) return std::nullopt;
  // the U-component of the integer vector must reproduce z
  const CVector back = u_basis * split_along_conjugate(u_basis, rounded.cast<Complex>()).first;
  if ((back - z).cwiseAbs().maxCoeff() > tolerance) return std::nullopt;
  return rounded;
}

}  // namespace torusreal
