#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <complex>
#include <numbers>
#include <random>

#include "cbs/errors.hpp"

namespace cbs::verify {

using Complex = std::complex<double>;
using DenseOperator = Eigen::MatrixXcd;
using DiagonalData = Eigen::VectorXcd;

enum class ReferenceVariant { laplacian_1d_periodic, laplacian_2d_periodic };

/// Discrete del^2 + k0^2 with periodic boundary conditions: real symmetric,
/// eigenvalues k0^2 - (2/h^2)(1 - cos(2 pi j / n)) per axis (Kronecker sum in 2D).
inline DenseOperator build_reference_operator(int n, ReferenceVariant variant, double k0 = 1.0,
                                              double h = 1.0) {
  if (n < 4) throw InvalidParameterError("build_reference_operator: n must be >= 4");
  const double ih2 = 1.0 / (h * h);

  Eigen::MatrixXd lap1d = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    lap1d(i, i) = -2.0 * ih2;
    lap1d(i, (i + 1) % n) = ih2;
    lap1d(i, (i + n - 1) % n) = ih2;
  }

  if (variant == ReferenceVariant::laplacian_1d_periodic) {
    Eigen::MatrixXd a = lap1d + k0 * k0 * Eigen::MatrixXd::Identity(n, n);
    return a.cast<Complex>();
  }

  const int total = n * n;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(total, total);
  auto gid = [n](int ix, int iy) { return ((iy % n + n) % n) * n + ((ix % n + n) % n); };
  for (int iy = 0; iy < n; ++iy) {
    for (int ix = 0; ix < n; ++ix) {
      const int g = gid(ix, iy);
      a(g, g) = -4.0 * ih2 + k0 * k0;
      a(g, gid(ix + 1, iy)) += ih2;
      a(g, gid(ix - 1, iy)) += ih2;
      a(g, gid(ix, iy + 1)) += ih2;
      a(g, gid(ix, iy - 1)) += ih2;
    }
  }
  return a.cast<Complex>();
}

inline void require_self_adjoint(const DenseOperator& a, const char* where,
                                 double tol = 1e-12) {
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  if ((a - a.adjoint()).cwiseAbs().maxCoeff() > tol * scale)
    throw InvalidParameterError(std::string(where) + ": operator is not self-adjoint");
}

/// Cayley transform U = (A - i eps I)(A + i eps I)^{-1}; unitary for
/// self-adjoint A, with spectrum on the unit circle.
inline DenseOperator cayley(const DenseOperator& a, double epsilon) {
  if (!(epsilon > 0.0)) throw InvalidParameterError("cayley: epsilon must be > 0");
  require_self_adjoint(a, "cayley");
  const Eigen::Index n = a.rows();
  const DenseOperator id = DenseOperator::Identity(n, n);
  const DenseOperator shift_plus = a + Complex(0.0, epsilon) * id;
  const DenseOperator shift_minus = a - Complex(0.0, epsilon) * id;
  // U^T = (A + i eps)^{-T} (A - i eps)^T; both factors are symmetric here,
  // but solve on the right for generality: U = shift_minus * shift_plus^{-1}.
  return shift_plus.transpose().partialPivLu().solve(shift_minus.transpose()).transpose();
}

/// Max-abs deviation of the exact identity (A + i eps I)^{-1} = (I - U)/(2 i eps).
inline double check_resolvent_identity(const DenseOperator& a, double epsilon) {
  const Eigen::Index n = a.rows();
  const DenseOperator id = DenseOperator::Identity(n, n);
  const DenseOperator g = (a + Complex(0.0, epsilon) * id).partialPivLu().solve(id);
  const DenseOperator u = cayley(a, epsilon);
  const DenseOperator via_u = (id - u) / Complex(0.0, 2.0 * epsilon);
  return (g - via_u).cwiseAbs().maxCoeff();
}

inline void require_diagonal(const DenseOperator& v, const char* where) {
  DenseOperator off = v;
  off.diagonal().setZero();
  if (off.cwiseAbs().maxCoeff() != 0.0)
    throw InvalidParameterError(std::string(where) + ": V must be diagonal (multiplicative)");
}

struct CbsOperators {
  DenseOperator m_direct;
  DenseOperator m_cayley;
};

/// The CBS iteration operator for a self-adjoint reference A and diagonal
/// modified potential V (gain term included, V = Delta - i eps).
///
/// With this sign convention of A (so that the damped Lippmann-Schwinger
/// resolvent is -(A + i eps I)^{-1}), the preconditioner gamma = (i/eps) V
/// gives
///     M = I - (i/eps) V - (i/eps) V (A + i eps I)^{-1} V,
/// and substituting the Cayley identity for the resolvent yields the exact
/// quadratic form
///     M = (1/(2 eps^2)) (-V^2 + V U V - 2 i eps V + 2 eps^2 I).
/// Both constructions are returned; they agree to roundoff.
inline CbsOperators cbs_operator_dense(const DenseOperator& a, const DenseOperator& v,
                                       double epsilon) {
  if (!(epsilon > 0.0)) throw InvalidParameterError("cbs_operator_dense: epsilon must be > 0");
  require_self_adjoint(a, "cbs_operator_dense");
  require_diagonal(v, "cbs_operator_dense");

  const Eigen::Index n = a.rows();
  const DenseOperator id = DenseOperator::Identity(n, n);
  const Complex i_over_eps(0.0, 1.0 / epsilon);

  const DenseOperator g = (a + Complex(0.0, epsilon) * id).partialPivLu().solve(id);
  CbsOperators out;
  out.m_direct = id - i_over_eps * v - i_over_eps * (v * (g * v));

  const DenseOperator u = cayley(a, epsilon);
  out.m_cayley = (-v * v + v * u * v - Complex(0.0, 2.0 * epsilon) * v +
                  2.0 * epsilon * epsilon * id) /
                 (2.0 * epsilon * epsilon);
  return out;
}

/// Max of |<psi, M psi>| / ||psi||^2 over random complex unit vectors.
inline double numerical_range_samples(const DenseOperator& m, int trials, unsigned seed = 7u) {
  if (trials < 100) throw InvalidParameterError("numerical_range_samples: trials must be >= 100");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const Eigen::Index n = m.rows();
  Eigen::VectorXcd psi(n);
  double best = 0.0;
  for (int t = 0; t < trials; ++t) {
    for (Eigen::Index i = 0; i < n; ++i) psi[i] = Complex(gauss(rng), gauss(rng));
    const double nn = psi.squaredNorm();
    best = std::max(best, std::abs((psi.adjoint() * (m * psi)).value()) / nn);
  }
  return best;
}

/// Numerical radius via the rotated-Hermitian-part sweep:
/// w(M) = max_theta lambda_max((e^{i theta} M + e^{-i theta} M^H)/2).
/// Deterministic bound on the field-of-values modulus.
inline double field_of_values_max(const DenseOperator& m, int n_angles = 64) {
  double best = 0.0;
  for (int j = 0; j < n_angles; ++j) {
    const double theta = 2.0 * std::numbers::pi * j / n_angles;
    const Complex phase = std::exp(Complex(0.0, theta));
    const DenseOperator h = 0.5 * (phase * m + (phase * m).adjoint());
    Eigen::SelfAdjointEigenSolver<DenseOperator> es(h, Eigen::EigenvaluesOnly);
    best = std::max(best, es.eigenvalues().maxCoeff());
  }
  return best;
}

inline double spectral_radius(const DenseOperator& m) {
  if (m.rows() != m.cols()) throw InvalidParameterError("spectral_radius: matrix must be square");
  Eigen::ComplexEigenSolver<DenseOperator> es(m, /*computeEigenvectors=*/false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

struct AdmissibilityReport {
  bool admissible = true;        // every Delta-eigenvalue in the closed upper half-disk
  bool strict = true;            // ... with strict inequality (absorbing, not marginal)
  bool eq21_all = true;          // scalar inequality |eps^2-(v+i eps)^2|+|v|^2 <= 2 eps^2
  bool implication_ok = true;    // admissible entries always satisfied the inequality
  Complex worst_delta{0.0, 0.0};  // Delta-eigenvalue with the largest violation margin
};

/// Pointwise admissibility of a diagonal modified potential V: the unshifted
/// contrast Delta = V + i eps must satisfy |Delta| <= eps and Im Delta >= 0.
/// Also evaluates the scalar inequality |eps^2 - (v + i eps)^2| + |v|^2 <= 2 eps^2
/// entrywise and records that admissibility implied it on every tested entry.
inline AdmissibilityReport check_admissibility(const DiagonalData& v_diag, double epsilon) {
  if (!(epsilon > 0.0)) throw InvalidParameterError("check_admissibility: epsilon must be > 0");
  AdmissibilityReport rep;
  const double eps2 = epsilon * epsilon;
  const double tol = 1e-12 * epsilon;
  double worst_margin = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < v_diag.size(); ++i) {
    const Complex v = v_diag[i];
    const Complex delta = v + Complex(0.0, epsilon);
    const double mod_excess = std::abs(delta) - epsilon;
    const double im_deficit = -delta.imag();
    const double margin = std::max(mod_excess, im_deficit);
    const bool ok22 = margin <= tol;
    const bool boundary = std::abs(mod_excess) <= tol || std::abs(im_deficit) <= tol;

    const double lhs21 = std::abs(eps2 - delta * delta) + std::norm(v);
    const bool ok21 = lhs21 <= 2.0 * eps2 + 1e-12 * eps2;

    rep.admissible &= ok22;
    rep.strict &= ok22 && !boundary;
    rep.eq21_all &= ok21;
    if (ok22 && !ok21) rep.implication_ok = false;
    if (margin > worst_margin) {
      worst_margin = margin;
      rep.worst_delta = delta;
    }
  }
  return rep;
}

}  // namespace cbs::verify
