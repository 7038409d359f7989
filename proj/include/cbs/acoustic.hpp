#pragma once

#include <Eigen/Dense>

#include <complex>
#include <vector>

#include "cbs/dense_verify.hpp"
#include "cbs/errors.hpp"

namespace cbs::verify {

enum class AcousticVariant { one_d, two_d };

/// First-order variable-density acoustics (A + V) psi = f on a periodic grid,
/// with psi = (v, p) stacked per component block. All derivatives live in A;
/// iA is self-adjoint and V is block-diagonal multiplicative:
///   A = -[[0, grad], [div, 0]] - i omega diag(rho0, kappa0)
///   V = -i omega diag(delta_rho per velocity component, delta_kappa).
struct AcousticSystem {
  int n = 0;                 // grid points per axis
  int components = 2;        // 2 in 1D (v, p), 3 in 2D (vx, vy, p)
  double omega = 0.0;
  DenseOperator a;
  DenseOperator v;

  Eigen::Index dim() const { return a.rows(); }
};

namespace acoustic_detail {

inline Eigen::MatrixXd centered_difference_periodic(int n, double h) {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    d(i, (i + 1) % n) = 1.0 / (2.0 * h);
    d(i, (i + n - 1) % n) = -1.0 / (2.0 * h);
  }
  return d;
}

inline void validate_material(const Eigen::VectorXcd& f, const char* name) {
  for (Eigen::Index i = 0; i < f.size(); ++i) {
    if (!(f[i].real() > 0.0))
      throw InvalidModelError(std::string("build_acoustic_system: ") + name +
                              " must have positive real part");
    if (f[i].imag() < 0.0)
      throw InvalidModelError(std::string("build_acoustic_system: ") + name +
                              " must be gain-free (Im >= 0)");
  }
}

}  // namespace acoustic_detail

inline AcousticSystem build_acoustic_system(int n, const Eigen::VectorXcd& rho_field,
                                            const Eigen::VectorXcd& kappa_field, double omega,
                                            double rho0, double kappa0,
                                            AcousticVariant variant = AcousticVariant::one_d,
                                            double h = 1.0) {
  if (n < 4) throw InvalidParameterError("build_acoustic_system: n must be >= 4");
  if (!(omega > 0.0 && rho0 > 0.0 && kappa0 > 0.0))
    throw InvalidParameterError("build_acoustic_system: omega, rho0, kappa0 must be > 0");
  const int points = (variant == AcousticVariant::one_d) ? n : n * n;
  if (rho_field.size() != points || kappa_field.size() != points)
    throw ShapeError("build_acoustic_system: field size does not match grid");
  acoustic_detail::validate_material(rho_field, "rho");
  acoustic_detail::validate_material(kappa_field, "kappa");

  AcousticSystem sys;
  sys.n = n;
  sys.omega = omega;
  sys.components = (variant == AcousticVariant::one_d) ? 2 : 3;
  const int dim = sys.components * points;

  Eigen::MatrixXd a0 = Eigen::MatrixXd::Zero(dim, dim);
  if (variant == AcousticVariant::one_d) {
    const Eigen::MatrixXd d = acoustic_detail::centered_difference_periodic(n, h);
    a0.block(0, points, points, points) = d;       // grad acting on p
    a0.block(points, 0, points, points) = d;       // div acting on v
  } else {
    Eigen::MatrixXd dx = Eigen::MatrixXd::Zero(points, points);
    Eigen::MatrixXd dy = Eigen::MatrixXd::Zero(points, points);
    auto gid = [n](int ix, int iy) { return ((iy % n + n) % n) * n + ((ix % n + n) % n); };
    for (int iy = 0; iy < n; ++iy) {
      for (int ix = 0; ix < n; ++ix) {
        const int g = gid(ix, iy);
        dx(g, gid(ix + 1, iy)) = 1.0 / (2.0 * h);
        dx(g, gid(ix - 1, iy)) = -1.0 / (2.0 * h);
        dy(g, gid(ix, iy + 1)) = 1.0 / (2.0 * h);
        dy(g, gid(ix, iy - 1)) = -1.0 / (2.0 * h);
      }
    }
    a0.block(0, 2 * points, points, points) = dx;           // grad_x p
    a0.block(points, 2 * points, points, points) = dy;      // grad_y p
    a0.block(2 * points, 0, points, points) = dx;           // div, vx part
    a0.block(2 * points, points, points, points) = dy;      // div, vy part
  }

  sys.a = (-a0).cast<Complex>();
  sys.v = DenseOperator::Zero(dim, dim);
  const Complex minus_i_omega(0.0, -omega);
  for (int c = 0; c < sys.components - 1; ++c)
    for (int i = 0; i < points; ++i)
      sys.v(c * points + i, c * points + i) = minus_i_omega * (rho_field[i] - rho0);
  for (int i = 0; i < points; ++i) {
    const int g = (sys.components - 1) * points + i;
    sys.a(g, g) += minus_i_omega * kappa0;
    sys.v(g, g) = minus_i_omega * (kappa_field[i] - kappa0);
  }
  for (int c = 0; c < sys.components - 1; ++c)
    for (int i = 0; i < points; ++i) {
      const int g = c * points + i;
      sys.a(g, g) += minus_i_omega * rho0;
    }
  return sys;
}

/// Right-hand side (0, s)^T for a pressure source s.
inline Eigen::VectorXcd acoustic_rhs(const AcousticSystem& sys, const Eigen::VectorXcd& s) {
  const Eigen::Index points = s.size();
  Eigen::VectorXcd f = Eigen::VectorXcd::Zero(sys.dim());
  f.tail(points) = s;
  return f;
}

struct AcousticCbsResult {
  Eigen::VectorXcd psi;
  std::vector<double> residuals;
  int iterations = 0;
  bool converged = false;
};

/// Dense CBS iteration for the acoustic system, run through the self-adjoint
/// form: with At = iA and the modified potential Vm = iV - i eps I, the
/// fixed point of psi <- M psi + (i/eps) Vm (At + i eps I)^{-1} (i f)
/// solves (A + V) psi = f. Admissibility is eps >= ||V||.
inline AcousticCbsResult acoustic_cbs_solve(const AcousticSystem& sys, const Eigen::VectorXcd& f,
                                            double epsilon, int max_iterations = 20000,
                                            double tolerance = 1e-10) {
  if (!(epsilon > 0.0)) throw InvalidParameterError("acoustic_cbs_solve: epsilon must be > 0");
  const Eigen::Index dim = sys.dim();
  const DenseOperator id = DenseOperator::Identity(dim, dim);
  const DenseOperator a_sa = Complex(0.0, 1.0) * sys.a;
  DenseOperator v_mod = Complex(0.0, 1.0) * sys.v;
  v_mod.diagonal().array() -= Complex(0.0, epsilon);

  const DenseOperator m = cbs_operator_dense(a_sa, v_mod, epsilon).m_direct;
  const Eigen::VectorXcd g_f =
      (a_sa + Complex(0.0, epsilon) * id).partialPivLu().solve(Complex(0.0, 1.0) * f);
  const Eigen::VectorXcd b = Complex(0.0, 1.0 / epsilon) * (v_mod * g_f);

  AcousticCbsResult out;
  out.psi = b;
  Eigen::VectorXcd next(dim);
  for (int it = 0; it < max_iterations; ++it) {
    next = m * out.psi + b;
    const double den = out.psi.norm();
    const double res = den > 0.0 ? (next - out.psi).norm() / den : (next - out.psi).norm();
    out.psi.swap(next);
    out.residuals.push_back(res);
    out.iterations = it + 1;
    if (res <= tolerance) {
      out.converged = true;
      break;
    }
  }
  return out;
}

}  // namespace cbs::verify
