#pragma once

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <cmath>
#include <complex>
#include <vector>

#include "cbs/errors.hpp"
#include "cbs/grid.hpp"
#include "cbs/medium.hpp"
#include "cbs/solver.hpp"

namespace cbs::reference {

using SparseMatrixC = Eigen::SparseMatrix<Complex, Eigen::RowMajor>;

/// PML damping profile sigma(depth) = sigma_max * (depth/L)^order.
/// sigma_max < 0 selects the reflectance-based default at assembly;
/// sigma_max == 0 disables the stretching entirely (plain Dirichlet collar).
struct PmlSpec {
  int thickness_cells = 20;
  double sigma_max = -1.0;
  int profile_order = 2;

  void validate() const {
    if (thickness_cells < 1) throw InvalidParameterError("PmlSpec: thickness_cells must be >= 1");
    if (profile_order < 1) throw InvalidParameterError("PmlSpec: profile_order must be >= 1");
  }
};

/// sigma_max giving a target round-trip plane-wave reflectance through a
/// polynomial profile of width L: R = exp(-2 sigma_max L / (c (order+1))).
inline double default_sigma_max(double c_ref, double layer_width_m, int order,
                                double reflectance = 1e-4) {
  return -std::log(reflectance) * c_ref * (order + 1) / (2.0 * layer_width_m);
}

/// Mixed-grid 9-point stencil weights. The Laplacian is a blend of the axial
/// and 45-degree-rotated 5-point operators, and the k^2 term is distributed
/// over the star; the classic optimized values keep numerical dispersion low
/// down to ~4 points per wavelength.
struct StencilWeights {
  double laplacian_mix = 0.5461;  // weight of the axial 5-point part
  double mass_center = 0.6248;
  double mass_edge = 0.09381;
  double mass_corner() const { return (1.0 - mass_center - 4.0 * mass_edge) / 4.0; }
};

struct FdfdSystem {
  Grid2D grid;           // physical + PML collar
  Grid2D physical_grid;  // interior window
  int collar_x = 0;
  int collar_y = 0;
  SparseMatrixC matrix;
  Eigen::VectorXcd rhs;
  PmlSpec pml;
};

namespace fdfd_detail {

/// sigma at fractional cell coordinate u (0 at the outer boundary, N at the
/// opposite one) for a collar of `collar` cells on each side.
inline double sigma_at(double u, int n_total, int collar, double sigma_max, int order) {
  double depth = 0.0;
  if (u < collar)
    depth = collar - u;
  else if (u > n_total - collar)
    depth = u - (n_total - collar);
  if (depth <= 0.0) return 0.0;
  return sigma_max * std::pow(depth / collar, order);
}

}  // namespace fdfd_detail

/// Assembles the stretched-coordinate Helmholtz system A psi = b on the
/// physical grid surrounded by a PML collar. With sigma = 0 the operator
/// reduces to the unstretched 9-point stencil; the outer ring carries
/// homogeneous Dirichlet rows. b holds -S with the same discrete-delta source
/// normalization as the integral-equation solver.
inline FdfdSystem fdfd_assemble(const medium::MediumModel& model, double omega,
                                const PmlSpec& pml, const solver::SourceSpec& source,
                                const StencilWeights& weights = StencilWeights{}) {
  pml.validate();
  if (!(omega > 0.0)) throw InvalidParameterError("fdfd_assemble: omega must be > 0");
  if (model.abl_cells_x != 0 || model.abl_cells_y != 0)
    throw InvalidParameterError("fdfd_assemble: expects a physical model without ABL collar");

  const Grid2D& pg = model.grid;
  const int cx = pml.thickness_cells;
  const int cy = pml.thickness_cells;
  const Grid2D grid(pg.nx + 2 * cx, pg.ny + 2 * cy, pg.dx, pg.dy, pg.x0 - cx * pg.dx,
                    pg.y0 - cy * pg.dy);

  double sigma_max = pml.sigma_max;
  if (sigma_max < 0.0) {
    double c_edge = 0.0;
    int cnt = 0;
    for (int ix = 0; ix < pg.nx; ++ix) {
      c_edge += model.velocity(ix, 0) + model.velocity(ix, pg.ny - 1);
      cnt += 2;
    }
    sigma_max = default_sigma_max(c_edge / cnt, cx * pg.dx, pml.profile_order);
  }

  // k^2 on the extended grid, velocity edge-replicated into the collar.
  Field2D<double> k2(grid);
  for (int iy = 0; iy < grid.ny; ++iy) {
    const int sy = std::clamp(iy - cy, 0, pg.ny - 1);
    for (int ix = 0; ix < grid.nx; ++ix) {
      const int sx = std::clamp(ix - cx, 0, pg.nx - 1);
      const double k = omega / model.velocity(sx, sy);
      k2(ix, iy) = k * k;
    }
  }

  auto inv_sx = [&](double u) {
    const double s = fdfd_detail::sigma_at(u, grid.nx, cx, sigma_max, pml.profile_order);
    return 1.0 / Complex(1.0, s / omega);
  };
  auto inv_sy = [&](double u) {
    const double s = fdfd_detail::sigma_at(u, grid.ny, cy, sigma_max, pml.profile_order);
    return 1.0 / Complex(1.0, s / omega);
  };

  const bool rotated_ok = (weights.laplacian_mix < 1.0) && (pg.dx == pg.dy);
  const double idx2 = 1.0 / (grid.dx * grid.dx);
  const double idy2 = 1.0 / (grid.dy * grid.dy);
  const double ih2r = 1.0 / (2.0 * grid.dx * grid.dx);

  const std::size_t n = grid.size();
  std::vector<Eigen::Triplet<Complex>> trip;
  trip.reserve(9 * n);
  Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(n));

  auto gid = [&](int ix, int iy) {
    return static_cast<int>(static_cast<std::size_t>(iy) * grid.nx + ix);
  };

  for (int iy = 0; iy < grid.ny; ++iy) {
    for (int ix = 0; ix < grid.nx; ++ix) {
      const int row = gid(ix, iy);
      if (ix == 0 || iy == 0 || ix == grid.nx - 1 || iy == grid.ny - 1) {
        trip.emplace_back(row, row, Complex(1.0, 0.0));
        continue;
      }

      const Complex sxc = inv_sx(ix + 0.5);
      const Complex sxp = inv_sx(ix + 1.0);
      const Complex sxm = inv_sx(ix);
      const Complex syc = inv_sy(iy + 0.5);
      const Complex syp = inv_sy(iy + 1.0);
      const Complex sym = inv_sy(iy);

      // The rotated part and the distributed mass are only used away from the
      // stretched region: there is no consistent stretched form of the
      // 45-degree operator, and an inconsistent one reflects. Rows touching
      // nonzero sigma degrade to the plain stretched 5-point stencil.
      const Complex one(1.0, 0.0);
      const bool stretched = sxc != one || sxp != one || sxm != one || syc != one ||
                             syp != one || sym != one;
      const bool rotated = rotated_ok && !stretched;
      const double a = rotated ? weights.laplacian_mix : 1.0;
      const double c_m = rotated ? weights.mass_center : 1.0;
      const double d_m = rotated ? weights.mass_edge : 0.0;
      const double e_m = rotated ? weights.mass_corner() : 0.0;

      Complex cC(0.0, 0.0);

      // Axial stretched Laplacian.
      const Complex ax_e = a * sxc * sxp * idx2;
      const Complex ax_w = a * sxc * sxm * idx2;
      const Complex ax_n = a * syc * sym * idy2;
      const Complex ax_s = a * syc * syp * idy2;
      trip.emplace_back(row, gid(ix + 1, iy), ax_e);
      trip.emplace_back(row, gid(ix - 1, iy), ax_w);
      trip.emplace_back(row, gid(ix, iy - 1), ax_n);
      trip.emplace_back(row, gid(ix, iy + 1), ax_s);
      cC -= ax_e + ax_w + ax_n + ax_s;

      if (rotated) {
        const double cr = (1.0 - a) * ih2r;
        trip.emplace_back(row, gid(ix + 1, iy + 1), Complex(cr, 0.0));
        trip.emplace_back(row, gid(ix + 1, iy - 1), Complex(cr, 0.0));
        trip.emplace_back(row, gid(ix - 1, iy + 1), Complex(cr, 0.0));
        trip.emplace_back(row, gid(ix - 1, iy - 1), Complex(cr, 0.0));
        cC -= Complex(4.0 * cr, 0.0);
      }

      // Distributed k^2 term (neighbor-sampled).
      cC += c_m * k2(ix, iy);
      if (rotated) {
        trip.emplace_back(row, gid(ix + 1, iy), d_m * k2(ix + 1, iy));
        trip.emplace_back(row, gid(ix - 1, iy), d_m * k2(ix - 1, iy));
        trip.emplace_back(row, gid(ix, iy + 1), d_m * k2(ix, iy + 1));
        trip.emplace_back(row, gid(ix, iy - 1), d_m * k2(ix, iy - 1));
        trip.emplace_back(row, gid(ix + 1, iy + 1), e_m * k2(ix + 1, iy + 1));
        trip.emplace_back(row, gid(ix + 1, iy - 1), e_m * k2(ix + 1, iy - 1));
        trip.emplace_back(row, gid(ix - 1, iy + 1), e_m * k2(ix - 1, iy + 1));
        trip.emplace_back(row, gid(ix - 1, iy - 1), e_m * k2(ix - 1, iy - 1));
      }
      trip.emplace_back(row, row, cC);
    }
  }

  if (source.ix < 0 || source.ix >= pg.nx || source.iy < 0 || source.iy >= pg.ny)
    throw InvalidParameterError("fdfd_assemble: source outside physical domain");
  // (grad^2 + k^2) psi = -S.
  rhs[gid(source.ix + cx, source.iy + cy)] = -source.amplitude / (grid.dx * grid.dy);

  FdfdSystem sys;
  sys.grid = grid;
  sys.physical_grid = pg;
  sys.collar_x = cx;
  sys.collar_y = cy;
  sys.matrix.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  sys.matrix.setFromTriplets(trip.begin(), trip.end());
  sys.rhs = std::move(rhs);
  sys.pml = pml;
  sys.pml.sigma_max = sigma_max;
  return sys;
}

/// Direct sparse solve of A psi = b; the contract is the residual bound,
/// not the factorization algorithm. Returns psi on the physical grid.
inline ComplexField fdfd_solve(const FdfdSystem& sys) {
  Eigen::SparseMatrix<Complex> A = sys.matrix;  // SparseLU wants column-major
  A.makeCompressed();
  Eigen::SparseLU<Eigen::SparseMatrix<Complex>> lu;
  lu.analyzePattern(A);
  lu.factorize(A);
  if (lu.info() != Eigen::Success)
    throw SolverError("fdfd_solve: factorization failed (singular or ill-conditioned matrix): " +
                      lu.lastErrorMessage());
  Eigen::VectorXcd psi = lu.solve(sys.rhs);
  if (lu.info() != Eigen::Success) throw SolverError("fdfd_solve: back-substitution failed");

  const double rnorm = sys.rhs.norm();
  if (rnorm > 0.0) {
    const double rel = (sys.matrix * psi - sys.rhs).norm() / rnorm;
    if (!(rel <= 1e-10))
      throw SolverError("fdfd_solve: residual " + std::to_string(rel) +
                        " exceeds 1e-10; system is likely ill-conditioned");
  }

  ComplexField out(sys.physical_grid);
  for (int iy = 0; iy < sys.physical_grid.ny; ++iy)
    for (int ix = 0; ix < sys.physical_grid.nx; ++ix)
      out(ix, iy) = psi[static_cast<std::size_t>(iy + sys.collar_y) * sys.grid.nx +
                        (ix + sys.collar_x)];
  return out;
}

}  // namespace cbs::reference
