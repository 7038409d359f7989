#pragma once

#include <cmath>

#include "cbs/grid.hpp"
#include "cbs/hankel.hpp"

namespace cbs::reference {

/// Samples amplitude * (i/4) H0(k r) around a point source at physical
/// position (sx, sy). The singular sample (r < half a cell) is set to zero;
/// comparisons exclude a disk around the source anyway.
inline ComplexField sample_analytic_field(const Grid2D& grid, Complex k, double sx, double sy,
                                          Complex amplitude = Complex(1.0, 0.0)) {
  ComplexField out(grid);
  const double rmin = 0.5 * std::min(grid.dx, grid.dy);
  for (int iy = 0; iy < grid.ny; ++iy) {
    for (int ix = 0; ix < grid.nx; ++ix) {
      const double rx = grid.x(ix) - sx;
      const double ry = grid.y(iy) - sy;
      const double r = std::hypot(rx, ry);
      out(ix, iy) = (r < rmin) ? Complex(0.0, 0.0) : amplitude * analytic_green_2d(k, r);
    }
  }
  return out;
}

}  // namespace cbs::reference
