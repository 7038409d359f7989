#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include "cbs/errors.hpp"
#include "cbs/grid.hpp"

namespace cbs::metrics {

/// Cell selection mask over a grid; nonzero entries participate in norms.
struct FieldMask {
  Grid2D grid;
  std::vector<std::uint8_t> keep;

  explicit FieldMask(const Grid2D& g, bool initial = true)
      : grid(g), keep(g.size(), initial ? 1 : 0) {}

  bool at(int ix, int iy) const {
    return keep[static_cast<std::size_t>(iy) * grid.nx + ix] != 0;
  }
  void set(int ix, int iy, bool v) {
    keep[static_cast<std::size_t>(iy) * grid.nx + ix] = v ? 1 : 0;
  }

  FieldMask& restrict_to_box(const Box2D& box) {
    for (int iy = 0; iy < grid.ny; ++iy)
      for (int ix = 0; ix < grid.nx; ++ix)
        if (!box.contains(ix, iy)) set(ix, iy, false);
    return *this;
  }

  FieldMask& exclude_disk(int cx, int cy, int radius_cells) {
    const long r2 = static_cast<long>(radius_cells) * radius_cells;
    for (int iy = 0; iy < grid.ny; ++iy)
      for (int ix = 0; ix < grid.nx; ++ix) {
        const long dx = ix - cx;
        const long dy = iy - cy;
        if (dx * dx + dy * dy <= r2) set(ix, iy, false);
      }
    return *this;
  }

  std::size_t count() const {
    std::size_t c = 0;
    for (auto k : keep) c += k;
    return c;
  }
};

/// ||a - b||_2 / ||b||_2 over masked cells.
inline double relative_l2(const ComplexField& a, const ComplexField& b, const FieldMask& mask) {
  require_same_shape(a.grid(), b.grid(), "relative_l2");
  require_same_shape(a.grid(), mask.grid, "relative_l2");
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!mask.keep[i]) continue;
    num += std::norm(a[i] - b[i]);
    den += std::norm(b[i]);
  }
  if (den == 0.0) throw UndefinedReferenceError("relative_l2: reference field has zero norm");
  return std::sqrt(num / den);
}

struct ErrorReport {
  double relative_l2 = 0.0;
  RealField amplitude_error;  // (|test| - |ref|) / max_masked |ref|
  RealField phase_error;      // arg(test conj(ref)) in (-pi, pi]
  int exclusion_radius_cells = 0;
};

inline ErrorReport error_maps(const ComplexField& test, const ComplexField& ref,
                              const FieldMask& mask, int exclusion_radius_cells = 0) {
  ErrorReport rep;
  rep.relative_l2 = relative_l2(test, ref, mask);
  rep.exclusion_radius_cells = exclusion_radius_cells;
  rep.amplitude_error = RealField(test.grid(), 0.0);
  rep.phase_error = RealField(test.grid(), 0.0);

  double ref_max = 0.0;
  for (std::size_t i = 0; i < ref.size(); ++i)
    if (mask.keep[i]) ref_max = std::max(ref_max, std::abs(ref[i]));
  if (ref_max == 0.0) throw UndefinedReferenceError("error_maps: reference is zero on the mask");

  for (std::size_t i = 0; i < test.size(); ++i) {
    if (!mask.keep[i]) continue;
    rep.amplitude_error[i] = (std::abs(test[i]) - std::abs(ref[i])) / ref_max;
    const Complex cross = test[i] * std::conj(ref[i]);
    double ph = (cross == Complex(0.0, 0.0)) ? 0.0 : std::arg(cross);
    if (ph <= -std::numbers::pi) ph = std::numbers::pi;  // wrap -pi to +pi
    rep.phase_error[i] = ph;
  }
  return rep;
}

}  // namespace cbs::metrics
