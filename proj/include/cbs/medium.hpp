#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "cbs/errors.hpp"
#include "cbs/grid.hpp"

namespace cbs::medium {

enum class TaperKind { cosine_squared };

/// Cosine-squared ramp: 0 for r <= r_in, 1 for r >= r_out,
/// sin^2((pi/2)(r - r_in)/(r_out - r_in)) in between.
inline double taper(double r, double r_in, double r_out) {
  if (!(r_in < r_out)) throw InvalidParameterError("taper: requires r_in < r_out");
  if (r <= r_in) return 0.0;
  if (r >= r_out) return 1.0;
  const double s = std::sin(0.5 * std::numbers::pi * (r - r_in) / (r_out - r_in));
  return s * s;
}

/// Absorbing layer: width in reference wavelengths, peak inverse quality factor.
struct AblSpec {
  double thickness_wavelengths = 3.0;
  double q_inv_max = 0.5;
  TaperKind taper = TaperKind::cosine_squared;

  void validate() const {
    if (!(thickness_wavelengths > 0.0))
      throw InvalidParameterError("AblSpec: thickness_wavelengths must be > 0");
    if (!(q_inv_max > 0.0 && q_inv_max < 1.0))
      throw InvalidParameterError("AblSpec: q_inv_max must lie in (0, 1)");
  }
};

/// Velocity model on the full computational grid. abl_cells_* record how many
/// border cells on each side belong to the absorbing collar (0 when none has
/// been attached yet); the interior box is the physical domain.
struct MediumModel {
  Grid2D grid;
  RealField velocity;  // m/s at cell centers
  AblSpec abl;
  int abl_cells_x = 0;
  int abl_cells_y = 0;

  MediumModel() = default;
  MediumModel(const Grid2D& g, RealField vel, const AblSpec& a)
      : grid(g), velocity(std::move(vel)), abl(a) {
    require_same_shape(grid, velocity.grid(), "MediumModel");
    abl.validate();
    for (std::size_t i = 0; i < velocity.size(); ++i)
      if (!(velocity[i] > 0.0) || !std::isfinite(velocity[i]))
        throw InvalidModelError("MediumModel: velocity must be positive and finite");
  }

  Box2D physical_box() const {
    return Box2D{abl_cells_x, abl_cells_y, grid.nx - 2 * abl_cells_x, grid.ny - 2 * abl_cells_y};
  }
};

/// Contrast and modified potential on one grid. Invariant:
/// v = delta - i*epsilon pointwise and delta = k^2 - k0^2.
struct PotentialField {
  double k0 = 0.0;
  double epsilon = 0.0;
  ComplexField v;
  ComplexField delta;

  const Grid2D& grid() const { return v.grid(); }
};

inline MediumModel build_homogeneous_model(const Grid2D& grid, double velocity,
                                           const AblSpec& abl = AblSpec{}) {
  if (!(velocity > 0.0)) throw InvalidModelError("build_homogeneous_model: velocity must be > 0");
  RealField vel(grid, velocity);
  return MediumModel(grid, std::move(vel), abl);
}

/// One layer of a piecewise-constant model. The top interface is the sinusoid
/// depth(x) = top_depth_m + amplitude_m * sin(2*pi*x/wavelength_m + phase).
/// The first layer's interface is ignored (it starts at the top of the domain).
struct Layer {
  double top_depth_m = 0.0;
  double amplitude_m = 0.0;
  double wavelength_m = 1.0;
  double phase = 0.0;
  double velocity = 0.0;

  double depth_at(double x) const {
    if (amplitude_m == 0.0) return top_depth_m;
    return top_depth_m + amplitude_m * std::sin(2.0 * std::numbers::pi * x / wavelength_m + phase);
  }
};

/// Piecewise-constant layered model with smoothly curved interfaces, rasterized
/// by midpoint sampling. Layers are ordered top to bottom; y increases with depth.
inline MediumModel build_layered_model(const Grid2D& grid, const std::vector<Layer>& layers,
                                       const AblSpec& abl = AblSpec{}) {
  if (layers.empty()) throw InvalidModelError("build_layered_model: no layers");
  for (const Layer& l : layers)
    if (!(l.velocity > 0.0)) throw InvalidModelError("build_layered_model: velocity must be > 0");

  // Interfaces may not cross anywhere in the horizontal extent.
  const int probes = 4 * grid.nx;
  for (std::size_t li = 2; li < layers.size(); ++li) {
    for (int p = 0; p <= probes; ++p) {
      const double x = grid.x0 + grid.width() * p / probes;
      if (!(layers[li - 1].depth_at(x) < layers[li].depth_at(x)))
        throw InvalidModelError("build_layered_model: overlapping interfaces");
    }
  }

  RealField vel(grid, layers.front().velocity);
  for (int iy = 0; iy < grid.ny; ++iy) {
    const double y = grid.y(iy);
    for (int ix = 0; ix < grid.nx; ++ix) {
      const double x = grid.x(ix);
      double c = layers.front().velocity;
      for (std::size_t li = 1; li < layers.size(); ++li)
        if (y >= layers[li].depth_at(x)) c = layers[li].velocity;
      vel(ix, iy) = c;
    }
  }
  return MediumModel(grid, std::move(vel), abl);
}

/// Benchmark preset: three layers, 2000/2400/2800 m/s, sinusoidal interfaces.
inline std::vector<Layer> three_layer_benchmark(const Grid2D& grid) {
  const double depth = grid.height();
  const double w = grid.width();
  return {
      Layer{0.0, 0.0, 1.0, 0.0, 2000.0},
      Layer{depth / 3.0, 0.05 * depth, 0.9 * w, 0.0, 2400.0},
      Layer{2.0 * depth / 3.0, 0.05 * depth, 1.3 * w, 2.2, 2800.0},
  };
}

/// Surround the model with an absorbing collar. Velocity is edge-replicated
/// into the new border cells; layer width is rounded up to whole cells from
/// abl.thickness_wavelengths * lambda_ref.
inline MediumModel extend_with_abl(const MediumModel& model, double lambda_ref_m) {
  if (!(lambda_ref_m > 0.0))
    throw InvalidParameterError("extend_with_abl: reference wavelength must be > 0");
  model.abl.validate();
  const double width_m = model.abl.thickness_wavelengths * lambda_ref_m;
  const int cx = static_cast<int>(std::ceil(width_m / model.grid.dx));
  const int cy = static_cast<int>(std::ceil(width_m / model.grid.dy));

  const Grid2D& g = model.grid;
  Grid2D wide(g.nx + 2 * cx, g.ny + 2 * cy, g.dx, g.dy, g.x0 - cx * g.dx, g.y0 - cy * g.dy);
  RealField vel(wide);
  for (int iy = 0; iy < wide.ny; ++iy) {
    const int sy = std::clamp(iy - cy, 0, g.ny - 1);
    for (int ix = 0; ix < wide.nx; ++ix) {
      const int sx = std::clamp(ix - cx, 0, g.nx - 1);
      vel(ix, iy) = model.velocity(sx, sy);
    }
  }
  MediumModel out(wide, std::move(vel), model.abl);
  out.abl_cells_x = cx;
  out.abl_cells_y = cy;
  return out;
}

/// Taper value at a cell: per-axis penetration depth into the collar, combined
/// by maximum, fed through the cosine-squared ramp over the collar width.
inline double abl_taper_at(const MediumModel& model, int ix, int iy) {
  const int cx = model.abl_cells_x;
  const int cy = model.abl_cells_y;
  if (cx == 0 && cy == 0) return 0.0;
  const Grid2D& g = model.grid;
  double depth = 0.0;
  if (cx > 0) {
    const int px = std::max({cx - ix, ix - (g.nx - 1 - cx), 0});
    depth = std::max(depth, px * g.dx);
  }
  if (cy > 0) {
    const int py = std::max({cy - iy, iy - (g.ny - 1 - cy), 0});
    depth = std::max(depth, py * g.dy);
  }
  if (depth <= 0.0) return 0.0;
  const double width = std::max(cx * g.dx, cy * g.dy);
  return taper(depth, 0.0, width);
}

/// Complex wavenumber field k(r) = omega / (C(r) sqrt(1 - i Q^-1(r))).
/// Interior cells (taper 0) stay purely real; Im(k^2) >= 0 everywhere.
inline ComplexField build_wavenumber_field(const MediumModel& model, double omega) {
  if (!(omega > 0.0)) throw InvalidParameterError("build_wavenumber_field: omega must be > 0");
  ComplexField k(model.grid);
  for (int iy = 0; iy < model.grid.ny; ++iy) {
    for (int ix = 0; ix < model.grid.nx; ++ix) {
      const double c = model.velocity(ix, iy);
      if (!(c > 0.0)) throw InvalidModelError("build_wavenumber_field: nonpositive velocity");
      const double t = abl_taper_at(model, ix, iy);
      if (t == 0.0) {
        k(ix, iy) = Complex(omega / c, 0.0);
      } else {
        const Complex c_abl = c * std::sqrt(Complex(1.0, -model.abl.q_inv_max * t));
        k(ix, iy) = omega / c_abl;
      }
    }
  }
  return k;
}

/// delta = k^2 - k0^2, v = delta - i*epsilon.
inline PotentialField build_potential(const ComplexField& kfield, double k0, double epsilon) {
  if (!(epsilon > 0.0)) throw InvalidParameterError("build_potential: epsilon must be > 0");
  PotentialField p;
  p.k0 = k0;
  p.epsilon = epsilon;
  p.delta = ComplexField(kfield.grid());
  p.v = ComplexField(kfield.grid());
  const double k0sq = k0 * k0;
  for (std::size_t i = 0; i < kfield.size(); ++i) {
    const Complex d = kfield[i] * kfield[i] - k0sq;
    p.delta[i] = d;
    p.v[i] = d - Complex(0.0, epsilon);
  }
  return p;
}

inline double max_abs(const ComplexField& f) {
  double m = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) m = std::max(m, std::abs(f[i]));
  return m;
}

/// epsilon = factor * max|delta| over the full grid (collar included).
/// A vanishing contrast leaves no admissible positive damping and is rejected.
inline double select_epsilon(const ComplexField& delta, double factor) {
  if (!(factor >= 1.0)) throw InvalidParameterError("select_epsilon: factor must be >= 1");
  const double m = max_abs(delta);
  if (m == 0.0)
    throw DegenerateModelError(
        "select_epsilon: contrast is identically zero; add absorption or heterogeneity");
  return factor * m;
}

}  // namespace cbs::medium
