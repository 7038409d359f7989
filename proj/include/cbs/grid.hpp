#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include "cbs/errors.hpp"

namespace cbs {

using Complex = std::complex<double>;

/// Uniform 2D Cartesian grid. Values live at cell centers:
/// x(ix) = x0 + (ix + 1/2) dx, y(iy) = y0 + (iy + 1/2) dy.
struct Grid2D {
  int nx = 0;
  int ny = 0;
  double dx = 0.0;
  double dy = 0.0;
  double x0 = 0.0;
  double y0 = 0.0;

  Grid2D() = default;
  Grid2D(int nx_, int ny_, double dx_, double dy_, double x0_ = 0.0, double y0_ = 0.0)
      : nx(nx_), ny(ny_), dx(dx_), dy(dy_), x0(x0_), y0(y0_) {
    if (nx < 8 || ny < 8) throw InvalidModelError("Grid2D: nx, ny must be >= 8");
    if (!(dx > 0.0) || !(dy > 0.0)) throw InvalidModelError("Grid2D: dx, dy must be > 0");
  }

  std::size_t size() const { return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny); }
  double width() const { return nx * dx; }
  double height() const { return ny * dy; }
  double x(int ix) const { return x0 + (ix + 0.5) * dx; }
  double y(int iy) const { return y0 + (iy + 0.5) * dy; }

  bool same_shape(const Grid2D& o) const { return nx == o.nx && ny == o.ny; }
};

/// Index-space rectangle [ix0, ix0+nx) x [iy0, iy0+ny).
struct Box2D {
  int ix0 = 0;
  int iy0 = 0;
  int nx = 0;
  int ny = 0;

  bool contains(int ix, int iy) const {
    return ix >= ix0 && ix < ix0 + nx && iy >= iy0 && iy < iy0 + ny;
  }
  std::size_t size() const { return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny); }
};

/// Row-major 2D array (x fastest) on a Grid2D.
template <typename T>
class Field2D {
 public:
  Field2D() = default;
  explicit Field2D(const Grid2D& g, T fill = T{}) : grid_(g), data_(g.size(), fill) {}

  const Grid2D& grid() const { return grid_; }
  int nx() const { return grid_.nx; }
  int ny() const { return grid_.ny; }
  std::size_t size() const { return data_.size(); }

  T& operator()(int ix, int iy) { return data_[static_cast<std::size_t>(iy) * grid_.nx + ix]; }
  const T& operator()(int ix, int iy) const {
    return data_[static_cast<std::size_t>(iy) * grid_.nx + ix];
  }
  T& operator[](std::size_t i) { return data_[i]; }
  const T& operator[](std::size_t i) const { return data_[i]; }

  T* data() { return data_.data(); }
  const T* data() const { return data_.data(); }

  void fill(T v) { std::fill(data_.begin(), data_.end(), v); }

 private:
  Grid2D grid_;
  std::vector<T> data_;
};

using ComplexField = Field2D<Complex>;
using RealField = Field2D<double>;

inline void require_same_shape(const Grid2D& a, const Grid2D& b, const char* where) {
  if (!a.same_shape(b)) throw ShapeError(std::string(where) + ": grid shape mismatch");
}

inline double norm2(const ComplexField& f) {
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += std::norm(f[i]);
  return std::sqrt(s);
}

/// L2 norm restricted to an index box.
inline double norm2(const ComplexField& f, const Box2D& box) {
  double s = 0.0;
  for (int iy = box.iy0; iy < box.iy0 + box.ny; ++iy)
    for (int ix = box.ix0; ix < box.ix0 + box.nx; ++ix) s += std::norm(f(ix, iy));
  return std::sqrt(s);
}

inline double norm2_diff(const ComplexField& a, const ComplexField& b, const Box2D& box) {
  double s = 0.0;
  for (int iy = box.iy0; iy < box.iy0 + box.ny; ++iy)
    for (int ix = box.ix0; ix < box.ix0 + box.nx; ++ix) s += std::norm(a(ix, iy) - b(ix, iy));
  return std::sqrt(s);
}

inline Box2D full_box(const Grid2D& g) { return Box2D{0, 0, g.nx, g.ny}; }

}  // namespace cbs
