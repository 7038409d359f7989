#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "cbs/errors.hpp"
#include "cbs/grid.hpp"
#include "cbs/solver.hpp"

namespace cbs::io {

// Field file: 32-byte header (magic "CBSF", version u32, nx u32, ny u32,
// dx f64, dy f64), then nx*ny row-major little-endian (re, im) f64 pairs.

inline constexpr std::uint32_t kFieldFileVersion = 1;

namespace detail {

static_assert(std::endian::native == std::endian::little,
              "field file I/O assumes a little-endian host");

template <typename T>
void put(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  return v;
}

}  // namespace detail

inline void write_field(const std::filesystem::path& path, const ComplexField& f) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("write_field: cannot open " + path.string());
  os.write("CBSF", 4);
  detail::put<std::uint32_t>(os, kFieldFileVersion);
  detail::put<std::uint32_t>(os, static_cast<std::uint32_t>(f.nx()));
  detail::put<std::uint32_t>(os, static_cast<std::uint32_t>(f.ny()));
  detail::put<double>(os, f.grid().dx);
  detail::put<double>(os, f.grid().dy);
  for (std::size_t i = 0; i < f.size(); ++i) {
    detail::put<double>(os, f[i].real());
    detail::put<double>(os, f[i].imag());
  }
  if (!os) throw IoError("write_field: write failed for " + path.string());
}

inline ComplexField read_field(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("read_field: cannot open " + path.string());
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, "CBSF", 4) != 0)
    throw IoError("read_field: bad magic in " + path.string());
  const auto version = detail::get<std::uint32_t>(is);
  if (version != kFieldFileVersion)
    throw IoError("read_field: unsupported version in " + path.string());
  const auto nx = detail::get<std::uint32_t>(is);
  const auto ny = detail::get<std::uint32_t>(is);
  const auto dx = detail::get<double>(is);
  const auto dy = detail::get<double>(is);
  Grid2D grid(static_cast<int>(nx), static_cast<int>(ny), dx, dy);
  ComplexField f(grid);
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double re = detail::get<double>(is);
    const double im = detail::get<double>(is);
    f[i] = Complex(re, im);
  }
  if (!is) throw IoError("read_field: truncated file " + path.string());
  return f;
}

inline void write_history_csv(const std::filesystem::path& path,
                              const solver::ConvergenceHistory& hist) {
  std::ofstream os(path);
  if (!os) throw IoError("write_history_csv: cannot open " + path.string());
  os << "iteration,residual\n";
  os.precision(17);
  for (std::size_t i = 0; i < hist.residuals.size(); ++i)
    os << (i + 1) << ',' << hist.residuals[i] << '\n';
  if (!os) throw IoError("write_history_csv: write failed for " + path.string());
}

/// 8-bit greyscale dump of |f|, min-max normalized. Preview only.
inline void write_pgm_preview(const std::filesystem::path& path, const ComplexField& f) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double m = std::abs(f[i]);
    lo = std::min(lo, m);
    hi = std::max(hi, m);
  }
  const double span = (hi > lo) ? hi - lo : 1.0;
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("write_pgm_preview: cannot open " + path.string());
  os << "P5\n" << f.nx() << ' ' << f.ny() << "\n255\n";
  for (int iy = 0; iy < f.ny(); ++iy)
    for (int ix = 0; ix < f.nx(); ++ix) {
      const double m = (std::abs(f(ix, iy)) - lo) / span;
      os.put(static_cast<char>(std::clamp(static_cast<int>(255.0 * m + 0.5), 0, 255)));
    }
}

}  // namespace cbs::io
