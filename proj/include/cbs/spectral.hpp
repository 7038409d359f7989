#pragma once

#include <cmath>
#include <memory>
#include <numbers>
#include <vector>

#include "cbs/errors.hpp"
#include "cbs/fft.hpp"
#include "cbs/grid.hpp"

namespace cbs::spectral {

/// True for 5-smooth sizes (products of 2, 3, 5), which keep mixed-radix FFTs fast.
inline bool is_fft_friendly(int n) {
  if (n < 1) return false;
  for (int p : {2, 3, 5})
    while (n % p == 0) n /= p;
  return n == 1;
}

inline int next_fft_friendly(int n) {
  while (!is_fft_friendly(n)) ++n;
  return n;
}

/// Base grid embedded in an FFT-friendly periodic box with at least
/// min_pad cells of padding per side.
struct PaddedGrid {
  Grid2D base;
  int pad_x = 0;
  int pad_y = 0;
  int Nx = 0;
  int Ny = 0;

  std::size_t padded_size() const {
    return static_cast<std::size_t>(Nx) * static_cast<std::size_t>(Ny);
  }
};

inline PaddedGrid plan_padding(const Grid2D& grid, int min_pad_cells) {
  if (min_pad_cells < 0) throw InvalidParameterError("plan_padding: min_pad_cells must be >= 0");
  PaddedGrid pg;
  pg.base = grid;
  pg.Nx = next_fft_friendly(grid.nx + 2 * min_pad_cells);
  pg.Ny = next_fft_friendly(grid.ny + 2 * min_pad_cells);
  pg.pad_x = (pg.Nx - grid.nx) / 2;
  pg.pad_y = (pg.Ny - grid.ny) / 2;
  return pg;
}

/// Signed DFT wavenumber for index m on an axis of N samples with spacing d.
inline double dft_wavenumber(int m, int N, double d) {
  const int s = (m <= N / 2) ? m : m - N;
  return 2.0 * std::numbers::pi * s / (N * d);
}

/// Fourier multiplier of the damped background resolvent,
/// ghat(kappa) = 1 / (|kappa|^2 - k0^2 - i eps), sampled on the padded
/// wavenumber grid. Precomputed once per (grid, k0, eps) and immutable after
/// construction; the FFT plans it owns are shareable across concurrent solves.
struct SpectralKernel {
  PaddedGrid grid;
  double k0 = 0.0;
  double epsilon = 0.0;
  std::vector<Complex> ghat;                 // Nx*Ny, row-major, x fastest
  std::shared_ptr<const Fft2D> fft;

  std::size_t padded_size() const { return grid.padded_size(); }
};

inline SpectralKernel build_kernel(const PaddedGrid& pgrid, double k0, double epsilon) {
  if (!(epsilon > 0.0)) throw InvalidParameterError("build_kernel: epsilon must be > 0");
  SpectralKernel kern;
  kern.grid = pgrid;
  kern.k0 = k0;
  kern.epsilon = epsilon;
  kern.ghat.resize(pgrid.padded_size());
  kern.fft = std::make_shared<Fft2D>(pgrid.Nx, pgrid.Ny);
  const double k0sq = k0 * k0;
  for (int iy = 0; iy < pgrid.Ny; ++iy) {
    const double ky = dft_wavenumber(iy, pgrid.Ny, pgrid.base.dy);
    for (int ix = 0; ix < pgrid.Nx; ++ix) {
      const double kx = dft_wavenumber(ix, pgrid.Nx, pgrid.base.dx);
      kern.ghat[static_cast<std::size_t>(iy) * pgrid.Nx + ix] =
          1.0 / Complex(kx * kx + ky * ky - k0sq, -epsilon);
    }
  }
  return kern;
}

/// Scratch buffer reused across apply_resolvent calls in an iteration loop.
struct ResolventWorkspace {
  std::vector<Complex> padded;
};

/// G_eps u = crop(IFFT(ghat .* FFT(zero-pad(u)))). Linear in u; operator
/// 2-norm on the padded grid is bounded by 1/eps.
inline ComplexField apply_resolvent(const SpectralKernel& kernel, const ComplexField& u,
                                    ResolventWorkspace& ws) {
  const PaddedGrid& pg = kernel.grid;
  require_same_shape(pg.base, u.grid(), "apply_resolvent");

  ws.padded.assign(pg.padded_size(), Complex(0.0, 0.0));
  for (int iy = 0; iy < pg.base.ny; ++iy) {
    Complex* row = ws.padded.data() + static_cast<std::size_t>(iy + pg.pad_y) * pg.Nx + pg.pad_x;
    const Complex* src = &u(0, iy);
    std::copy(src, src + pg.base.nx, row);
  }

  kernel.fft->forward(ws.padded.data());
  for (std::size_t i = 0; i < ws.padded.size(); ++i) ws.padded[i] *= kernel.ghat[i];
  kernel.fft->inverse(ws.padded.data());

  ComplexField out(pg.base);
  for (int iy = 0; iy < pg.base.ny; ++iy) {
    const Complex* row =
        ws.padded.data() + static_cast<std::size_t>(iy + pg.pad_y) * pg.Nx + pg.pad_x;
    std::copy(row, row + pg.base.nx, &out(0, iy));
  }
  return out;
}

inline ComplexField apply_resolvent(const SpectralKernel& kernel, const ComplexField& u) {
  ResolventWorkspace ws;
  return apply_resolvent(kernel, u, ws);
}

}  // namespace cbs::spectral
