#pragma once

#include <fftw3.h>

#include <complex>
#include <mutex>

#include "cbs/errors.hpp"

namespace cbs::spectral {

inline std::mutex& fftw_plan_mutex() {
  static std::mutex m;
  return m;
}

/// 2D complex DFT plans for one (nx, ny) shape. Forward is unscaled, inverse
/// carries the 1/(nx*ny) factor, so a spectral multiplier applied in between
/// acts as a plain convolution kernel.
///
/// FFTW planning is serialized through a global mutex; execution uses the
/// new-array interface and may run concurrently on distinct buffers.
class Fft2D {
 public:
  Fft2D(int nx, int ny) : nx_(nx), ny_(ny) {
    if (nx < 1 || ny < 1) throw InvalidParameterError("Fft2D: dimensions must be positive");
    std::lock_guard<std::mutex> lock(fftw_plan_mutex());
    // Row-major with x fastest => FFTW dims are (ny, nx).
    fftw_complex* tmp = fftw_alloc_complex(static_cast<std::size_t>(nx) * ny);
    fwd_ = fftw_plan_dft_2d(ny, nx, tmp, tmp, FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    bwd_ = fftw_plan_dft_2d(ny, nx, tmp, tmp, FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(tmp);
    if (!fwd_ || !bwd_) throw SolverError("Fft2D: FFTW planning failed");
  }

  Fft2D(const Fft2D&) = delete;
  Fft2D& operator=(const Fft2D&) = delete;

  ~Fft2D() {
    std::lock_guard<std::mutex> lock(fftw_plan_mutex());
    if (fwd_) fftw_destroy_plan(fwd_);
    if (bwd_) fftw_destroy_plan(bwd_);
  }

  int nx() const { return nx_; }
  int ny() const { return ny_; }

  void forward(std::complex<double>* inout) const {
    fftw_execute_dft(fwd_, reinterpret_cast<fftw_complex*>(inout),
                     reinterpret_cast<fftw_complex*>(inout));
  }

  void inverse(std::complex<double>* inout) const {
    fftw_execute_dft(bwd_, reinterpret_cast<fftw_complex*>(inout),
                     reinterpret_cast<fftw_complex*>(inout));
    const double scale = 1.0 / (static_cast<double>(nx_) * static_cast<double>(ny_));
    const std::size_t n = static_cast<std::size_t>(nx_) * ny_;
    for (std::size_t i = 0; i < n; ++i) inout[i] *= scale;
  }

 private:
  int nx_;
  int ny_;
  fftw_plan fwd_ = nullptr;
  fftw_plan bwd_ = nullptr;
};

}  // namespace cbs::spectral
