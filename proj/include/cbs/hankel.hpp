#pragma once

#include <cmath>
#include <complex>
#include <numbers>

#include "cbs/errors.hpp"

namespace cbs::reference {

using Complex = std::complex<double>;

namespace detail {

inline constexpr double kEulerGamma = 0.5772156649015328606;
/// Series/asymptotic crossover for H0^(1); both branches agree to ~1e-10 here.
inline constexpr double kHankelCrossover = 12.0;

/// Ascending series for J0 and Y0 (small-to-moderate |z|).
inline void j0y0_series(Complex z, Complex& j0, Complex& y0) {
  const Complex q = 0.25 * z * z;
  Complex term(1.0, 0.0);
  Complex sum_j = term;
  Complex sum_y(0.0, 0.0);
  double harmonic = 0.0;
  for (int k = 1; k <= 64; ++k) {
    term *= -q / static_cast<double>(k * k);
    harmonic += 1.0 / k;
    sum_j += term;
    sum_y += -harmonic * term;  // (-1)^{k+1} H_k q^k/(k!)^2
    if (std::abs(term) < 1e-18 * std::abs(sum_j) && k > 4) break;
  }
  j0 = sum_j;
  const double two_over_pi = 2.0 / std::numbers::pi;
  y0 = two_over_pi * ((std::log(0.5 * z) + kEulerGamma) * sum_j + sum_y);
}

inline Complex hankel1_0_series(Complex z) {
  Complex j0, y0;
  j0y0_series(z, j0, y0);
  return j0 + Complex(0.0, 1.0) * y0;
}

/// Large-argument expansion, valid here for Im z >= 0:
/// H0(z) ~ sqrt(2/(pi z)) e^{i(z - pi/4)} sum_k i^k a_k / z^k with
/// a_k = (-1)^k ((2k-1)!!)^2 / (k! 8^k). Truncated at the smallest term.
inline Complex hankel1_0_asymptotic(Complex z) {
  Complex term(1.0, 0.0);
  Complex sum = term;
  double last = 1.0;
  for (int k = 0; k < 40; ++k) {
    const double c = (2.0 * k + 1.0) * (2.0 * k + 1.0) / (8.0 * (k + 1.0));
    term *= Complex(0.0, -1.0) * c / z;
    const double mag = std::abs(term);
    if (mag >= last) break;  // divergent tail reached
    sum += term;
    last = mag;
    if (mag < 1e-18) break;
  }
  const Complex prefactor = std::sqrt(2.0 / (std::numbers::pi * z));
  const Complex phase = std::exp(Complex(0.0, 1.0) * (z - 0.25 * std::numbers::pi));
  return prefactor * phase * sum;
}

}  // namespace detail

/// Hankel function of the first kind, order zero, for Im z >= 0.
///
/// The ascending series forms H0 = J0 + i Y0 and loses ~e^{|z| + Im z} ulps to
/// cancellation, so for damped arguments the asymptotic branch takes over
/// earlier than the real-axis crossover at |z| = 12.
inline Complex hankel1_0(Complex z) {
  const double mod = std::abs(z);
  const bool series_ok = mod <= detail::kHankelCrossover && 3.0 * mod + z.imag() <= 37.0;
  return series_ok ? detail::hankel1_0_series(z) : detail::hankel1_0_asymptotic(z);
}

/// Outgoing 2D Helmholtz Green's function (i/4) H0^(1)(k r); decays for Im k > 0.
inline Complex analytic_green_2d(Complex k, double r) {
  if (!(r > 0.0)) throw SingularityError("analytic_green_2d: r must be > 0");
  if (k.imag() < -1e-12 * std::abs(k))
    throw InvalidParameterError("analytic_green_2d: requires Im k >= 0");
  return Complex(0.0, 0.25) * hankel1_0(k * r);
}

}  // namespace cbs::reference
