#pragma once

#include <chrono>
#include <cmath>
#include <optional>
#include <vector>

#include "cbs/errors.hpp"
#include "cbs/grid.hpp"
#include "cbs/medium.hpp"
#include "cbs/spectral.hpp"

namespace cbs::solver {

using medium::PotentialField;
using spectral::ResolventWorkspace;
using spectral::SpectralKernel;

struct SolverConfig {
  double epsilon_factor = 1.1;
  int max_iterations = 500;
  double tolerance = 1e-6;
  double divergence_threshold = 1e6;
  /// Residuals are measured over this index box (the physical domain);
  /// defaults to the full grid when unset.
  std::optional<Box2D> residual_box;

  void validate() const {
    if (!(epsilon_factor >= 1.0))
      throw InvalidParameterError("SolverConfig: epsilon_factor must be >= 1");
    if (max_iterations < 1) throw InvalidParameterError("SolverConfig: max_iterations must be >= 1");
    if (!(tolerance > 0.0 && tolerance < 1.0))
      throw InvalidParameterError("SolverConfig: tolerance must lie in (0, 1)");
  }
};

struct ConvergenceHistory {
  std::vector<double> residuals;
  int iterations_run = 0;
  bool converged = false;
  bool diverged = false;
  bool admissibility_warning = false;
  double elapsed_seconds = 0.0;
};

struct SourceSpec {
  enum class Kind { point } kind = Kind::point;
  int ix = 0;
  int iy = 0;
  Complex amplitude{1.0, 0.0};
};

/// Discrete delta: amplitude/(dx*dy) in a single cell, so the resolvent of a
/// unit source approximates the continuum Green's function.
inline ComplexField make_point_source(const Grid2D& grid, const SourceSpec& src) {
  if (src.ix < 0 || src.ix >= grid.nx || src.iy < 0 || src.iy >= grid.ny)
    throw InvalidParameterError("make_point_source: position outside grid");
  ComplexField s(grid);
  s(src.ix, src.iy) = src.amplitude / (grid.dx * grid.dy);
  return s;
}

inline ComplexField incident_field(const SpectralKernel& kernel, const ComplexField& source) {
  return spectral::apply_resolvent(kernel, source);
}

namespace detail {

inline bool finite(const ComplexField& f) {
  for (std::size_t i = 0; i < f.size(); ++i)
    if (!std::isfinite(f[i].real()) || !std::isfinite(f[i].imag())) return false;
  return true;
}

/// Relative successive-iterate change over the residual box; falls back to the
/// absolute change when the current iterate has zero norm.
inline double update_residual(const ComplexField& next, const ComplexField& prev,
                              const Box2D& box) {
  const double num = norm2_diff(next, prev, box);
  const double den = norm2(prev, box);
  return den > 0.0 ? num / den : num;
}

struct IterationMonitor {
  const SolverConfig& cfg;
  ConvergenceHistory& hist;
  int rising_streak = 0;
  double norm0 = 0.0;

  /// Returns true when the iteration should stop. A geometrically diverging
  /// fixed point keeps the relative update residual near a constant > 1, so
  /// iterate growth relative to the first iterate is flagged as well.
  bool record(double residual, double iterate_norm) {
    if (!std::isfinite(residual) || !std::isfinite(iterate_norm))
      throw NumericalBlowupError("solver: NaN/Inf in iterate");
    if (!hist.residuals.empty() && residual > hist.residuals.back())
      ++rising_streak;
    else
      rising_streak = 0;
    hist.residuals.push_back(residual);
    hist.iterations_run = static_cast<int>(hist.residuals.size());
    if (norm0 == 0.0) norm0 = iterate_norm;
    if (residual <= cfg.tolerance) {
      hist.converged = true;
      return true;
    }
    const bool growth = norm0 > 0.0 && iterate_norm > cfg.divergence_threshold * norm0;
    if (residual > cfg.divergence_threshold || growth || rising_streak >= 50) {
      hist.diverged = true;
      return true;
    }
    return false;
  }
};

}  // namespace detail

/// Preconditioned fixed-point iteration
///   psi <- psi + (i/eps) V [psi_inc - psi + G_eps(V psi)],
/// started from the modified incident field psi0 = (i/eps) V G_eps S.
/// On divergence the best (lowest-residual) iterate seen is returned.
inline std::pair<ComplexField, ConvergenceHistory> solve_cbs(const PotentialField& potential,
                                                             const SpectralKernel& kernel,
                                                             const ComplexField& source,
                                                             const SolverConfig& cfg) {
  cfg.validate();
  require_same_shape(potential.grid(), source.grid(), "solve_cbs");
  require_same_shape(potential.grid(), kernel.grid.base, "solve_cbs");
  if (std::abs(potential.epsilon - kernel.epsilon) >
      1e-12 * std::max(potential.epsilon, kernel.epsilon))
    throw InvalidParameterError("solve_cbs: potential and kernel disagree on epsilon");

  const auto t0 = std::chrono::steady_clock::now();
  ConvergenceHistory hist;
  // eps >= max|Delta| is sufficient, not necessary; flag and keep going.
  hist.admissibility_warning = potential.epsilon < medium::max_abs(potential.delta);

  const Box2D box = cfg.residual_box.value_or(full_box(potential.grid()));
  const double eps = potential.epsilon;
  const Complex i_over_eps(0.0, 1.0 / eps);
  const std::size_t n = source.size();

  ResolventWorkspace ws;
  const ComplexField psi_inc = spectral::apply_resolvent(kernel, source, ws);

  ComplexField psi(potential.grid());
  for (std::size_t i = 0; i < n; ++i) psi[i] = i_over_eps * potential.v[i] * psi_inc[i];
  if (!detail::finite(psi)) throw NumericalBlowupError("solve_cbs: NaN/Inf in initial iterate");

  ComplexField vpsi(potential.grid());
  ComplexField best = psi;
  double best_residual = std::numeric_limits<double>::infinity();
  detail::IterationMonitor monitor{cfg, hist};

  for (int it = 0; it < cfg.max_iterations; ++it) {
    for (std::size_t i = 0; i < n; ++i) vpsi[i] = potential.v[i] * psi[i];
    ComplexField gv = spectral::apply_resolvent(kernel, vpsi, ws);

    // gv becomes the next iterate in place.
    for (std::size_t i = 0; i < n; ++i)
      gv[i] = psi[i] + i_over_eps * potential.v[i] * (psi_inc[i] - psi[i] + gv[i]);

    const double res = detail::update_residual(gv, psi, box);
    psi = std::move(gv);
    if (res < best_residual) {
      best_residual = res;
      best = psi;
    }
    if (monitor.record(res, norm2(psi, box))) break;
  }

  hist.elapsed_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (hist.diverged) return {std::move(best), hist};
  return {std::move(psi), hist};
}

/// Classical Born iteration psi <- G_eps(V psi) + G_eps S from psi0 = G_eps S.
/// Diverges for strong contrast; kept for the comparison experiments.
inline std::pair<ComplexField, ConvergenceHistory> solve_born(const PotentialField& potential,
                                                              const SpectralKernel& kernel,
                                                              const ComplexField& source,
                                                              const SolverConfig& cfg) {
  cfg.validate();
  require_same_shape(potential.grid(), source.grid(), "solve_born");
  require_same_shape(potential.grid(), kernel.grid.base, "solve_born");
  if (std::abs(potential.epsilon - kernel.epsilon) >
      1e-12 * std::max(potential.epsilon, kernel.epsilon))
    throw InvalidParameterError("solve_born: potential and kernel disagree on epsilon");

  const auto t0 = std::chrono::steady_clock::now();
  ConvergenceHistory hist;
  hist.admissibility_warning = potential.epsilon < medium::max_abs(potential.delta);

  const Box2D box = cfg.residual_box.value_or(full_box(potential.grid()));
  const std::size_t n = source.size();

  ResolventWorkspace ws;
  const ComplexField psi_inc = spectral::apply_resolvent(kernel, source, ws);
  ComplexField psi = psi_inc;
  if (!detail::finite(psi)) throw NumericalBlowupError("solve_born: NaN/Inf in initial iterate");

  ComplexField vpsi(potential.grid());
  ComplexField best = psi;
  double best_residual = std::numeric_limits<double>::infinity();
  detail::IterationMonitor monitor{cfg, hist};

  for (int it = 0; it < cfg.max_iterations; ++it) {
    for (std::size_t i = 0; i < n; ++i) vpsi[i] = potential.v[i] * psi[i];
    ComplexField next = spectral::apply_resolvent(kernel, vpsi, ws);
    for (std::size_t i = 0; i < n; ++i) next[i] += psi_inc[i];

    const double res = detail::update_residual(next, psi, box);
    psi = std::move(next);
    if (res < best_residual) {
      best_residual = res;
      best = psi;
    }
    if (monitor.record(res, norm2(psi, box))) break;
  }

  hist.elapsed_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (hist.diverged) return {std::move(best), hist};
  return {std::move(psi), hist};
}

/// One application of the CBS iteration operator,
///   M psi = psi - (i/eps) V psi + (i/eps) V G_eps(V psi).
/// One solve_cbs step equals M psi + (i/eps) V psi_inc; exposed for tests.
inline ComplexField apply_M_once(const PotentialField& potential, const SpectralKernel& kernel,
                                 const ComplexField& psi) {
  require_same_shape(potential.grid(), psi.grid(), "apply_M_once");
  const Complex i_over_eps(0.0, 1.0 / potential.epsilon);
  const std::size_t n = psi.size();

  ComplexField vpsi(potential.grid());
  for (std::size_t i = 0; i < n; ++i) vpsi[i] = potential.v[i] * psi[i];
  ComplexField gv = spectral::apply_resolvent(kernel, vpsi);
  for (std::size_t i = 0; i < n; ++i)
    gv[i] = psi[i] + i_over_eps * potential.v[i] * (-psi[i] + gv[i]);
  return gv;
}

}  // namespace cbs::solver
