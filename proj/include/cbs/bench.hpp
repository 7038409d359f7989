#pragma once

#include <cmath>
#include <filesystem>
#include <optional>
#include <string>

#include "cbs/analytic.hpp"
#include "cbs/config.hpp"
#include "cbs/fdfd.hpp"
#include "cbs/field_io.hpp"
#include "cbs/medium.hpp"
#include "cbs/metrics.hpp"
#include "cbs/solver.hpp"
#include "cbs/spectral.hpp"

namespace cbs::bench {

enum class Method { cbs, born, fdfd, analytic };

inline const char* method_name(Method m) {
  switch (m) {
    case Method::cbs: return "cbs";
    case Method::born: return "born";
    case Method::fdfd: return "fdfd";
    case Method::analytic: return "analytic";
  }
  return "?";
}

/// Physical-domain model (no absorbing collar) from a config.
inline medium::MediumModel build_physical_model(const io::RunConfig& cfg) {
  const int nx = static_cast<int>(std::lround(cfg.width_m / cfg.dx_m));
  const int ny = static_cast<int>(std::lround(cfg.depth_m / cfg.dx_m));
  Grid2D grid(nx, ny, cfg.dx_m, cfg.dx_m, 0.0, 0.0);

  if (!cfg.model_file.empty()) {
    ComplexField raw = io::read_field(cfg.model_file);
    RealField vel(raw.grid());
    for (std::size_t i = 0; i < raw.size(); ++i) vel[i] = raw[i].real();
    return medium::MediumModel(raw.grid(), std::move(vel), cfg.abl);
  }
  if (cfg.model_preset == "homogeneous")
    return medium::build_homogeneous_model(grid, cfg.homogeneous_velocity_mps, cfg.abl);
  if (cfg.model_preset == "three-layer")
    return medium::build_layered_model(grid, medium::three_layer_benchmark(grid), cfg.abl);
  throw InvalidParameterError("unknown model preset '" + cfg.model_preset + "'");
}

inline solver::SourceSpec source_on_grid(const io::RunConfig& cfg, const Grid2D& physical_grid) {
  solver::SourceSpec src;
  src.ix = static_cast<int>(std::floor((cfg.source_x_m - physical_grid.x0) / physical_grid.dx));
  src.iy = static_cast<int>(std::floor((cfg.source_y_m - physical_grid.y0) / physical_grid.dy));
  src.amplitude = cfg.source_amplitude;
  if (src.ix < 0 || src.ix >= physical_grid.nx || src.iy < 0 || src.iy >= physical_grid.ny)
    throw InvalidParameterError("source position lies outside the physical domain");
  return src;
}

struct SolveResult {
  ComplexField field;  // physical domain
  solver::ConvergenceHistory history;
  double epsilon = 0.0;
  double max_abs_delta = 0.0;
};

/// Full integral-equation pipeline: attach the ABL collar, build k and V,
/// choose eps = factor * max|Delta|, pad for the FFT, run CBS or Born,
/// crop back to the physical window.
inline SolveResult run_integral_solver(const io::RunConfig& cfg, Method method) {
  if (method != Method::cbs && method != Method::born)
    throw InvalidParameterError("run_integral_solver: expects cbs or born");
  const medium::MediumModel physical = build_physical_model(cfg);
  const medium::MediumModel model = medium::extend_with_abl(physical, cfg.lambda_ref_m());

  const ComplexField kfield = medium::build_wavenumber_field(model, cfg.omega());
  ComplexField delta(kfield.grid());
  const double k0sq = cfg.k0() * cfg.k0();
  for (std::size_t i = 0; i < kfield.size(); ++i) delta[i] = kfield[i] * kfield[i] - k0sq;
  const double max_delta = medium::max_abs(delta);
  const double eps = medium::select_epsilon(delta, cfg.solver.epsilon_factor);
  const medium::PotentialField pot = medium::build_potential(kfield, cfg.k0(), eps);

  const int min_pad = static_cast<int>(std::lround(0.25 * std::max(physical.grid.nx, physical.grid.ny)));
  const spectral::PaddedGrid pgrid = spectral::plan_padding(model.grid, min_pad);
  const spectral::SpectralKernel kernel = spectral::build_kernel(pgrid, cfg.k0(), eps);

  solver::SourceSpec src = source_on_grid(cfg, physical.grid);
  src.ix += model.abl_cells_x;
  src.iy += model.abl_cells_y;
  const ComplexField source = solver::make_point_source(model.grid, src);

  solver::SolverConfig scfg = cfg.solver;
  scfg.residual_box = model.physical_box();

  auto [psi, hist] = (method == Method::cbs) ? solver::solve_cbs(pot, kernel, source, scfg)
                                             : solver::solve_born(pot, kernel, source, scfg);

  SolveResult out;
  out.history = std::move(hist);
  out.epsilon = eps;
  out.max_abs_delta = max_delta;
  out.field = ComplexField(physical.grid);
  const Box2D win = model.physical_box();
  for (int iy = 0; iy < win.ny; ++iy)
    for (int ix = 0; ix < win.nx; ++ix)
      out.field(ix, iy) = psi(ix + win.ix0, iy + win.iy0);
  return out;
}

inline ComplexField run_fdfd(const io::RunConfig& cfg) {
  const medium::MediumModel physical = build_physical_model(cfg);
  const solver::SourceSpec src = source_on_grid(cfg, physical.grid);
  const reference::FdfdSystem sys = reference::fdfd_assemble(physical, cfg.omega(), cfg.pml, src);
  return reference::fdfd_solve(sys);
}

/// Analytic Green's-function field; only defined for the homogeneous preset.
inline ComplexField run_analytic(const io::RunConfig& cfg) {
  if (cfg.model_preset != "homogeneous" || !cfg.model_file.empty())
    throw InvalidParameterError("analytic reference requires the homogeneous preset");
  const medium::MediumModel physical = build_physical_model(cfg);
  const solver::SourceSpec src = source_on_grid(cfg, physical.grid);
  const double k = cfg.omega() / cfg.homogeneous_velocity_mps;
  // Evaluate distances from the source cell center so the discrete and
  // analytic fields are colocated.
  const double sx = physical.grid.x(src.ix);
  const double sy = physical.grid.y(src.iy);
  return reference::sample_analytic_field(physical.grid, Complex(k, 0.0), sx, sy, src.amplitude);
}

/// Mask for solver comparisons: physical domain minus a disk around the source.
inline metrics::FieldMask comparison_mask(const io::RunConfig& cfg) {
  const medium::MediumModel physical = build_physical_model(cfg);
  const solver::SourceSpec src = source_on_grid(cfg, physical.grid);
  metrics::FieldMask mask(physical.grid);
  mask.exclude_disk(src.ix, src.iy, cfg.source_exclusion_cells);
  return mask;
}

struct BenchmarkOutput {
  ComplexField field;
  std::optional<solver::ConvergenceHistory> history;
  std::optional<metrics::ErrorReport> report;
  std::string reference_name;
  double epsilon = 0.0;
};

/// Runs one method, compares against the designated reference (analytic for
/// the homogeneous preset, FDFD otherwise), and writes field/history/report
/// files into out_dir.
inline BenchmarkOutput run_benchmark(const io::RunConfig& cfg, Method method,
                                     const std::filesystem::path& out_dir,
                                     bool write_preview = false) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  BenchmarkOutput out;

  switch (method) {
    case Method::cbs:
    case Method::born: {
      SolveResult r = run_integral_solver(cfg, method);
      out.field = std::move(r.field);
      out.history = std::move(r.history);
      out.epsilon = r.epsilon;
      break;
    }
    case Method::fdfd:
      out.field = run_fdfd(cfg);
      break;
    case Method::analytic:
      out.field = run_analytic(cfg);
      break;
  }

  const std::string stem = method_name(method);
  io::write_field(out_dir / (stem + "_field.cbsf"), out.field);
  if (out.history) io::write_history_csv(out_dir / (stem + "_history.csv"), *out.history);
  if (write_preview) io::write_pgm_preview(out_dir / (stem + "_preview.pgm"), out.field);

  // Designated reference, when one exists and the solve is worth comparing.
  const bool comparable = method != Method::analytic &&
                          (!out.history || !out.history->diverged);
  if (comparable) {
    std::optional<ComplexField> ref;
    if (cfg.model_preset == "homogeneous" && cfg.model_file.empty()) {
      ref = run_analytic(cfg);
      out.reference_name = "analytic";
    } else if (method != Method::fdfd) {
      ref = run_fdfd(cfg);
      out.reference_name = "fdfd";
    }
    if (ref) {
      const metrics::FieldMask mask = comparison_mask(cfg);
      out.report = metrics::error_maps(out.field, *ref, mask, cfg.source_exclusion_cells);
      io::Json j;
      j["method"] = stem;
      j["reference"] = out.reference_name;
      j["relative_l2"] = out.report->relative_l2;
      j["exclusion_radius_cells"] = out.report->exclusion_radius_cells;
      if (out.history) {
        j["iterations"] = out.history->iterations_run;
        j["converged"] = out.history->converged;
        j["epsilon"] = out.epsilon;
      }
      std::ofstream os(out_dir / (stem + "_error_report.json"));
      if (!os) throw IoError("run_benchmark: cannot write error report");
      os << j.dump(2) << '\n';
    }
  }
  return out;
}

}  // namespace cbs::bench
