// Acceptance suite: end-to-end checks with pinned tolerances, one line per
// criterion. Exits nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include "cbs/acoustic.hpp"
#include "cbs/analytic.hpp"
#include "cbs/bench.hpp"
#include "cbs/config.hpp"
#include "cbs/dense_verify.hpp"
#include "cbs/fdfd.hpp"
#include "cbs/medium.hpp"
#include "cbs/metrics.hpp"
#include "cbs/solver.hpp"
#include "cbs/spectral.hpp"

namespace {

using cbs::Complex;
using Clock = std::chrono::steady_clock;

int g_failures = 0;

void report(const std::string& id, bool pass, const std::string& detail, double seconds) {
  std::printf("[%s] %-38s %s (%.1f s)\n", pass ? "PASS" : "FAIL", id.c_str(), detail.c_str(),
              seconds);
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

cbs::io::RunConfig homogeneous_config() {
  cbs::io::RunConfig cfg;  // defaults are the benchmark manifest values
  cfg.model_preset = "homogeneous";
  cfg.homogeneous_velocity_mps = 2200.0;
  cfg.solver.max_iterations = 600;
  return cfg;
}

cbs::io::RunConfig three_layer_config() {
  cbs::io::RunConfig cfg;
  cfg.model_preset = "three-layer";
  cfg.solver.max_iterations = 600;
  return cfg;
}

// ---------------------------------------------------------------------------
// 1. Cayley identity suite
// ---------------------------------------------------------------------------
void criterion_1() {
  using namespace cbs::verify;
  const auto t0 = Clock::now();
  std::mt19937_64 rng(11);
  std::normal_distribution<double> gauss;
  std::uniform_int_distribution<int> size(8, 64);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  double worst_unitary = 0.0, worst_resolvent = 0.0, worst_m = 0.0;
  const double eps_grid[3] = {0.1, 1.0, 10.0};
  for (int t = 0; t < 100; ++t) {
    const int n = size(rng);
    DenseOperator a(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j <= i; ++j) {
        a(i, j) = Complex(gauss(rng), 0.0);
        a(j, i) = a(i, j);
      }
    for (double eps : eps_grid) {
      const DenseOperator u = cayley(a, eps);
      worst_unitary = std::max(
          worst_unitary,
          (u.adjoint() * u - DenseOperator::Identity(n, n)).cwiseAbs().maxCoeff());
      worst_resolvent = std::max(worst_resolvent, check_resolvent_identity(a, eps));

      DenseOperator v = DenseOperator::Zero(n, n);
      for (int i = 0; i < n; ++i) {
        double re, im;
        do {
          re = (2.0 * unit(rng) - 1.0) * eps;
          im = unit(rng) * eps;
        } while (re * re + im * im > eps * eps);
        v(i, i) = Complex(re, im - eps);
      }
      const CbsOperators ops = cbs_operator_dense(a, v, eps);
      worst_m = std::max(worst_m, (ops.m_direct - ops.m_cayley).cwiseAbs().maxCoeff());
    }
  }
  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  const bool pass = worst_unitary <= 1e-12 && worst_resolvent <= 1e-11 && worst_m <= 1e-12 &&
                    secs < 10.0;
  report("C1 cayley-identity", pass,
         "unitarity " + fmt(worst_unitary) + ", resolvent " + fmt(worst_resolvent) +
             ", M-forms " + fmt(worst_m),
         secs);
}

// ---------------------------------------------------------------------------
// 2. Contractivity suite
// ---------------------------------------------------------------------------
void criterion_2() {
  using namespace cbs::verify;
  const auto t0 = Clock::now();
  std::mt19937_64 rng(22);
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int n = 48;
  const double eps = 1.0;

  double worst_rho = 0.0, worst_fov = 0.0;
  bool all_contractive = true;
  for (int t = 0; t < 50; ++t) {
    DenseOperator a(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j <= i; ++j) {
        a(i, j) = Complex(gauss(rng), 0.0);
        a(j, i) = a(i, j);
      }
    DenseOperator v = DenseOperator::Zero(n, n);
    for (int i = 0; i < n; ++i) {
      double re, im;
      do {
        re = (2.0 * unit(rng) - 1.0) * eps;
        im = unit(rng) * eps;
      } while (re * re + im * im > eps * eps || im < 0.05 * eps);
      v(i, i) = Complex(re, im - eps);
    }
    const DenseOperator m = cbs_operator_dense(a, v, eps).m_direct;
    const double rho = spectral_radius(m);
    const double fov = field_of_values_max(m);
    worst_rho = std::max(worst_rho, rho);
    worst_fov = std::max(worst_fov, fov);
    all_contractive &= (rho < 1.0) && (fov < 1.0);
  }

  // Constructed inadmissible potential: |Delta| = 2 eps, Im Delta = 0.
  bool amplification_seen = false;
  for (int t = 0; t < 4 && !amplification_seen; ++t) {
    const DenseOperator a = build_reference_operator(
        n, ReferenceVariant::laplacian_1d_periodic, 1.0, 0.3 + 0.05 * t);
    DenseOperator v = DenseOperator::Zero(n, n);
    for (int i = 0; i < n; ++i) v(i, i) = Complex(2.0 * eps, -eps);
    amplification_seen = spectral_radius(cbs_operator_dense(a, v, eps).m_direct) >= 1.0;
  }

  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  const bool pass = all_contractive && amplification_seen && secs < 30.0;
  report("C2 contractivity", pass,
         "max rho " + fmt(worst_rho) + ", max fov " + fmt(worst_fov) + ", inadmissible grows: " +
             (amplification_seen ? "yes" : "no"),
         secs);
}

// ---------------------------------------------------------------------------
// 3. Resolvent correctness on a 256^2 padded grid
// ---------------------------------------------------------------------------
void criterion_3() {
  using namespace cbs;
  const auto t0 = Clock::now();
  const double k0 = 2.0 * std::numbers::pi * 10.0 / 2000.0;
  const double dx = 10.0;
  const int n = 160;
  Grid2D grid(n, n, dx, dx);
  spectral::PaddedGrid pg = spectral::plan_padding(grid, (256 - n) / 2);
  const double eps = 0.3 * k0 * k0;
  spectral::SpectralKernel kern = spectral::build_kernel(pg, k0, eps);

  ComplexField delta(grid);
  const int s = n / 2;
  delta(s, s) = Complex(1.0 / (dx * dx), 0.0);
  ComplexField numeric = spectral::apply_resolvent(kern, delta);

  const Complex ktilde = std::sqrt(Complex(k0 * k0, eps));
  ComplexField exact = reference::sample_analytic_field(grid, ktilde, grid.x(s), grid.y(s));
  metrics::FieldMask mask(grid);
  mask.exclude_disk(s, s, 2);
  const double rel = metrics::relative_l2(numeric, exact, mask);

  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  const bool pass = (pg.Nx == 256 && pg.Ny == 256) && rel <= 0.02 && secs < 5.0;
  report("C3 resolvent-vs-analytic", pass, "relative L2 " + fmt(rel) + " on 256^2", secs);
}

// ---------------------------------------------------------------------------
// 4. Small-instance oracle equivalence (16 x 16)
// ---------------------------------------------------------------------------
void criterion_4() {
  using namespace cbs;
  const auto t0 = Clock::now();
  const double k0 = 0.5;
  Grid2D grid(16, 16, 1.0, 1.0);
  ComplexField k(grid);
  for (int iy = 0; iy < 16; ++iy)
    for (int ix = 0; ix < 16; ++ix) {
      const double bump = 0.2 * std::sin(2.0 * std::numbers::pi * ix / 16.0) *
                          std::cos(2.0 * std::numbers::pi * iy / 16.0);
      const int border = std::min({ix, iy, 15 - ix, 15 - iy});
      const double absorb = border < 4 ? 0.3 * (4 - border) / 4.0 : 0.0;
      k(ix, iy) = std::sqrt(Complex(k0 * k0 * (1.0 + bump), k0 * k0 * absorb));
    }
  ComplexField delta(grid);
  for (std::size_t i = 0; i < k.size(); ++i) delta[i] = k[i] * k[i] - k0 * k0;
  const double eps = medium::select_epsilon(delta, 1.1);
  const medium::PotentialField pot = medium::build_potential(k, k0, eps);
  const spectral::SpectralKernel kern =
      spectral::build_kernel(spectral::plan_padding(grid, 16), k0, eps);

  solver::SourceSpec src;
  src.ix = 5;
  src.iy = 7;
  const ComplexField source = solver::make_point_source(grid, src);

  solver::SolverConfig cfg;
  cfg.max_iterations = 5000;
  cfg.tolerance = 1e-11;
  auto [psi, hist] = solver::solve_cbs(pot, kern, source, cfg);

  // Dense oracle: assemble G column by column, solve (I - G V) psi = G S.
  const Eigen::Index nn = 256;
  Eigen::MatrixXcd g(nn, nn);
  for (Eigen::Index j = 0; j < nn; ++j) {
    ComplexField e(grid);
    e[static_cast<std::size_t>(j)] = Complex(1.0, 0.0);
    ComplexField col = spectral::apply_resolvent(kern, e);
    for (Eigen::Index i = 0; i < nn; ++i) g(i, j) = col[static_cast<std::size_t>(i)];
  }
  Eigen::MatrixXcd system = Eigen::MatrixXcd::Identity(nn, nn);
  for (Eigen::Index j = 0; j < nn; ++j)
    system.col(j) -= g.col(j) * pot.v[static_cast<std::size_t>(j)];
  Eigen::VectorXcd svec(nn);
  for (Eigen::Index i = 0; i < nn; ++i) svec[i] = source[static_cast<std::size_t>(i)];
  const Eigen::VectorXcd direct = system.partialPivLu().solve(g * svec);

  double num = 0.0, den = 0.0;
  for (Eigen::Index i = 0; i < nn; ++i) {
    num += std::norm(psi[static_cast<std::size_t>(i)] - direct[i]);
    den += std::norm(direct[i]);
  }
  const double rel_dense = std::sqrt(num / den);

  // One-step identity: psi1 = M psi0 + gamma G S.
  const Complex i_over_eps(0.0, 1.0 / eps);
  const ComplexField psi_inc = spectral::apply_resolvent(kern, source);
  ComplexField psi0(grid);
  for (std::size_t i = 0; i < psi0.size(); ++i) psi0[i] = i_over_eps * pot.v[i] * psi_inc[i];
  solver::SolverConfig one;
  one.max_iterations = 1;
  one.tolerance = 1e-15;
  auto [psi1, hist1] = solver::solve_cbs(pot, kern, source, one);
  const ComplexField m_psi0 = solver::apply_M_once(pot, kern, psi0);
  double num1 = 0.0, den1 = 0.0;
  for (std::size_t i = 0; i < psi1.size(); ++i) {
    const Complex want = m_psi0[i] + i_over_eps * pot.v[i] * psi_inc[i];
    num1 += std::norm(psi1[i] - want);
    den1 += std::norm(want);
  }
  const double rel_step = std::sqrt(num1 / den1);

  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  const bool pass = hist.converged && rel_dense <= 1e-8 && rel_step <= 1e-12 && secs < 5.0;
  report("C4 dense-oracle-equivalence", pass,
         "dense " + fmt(rel_dense) + ", one-step " + fmt(rel_step), secs);
}

// ---------------------------------------------------------------------------
// 5. Homogeneous benchmark
// ---------------------------------------------------------------------------
void criterion_5() {
  using namespace cbs;
  const auto t0 = Clock::now();
  const cbs::io::RunConfig cfg = homogeneous_config();

  bench::SolveResult cbs_run = bench::run_integral_solver(cfg, bench::Method::cbs);
  const ComplexField fdfd = bench::run_fdfd(cfg);
  const ComplexField exact = bench::run_analytic(cfg);
  const metrics::FieldMask mask = bench::comparison_mask(cfg);

  const double err_cbs = metrics::relative_l2(cbs_run.field, exact, mask);
  const double err_fdfd = metrics::relative_l2(fdfd, exact, mask);

  // Monotone tail: geometric decrease averaged over the last 20 iterations.
  double tail_ratio = 0.0;
  const auto& res = cbs_run.history.residuals;
  if (res.size() >= 21) {
    double prod = 1.0;
    for (std::size_t i = res.size() - 20; i < res.size(); ++i) prod *= res[i] / res[i - 1];
    tail_ratio = std::pow(prod, 1.0 / 20.0);
  }

  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  const bool pass = cbs_run.history.converged && cbs_run.history.iterations_run <= 150 &&
                    err_cbs <= 0.03 && err_fdfd <= 0.03 && tail_ratio < 1.0 && secs < 120.0;
  report("C5 homogeneous-benchmark", pass,
         "cbs " + std::to_string(cbs_run.history.iterations_run) + " iters, err " + fmt(err_cbs) +
             ", fdfd err " + fmt(err_fdfd) + ", tail ratio " + fmt(tail_ratio) +
             (err_cbs <= err_fdfd ? " [cbs <= fdfd]" : " [cbs > fdfd]"),
         secs);
}

// ---------------------------------------------------------------------------
// 6. Heterogeneous benchmark
// ---------------------------------------------------------------------------
void criterion_6() {
  using namespace cbs;
  const auto t0 = Clock::now();
  const cbs::io::RunConfig cfg = three_layer_config();

  bench::SolveResult born = bench::run_integral_solver(cfg, bench::Method::born);
  bench::SolveResult cbs_run = bench::run_integral_solver(cfg, bench::Method::cbs);
  const ComplexField fdfd = bench::run_fdfd(cfg);
  const metrics::FieldMask mask = bench::comparison_mask(cfg);
  const double discrepancy = metrics::relative_l2(cbs_run.field, fdfd, mask);

  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  const bool pass = born.history.diverged && cbs_run.history.converged &&
                    cbs_run.history.iterations_run <= 300 && discrepancy <= 0.05 && secs < 300.0;
  report("C6 heterogeneous-benchmark", pass,
         "born diverged: " + std::string(born.history.diverged ? "yes" : "no") + ", cbs " +
             std::to_string(cbs_run.history.iterations_run) + " iters, cbs-vs-fdfd " +
             fmt(discrepancy),
         secs);
}

// ---------------------------------------------------------------------------
// 7. Admissibility monotonicity (role of the eps >= max|Delta| condition)
// ---------------------------------------------------------------------------
void criterion_7() {
  using namespace cbs;
  const auto t0 = Clock::now();
  const cbs::io::RunConfig cfg = three_layer_config();

  const medium::MediumModel physical = bench::build_physical_model(cfg);
  const medium::MediumModel model = medium::extend_with_abl(physical, cfg.lambda_ref_m());
  const ComplexField kfield = medium::build_wavenumber_field(model, cfg.omega());
  ComplexField delta(kfield.grid());
  const double k0sq = cfg.k0() * cfg.k0();
  for (std::size_t i = 0; i < kfield.size(); ++i) delta[i] = kfield[i] * kfield[i] - k0sq;
  const double max_delta = medium::max_abs(delta);

  const int min_pad =
      static_cast<int>(std::lround(0.25 * std::max(physical.grid.nx, physical.grid.ny)));
  solver::SourceSpec src = bench::source_on_grid(cfg, physical.grid);
  src.ix += model.abl_cells_x;
  src.iy += model.abl_cells_y;
  const ComplexField source = solver::make_point_source(model.grid, src);

  auto run_with_eps = [&](double eps, int max_iter) {
    const medium::PotentialField pot = medium::build_potential(kfield, cfg.k0(), eps);
    const spectral::SpectralKernel kern =
        spectral::build_kernel(spectral::plan_padding(model.grid, min_pad), cfg.k0(), eps);
    solver::SolverConfig scfg = cfg.solver;
    scfg.max_iterations = max_iter;
    scfg.residual_box = model.physical_box();
    return solver::solve_cbs(pot, kern, source, scfg).second;
  };

  const solver::ConvergenceHistory good = run_with_eps(1.1 * max_delta, 600);
  const int budget = good.converged ? 3 * good.iterations_run : 600;
  const solver::ConvergenceHistory tight = run_with_eps(0.2 * max_delta, budget);
  const bool tight_slow_or_divergent = tight.diverged || !tight.converged;

  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  const bool pass = good.converged && tight_slow_or_divergent;
  report("C7 admissibility-monotonicity", pass,
         "eps=1.1|D|: " + std::to_string(good.iterations_run) + " iters; eps=0.2|D|: " +
             (tight.diverged ? "diverged"
                             : (tight.converged ? "converged in " +
                                                      std::to_string(tight.iterations_run)
                                                : "no convergence within 3x budget")),
         secs);
}

// ---------------------------------------------------------------------------
// 8. Appendix-B acoustic structure
// ---------------------------------------------------------------------------
void criterion_8() {
  using namespace cbs::verify;
  const auto t0 = Clock::now();
  std::mt19937_64 rng(88);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  const int n = 96;
  Eigen::VectorXcd rho(n), kappa(n);
  for (int i = 0; i < n; ++i) {
    rho[i] = Complex(1.0 + 0.4 * unit(rng), 0.05 + 0.05 * unit(rng));
    kappa[i] = Complex(1.0 + 0.4 * unit(rng), 0.05 + 0.05 * unit(rng));
  }
  const AcousticSystem sys = build_acoustic_system(n, rho, kappa, 1.2, 1.0, 1.0);

  const DenseOperator ia = Complex(0.0, 1.0) * sys.a;
  const double sa_dev = (ia - ia.adjoint()).cwiseAbs().maxCoeff();
  DenseOperator off = sys.v;
  off.diagonal().setZero();
  const double off_max = off.cwiseAbs().maxCoeff();

  Eigen::VectorXcd s = Eigen::VectorXcd::Zero(n);
  s[n / 4] = Complex(1.0, 0.0);
  const Eigen::VectorXcd f = acoustic_rhs(sys, s);
  const double eps = 1.05 * sys.v.cwiseAbs().maxCoeff();
  const AcousticCbsResult r = acoustic_cbs_solve(sys, f, eps, 100000, 1e-12);
  const double fp = ((sys.a + sys.v) * r.psi - f).norm() / f.norm();

  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  const bool pass = sa_dev <= 1e-12 && off_max == 0.0 && r.converged && fp <= 1e-8 && secs < 10.0;
  report("C8 acoustic-first-order", pass,
         "iA dev " + fmt(sa_dev) + ", offdiag " + fmt(off_max) + ", fixed-point " + fmt(fp) +
             " in " + std::to_string(r.iterations) + " iters",
         secs);
}

// ---------------------------------------------------------------------------
// 9. ABL efficacy: small domain vs truncated double domain
// ---------------------------------------------------------------------------
void criterion_9() {
  using namespace cbs;
  const auto t0 = Clock::now();
  const cbs::io::RunConfig small = homogeneous_config();

  cbs::io::RunConfig big = small;
  big.width_m = 2.0 * small.width_m;
  big.depth_m = 2.0 * small.depth_m;
  big.source_x_m = small.source_x_m + 0.5 * small.width_m;
  big.source_y_m = small.source_y_m + 0.5 * small.depth_m;

  const bench::SolveResult small_run = bench::run_integral_solver(small, bench::Method::cbs);
  const bench::SolveResult big_run = bench::run_integral_solver(big, bench::Method::cbs);

  // Truncate the doubled domain back to the original window.
  const Grid2D& sg = small_run.field.grid();
  const int off_x = sg.nx / 2;
  const int off_y = sg.ny / 2;
  ComplexField truncated(sg);
  for (int iy = 0; iy < sg.ny; ++iy)
    for (int ix = 0; ix < sg.nx; ++ix)
      truncated(ix, iy) = big_run.field(ix + off_x, iy + off_y);

  metrics::FieldMask mask(sg);
  const double rel = metrics::relative_l2(small_run.field, truncated, mask);

  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  const bool pass = small_run.history.converged && big_run.history.converged && rel <= 0.03;
  report("C9 abl-efficacy", pass, "small-vs-truncated-double " + fmt(rel), secs);
}

}  // namespace

int main() {
  std::printf("acceptance suite\n");
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  criterion_9();
  if (g_failures == 0)
    std::printf("all criteria passed\n");
  else
    std::printf("%d criterion(s) FAILED\n", g_failures);
  return g_failures == 0 ? 0 : 1;
}
