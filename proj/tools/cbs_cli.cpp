// Command-line driver: benchmark runs, solver comparisons, field exports,
// and the dense operator verification suite.

#include <CLI11.hpp>

#include <complex>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <random>
#include <sstream>
#include <vector>

#include "cbs/acoustic.hpp"
#include "cbs/bench.hpp"
#include "cbs/config.hpp"
#include "cbs/dense_verify.hpp"
#include "cbs/field_io.hpp"
#include "cbs/metrics.hpp"

namespace fs = std::filesystem;

namespace {

struct CommonOpts {
  std::string config_path;
  std::string out_dir;
  bool preview = false;
  bool parallel_frequencies = false;
};

cbs::io::RunConfig load(const CommonOpts& opts) {
  cbs::io::RunConfig cfg = cbs::io::load_config(opts.config_path);
  if (!opts.out_dir.empty()) cfg.output_dir = opts.out_dir;
  return cfg;
}

int run_solver_command(const CommonOpts& opts, cbs::bench::Method method) {
  const cbs::io::RunConfig base = load(opts);

  std::vector<double> freqs = base.frequencies_hz;
  if (freqs.empty()) freqs.push_back(base.frequency_hz);

  auto run_one = [&](double f) {
    cbs::io::RunConfig cfg = base;
    cfg.frequency_hz = f;
    cfg.frequencies_hz.clear();
    fs::path dir = cfg.output_dir;
    if (freqs.size() > 1) dir /= "f" + std::to_string(f);
    fs::create_directories(dir);
    cbs::io::save_config(dir / "config.json", cfg);
    return cbs::bench::run_benchmark(cfg, method, dir, opts.preview);
  };

  bool any_diverged = false;
  if (opts.parallel_frequencies && freqs.size() > 1) {
    std::vector<std::future<cbs::bench::BenchmarkOutput>> jobs;
    jobs.reserve(freqs.size());
    for (double f : freqs)
      jobs.push_back(std::async(std::launch::async, run_one, f));
    for (auto& j : jobs) {
      const auto out = j.get();
      if (out.history && out.history->diverged) any_diverged = true;
    }
  } else {
    for (double f : freqs) {
      const auto out = run_one(f);
      if (out.history) {
        std::cout << cbs::bench::method_name(method) << " f=" << f << " Hz: "
                  << (out.history->converged
                          ? "converged"
                          : (out.history->diverged ? "DIVERGED" : "stopped at max iterations"))
                  << " after " << out.history->iterations_run << " iterations";
        if (!out.history->residuals.empty())
          std::cout << ", final residual " << out.history->residuals.back();
        std::cout << '\n';
        if (out.history->admissibility_warning)
          std::cout << "  warning: epsilon < max|Delta|; contractivity is not guaranteed\n";
        if (out.history->diverged) any_diverged = true;
      }
      if (out.report)
        std::cout << "  relative L2 vs " << out.reference_name << ": " << out.report->relative_l2
                  << '\n';
    }
  }
  return any_diverged ? 2 : 0;
}

int run_compare(const std::string& test_path, const std::string& ref_path,
                const CommonOpts& opts) {
  const cbs::ComplexField test = cbs::io::read_field(test_path);
  const cbs::ComplexField ref = cbs::io::read_field(ref_path);

  cbs::metrics::FieldMask mask(test.grid());
  int exclusion = 0;
  if (!opts.config_path.empty()) {
    const cbs::io::RunConfig cfg = cbs::io::load_config(opts.config_path);
    exclusion = cfg.source_exclusion_cells;
    const auto physical = cbs::bench::build_physical_model(cfg);
    if (physical.grid.same_shape(test.grid())) {
      const auto src = cbs::bench::source_on_grid(cfg, physical.grid);
      mask.exclude_disk(src.ix, src.iy, exclusion);
    }
  }

  const auto rep = cbs::metrics::error_maps(test, ref, mask, exclusion);
  std::cout << "relative_l2 " << rep.relative_l2 << '\n';

  if (!opts.out_dir.empty()) {
    fs::create_directories(opts.out_dir);
    cbs::io::Json j;
    j["test"] = test_path;
    j["reference"] = ref_path;
    j["relative_l2"] = rep.relative_l2;
    j["exclusion_radius_cells"] = rep.exclusion_radius_cells;
    std::ofstream os(fs::path(opts.out_dir) / "compare_report.json");
    os << j.dump(2) << '\n';
  }
  return 0;
}

struct VerifyCheck {
  std::string name;
  double value;
  double threshold;
  bool less_is_pass;
  bool pass() const { return less_is_pass ? value <= threshold : value >= threshold; }
};

int run_verify_operators(const CommonOpts& opts, int n, int instances, unsigned seed) {
  using namespace cbs::verify;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  auto random_symmetric = [&](int dim) {
    DenseOperator a(dim, dim);
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j <= i; ++j) {
        a(i, j) = Complex(gauss(rng), 0.0);
        a(j, i) = a(i, j);
      }
    return a;
  };
  auto random_admissible_potential = [&](int dim, double eps, double min_im) {
    // Delta drawn from the upper half-disk |Delta| <= 0.95 eps, Im >= min_im.
    DenseOperator v = DenseOperator::Zero(dim, dim);
    for (int i = 0; i < dim; ++i) {
      double re, im;
      do {
        re = (2.0 * unit(rng) - 1.0) * 0.95 * eps;
        im = unit(rng) * 0.95 * eps;
      } while (re * re + im * im > 0.9025 * eps * eps || im < min_im);
      v(i, i) = Complex(re, im - eps);  // V = Delta - i eps
    }
    return v;
  };

  std::vector<VerifyCheck> checks;
  double worst_unitary = 0.0, worst_resolvent = 0.0, worst_equiv = 0.0;
  for (int t = 0; t < instances; ++t) {
    const double eps = std::vector<double>{0.1, 1.0, 10.0}[t % 3];
    const DenseOperator a = random_symmetric(n);
    const DenseOperator u = cayley(a, eps);
    const DenseOperator uu = u.adjoint() * u - DenseOperator::Identity(n, n);
    worst_unitary = std::max(worst_unitary, uu.cwiseAbs().maxCoeff());
    worst_resolvent = std::max(worst_resolvent, check_resolvent_identity(a, eps));
    const DenseOperator v = random_admissible_potential(n, eps, 0.0);
    const CbsOperators ops = cbs_operator_dense(a, v, eps);
    worst_equiv = std::max(worst_equiv, (ops.m_direct - ops.m_cayley).cwiseAbs().maxCoeff());
  }
  checks.push_back({"cayley_unitarity_maxdev", worst_unitary, 1e-12, true});
  checks.push_back({"resolvent_identity_maxdev", worst_resolvent, 1e-11, true});
  checks.push_back({"m_direct_vs_cayley_maxdev", worst_equiv, 1e-12, true});

  // Admissibility sweep: Eq.(22) => Eq.(21) on random upper-half-disk draws.
  {
    const double eps = 1.0;
    DiagonalData diag(10000);
    for (int i = 0; i < diag.size(); ++i) {
      double re, im;
      do {
        re = 2.0 * unit(rng) - 1.0;
        im = unit(rng);
      } while (re * re + im * im > 1.0);
      diag[i] = Complex(re, im - eps);
    }
    const AdmissibilityReport rep = check_admissibility(diag, eps);
    checks.push_back({"admissibility_implies_eq21", rep.implication_ok ? 1.0 : 0.0, 1.0, false});
  }

  // Contractivity for strictly absorbing admissible V; growth for |Delta| = 2 eps.
  {
    const double eps = 1.0;
    double worst_rho = 0.0, worst_fov = 0.0;
    for (int t = 0; t < 8; ++t) {
      const DenseOperator a = random_symmetric(n);
      const DenseOperator v = random_admissible_potential(n, eps, 0.05 * eps);
      const DenseOperator m = cbs_operator_dense(a, v, eps).m_direct;
      worst_rho = std::max(worst_rho, spectral_radius(m));
      worst_fov = std::max(worst_fov, field_of_values_max(m));
    }
    checks.push_back({"admissible_spectral_radius_max", worst_rho, 1.0 - 1e-9, true});
    checks.push_back({"admissible_fov_max", worst_fov, 1.0 - 1e-9, true});

    double best_bad_rho = 0.0;
    for (int t = 0; t < 4; ++t) {
      const DenseOperator a = build_reference_operator(n, ReferenceVariant::laplacian_1d_periodic,
                                                       1.0, 0.35);
      DenseOperator v = DenseOperator::Zero(n, n);
      for (int i = 0; i < n; ++i) v(i, i) = Complex(2.0 * eps, -eps);  // Delta = 2 eps, real
      best_bad_rho = std::max(best_bad_rho, spectral_radius(cbs_operator_dense(a, v, eps).m_direct));
    }
    checks.push_back({"inadmissible_spectral_radius_max", best_bad_rho, 1.0, false});
  }

  // Appendix-B acoustic structure at desk scale.
  {
    const int na = 32;
    Eigen::VectorXcd rho(na), kappa(na);
    for (int i = 0; i < na; ++i) {
      rho[i] = Complex(1.0 + 0.2 * unit(rng), 0.02 * unit(rng));
      kappa[i] = Complex(1.0 + 0.2 * unit(rng), 0.02 * unit(rng));
    }
    const AcousticSystem sys = build_acoustic_system(na, rho, kappa, 1.0, 1.0, 1.0);
    const DenseOperator ia = Complex(0.0, 1.0) * sys.a;
    const double sa_dev = (ia - ia.adjoint()).cwiseAbs().maxCoeff();
    checks.push_back({"acoustic_iA_selfadjoint_maxdev", sa_dev, 1e-12, true});

    DenseOperator off = sys.v;
    off.diagonal().setZero();
    checks.push_back({"acoustic_V_offdiagonal_max", off.cwiseAbs().maxCoeff(), 0.0, true});

    Eigen::VectorXcd s = Eigen::VectorXcd::Zero(na);
    s[na / 2] = 1.0;
    const Eigen::VectorXcd f = acoustic_rhs(sys, s);
    const double eps_ac = 1.05 * sys.v.cwiseAbs().maxCoeff();
    const AcousticCbsResult r = acoustic_cbs_solve(sys, f, eps_ac);
    const double fp_res = ((sys.a + sys.v) * r.psi - f).norm() / f.norm();
    checks.push_back({"acoustic_cbs_fixed_point_residual", fp_res, 1e-8, true});
  }

  bool all_pass = true;
  std::ostringstream csv;
  csv << "check,value,threshold,pass\n";
  for (const auto& c : checks) {
    all_pass &= c.pass();
    std::cout << (c.pass() ? "[PASS] " : "[FAIL] ") << c.name << " = " << c.value
              << (c.less_is_pass ? " <= " : " >= ") << c.threshold << '\n';
    csv << c.name << ',' << c.value << ',' << c.threshold << ',' << (c.pass() ? 1 : 0) << '\n';
  }
  if (!opts.out_dir.empty()) {
    fs::create_directories(opts.out_dir);
    std::ofstream os(fs::path(opts.out_dir) / "verify_report.csv");
    os << csv.str();
  }
  return all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"2D frequency-domain Helmholtz solver: convergent Born series with an absorbing "
               "boundary layer, FDFD+PML reference, and operator verification"};
  app.require_subcommand(1);

  CommonOpts opts;
  std::string test_path, ref_path;
  int verify_n = 24, verify_instances = 30;
  unsigned verify_seed = 1234;

  auto add_common = [&](CLI::App* cmd, bool needs_config) {
    auto* c = cmd->add_option("--config", opts.config_path, "JSON config file");
    if (needs_config) c->required();
    cmd->add_option("--out", opts.out_dir, "output directory (overrides config)");
  };

  auto* cmd_cbs = app.add_subcommand("solve-cbs", "run the convergent Born series solver");
  auto* cmd_born = app.add_subcommand("solve-born", "run the classical Born iteration");
  auto* cmd_fdfd = app.add_subcommand("solve-fdfd", "run the FDFD+PML reference solver");
  auto* cmd_analytic = app.add_subcommand("analytic", "sample the analytic Green's function");
  for (auto* cmd : {cmd_cbs, cmd_born, cmd_fdfd, cmd_analytic}) {
    add_common(cmd, true);
    cmd->add_flag("--preview", opts.preview, "write greyscale PGM previews");
  }
  for (auto* cmd : {cmd_cbs, cmd_born})
    cmd->add_flag("--parallel-frequencies", opts.parallel_frequencies,
                  "run frequency sweeps concurrently");

  auto* cmd_compare = app.add_subcommand("compare", "relative L2 between two field files");
  cmd_compare->add_option("--test", test_path, "field under test (.cbsf)")->required();
  cmd_compare->add_option("--ref", ref_path, "reference field (.cbsf)")->required();
  add_common(cmd_compare, false);

  auto* cmd_verify = app.add_subcommand("verify-operators", "dense Cayley/contractivity checks");
  add_common(cmd_verify, false);
  cmd_verify->add_option("--n", verify_n, "dense operator dimension");
  cmd_verify->add_option("--instances", verify_instances, "random instances per check");
  cmd_verify->add_option("--seed", verify_seed, "RNG seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (cmd_cbs->parsed()) return run_solver_command(opts, cbs::bench::Method::cbs);
    if (cmd_born->parsed()) return run_solver_command(opts, cbs::bench::Method::born);
    if (cmd_fdfd->parsed()) return run_solver_command(opts, cbs::bench::Method::fdfd);
    if (cmd_analytic->parsed()) return run_solver_command(opts, cbs::bench::Method::analytic);
    if (cmd_compare->parsed()) return run_compare(test_path, ref_path, opts);
    if (cmd_verify->parsed()) return run_verify_operators(opts, verify_n, verify_instances, verify_seed);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
