#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "fpois/config.hpp"
#include "fpois/experiments.hpp"
#include "fpois/kernels.hpp"
#include "fpois/noise.hpp"
#include "fpois/solver.hpp"

namespace fs = std::filesystem;
using namespace fpois;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitValidation = 1;
constexpr int kExitNumerical = 2;

std::vector<double> parse_h(const std::string& arg, int k) {
  std::vector<double> h;
  std::stringstream ss(arg);
  std::string tok;
  while (std::getline(ss, tok, ',')) h.push_back(std::stod(tok));
  if (k > 0 && h.size() == 1) h.assign(k, h[0]);
  return h;
}

// fresh run directory: never appends to an existing one
fs::path make_run_dir(const std::string& base, const std::string& tag) {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y%m%dT%H%M%S", std::gmtime(&t));
  fs::path dir;
  for (int suffix = 0;; ++suffix) {
    std::string leaf = tag + "_" + stamp;
    if (suffix) leaf += "_" + std::to_string(suffix);
    dir = fs::path(base) / leaf;
    if (!fs::exists(dir)) break;
  }
  fs::create_directories(dir);
  return dir;
}

void write_provenance(const RunConfig& rc, std::ostream& out) {
  if (rc.seed_overridden)
    out << "# seed overridden by FPOIS_SEED = " << rc.study.seed << "\n";
}

int cmd_rates(const std::string& h_arg, int k, double delta, double rho) {
  const std::vector<double> hv = parse_h(h_arg, k);
  const HurstVector h(hv);
  const auto rep = rates::report(h);
  std::printf("k = %d\nh =", h.dim());
  for (double v : hv) std::printf(" %g", v);
  std::printf("\nhypothesis (H):  %s\n", rep.hypothesis_ok ? "ok" : "FAIL");
  std::printf("hypothesis (H*): %s\n", rep.hypothesis_star_ok ? "ok" : "not satisfied");
  if (!rep.hypothesis_ok) return kExitValidation;
  std::printf("lambda_sup = %.12g\n", rep.lambda_sup);
  std::printf("nu_sup     = %.12g\n", rep.nu_sup);
  std::printf("gamma_sup  = %.12g\n", rep.gamma_sup);
  if (h.dim() >= 4) {
    auto sp = rates::smoothing_parameters(h, rho);
    if (delta > 0.0) {
      sp.delta = delta;
      sp.mu = rho * delta / (2.0 * rates::holder_exponent_sup(h));
    }
    std::printf("smoothed scheme: delta = %.12g, mu = %.12g (eps(n) = n^-mu)\n", sp.delta,
                sp.mu);
  }
  return kExitPass;
}

int cmd_sample(const RunConfig& rc) {
  if (rc.n_single < 2)
    throw std::invalid_argument("sample: config must set n (resolution) >= 2");
  const HurstVector h(rc.study.h);
  const GridSpec grid(rc.study.k, rc.n_single);
  const auto s = noise::sample(h, grid, rc.study.seed, rc.stream_id);
  const fs::path dir = make_run_dir(rc.out_dir, "sample");
  std::ofstream out(dir / "noise.csv");
  write_provenance(rc, out);
  noise::save_csv(s, out);
  std::printf("sample: wrote %s\n", (dir / "noise.csv").c_str());
  return kExitPass;
}

int cmd_solve(const RunConfig& rc) {
  if (rc.n_single < 2)
    throw std::invalid_argument("solve: config must set n (resolution) >= 2");
  const StudyConfig& sc = rc.study;
  const HurstVector h(sc.h);
  if (!rates::check_hypothesis(h))
    throw std::invalid_argument("solve: hypothesis (H) fails");
  const GridSpec grid(sc.k, rc.n_single);
  const SpectralPlan plan(grid);
  std::unique_ptr<MollifierTable> mt;
  if (sc.scheme == Scheme::smoothed) {
    const double eps = std::pow(static_cast<double>(rc.n_single), -sc.resolved_mu());
    mt = std::make_unique<MollifierTable>(eps, grid);
  } else if (sc.k >= 4) {
    throw std::invalid_argument("solve: k >= 4 requires scheme = smoothed");
  }
  const auto s = noise::sample(h, grid, sc.seed, rc.stream_id);
  SolveOptions opts;
  opts.tol = sc.tol;
  opts.max_iter = sc.max_iter;
  const auto rep = solver::solve_scheme(s, sc.g, sc.f, plan, mt.get(), opts);

  const fs::path dir = make_run_dir(rc.out_dir, "solve");
  {
    std::ofstream out(dir / "solution.csv");
    write_provenance(rc, out);
    solver::save_field_csv(rep.solution, out);
  }
  {
    std::ofstream out(dir / "report.txt");
    solver::save_report(rep, out);
    const double ktilde = kernels::k_tilde_discrete(plan, mt.get());
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", ktilde);
    out << "k_tilde = " << buf << '\n';
    std::snprintf(buf, sizeof buf, "%.17g", sc.f.lipschitz_l() * ktilde);
    out << "lipschitz_times_k_tilde = " << buf << '\n';
  }
  std::printf("solve: %s in %d iterations, outputs in %s\n",
              rep.converged ? "converged" : "NOT converged", rep.iterations,
              dir.c_str());
  if (!rep.converged) return kExitNumerical;
  return kExitPass;
}

int run_rate_study(const RunConfig& rc, const fs::path& dir) {
  const StudyConfig& sc = rc.study;
  RateEstimate est;
  switch (sc.kind) {
    case StudyKind::convergence: est = experiments::run_convergence_study(sc); break;
    case StudyKind::holder: est = experiments::run_holder_study(sc); break;
    case StudyKind::kernel_rate: est = experiments::run_kernel_rate_study(sc); break;
    case StudyKind::isometry: throw std::logic_error("not a rate study");
  }
  {
    std::ofstream out(dir / "study.csv");
    write_provenance(rc, out);
    experiments::save_study_csv(sc, est, out);
  }
  {
    std::ofstream out(dir / "summary.txt");
    experiments::save_summary(sc, est, out);
  }
  std::printf("%s\n", experiments::summary_line(sc, est).c_str());
  std::printf("outputs in %s\n", dir.c_str());
  return experiments::passes(sc, est) ? kExitPass : kExitValidation;
}

int run_isometry(const RunConfig& rc, const fs::path& dir) {
  const auto rep = experiments::run_isometry_study(rc.study);
  {
    std::ofstream out(dir / "isometry.csv");
    write_provenance(rc, out);
    out << "first,second,analytic,mc_mean,mc_se,standardized\n";
    char buf[256];
    for (const auto& p : rep.pairs) {
      std::snprintf(buf, sizeof buf, "%d,%d,%.17g,%.17g,%.17g,%.17g\n", p.first, p.second,
                    p.analytic, p.mc_mean, p.mc_se, p.standardized);
      out << buf;
    }
  }
  const bool pass = rep.max_standardized_dev <= rc.isometry_max_dev;
  {
    std::ofstream out(dir / "summary.txt");
    char buf[64];
    out << "study = isometry\n";
    out << "panel_size = " << rep.panel_size << '\n';
    std::snprintf(buf, sizeof buf, "%.17g", rep.max_standardized_dev);
    out << "max_standardized_dev = " << buf << '\n';
    std::snprintf(buf, sizeof buf, "%.17g", rc.isometry_max_dev);
    out << "target = " << buf << '\n';
    std::snprintf(buf, sizeof buf, "%.17g", rep.variance_check_analytic);
    out << "corner_variance_analytic = " << buf << '\n';
    std::snprintf(buf, sizeof buf, "%.17g", rep.variance_check_expected);
    out << "corner_variance_expected = " << buf << '\n';
    out << "pass = " << (pass ? "true" : "false") << '\n';
  }
  std::printf("isometry max_std_dev=%.4f target=%.2f %s\n", rep.max_standardized_dev,
              rc.isometry_max_dev, pass ? "PASS" : "FAIL");
  std::printf("outputs in %s\n", dir.c_str());
  return pass ? kExitPass : kExitValidation;
}

int cmd_study(RunConfig rc, std::optional<StudyKind> forced, int workers_override) {
  if (forced) rc.study.kind = *forced;
  if (workers_override > 0) rc.study.workers = workers_override;
  rc.study.validate();
  const fs::path dir = make_run_dir(rc.out_dir, to_string(rc.study.kind));
  if (rc.study.kind == StudyKind::isometry) return run_isometry(rc, dir);
  return run_rate_study(rc, dir);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fractional Poisson SPDE lattice toolkit"};
  app.require_subcommand(1);
  app.footer("config keys:\n" + config_key_help());

  std::string h_arg, config_path;
  int k_arg = 0, workers_override = 0;
  double delta = 0.0, rho = 0.98;

  auto* rates_cmd = app.add_subcommand("rates", "print theoretical exponents");
  rates_cmd->set_help_flag("--help", "print help");  // frees -h for the Hurst option
  rates_cmd->add_option("--h", h_arg, "Hurst entries, comma separated")->required();
  rates_cmd->add_option("--k", k_arg, "dimension (broadcasts a single --h value)");
  rates_cmd->add_option("--delta", delta, "smoothed-scheme delta override");
  rates_cmd->add_option("--rho", rho, "safety factor for interior values");

  auto* sample_cmd = app.add_subcommand("sample", "draw one noise sample");
  sample_cmd->add_option("config", config_path, "run config file")->required();

  auto* solve_cmd = app.add_subcommand("solve", "solve the lattice scheme once");
  solve_cmd->add_option("config", config_path, "run config file")->required();

  auto* study_cmd = app.add_subcommand("study", "run the configured study");
  study_cmd->add_option("config", config_path, "run config file")->required();
  study_cmd->add_option("--workers", workers_override, "worker pool size override");

  auto* kernel_cmd = app.add_subcommand("kernel-check", "kernel discrepancy rate study");
  kernel_cmd->add_option("config", config_path, "run config file")->required();
  kernel_cmd->add_option("--workers", workers_override, "worker pool size override");

  auto* iso_cmd = app.add_subcommand("isometry-check", "isometry Monte Carlo study");
  iso_cmd->add_option("config", config_path, "run config file")->required();
  iso_cmd->add_option("--workers", workers_override, "worker pool size override");

  CLI11_PARSE(app, argc, argv);

  try {
    if (rates_cmd->parsed()) return cmd_rates(h_arg, k_arg, delta, rho);
    const RunConfig rc = parse_config_file(config_path);
    if (sample_cmd->parsed()) return cmd_sample(rc);
    if (solve_cmd->parsed()) return cmd_solve(rc);
    if (study_cmd->parsed()) return cmd_study(rc, std::nullopt, workers_override);
    if (kernel_cmd->parsed())
      return cmd_study(rc, StudyKind::kernel_rate, workers_override);
    if (iso_cmd->parsed()) return cmd_study(rc, StudyKind::isometry, workers_override);
  } catch (const NumericalError& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return kExitNumerical;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitValidation;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitNumerical;
  }
  return kExitValidation;
}
