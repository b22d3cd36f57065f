#include "fpois/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <memory>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "fpois/noise.hpp"
#include "fpois/rng.hpp"
#include "fpois/tensor.hpp"

namespace fpois {

std::string to_string(StudyKind k) {
  switch (k) {
    case StudyKind::isometry: return "isometry";
    case StudyKind::holder: return "holder";
    case StudyKind::kernel_rate: return "kernel_rate";
    case StudyKind::convergence: return "convergence";
  }
  return "?";
}

double StudyConfig::resolved_mu() const {
  if (mu > 0.0) return mu;
  return rates::smoothing_parameters(hurst(), safety_rho).mu;
}

void StudyConfig::validate() const {
  const HurstVector hv(h);  // validates the entries
  if (static_cast<int>(h.size()) != k)
    throw std::invalid_argument("config: h has " + std::to_string(h.size()) +
                                " entries but k = " + std::to_string(k));
  if (!rates::check_hypothesis(hv))
    throw std::invalid_argument("config: hypothesis (H) fails for the given h");
  if (scheme == Scheme::plain && k >= 4)
    throw std::invalid_argument("config: plain scheme only valid for k <= 3");
  if (scheme == Scheme::smoothed && k < 4 && kind == StudyKind::convergence)
    throw std::invalid_argument("config: smoothed scheme is for k >= 4");
  if (!(tol > 0.0)) throw std::invalid_argument("config: tol must be positive");
  if (max_iter < 1) throw std::invalid_argument("config: max_iter must be >= 1");
  if (workers < 1) throw std::invalid_argument("config: workers must be >= 1");

  auto power_of_two = [](int v) { return v >= 2 && (v & (v - 1)) == 0; };
  switch (kind) {
    case StudyKind::convergence: {
      if (replicates < 1) throw std::invalid_argument("config: replicates must be >= 1");
      if (resolutions.size() < 3)
        throw std::invalid_argument("config: need at least 3 resolutions");
      for (std::size_t i = 0; i < resolutions.size(); ++i) {
        if (!power_of_two(resolutions[i]))
          throw std::invalid_argument("config: resolutions must be powers of two");
        if (i && resolutions[i] <= resolutions[i - 1])
          throw std::invalid_argument("config: resolutions must be ascending");
      }
      if (reference_resolution < 2 * resolutions.back())
        throw std::invalid_argument(
            "config: reference resolution must be at least twice the finest study one");
      if (!power_of_two(reference_resolution))
        throw std::invalid_argument("config: reference resolution must be a power of two");
      for (int n : resolutions)
        if (reference_resolution % n != 0)
          throw std::invalid_argument("config: every resolution must divide the reference");
      break;
    }
    case StudyKind::isometry:
      if (replicates < 1) throw std::invalid_argument("config: replicates must be >= 1");
      if (reference_resolution < 2)
        throw std::invalid_argument("config: isometry needs a reference resolution");
      break;
    case StudyKind::holder: {
      if (reference_resolution < 8)
        throw std::invalid_argument("config: holder study needs reference resolution >= 8");
      for (double s : separations)
        if (!(s > 0.0) || !(s < 1.0) || std::abs(s * reference_resolution -
                                                 std::round(s * reference_resolution)) > 1e-9)
          throw std::invalid_argument(
              "config: separations must be positive multiples of 1/reference_resolution");
      break;
    }
    case StudyKind::kernel_rate: {
      if (resolutions.size() < 3)
        throw std::invalid_argument("config: need at least 3 resolutions");
      if (k < 2) throw std::invalid_argument("config: kernel_rate needs k >= 2");
      break;
    }
  }
  if (scheme == Scheme::smoothed) {
    if (delta > 0.0 && !(delta < 2.0))
      throw std::invalid_argument("config: delta must lie in ]0,2[");
    const double mu_eff = mu > 0.0 ? mu : rates::smoothing_parameters(hv, safety_rho).mu;
    const double d_eff = delta > 0.0 ? delta : rates::smoothing_parameters(hv, safety_rho).delta;
    if (k >= 4 && !(mu_eff < (2.0 - d_eff) / (k - 2)))
      throw std::invalid_argument("config: mu outside ]0,(2-delta)/(k-2)[");
  }
}

double ProbeReport::quantile(double q) const {
  if (xi.empty()) return 0.0;
  std::vector<double> sorted = xi;
  std::sort(sorted.begin(), sorted.end());
  const double pos = q * (sorted.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - lo) * (sorted[hi] - sorted[lo]);
}

namespace experiments {

void parallel_for(int count, int workers, const std::function<void(int)>& fn) {
  workers = std::max(1, std::min(workers, count));
  if (workers == 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const int i = next.fetch_add(1);
        if (i >= count) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

namespace {

// mollifier scale per resolution: eps(n) = n^{-mu} for the smoothed scheme
double epsilon_for(const StudyConfig& cfg, int n) {
  if (cfg.scheme != Scheme::smoothed) return 0.0;
  return std::pow(static_cast<double>(n), -cfg.resolved_mu());
}

}  // namespace

ConvergenceData convergence_errors(const StudyConfig& cfg) {
  cfg.validate();
  const HurstVector h = cfg.hurst();
  const int nref = cfg.reference_resolution;
  const GridSpec ref_grid(cfg.k, nref);

  // shared immutable per-resolution machinery
  std::vector<int> all_n = cfg.resolutions;
  all_n.push_back(nref);
  std::vector<SpectralPlan> plans;
  std::vector<std::unique_ptr<MollifierTable>> mollifiers;
  plans.reserve(all_n.size());
  for (int n : all_n) {
    plans.emplace_back(GridSpec(cfg.k, n));
    const double eps = epsilon_for(cfg, n);
    mollifiers.push_back(eps > 0.0
                             ? std::make_unique<MollifierTable>(eps, GridSpec(cfg.k, n))
                             : nullptr);
  }
  const auto factors = noise::build_axis_cholesky(h, ref_grid);

  ConvergenceData data;
  data.resolutions = cfg.resolutions;
  for (std::size_t i = 0; i < cfg.resolutions.size(); ++i)
    data.epsilons.push_back(epsilon_for(cfg, cfg.resolutions[i]));
  data.errors.assign(cfg.replicates, std::vector<double>(cfg.resolutions.size(), 0.0));

  SolveOptions opts;
  opts.tol = cfg.tol;
  opts.max_iter = cfg.max_iter;

  parallel_for(cfg.replicates, cfg.workers, [&](int rep) {
    const NoiseSample fine =
        noise::sample(h, ref_grid, factors, cfg.seed, static_cast<std::uint64_t>(rep));
    const std::size_t ref_idx = all_n.size() - 1;
    const auto ref_rep = solver::solve_scheme(fine, cfg.g, cfg.f, plans[ref_idx],
                                              mollifiers[ref_idx].get(), opts);
    if (!ref_rep.converged)
      throw NumericalError("convergence study: reference solve did not converge (replicate " +
                           std::to_string(rep) + ")");
    const CellField ref_cells = cell_extension(ref_rep.solution);
    for (std::size_t i = 0; i < cfg.resolutions.size(); ++i) {
      const NoiseSample coarse = noise::aggregate(fine, cfg.resolutions[i]);
      const auto rep_n =
          solver::solve_scheme(coarse, cfg.g, cfg.f, plans[i], mollifiers[i].get(), opts);
      if (!rep_n.converged)
        throw NumericalError("convergence study: solve at n = " +
                             std::to_string(cfg.resolutions[i]) +
                             " did not converge (replicate " + std::to_string(rep) + ")");
      data.errors[rep][i] = l2_cell_distance(cell_extension(rep_n.solution), ref_cells);
    }
  });
  return data;
}

RateEstimate run_convergence_study(const StudyConfig& cfg) {
  const ConvergenceData data = convergence_errors(cfg);
  RateEstimate est;
  est.kind = StudyKind::convergence;
  est.theoretical_rate = -rates::convergence_rate_sup(cfg.hurst());

  std::vector<double> xs, ys;
  bool all_zero = true;
  for (std::size_t i = 0; i < data.resolutions.size(); ++i) {
    double mean = 0.0, m2 = 0.0;
    for (int r = 0; r < cfg.replicates; ++r) mean += data.errors[r][i];
    mean /= cfg.replicates;
    for (int r = 0; r < cfg.replicates; ++r) {
      const double d = data.errors[r][i] - mean;
      m2 += d * d;
    }
    const double se =
        cfg.replicates > 1 ? std::sqrt(m2 / (cfg.replicates - 1) / cfg.replicates) : 0.0;
    est.points.push_back({static_cast<double>(data.resolutions[i]), mean, se,
                          data.epsilons[i]});
    if (mean != 0.0) all_zero = false;
    xs.push_back(data.resolutions[i]);
    ys.push_back(mean);
  }
  if (all_zero) {
    est.exact_zero = true;  // zero data solves exactly at every resolution
    return est;
  }
  est.fit = loglog_fit_with_transient_drop(xs, ys);

  // decay of the source projection, so the g term is seen not to dominate
  if (cfg.g.kind() != SourceSpec::Kind::zero) {
    double p0 = 0.0;
    for (double hd : cfg.h) p0 = std::max(p0, 1.0 / (1.0 - hd));
    std::vector<double> gx, gy;
    for (int n : data.resolutions) {
      const GridSpec g(cfg.k, n);
      const CellField gn = cfg.g.project(g);
      const int m = 2 * n;
      double acc = 0.0;
      MultiIndex qi{};
      std::int64_t count = GridSpec::ipow(m, cfg.k);
      for (std::int64_t f = 0; f < count; ++f) {
        double x[kMaxDim];
        for (int d = 0; d < cfg.k; ++d) x[d] = (qi[d] + 0.5) / m;
        acc += std::pow(std::abs(cfg.g.evaluate(x, cfg.k) - gn.at_point(x)), p0);
        next_index(qi, cfg.k, 0, m - 1);
      }
      gx.push_back(n);
      gy.push_back(std::pow(acc / count, 1.0 / p0));
    }
    est.g_rate_slope = loglog_fit(gx, gy).slope;
  }
  return est;
}

RateEstimate run_holder_study(const StudyConfig& cfg) {
  cfg.validate();
  const HurstVector h = cfg.hurst();
  const int n = cfg.reference_resolution;
  const GridSpec grid(cfg.k, n);
  const SpectralPlan plan(grid);
  std::unique_ptr<MollifierTable> mt;
  if (cfg.scheme == Scheme::smoothed)
    mt = std::make_unique<MollifierTable>(epsilon_for(cfg, n), grid);

  std::vector<double> seps = cfg.separations;
  if (seps.empty()) {
    for (int j = 2; j <= 6 && (n >> j) >= 4; ++j) seps.push_back(std::pow(2.0, -j));
  }
  // per-axis covariance matrices of the cell increments
  std::vector<Eigen::MatrixXd> axis_covs;
  for (int d = 0; d < cfg.k; ++d) axis_covs.push_back(noise::axis_covariance(h[d], n));

  // base point at the center, separation along a seed-derived axis
  const CounterRng rng(cfg.seed, 0);
  const int axis = static_cast<int>(rng.word(0) % static_cast<std::uint64_t>(cfg.k));
  double x[kMaxDim];
  for (int d = 0; d < cfg.k; ++d) x[d] = 0.5;
  const CellField slice_x = kernels::green_discrete_slice(x, plan, mt.get());

  RateEstimate est;
  est.kind = StudyKind::holder;
  est.theoretical_rate = 2.0 * rates::holder_exponent_sup(h);
  std::vector<double> xs, ys;
  for (double sep : seps) {
    double z[kMaxDim];
    for (int d = 0; d < cfg.k; ++d) z[d] = x[d];
    z[axis] = x[axis] - sep;
    const CellField slice_z = kernels::green_discrete_slice(z, plan, mt.get());
    Eigen::ArrayXd diff = slice_x.values() - slice_z.values();
    Eigen::ArrayXd w = diff;
    tensor::apply_axis_matrices(w, axis_covs, n, cfg.k);
    const double var = (diff * w).sum();  // exact Gaussian Var(J(x) - J(z))
    est.points.push_back({sep, var, 0.0, mt ? mt->epsilon() : 0.0});
    xs.push_back(sep);
    ys.push_back(var);
  }
  est.fit = loglog_fit(xs, ys);
  return est;
}

RateEstimate run_kernel_rate_study(const StudyConfig& cfg) {
  cfg.validate();
  RateEstimate est;
  est.kind = StudyKind::kernel_rate;
  const double delta =
      cfg.delta > 0.0 ? cfg.delta
                      : rates::smoothing_parameters(cfg.hurst(), cfg.safety_rho).delta;
  est.theoretical_rate = -0.5 * delta;
  const int b_max = cfg.b_max > 0 ? cfg.b_max : 4 * cfg.resolutions.back();
  std::vector<double> xs, ys;
  for (int n : cfg.resolutions) {
    const GridSpec g(cfg.k, n);
    const SpectralPlan plan(g);
    const double eps = std::pow(static_cast<double>(n), -cfg.resolved_mu());
    const MollifierTable mt(eps, g, b_max);
    const auto rep = kernels::kernel_discrepancy_l2(plan, mt, b_max);
    est.points.push_back({static_cast<double>(n), rep.total, 0.0, eps});
    xs.push_back(n);
    ys.push_back(rep.total);
  }
  est.fit = loglog_fit(xs, ys);
  return est;
}

IsometryReport run_isometry_study(const StudyConfig& cfg) {
  cfg.validate();
  const HurstVector h = cfg.hurst();
  const int n = cfg.reference_resolution;
  const GridSpec grid(cfg.k, n);

  // panel of elementary step functions on the cells; the first is the
  // indicator of [0, (1/2,...,1/2)], whose variance has the closed form
  // prod (1/2)^{2 h_d}
  std::vector<Eigen::ArrayXd> panel;
  auto box_indicator = [&](const MultiIndex& lo, const MultiIndex& hi) {
    Eigen::ArrayXd v = Eigen::ArrayXd::Zero(grid.cell_count());
    MultiIndex j{};
    std::int64_t f = 0;
    do {
      bool in = true;
      for (int d = 0; d < cfg.k; ++d) in = in && j[d] >= lo[d] && j[d] < hi[d];
      v[f++] = in ? 1.0 : 0.0;
    } while (next_index(j, cfg.k, 0, n - 1));
    return v;
  };
  MultiIndex zero{}, half{}, full{};
  for (int d = 0; d < cfg.k; ++d) {
    half[d] = n / 2;
    full[d] = n;
  }
  panel.push_back(box_indicator(zero, half));  // 1_{[0,(1/2,..,1/2)]}
  panel.push_back(box_indicator(zero, full));  // whole cube
  const CounterRng rng(cfg.seed, 1);
  std::uint64_t ctr = 0;
  auto rand_cell = [&](int lo, int hi) {
    return lo + static_cast<int>(rng.word(ctr++) % static_cast<std::uint64_t>(hi - lo));
  };
  while (panel.size() < 6) {  // random corner boxes [0, x]
    MultiIndex hi{};
    for (int d = 0; d < cfg.k; ++d) hi[d] = rand_cell(1, n + 1);
    panel.push_back(box_indicator(zero, hi));
  }
  {
    // two disjoint boxes split along axis 0, and their +/- combination
    MultiIndex lo1{}, hi1{}, lo2{}, hi2{};
    for (int d = 0; d < cfg.k; ++d) {
      lo1[d] = 0;
      hi1[d] = d == 0 ? n / 2 : rand_cell(1, n + 1);
      lo2[d] = d == 0 ? n / 2 : 0;
      hi2[d] = d == 0 ? n : rand_cell(1, n + 1);
    }
    const Eigen::ArrayXd b1 = box_indicator(lo1, hi1);
    const Eigen::ArrayXd b2 = box_indicator(lo2, hi2);
    panel.push_back(b1);
    panel.push_back(b2);
    panel.push_back(b1 - b2);  // signed elementary function
  }
  panel.push_back(-panel[0]);  // phi_2 = -phi_1
  const int m = static_cast<int>(panel.size());

  // analytic covariances via the Kronecker covariance action
  std::vector<Eigen::MatrixXd> axis_covs;
  for (int d = 0; d < cfg.k; ++d) axis_covs.push_back(noise::axis_covariance(h[d], n));
  std::vector<Eigen::ArrayXd> cov_applied;
  for (const auto& phi : panel) {
    Eigen::ArrayXd w = phi;
    tensor::apply_axis_matrices(w, axis_covs, n, cfg.k);
    cov_applied.push_back(std::move(w));
  }

  // Monte Carlo moments of I(phi_i) I(phi_j)
  const auto factors = noise::build_axis_cholesky(h, grid);
  std::vector<std::vector<double>> values(cfg.replicates, std::vector<double>(m, 0.0));
  parallel_for(cfg.replicates, cfg.workers, [&](int rep) {
    const auto s =
        noise::sample(h, grid, factors, cfg.seed, static_cast<std::uint64_t>(rep));
    for (int i = 0; i < m; ++i) values[rep][i] = (panel[i] * s.increments).sum();
  });

  IsometryReport report;
  report.panel_size = m;
  report.variance_check_analytic = (panel[0] * cov_applied[0]).sum();
  report.variance_check_expected = 1.0;
  for (int d = 0; d < cfg.k; ++d)
    report.variance_check_expected *= std::pow(0.5, 2.0 * h[d]);
  for (int i = 0; i < m; ++i) {
    for (int j = i; j < m; ++j) {
      IsometryPair pair;
      pair.first = i;
      pair.second = j;
      pair.analytic = (panel[i] * cov_applied[j]).sum();
      double acc = 0.0, acc2 = 0.0;
      for (int r = 0; r < cfg.replicates; ++r) {
        const double p = values[r][i] * values[r][j];
        acc += p;
        acc2 += p * p;
      }
      pair.mc_mean = acc / cfg.replicates;
      const double var = acc2 / cfg.replicates - pair.mc_mean * pair.mc_mean;
      pair.mc_se = std::sqrt(std::max(var, 0.0) / cfg.replicates);
      pair.standardized =
          pair.mc_se > 0.0 ? std::abs(pair.mc_mean - pair.analytic) / pair.mc_se : 0.0;
      report.max_standardized_dev = std::max(report.max_standardized_dev, pair.standardized);
      report.pairs.push_back(pair);
    }
  }
  return report;
}

ProbeReport almost_sure_rate_probe(const StudyConfig& cfg, double nu_override) {
  const ConvergenceData data = convergence_errors(cfg);
  ProbeReport probe;
  probe.nu_used = nu_override > 0.0 ? nu_override : rates::convergence_rate_sup(cfg.hurst());
  probe.resolutions = data.resolutions;
  probe.errors = data.errors;
  probe.xi.reserve(cfg.replicates);
  for (const auto& row : data.errors) {
    double best = 0.0;
    for (std::size_t i = 0; i < row.size(); ++i)
      best = std::max(best, row[i] * std::pow(data.resolutions[i], probe.nu_used));
    probe.xi.push_back(best);
  }
  return probe;
}

bool passes(const StudyConfig& cfg, const RateEstimate& est) {
  if (!cfg.has_slope_target) return true;
  if (est.exact_zero) return true;
  if (cfg.kind == StudyKind::holder) return est.fit.slope >= cfg.slope_target;
  return est.fit.slope <= cfg.slope_target;
}

namespace {
std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}
}  // namespace

void save_study_csv(const StudyConfig& cfg, const RateEstimate& est, std::ostream& out) {
  out << "study_kind,k";
  for (int d = 1; d <= cfg.k; ++d) out << ",h_" << d;
  out << ",n,epsilon,replicates,error_mean,error_se\n";
  for (const auto& pt : est.points) {
    out << to_string(cfg.kind) << ',' << cfg.k;
    for (double hd : cfg.h) out << ',' << fmt(hd);
    out << ',' << fmt(pt.x) << ',' << fmt(pt.epsilon) << ',' << cfg.replicates << ','
        << fmt(pt.mean) << ',' << fmt(pt.se) << '\n';
  }
}

void save_summary(const StudyConfig& cfg, const RateEstimate& est, std::ostream& out) {
  out << "study = " << to_string(cfg.kind) << '\n';
  if (est.exact_zero) {
    out << "exact = true\n";
    out << "pass = true\n";
    return;
  }
  out << "slope = " << fmt(est.fit.slope) << '\n';
  out << "slope_se = " << fmt(est.fit.slope_se) << '\n';
  out << "intercept = " << fmt(est.fit.intercept) << '\n';
  out << "theoretical_rate = " << fmt(est.theoretical_rate) << '\n';
  out << "dropped_coarsest = " << (est.fit.dropped_first ? "true" : "false") << '\n';
  if (est.g_rate_slope != 0.0) out << "g_rate_slope = " << fmt(est.g_rate_slope) << '\n';
  if (cfg.has_slope_target) out << "target = " << fmt(cfg.slope_target) << '\n';
  out << "pass = " << (passes(cfg, est) ? "true" : "false") << '\n';
}

std::string summary_line(const StudyConfig& cfg, const RateEstimate& est) {
  std::ostringstream os;
  char buf[64];
  os << to_string(cfg.kind);
  if (est.exact_zero) {
    os << " exact (all errors zero)";
    return os.str();
  }
  std::snprintf(buf, sizeof buf, " slope=%.4f±%.4f", est.fit.slope, est.fit.slope_se);
  os << buf;
  if (cfg.has_slope_target) {
    std::snprintf(buf, sizeof buf, " target=%.4f ", cfg.slope_target);
    os << buf << (passes(cfg, est) ? "PASS" : "FAIL");
  } else {
    os << " target=none";
  }
  return os.str();
}

}  // namespace experiments
}  // namespace fpois
