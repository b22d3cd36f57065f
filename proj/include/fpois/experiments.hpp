#ifndef FPOIS_EXPERIMENTS_HPP
#define FPOIS_EXPERIMENTS_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fpois/kernels.hpp"
#include "fpois/rates.hpp"
#include "fpois/regression.hpp"
#include "fpois/solver.hpp"

namespace fpois {

enum class StudyKind { isometry, holder, kernel_rate, convergence };
enum class Scheme { plain, smoothed };

std::string to_string(StudyKind k);

struct StudyConfig {
  StudyKind kind = StudyKind::convergence;
  int k = 1;
  std::vector<double> h;
  std::vector<int> resolutions;       // ascending powers of two
  int reference_resolution = 0;
  int replicates = 0;
  std::uint64_t seed = 0;
  NonlinearitySpec f = NonlinearitySpec::zero();
  SourceSpec g = SourceSpec::zero();
  Scheme scheme = Scheme::plain;
  double delta = 0.0;                 // smoothed scheme; <=0 means from rates
  double mu = 0.0;                    //   "
  double safety_rho = 0.98;
  double tol = 1e-10;
  int max_iter = 10000;
  int workers = 1;
  int b_max = 0;                      // kernel_rate truncation, 0 -> 4 * finest n
  std::vector<double> separations;    // holder study; empty -> dyadic default
  double slope_target = 0.0;          // 0 = no acceptance threshold
  bool has_slope_target = false;

  HurstVector hurst() const { return HurstVector(h); }
  // epsilon(n) = n^{-mu}; mu from the config or from smoothing_parameters
  double resolved_mu() const;
  void validate() const;  // throws std::invalid_argument with context
};

struct ResolutionPoint {
  double x = 0.0;       // resolution n (convergence) or separation (holder)
  double mean = 0.0;
  double se = 0.0;
  double epsilon = 0.0; // mollifier scale used at this point (0 = plain)
};

struct RateEstimate {
  StudyKind kind = StudyKind::convergence;
  std::vector<ResolutionPoint> points;
  LogLogFit fit;
  double theoretical_rate = 0.0;   // signed: -nu for convergence, +2 lambda for holder
  bool exact_zero = false;         // every error vanished; regression skipped
  double g_rate_slope = 0.0;       // convergence: ||g-g_n|| decay slope (0 if no g)
};

struct IsometryPair {
  int first = 0, second = 0;
  double analytic = 0.0, mc_mean = 0.0, mc_se = 0.0, standardized = 0.0;
};

struct IsometryReport {
  int panel_size = 0;
  std::vector<IsometryPair> pairs;
  double max_standardized_dev = 0.0;
  double variance_check_analytic = 0.0;  // Var I(1_{[0,(1/2..1/2)]}), analytic
  double variance_check_expected = 0.0;  // prod (1/2)^{2 h_d}
};

struct ProbeReport {
  double nu_used = 0.0;
  std::vector<int> resolutions;
  std::vector<std::vector<double>> errors;  // [replicate][resolution index]
  std::vector<double> xi;                   // max_n error_n n^nu per replicate
  double quantile(double q) const;          // empirical quantile of xi
};

namespace experiments {

// Raw coupled errors of the convergence engine: one noise draw per replicate
// at the reference resolution, aggregated to every study resolution.
struct ConvergenceData {
  std::vector<int> resolutions;
  std::vector<double> epsilons;             // per resolution (0 for plain)
  std::vector<std::vector<double>> errors;  // [replicate][resolution index]
};
ConvergenceData convergence_errors(const StudyConfig& cfg);

RateEstimate run_convergence_study(const StudyConfig& cfg);
RateEstimate run_holder_study(const StudyConfig& cfg);
RateEstimate run_kernel_rate_study(const StudyConfig& cfg);
IsometryReport run_isometry_study(const StudyConfig& cfg);
// nu_override > 0 replaces the theoretical rate (negative-control runs)
ProbeReport almost_sure_rate_probe(const StudyConfig& cfg, double nu_override = 0.0);

// did the study meet the configured acceptance threshold?
bool passes(const StudyConfig& cfg, const RateEstimate& est);

void save_study_csv(const StudyConfig& cfg, const RateEstimate& est, std::ostream& out);
void save_summary(const StudyConfig& cfg, const RateEstimate& est, std::ostream& out);
// one-line verdict: "<study> slope=<s>±<se> target=<t> PASS|FAIL"
std::string summary_line(const StudyConfig& cfg, const RateEstimate& est);

// replicate-parallel map with deterministic slot-indexed reduction
void parallel_for(int count, int workers, const std::function<void(int)>& fn);

}  // namespace experiments

}  // namespace fpois

#endif
