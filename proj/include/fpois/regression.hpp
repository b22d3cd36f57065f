#ifndef FPOIS_REGRESSION_HPP
#define FPOIS_REGRESSION_HPP

#include <vector>

namespace fpois {

struct LogLogFit {
  double slope = 0.0;
  double slope_se = 0.0;   // residual-based standard error of the slope
  double intercept = 0.0;
  bool dropped_first = false;  // coarsest point removed as pre-asymptotic
  int points_used = 0;
};

// Least squares of log(y) on log(x); needs >= 3 points and positive data.
LogLogFit loglog_fit(const std::vector<double>& x, const std::vector<double>& y);

// Same, but drops the first (coarsest) point when its residual exceeds
// 3x the fit standard error and at least 3 points remain.
LogLogFit loglog_fit_with_transient_drop(const std::vector<double>& x,
                                         const std::vector<double>& y);

}  // namespace fpois

#endif
