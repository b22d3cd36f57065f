#include "fpois/regression.hpp"

#include <cmath>
#include <stdexcept>

namespace fpois {

namespace {

LogLogFit fit_impl(const std::vector<double>& lx, const std::vector<double>& ly) {
  const int m = static_cast<int>(lx.size());
  double mx = 0.0, my = 0.0;
  for (int i = 0; i < m; ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= m;
  my /= m;
  double sxx = 0.0, sxy = 0.0;
  for (int i = 0; i < m; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  LogLogFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ss_res = 0.0;
  for (int i = 0; i < m; ++i) {
    const double r = ly[i] - (f.intercept + f.slope * lx[i]);
    ss_res += r * r;
  }
  f.slope_se = m > 2 ? std::sqrt(ss_res / (m - 2) / sxx) : 0.0;
  f.points_used = m;
  return f;
}

void to_logs(const std::vector<double>& x, const std::vector<double>& y,
             std::vector<double>& lx, std::vector<double>& ly) {
  if (x.size() != y.size()) throw std::invalid_argument("loglog_fit: size mismatch");
  if (x.size() < 3) throw std::invalid_argument("loglog_fit: need at least 3 points");
  lx.resize(x.size());
  ly.resize(y.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0))
      throw std::invalid_argument("loglog_fit: data must be positive");
    lx[i] = std::log(x[i]);
    ly[i] = std::log(y[i]);
  }
}

}  // namespace

LogLogFit loglog_fit(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> lx, ly;
  to_logs(x, y, lx, ly);
  return fit_impl(lx, ly);
}

LogLogFit loglog_fit_with_transient_drop(const std::vector<double>& x,
                                         const std::vector<double>& y) {
  std::vector<double> lx, ly;
  to_logs(x, y, lx, ly);
  LogLogFit f = fit_impl(lx, ly);
  if (lx.size() >= 4) {
    const double r0 = std::abs(ly[0] - (f.intercept + f.slope * lx[0]));
    double ss = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
      const double r = ly[i] - (f.intercept + f.slope * lx[i]);
      ss += r * r;
    }
    const double sigma = std::sqrt(ss / (lx.size() - 2));
    if (r0 > 3.0 * sigma) {
      lx.erase(lx.begin());
      ly.erase(ly.begin());
      f = fit_impl(lx, ly);
      f.dropped_first = true;
    }
  }
  return f;
}

}  // namespace fpois
