#include "fpois/rates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace fpois {

HurstVector::HurstVector(std::vector<double> h) : h_(std::move(h)) {
  if (h_.empty()) throw std::invalid_argument("HurstVector: k must be >= 1");
  for (double v : h_) {
    if (!(v >= 0.5 && v < 1.0))
      throw std::invalid_argument("HurstVector: every H_i must satisfy 1/2 <= H_i < 1");
  }
}

double HurstVector::sum() const { return std::accumulate(h_.begin(), h_.end(), 0.0); }

namespace rates {

bool check_hypothesis(const HurstVector& h) {
  if (h.dim() <= 3) return true;
  return h.sum() > h.dim() - 2.0;
}

bool check_hypothesis_star(const HurstVector& h) {
  if (h.dim() == 1) return true;
  return h.sum() > h.dim() - 1.0;
}

double holder_exponent_raw(const HurstVector& h) {
  if (h.dim() == 1) return 1.0;
  return 2.0 - h.dim() + h.sum();
}

double holder_exponent_sup(const HurstVector& h) {
  if (!check_hypothesis(h)) throw std::invalid_argument("hypothesis (H) fails");
  return std::min(holder_exponent_raw(h), 1.0);
}

double convergence_rate_sup(const HurstVector& h) {
  if (!check_hypothesis(h)) throw std::invalid_argument("hypothesis (H) fails");
  const int k = h.dim();
  switch (k) {
    case 1:
    case 2: return 0.5;
    case 3: return 0.25;
    default: {
      const double s = std::min(h.sum(), static_cast<double>(k - 1));
      return (2.0 - k + s) / (2.0 - k + 2.0 * s);
    }
  }
}

SmoothingParameters smoothing_parameters(const HurstVector& h, double safety_rho) {
  const int k = h.dim();
  if (k < 4) throw std::invalid_argument("smoothed scheme not applicable for k < 4");
  if (!check_hypothesis(h)) throw std::invalid_argument("hypothesis (H) fails");
  if (!(safety_rho > 0.0 && safety_rho < 1.0))
    throw std::invalid_argument("safety factor must lie in (0,1)");
  SmoothingParameters p;
  const double sum = h.sum();
  if (check_hypothesis_star(h)) {
    p.delta = 4.0 / k;
  } else {
    p.delta = 4.0 * (2.0 - k + sum) / (2.0 - k + 2.0 * sum);
  }
  const double lambda = holder_exponent_sup(h);
  // the optimum mu = delta/(2 lambda) sits exactly on the boundary of
  // ]0,(2-delta)/(k-2)[, so shrink it
  p.mu = safety_rho * p.delta / (2.0 * lambda);
  p.gamma_sup = 4.0 * convergence_rate_sup(h);
  return p;
}

ExponentReport report(const HurstVector& h) {
  ExponentReport r;
  r.hypothesis_ok = check_hypothesis(h);
  r.hypothesis_star_ok = check_hypothesis_star(h);
  if (r.hypothesis_ok) {
    r.lambda_sup = holder_exponent_sup(h);
    r.nu_sup = convergence_rate_sup(h);
    r.gamma_sup = 4.0 * r.nu_sup;
  } else {
    r.lambda_sup = r.nu_sup = r.gamma_sup = std::numeric_limits<double>::quiet_NaN();
  }
  return r;
}

}  // namespace rates
}  // namespace fpois
