#ifndef FPOIS_RATES_HPP
#define FPOIS_RATES_HPP

#include <vector>

namespace fpois {

// Hurst parameter vector H = (H_1,...,H_k), every entry in [1/2, 1).
class HurstVector {
 public:
  explicit HurstVector(std::vector<double> h);

  int dim() const { return static_cast<int>(h_.size()); }
  double operator[](int i) const { return h_[i]; }
  const std::vector<double>& values() const { return h_; }
  double sum() const;

 private:
  std::vector<double> h_;
};

struct ExponentReport {
  double lambda_sup = 0.0;  // Holder exponent supremum
  double nu_sup = 0.0;      // L^2 convergence-rate supremum
  double gamma_sup = 0.0;   // kernel-rate supremum (= 4 nu_sup)
  bool hypothesis_ok = false;
  bool hypothesis_star_ok = false;
};

struct SmoothingParameters {
  double delta = 0.0;      // kernel L2 rate exponent (discrepancy ~ n^{-delta/2})
  double mu = 0.0;         // epsilon(n) = n^{-mu}, strictly inside ]0,(2-delta)/(k-2)[
  double gamma_sup = 0.0;  // 4 * convergence_rate_sup
};

namespace rates {

// true iff k <= 3, or k >= 4 and sum H_i > k-2 strictly
bool check_hypothesis(const HurstVector& h);

// true iff k = 1, or sum H_i > k-1
bool check_hypothesis_star(const HurstVector& h);

// 2-k+sum H for k >= 2 (1 for k=1), before the cap at 1
double holder_exponent_raw(const HurstVector& h);

// supremum of the admissible Holder interval: 1 for k=1, (2-k+sum H) ^ 1 else
double holder_exponent_sup(const HurstVector& h);

// supremum/endpoint of the guaranteed L^2 rate interval:
// 1/2, 1/2, 1/4 for k=1,2,3; (2-k+S)/(2-k+2S) with S = (sum H) ^ (k-1) for k>=4
double convergence_rate_sup(const HurstVector& h);

// Rate-optimizing smoothed-scheme parameters for k >= 4: delta solving
// 2*mu*lambda = delta, mu = delta/(2 lambda) shrunk by rho to stay strictly
// inside the open admissibility intervals.
SmoothingParameters smoothing_parameters(const HurstVector& h, double safety_rho = 0.98);

ExponentReport report(const HurstVector& h);

}  // namespace rates

}  // namespace fpois

#endif
