#ifndef FPOIS_KERNELS_HPP
#define FPOIS_KERNELS_HPP

#include <vector>

#include <Eigen/Core>

#include "fpois/grid.hpp"
#include "fpois/rates.hpp"
#include "fpois/spectral.hpp"

namespace fpois {

// Exponents of an iterated mixed norm, innermost integration axis first.
struct MixedExponents {
  std::vector<double> p;  // entries >= 1, may be +infinity

  explicit MixedExponents(std::vector<double> exps);
  static MixedExponents from_hurst(const HurstVector& h);       // p_d = 1/H_d
  static MixedExponents uniform(int k, double value);
  int dim() const { return static_cast<int>(p.size()); }
};

namespace kernels {

// Dirichlet Green kernel on ]0,1[, operator-consistent sign: -((x^y) - xy).
double green_continuum_1d(double x, double y);

// Partial sum over beta in {1..b_max}^k of -2^k/(pi^2|beta|^2) v_beta(x)v_beta(y).
// Square-integrable only for k <= 3; evaluating at negative coordinates gives
// the odd extension.
double green_continuum_series(const double* x, const double* y, int k, int b_max);

// G_{D,n}(x,y) (and the smoothed variant when a mollifier is given).
double green_discrete(const double* x, const double* y, const SpectralPlan& plan,
                      const MollifierTable* mollifier = nullptr);

// Cell values of y -> G_{D,n}(x,y) in one sine synthesis.
CellField green_discrete_slice(const double* x, const SpectralPlan& plan,
                               const MollifierTable* mollifier = nullptr);

// Iterated mixed norm of a midpoint-sampled function on an m^k lattice
// (row-major, axis 0 = innermost integration axis). Exact for cell-constant
// data sampled at m = n.
double mixed_norm(const Eigen::ArrayXd& values, int m, int k, const MixedExponents& p);
double mixed_norm(const CellField& f, const MixedExponents& p);

// sup over interior grid points x of ||G_{D,n}(x,.)||_{L^{1/H_1..1/H_k}};
// the empirical counterpart of the uniform kernel bound. Uses the axis
// reflection symmetry of the kernel to halve the sup domain per axis.
double kernel_mixed_bound(const HurstVector& h, const SpectralPlan& plan,
                          const MollifierTable* mollifier = nullptr);

// sup_x integral of |G(x,y)| dy for the discrete kernel (the K-tilde
// diagnostic of the a-priori solution bound).
double k_tilde_discrete(const SpectralPlan& plan, const MollifierTable* mollifier = nullptr);
// same for the k=1 closed form, midpoint quadrature with m nodes
double k_tilde_continuum_1d(int m = 4096);

struct DiscrepancyOptions {
  bool force_unit_psi = false;              // pretend Psi_hat == 1 (diagnostic)
  bool force_continuum_eigenvalues = false; // pretend lambda_beta = -pi^2|beta|^2
  bool include_snapping = true;             // keep the grid-snapping terms A3, A4
};

struct DiscrepancyReport {
  double total = 0.0;  // sqrt(a1 + a2 + a3 + a4), a1 includes the tail bound
  double a1 = 0.0;     // spectral tail beyond the grid frequencies
  double a2 = 0.0;     // eigenvalue-difference term
  double a3 = 0.0;     // x grid-snapping term
  double a4 = 0.0;     // y grid-snapping term (= a3 by symmetry)
  double a1_tail_bound = 0.0;  // analytic bound on the part beyond b_max
};

// L2(DxD) discrepancy between the smoothed continuum kernel truncated at
// b_max and the smoothed discrete kernel, decomposed into the four Parseval
// terms of the kernel-rate analysis. Throws when the analytic tail bound
// exceeds 10% of the computed sum.
DiscrepancyReport kernel_discrepancy_l2(const SpectralPlan& plan,
                                        const MollifierTable& mollifier, int b_max,
                                        const DiscrepancyOptions& opts = {});

// mixed norm of G(x,.) - G(z,.) for the discrete kernel
double holder_modulus_discrete(const HurstVector& h, const double* x, const double* z,
                               const SpectralPlan& plan,
                               const MollifierTable* mollifier = nullptr);
// same for the k=1 closed form on an m-point midpoint lattice
double holder_modulus_continuum_1d(const HurstVector& h, double x, double z, int m = 4096);

}  // namespace kernels

}  // namespace fpois

#endif
