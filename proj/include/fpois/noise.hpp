#ifndef FPOIS_NOISE_HPP
#define FPOIS_NOISE_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "fpois/grid.hpp"
#include "fpois/rates.hpp"

namespace fpois {

// One realization of the rectangle increments {B^H(D_j), j in {0..n-1}^k}
// plus the RNG provenance that reproduces it.
struct NoiseSample {
  GridSpec grid;
  std::vector<double> hurst;   // recorded for validation and replay
  Eigen::ArrayXd increments;   // n^k cell values, row-major
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;
};

namespace noise {

// Covariance of the fractional Brownian field, product of per-axis
// R_h(x,y) = (1/2)(|y|^{2h} + |x|^{2h} - |x-y|^{2h}).
double covariance_r(const HurstVector& h, const double* x, const double* y);

// E[ (B(b)-B(a)) (B(d)-B(c)) ] for one axis:
// (1/2)(|b-c|^{2h} + |a-d|^{2h} - |a-c|^{2h} - |b-d|^{2h})
double increment_covariance_1d(double h, double a, double b, double c, double d);

// Product over axes of the 1-D increment covariances of two cells on `grid`.
double increment_covariance(const HurstVector& h, const GridSpec& grid,
                            const MultiIndex& cell_i, const MultiIndex& cell_j);

// n-by-n covariance matrix of the axis-d cell increments.
Eigen::MatrixXd axis_covariance(double h, int n);

// Per-axis lower Cholesky factors; the full n^k covariance is their
// Kronecker product.
std::vector<Eigen::MatrixXd> build_axis_cholesky(const HurstVector& h, const GridSpec& grid);

// Exact Gaussian draw of all n^k rectangle increments. Counter-based:
// the same (seed, stream_id) always reproduces the same sample bit for bit.
NoiseSample sample(const HurstVector& h, const GridSpec& grid, std::uint64_t seed,
                   std::uint64_t stream_id);

// Same using precomputed factors (a Monte Carlo loop shares them).
NoiseSample sample(const HurstVector& h, const GridSpec& grid,
                   const std::vector<Eigen::MatrixXd>& axis_factors, std::uint64_t seed,
                   std::uint64_t stream_id);

// Sum fine increments into the coarse cells that contain them; exact
// coupling, no re-sampling. Requires fine.grid.n divisible by coarse_n.
NoiseSample aggregate(const NoiseSample& fine, int coarse_n);

void save_csv(const NoiseSample& s, std::ostream& out);
NoiseSample load_csv(std::istream& in);

}  // namespace noise

}  // namespace fpois

#endif
