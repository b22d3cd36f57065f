#ifndef FPOIS_SPECTRAL_HPP
#define FPOIS_SPECTRAL_HPP

#include <optional>

#include <Eigen/Core>

#include "fpois/grid.hpp"

namespace fpois {

class MollifierTable;

// Precomputed eigen data of the difference operator A on a grid:
// the c_l table, the eigenvalue tensor lambda_beta over {1..n-1}^k, and the
// sine matrix driving the discrete sine transform. Immutable after
// construction; shared freely across threads.
class SpectralPlan {
 public:
  explicit SpectralPlan(const GridSpec& grid);

  const GridSpec& grid() const { return grid_; }

  // c_l = (l pi / 2n)^{-2} sin^2(l pi / 2n), l = 1..n-1
  double c_value(int l) const { return c_table_[l - 1]; }
  const Eigen::VectorXd& c_table() const { return c_table_; }

  // lambda_beta = -pi^2 sum_d beta_d^2 c_{beta_d} (< 0)
  double eigenvalue(const MultiIndex& beta) const;
  const Eigen::ArrayXd& eigenvalues() const { return lambda_; }

  // S with S(l,i) = sin(l i pi / n); S^2 = (n/2) I
  const Eigen::MatrixXd& sine_matrix() const { return sine_; }

 private:
  GridSpec grid_;
  Eigen::VectorXd c_table_;
  Eigen::VectorXd axis_lambda_;  // 4 n^2 sin^2(l pi / 2n), magnitude per axis frequency
  Eigen::ArrayXd lambda_;        // full tensor, row-major over {1..n-1}^k
  Eigen::MatrixXd sine_;
};

namespace spectral {

// (Au)_i = sum_d n^2 (u_{i-e_d} - 2 u_i + u_{i+e_d}) with zero extension
// outside the interior index set.
LatticeField apply_laplacian(const LatticeField& u);

// Expansion in the orthonormal eigenbasis (2/n)^{k/2} U_beta. The transform
// is an orthogonal involution: dst(dst(u)) = u.
LatticeField dst(const SpectralPlan& plan, const LatticeField& u);

// Unnormalized sine synthesis sum_beta a_beta prod_d sin(beta_d pi i_d / n)
// (used by kernel slices).
LatticeField sine_synthesis(const SpectralPlan& plan, const Eigen::ArrayXd& coeff);

// A^{-1} rhs via the eigenbasis. With a mollifier the coefficients are
// multiplied by Psi_hat(eps beta)/lambda_beta (the kernel form of the
// smoothed scheme, which never divides by Psi_hat).
LatticeField solve_linear(const SpectralPlan& plan, const LatticeField& rhs,
                          const MollifierTable* mollifier = nullptr);

}  // namespace spectral

// Fourier multipliers Psi_hat(eps beta) of the product mollifier built from
// the bump psi(x) = c exp(-1/(1-x^2)) on ]-1,1[, int psi = 1, with the
// transform convention psi_hat(t) = int_{-1}^{1} psi(x) cos(pi t x) dx.
class MollifierTable {
 public:
  // Caches psi_hat(eps l) for l = 1..max_freq (default: grid.n - 1).
  MollifierTable(double epsilon, const GridSpec& grid, int max_freq = 0);

  double epsilon() const { return epsilon_; }
  const GridSpec& grid() const { return grid_; }

  // 1-D transform value at eps*l for cached l >= 1; psi_hat_axis(0) = 1
  double psi_hat_axis(int l) const;
  int max_freq() const { return static_cast<int>(axis_values_.size()); }

  // Psi_hat(eps beta) = prod_d psi_hat(eps beta_d), beta in {1..n-1}^k
  double multiplier(const MultiIndex& beta) const;
  const Eigen::ArrayXd& multipliers() const { return multipliers_; }

  // Throws if some |Psi_hat(eps beta)| <= 1e-8; the system form (division by
  // the multipliers) is only usable when this passes.
  void require_system_form() const;

  // 1-D transform psi_hat(t), adaptive quadrature
  static double psi_hat(double t);
  // sup over [1,100] of |psi_hat(t)| t^theta (rapid-decrease constant)
  static double decay_constant(double theta);

 private:
  double epsilon_;
  GridSpec grid_;
  Eigen::VectorXd axis_values_;  // psi_hat(eps l), l = 1..max_freq
  Eigen::ArrayXd multipliers_;   // full tensor over {1..n-1}^k
};

}  // namespace fpois

#endif
