#include "fpois/spectral.hpp"

#include <cmath>
#include <sstream>

#include "fpois/quadrature.hpp"
#include "fpois/tensor.hpp"

namespace fpois {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

SpectralPlan::SpectralPlan(const GridSpec& grid) : grid_(grid) {
  const int n = grid.n;
  const int m = n - 1;
  c_table_.resize(m);
  axis_lambda_.resize(m);
  for (int l = 1; l <= m; ++l) {
    const double th = l * kPi / (2.0 * n);
    const double s = std::sin(th);
    c_table_[l - 1] = (s / th) * (s / th);
    axis_lambda_[l - 1] = 4.0 * n * n * s * s;  // = pi^2 l^2 c_l
  }
  lambda_.resize(grid.interior_count());
  MultiIndex z{};
  std::int64_t f = 0;
  do {
    double acc = 0.0;
    for (int d = 0; d < grid.k; ++d) acc += axis_lambda_[z[d]];
    lambda_[f++] = -acc;
  } while (next_index(z, grid.k, 0, m - 1));
  sine_.resize(m, m);
  for (int l = 1; l <= m; ++l)
    for (int i = 1; i <= m; ++i) sine_(l - 1, i - 1) = std::sin(l * i * kPi / n);
}

double SpectralPlan::eigenvalue(const MultiIndex& beta) const {
  double acc = 0.0;
  for (int d = 0; d < grid_.k; ++d) acc += axis_lambda_[beta[d] - 1];
  return -acc;
}

namespace spectral {

LatticeField apply_laplacian(const LatticeField& u) {
  const GridSpec& g = u.grid();
  const int m = g.n - 1;
  const double n2 = static_cast<double>(g.n) * g.n;
  LatticeField out(g);
  const Eigen::ArrayXd& v = u.values();
  Eigen::ArrayXd& w = out.values();
  // strides of the row-major interior tensor
  std::array<std::int64_t, kMaxDim> stride{};
  stride[g.k - 1] = 1;
  for (int d = g.k - 2; d >= 0; --d) stride[d] = stride[d + 1] * m;
  MultiIndex z{};
  std::int64_t f = 0;
  do {
    double acc = -2.0 * g.k * v[f];
    for (int d = 0; d < g.k; ++d) {
      if (z[d] > 0) acc += v[f - stride[d]];
      if (z[d] < m - 1) acc += v[f + stride[d]];
    }
    w[f] = n2 * acc;
    ++f;
  } while (next_index(z, g.k, 0, m - 1));
  return out;
}

LatticeField dst(const SpectralPlan& plan, const LatticeField& u) {
  const GridSpec& g = u.grid();
  LatticeField out = u;
  tensor::apply_matrix_all_axes(out.values(), plan.sine_matrix(), g.n - 1, g.k);
  out.values() *= std::pow(2.0 / g.n, 0.5 * g.k);
  return out;
}

LatticeField sine_synthesis(const SpectralPlan& plan, const Eigen::ArrayXd& coeff) {
  const GridSpec& g = plan.grid();
  LatticeField out(g, coeff);
  tensor::apply_matrix_all_axes(out.values(), plan.sine_matrix(), g.n - 1, g.k);
  return out;
}

LatticeField solve_linear(const SpectralPlan& plan, const LatticeField& rhs,
                          const MollifierTable* mollifier) {
  if (!(rhs.grid() == plan.grid()))
    throw std::invalid_argument("solve_linear: grid mismatch");
  LatticeField c = dst(plan, rhs);
  if (mollifier) {
    if (!(mollifier->grid() == plan.grid()))
      throw std::invalid_argument("solve_linear: mollifier grid mismatch");
    c.values() *= mollifier->multipliers();
  }
  c.values() /= plan.eigenvalues();
  return dst(plan, c);
}

}  // namespace spectral

namespace {

// int_{-1}^{1} exp(-1/(1-x^2)) dx, fixed normalization of the bump
double bump_mass() {
  static const double mass = integrate(
      [](double x) {
        const double d = 1.0 - x * x;
        return d > 0.0 ? std::exp(-1.0 / d) : 0.0;
      },
      -1.0, 1.0, 1e-14);
  return mass;
}

}  // namespace

double MollifierTable::psi_hat(double t) {
  const double c0 = 1.0 / bump_mass();
  return integrate(
      [c0, t](double x) {
        const double d = 1.0 - x * x;
        return d > 0.0 ? c0 * std::exp(-1.0 / d) * std::cos(kPi * t * x) : 0.0;
      },
      -1.0, 1.0, 1e-13);
}

double MollifierTable::decay_constant(double theta) {
  double best = 0.0;
  for (int i = 0; i <= 120; ++i) {
    const double t = std::pow(10.0, 2.0 * i / 120.0);  // log grid on [1,100]
    best = std::max(best, std::abs(psi_hat(t)) * std::pow(t, theta));
  }
  return best;
}

MollifierTable::MollifierTable(double epsilon, const GridSpec& grid, int max_freq)
    : epsilon_(epsilon), grid_(grid) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("MollifierTable: epsilon must be > 0");
  const int lmax = max_freq > 0 ? max_freq : grid.n - 1;
  if (lmax < grid.n - 1)
    throw std::invalid_argument("MollifierTable: max_freq below grid frequencies");
  axis_values_.resize(lmax);
  for (int l = 1; l <= lmax; ++l) axis_values_[l - 1] = psi_hat(epsilon * l);
  multipliers_.resize(grid.interior_count());
  MultiIndex z{};
  std::int64_t f = 0;
  do {
    double prod = 1.0;
    for (int d = 0; d < grid.k; ++d) prod *= axis_values_[z[d]];
    multipliers_[f++] = prod;
  } while (next_index(z, grid.k, 0, grid.n - 2));
}

double MollifierTable::psi_hat_axis(int l) const {
  if (l == 0) return 1.0;
  if (l < 1 || l > axis_values_.size())
    throw std::invalid_argument("psi_hat_axis: frequency not cached");
  return axis_values_[l - 1];
}

double MollifierTable::multiplier(const MultiIndex& beta) const {
  double prod = 1.0;
  for (int d = 0; d < grid_.k; ++d) prod *= psi_hat_axis(beta[d]);
  return prod;
}

void MollifierTable::require_system_form() const {
  const double min_abs = multipliers_.abs().minCoeff();
  if (min_abs <= 1e-8) {
    std::ostringstream msg;
    msg << "mollifier zero crossing; reduce epsilon (min |Psi_hat| = " << min_abs << ")";
    throw NumericalError(msg.str());
  }
}

}  // namespace fpois
