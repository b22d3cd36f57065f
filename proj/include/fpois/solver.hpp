#ifndef FPOIS_SOLVER_HPP
#define FPOIS_SOLVER_HPP

#include <functional>
#include <iosfwd>
#include <string>

#include "fpois/grid.hpp"
#include "fpois/noise.hpp"
#include "fpois/spectral.hpp"

namespace fpois {

// f = f1 + f2 with f1 bounded monotone nondecreasing and f2 Lipschitz.
// Built-in families only, so the structural properties stay checkable.
class NonlinearitySpec {
 public:
  enum class F1 { zero, scaled_tanh, scaled_arctan };
  enum class F2 { zero, linear, affine };

  // f1(u) = M tanh(slope u / M) or M (2/pi) atan(pi slope u / (2M));
  // f2(u) = -L u + c (the monotonicity-critical sign).
  static NonlinearitySpec make(F1 f1_kind, double bound_m, double slope, F2 f2_kind,
                               double lipschitz_l, double offset_c = 0.0);
  static NonlinearitySpec zero() { return make(F1::zero, 0, 0, F2::zero, 0); }

  double operator()(double u) const;
  double derivative(double u) const;

  F1 f1_kind() const { return f1_; }
  F2 f2_kind() const { return f2_; }
  double bound_m() const { return m_; }          // sup |f1|
  double slope() const { return slope_; }        // max f1'
  double lipschitz_l() const { return l_; }      // Lipschitz constant of f2
  double offset_c() const { return c_; }

  // max |f'| over [lo, hi], sampled; the damped-iteration step size uses it
  double lipschitz_estimate(double lo, double hi) const;

 private:
  NonlinearitySpec() = default;
  F1 f1_ = F1::zero;
  F2 f2_ = F2::zero;
  double m_ = 0.0, slope_ = 0.0, l_ = 0.0, c_ = 0.0;
};

// Source term g and its lattice projection.
class SourceSpec {
 public:
  enum class Kind { zero, smooth_builtin, user_grid };
  enum class Projection { pointwise, cell_average };

  static SourceSpec zero();
  // builtin ids: "sinpi" = prod sin(pi x_d), "poly" = prod 4 x_d (1-x_d),
  // "cospoly" = prod (x_d^2) cos(pi x_d / 2)
  static SourceSpec builtin(const std::string& id, Projection proj = Projection::pointwise);
  static SourceSpec user_grid(CellField values);

  Kind kind() const { return kind_; }
  Projection projection() const { return projection_; }
  const std::string& id() const { return id_; }

  double evaluate(const double* x, int k) const;  // pointwise g(x), not for user_grid

  // g_n on the cells of `grid` via the selected projection (cell averages by
  // per-cell Gauss quadrature)
  CellField project(const GridSpec& grid) const;

 private:
  Kind kind_ = Kind::zero;
  Projection projection_ = Projection::pointwise;
  std::string id_;
  CellField user_values_;
};

struct SolveReport {
  LatticeField solution;
  int iterations = 0;
  double final_residual_sup = 0.0;  // sup norm of the last iterate update
  bool converged = false;
  double relaxation = 0.0;
  bool lipschitz_warning = false;   // combined slope estimate reached 4k
};

struct SolveOptions {
  double tol = 1e-10;
  int max_iter = 10000;
  double relaxation = 0.0;  // 0 = automatic damping
  const LatticeField* initial_guess = nullptr;
};

namespace solver {

// J(x) = sum_i G_{D,n}(x, cell i) B^H(D_i), computed as one linear solve of
// A J = n^k B (or its mollified kernel form).
LatticeField stochastic_convolution(const NoiseSample& noise, const SpectralPlan& plan,
                                    const MollifierTable* mollifier = nullptr);

// same by explicit kernel summation; the equivalence with the linear-solve
// path is a tested invariant
LatticeField stochastic_convolution_kernel_sum(const NoiseSample& noise,
                                               const SpectralPlan& plan,
                                               const MollifierTable* mollifier = nullptr);

// Damped Picard iteration for A u = f(u) + g_n + n^k B (or the smoothed
// system); throws NumericalError on non-finite iterates.
SolveReport solve_scheme(const NoiseSample& noise, const SourceSpec& g,
                         const NonlinearitySpec& f, const SpectralPlan& plan,
                         const MollifierTable* mollifier = nullptr,
                         const SolveOptions& opts = {});

// sup_x | u(x) - [kernel-form right-hand side](x) |, the right-hand side
// evaluated by independent cell summation (never through the linear solver)
double mild_residual(const LatticeField& u, const NoiseSample& noise, const SourceSpec& g,
                     const NonlinearitySpec& f, const SpectralPlan& plan,
                     const MollifierTable* mollifier = nullptr);

void save_field_csv(const LatticeField& u, std::ostream& out);
void save_report(const SolveReport& rep, std::ostream& out);

}  // namespace solver

}  // namespace fpois

#endif
