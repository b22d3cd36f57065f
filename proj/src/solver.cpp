#include "fpois/solver.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

#include "fpois/kernels.hpp"
#include "fpois/quadrature.hpp"

namespace fpois {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

NonlinearitySpec NonlinearitySpec::make(F1 f1_kind, double bound_m, double slope, F2 f2_kind,
                                        double lipschitz_l, double offset_c) {
  NonlinearitySpec s;
  s.f1_ = f1_kind;
  s.f2_ = f2_kind;
  if (f1_kind != F1::zero) {
    if (!(bound_m > 0.0) || !(slope > 0.0))
      throw std::invalid_argument("NonlinearitySpec: f1 needs positive bound and slope");
    s.m_ = bound_m;
    s.slope_ = slope;
  }
  if (f2_kind != F2::zero) {
    if (lipschitz_l < 0.0)
      throw std::invalid_argument("NonlinearitySpec: Lipschitz constant must be >= 0");
    s.l_ = lipschitz_l;
    if (f2_kind == F2::affine) s.c_ = offset_c;
  }
  return s;
}

double NonlinearitySpec::operator()(double u) const {
  double v = 0.0;
  switch (f1_) {
    case F1::zero: break;
    case F1::scaled_tanh: v += m_ * std::tanh(slope_ * u / m_); break;
    case F1::scaled_arctan:
      v += m_ * (2.0 / kPi) * std::atan(kPi * slope_ * u / (2.0 * m_));
      break;
  }
  switch (f2_) {
    case F2::zero: break;
    case F2::linear: v += -l_ * u; break;
    case F2::affine: v += -l_ * u + c_; break;
  }
  return v;
}

double NonlinearitySpec::derivative(double u) const {
  double v = 0.0;
  switch (f1_) {
    case F1::zero: break;
    case F1::scaled_tanh: {
      const double t = std::tanh(slope_ * u / m_);
      v += slope_ * (1.0 - t * t);
      break;
    }
    case F1::scaled_arctan: {
      const double a = kPi * slope_ * u / (2.0 * m_);
      v += slope_ / (1.0 + a * a);
      break;
    }
  }
  if (f2_ != F2::zero) v += -l_;
  return v;
}

double NonlinearitySpec::lipschitz_estimate(double lo, double hi) const {
  if (!(hi > lo)) hi = lo + 1.0;
  double best = 0.0;
  for (int i = 0; i <= 64; ++i)
    best = std::max(best, std::abs(derivative(lo + (hi - lo) * i / 64.0)));
  return best;
}

SourceSpec SourceSpec::zero() { return SourceSpec{}; }

SourceSpec SourceSpec::builtin(const std::string& id, Projection proj) {
  if (id != "sinpi" && id != "poly" && id != "cospoly")
    throw std::invalid_argument("SourceSpec: unknown builtin '" + id + "'");
  SourceSpec s;
  s.kind_ = Kind::smooth_builtin;
  s.projection_ = proj;
  s.id_ = id;
  return s;
}

SourceSpec SourceSpec::user_grid(CellField values) {
  SourceSpec s;
  s.kind_ = Kind::user_grid;
  s.user_values_ = std::move(values);
  return s;
}

double SourceSpec::evaluate(const double* x, int k) const {
  switch (kind_) {
    case Kind::zero: return 0.0;
    case Kind::user_grid: return user_values_.at_point(x);
    case Kind::smooth_builtin: break;
  }
  double v = 1.0;
  if (id_ == "sinpi") {
    for (int d = 0; d < k; ++d) v *= std::sin(kPi * x[d]);
  } else if (id_ == "poly") {
    for (int d = 0; d < k; ++d) v *= 4.0 * x[d] * (1.0 - x[d]);
  } else {
    for (int d = 0; d < k; ++d) v *= x[d] * x[d] * std::cos(kPi * x[d] / 2.0);
  }
  return v;
}

CellField SourceSpec::project(const GridSpec& grid) const {
  CellField out(grid);
  if (kind_ == Kind::zero) return out;
  if (kind_ == Kind::user_grid) {
    if (!(user_values_.grid() == grid))
      throw std::invalid_argument("SourceSpec: user grid resolution mismatch");
    return user_values_;
  }
  MultiIndex j{};
  std::int64_t f = 0;
  if (projection_ == Projection::pointwise) {
    do {
      double x[kMaxDim];
      for (int d = 0; d < grid.k; ++d) x[d] = static_cast<double>(j[d]) / grid.n;
      out.values()[f++] = evaluate(x, grid.k);
    } while (next_index(j, grid.k, 0, grid.n - 1));
    return out;
  }
  // cell averages by tensor Gauss quadrature
  constexpr int q = 3;
  double nodes[q], weights[q];
  gauss_legendre01(q, nodes, weights);
  do {
    double acc = 0.0;
    MultiIndex qi{};
    bool more = true;
    while (more) {
      double x[kMaxDim], w = 1.0;
      for (int d = 0; d < grid.k; ++d) {
        x[d] = (j[d] + nodes[qi[d]]) / grid.n;
        w *= weights[qi[d]];
      }
      acc += w * evaluate(x, grid.k);
      more = next_index(qi, grid.k, 0, q - 1);
    }
    out.values()[f++] = acc;  // n^k * integral over the cell
  } while (next_index(j, grid.k, 0, grid.n - 1));
  return out;
}

namespace solver {

namespace {

void check_same_grid(const GridSpec& a, const GridSpec& b, const char* what) {
  if (!(a == b)) throw std::invalid_argument(std::string(what) + ": grid mismatch");
}

// right-hand side data vector g_n + n^k B on the interior lattice
LatticeField interior_data(const NoiseSample& noise, const CellField& g_cells) {
  const GridSpec& grid = noise.grid;
  LatticeField data(grid);
  const double scale = std::pow(static_cast<double>(grid.n), grid.k);
  MultiIndex i{};
  for (int d = 0; d < grid.k; ++d) i[d] = 1;
  std::int64_t f = 0;
  do {
    data.values()[f++] = g_cells.at(i) + scale * noise.increments[flat_index(i, grid.k, grid.n)];
  } while (next_index(i, grid.k, 1, grid.n - 1));
  return data;
}

}  // namespace

LatticeField stochastic_convolution(const NoiseSample& noise, const SpectralPlan& plan,
                                    const MollifierTable* mollifier) {
  check_same_grid(noise.grid, plan.grid(), "stochastic_convolution");
  const CellField zero_g(noise.grid);
  const LatticeField rhs = interior_data(noise, zero_g);
  return spectral::solve_linear(plan, rhs, mollifier);
}

LatticeField stochastic_convolution_kernel_sum(const NoiseSample& noise,
                                               const SpectralPlan& plan,
                                               const MollifierTable* mollifier) {
  check_same_grid(noise.grid, plan.grid(), "stochastic_convolution");
  const GridSpec& g = plan.grid();
  LatticeField out(g);
  MultiIndex i{};
  for (int d = 0; d < g.k; ++d) i[d] = 1;
  std::int64_t f = 0;
  do {
    double x[kMaxDim];
    for (int d = 0; d < g.k; ++d) x[d] = static_cast<double>(i[d]) / g.n;
    const CellField slice = kernels::green_discrete_slice(x, plan, mollifier);
    out.values()[f++] = (slice.values() * noise.increments).sum();
  } while (next_index(i, g.k, 1, g.n - 1));
  return out;
}

SolveReport solve_scheme(const NoiseSample& noise, const SourceSpec& g,
                         const NonlinearitySpec& f, const SpectralPlan& plan,
                         const MollifierTable* mollifier, const SolveOptions& opts) {
  check_same_grid(noise.grid, plan.grid(), "solve_scheme");
  const GridSpec& grid = plan.grid();
  const double four_k = 4.0 * grid.k;
  if (f.lipschitz_l() >= four_k)
    throw std::invalid_argument("solve_scheme: f2 Lipschitz constant must satisfy L < 4k");

  SolveReport rep;
  rep.solution = LatticeField(grid);
  if (opts.initial_guess) {
    check_same_grid(opts.initial_guess->grid(), grid, "solve_scheme initial guess");
    rep.solution = *opts.initial_guess;
  }

  const CellField g_cells = g.project(grid);
  const LatticeField data = interior_data(noise, g_cells);
  const LatticeField base = spectral::solve_linear(plan, data, mollifier);

  Eigen::ArrayXd& u = rep.solution.values();
  LatticeField fu(grid);
  for (int it = 1; it <= opts.max_iter; ++it) {
    double omega = opts.relaxation;
    if (omega <= 0.0) {
      const double l_eff =
          f.lipschitz_estimate(u.minCoeff() - 1.0, u.maxCoeff() + 1.0);
      if (l_eff >= four_k) rep.lipschitz_warning = true;
      omega = std::min(1.0, 2.0 * grid.k / (l_eff + four_k));
    }
    rep.relaxation = omega;
    for (std::int64_t p = 0; p < u.size(); ++p) fu.values()[p] = f(u[p]);
    const LatticeField lin = spectral::solve_linear(plan, fu, mollifier);
    Eigen::ArrayXd next = (1.0 - omega) * u + omega * (base.values() + lin.values());
    const double delta = (next - u).abs().maxCoeff();
    if (!std::isfinite(delta)) throw NumericalError("solve_scheme: divergence");
    u = next;
    rep.iterations = it;
    rep.final_residual_sup = delta;
    if (delta < opts.tol) {
      rep.converged = true;
      return rep;
    }
  }
  return rep;  // converged stays false
}

double mild_residual(const LatticeField& u, const NoiseSample& noise, const SourceSpec& g,
                     const NonlinearitySpec& f, const SpectralPlan& plan,
                     const MollifierTable* mollifier) {
  check_same_grid(u.grid(), plan.grid(), "mild_residual");
  check_same_grid(noise.grid, plan.grid(), "mild_residual");
  const GridSpec& grid = plan.grid();
  const CellField g_cells = g.project(grid);
  // f(u) as a cell field (zero on the boundary-adjacent zero cells)
  const CellField u_cells = cell_extension(u);
  Eigen::ArrayXd integrand(grid.cell_count());
  for (std::int64_t p = 0; p < integrand.size(); ++p)
    integrand[p] = f(u_cells.values()[p]) + g_cells.values()[p];
  const double cell_vol = 1.0 / std::pow(static_cast<double>(grid.n), grid.k);

  double worst = 0.0;
  MultiIndex i{};
  for (int d = 0; d < grid.k; ++d) i[d] = 1;
  std::int64_t fidx = 0;
  do {
    double x[kMaxDim];
    for (int d = 0; d < grid.k; ++d) x[d] = static_cast<double>(i[d]) / grid.n;
    const CellField slice = kernels::green_discrete_slice(x, plan, mollifier);
    const double rhs = (slice.values() * integrand).sum() * cell_vol +
                       (slice.values() * noise.increments).sum();
    worst = std::max(worst, std::abs(u.values()[fidx] - rhs));
    ++fidx;
  } while (next_index(i, grid.k, 1, grid.n - 1));
  return worst;
}

void save_field_csv(const LatticeField& u, std::ostream& out) {
  const GridSpec& g = u.grid();
  char buf[64];
  out << "# fpois lattice field\n# k=" << g.k << " n=" << g.n
      << "\n# columns: interior multi-index (" << g.k << " entries), value\n";
  MultiIndex i{};
  for (int d = 0; d < g.k; ++d) i[d] = 1;
  std::int64_t f = 0;
  do {
    for (int d = 0; d < g.k; ++d) out << i[d] << ',';
    std::snprintf(buf, sizeof buf, "%.17g", u.values()[f++]);
    out << buf << '\n';
  } while (next_index(i, g.k, 1, g.n - 1));
}

void save_report(const SolveReport& rep, std::ostream& out) {
  char buf[64];
  out << "iterations = " << rep.iterations << '\n';
  std::snprintf(buf, sizeof buf, "%.17g", rep.final_residual_sup);
  out << "final_residual_sup = " << buf << '\n';
  out << "converged = " << (rep.converged ? "true" : "false") << '\n';
  std::snprintf(buf, sizeof buf, "%.17g", rep.relaxation);
  out << "relaxation = " << buf << '\n';
  out << "lipschitz_warning = " << (rep.lipschitz_warning ? "true" : "false") << '\n';
}

}  // namespace solver
}  // namespace fpois
