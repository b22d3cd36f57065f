#include "fpois/quadrature.hpp"

#include <cmath>
#include <stdexcept>

#include "fpois/grid.hpp"

namespace fpois {

namespace {

double simpson(double fa, double fm, double fb, double h) {
  return h / 6.0 * (fa + 4.0 * fm + fb);
}

double adapt(const std::function<double(double)>& f, double a, double b, double fa,
             double fm, double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = simpson(fa, flm, fm, m - a);
  const double right = simpson(fm, frm, fb, b - m);
  const double err = left + right - whole;
  if (std::abs(err) <= 15.0 * tol) return left + right + err / 15.0;
  if (depth <= 0) throw NumericalError("integrate: adaptive quadrature failed to converge");
  return adapt(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adapt(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b, double tol,
                 int max_depth) {
  if (!(b > a)) return 0.0;
  const double m = 0.5 * (a + b);
  const double fa = f(a);
  const double fm = f(m);
  const double fb = f(b);
  const double whole = simpson(fa, fm, fb, b - a);
  return adapt(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

void gauss_legendre01(int q, double* nodes, double* weights) {
  // classical nodes on [-1,1], mapped to [0,1]
  static const double x2[] = {-0.5773502691896257645, 0.5773502691896257645};
  static const double w2[] = {1.0, 1.0};
  static const double x3[] = {-0.7745966692414833770, 0.0, 0.7745966692414833770};
  static const double w3[] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
  static const double x4[] = {-0.8611363115940525752, -0.3399810435848562648,
                              0.3399810435848562648, 0.8611363115940525752};
  static const double w4[] = {0.3478548451374538574, 0.6521451548625461426,
                              0.6521451548625461426, 0.3478548451374538574};
  static const double x5[] = {-0.9061798459386639928, -0.5384693101056830910, 0.0,
                              0.5384693101056830910, 0.9061798459386639928};
  static const double w5[] = {0.2369268850561890875, 0.4786286704993664681,
                              128.0 / 225.0, 0.4786286704993664681, 0.2369268850561890875};
  const double* x = nullptr;
  const double* w = nullptr;
  switch (q) {
    case 1: {
      nodes[0] = 0.5;
      weights[0] = 1.0;
      return;
    }
    case 2: x = x2; w = w2; break;
    case 3: x = x3; w = w3; break;
    case 4: x = x4; w = w4; break;
    case 5: x = x5; w = w5; break;
    default: throw std::invalid_argument("gauss_legendre01: q must be 1..5");
  }
  for (int i = 0; i < q; ++i) {
    nodes[i] = 0.5 * (1.0 + x[i]);
    weights[i] = 0.5 * w[i];
  }
}

}  // namespace fpois
