#ifndef FPOIS_QUADRATURE_HPP
#define FPOIS_QUADRATURE_HPP

#include <functional>

namespace fpois {

// Adaptive Simpson integration of f over [a,b] to absolute tolerance tol.
// Throws NumericalError if the recursion depth is exhausted before the
// tolerance is met.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double tol = 1e-12, int max_depth = 48);

// Nodes/weights of q-point Gauss-Legendre on [0,1]; q in {1..5}.
void gauss_legendre01(int q, double* nodes, double* weights);

}  // namespace fpois

#endif
