// special.hpp — Laguerre polynomials and displacement-operator overlap matrices

#pragma once

#include <Eigen/Dense>

#include "rabi/types.hpp"

namespace rabi::special {

// Associated Laguerre polynomial L_n^k(x), evaluated by the stable upward
// three-term recurrence.  The alternating-sign defining sum cancels badly for
// large x and is kept only as a test oracle.
double laguerre_assoc(int n, int k, double x);

// L_n(x) = L_n^0(x).
double laguerre(int n, double x);

// d/dx L_n(x) = -L_{n-1}^1(x).
double laguerre_deriv(int n, double x);

// sqrt(hi!/lo!), formed from a product of square roots so the intermediate
// never overflows at the truncations used here.  Falls back to log-gamma for
// large arguments; throws std::range_error once the result itself cannot be
// represented.
double sqrt_factorial_ratio(int hi, int lo);

// Matrix of displaced-number-state overlaps,
//   M_mn(z) = sum_{k=0}^{min(m,n)} z^(m-k) (-z*)^(n-k) sqrt(m! n!) / ((m-k)!(n-k)!k!),
// evaluated through its closed Laguerre form:
//   m <= n:  (-z*)^(n-m) sqrt(m!/n!) L_m^(n-m)(|z|^2)
//   n <= m:  z^(m-n)     sqrt(n!/m!) L_n^(m-n)(|z|^2).
// Throws std::range_error with a precision-loss diagnostic if entries stop
// being representable.
Eigen::MatrixXcd displacement_overlap_matrix(Complex z, int dim);

}  // namespace rabi::special
