#include "rabi/special.hpp"

#include <cmath>
#include <string>

namespace rabi::special {

double laguerre_assoc(int n, int k, double x) {
  if (n < 0 || k < 0) throw std::invalid_argument("laguerre_assoc: n, k must be >= 0");
  if (!std::isfinite(x)) throw std::invalid_argument("laguerre_assoc: x must be finite");
  if (n == 0) return 1.0;
  double prev = 1.0;
  double cur = 1.0 + k - x;
  for (int j = 1; j < n; ++j) {
    const double next = ((2.0 * j + k + 1.0 - x) * cur - (j + k) * prev) / (j + 1.0);
    prev = cur;
    cur = next;
  }
  return cur;
}

double laguerre(int n, double x) { return laguerre_assoc(n, 0, x); }

double laguerre_deriv(int n, double x) {
  if (n == 0) return 0.0;
  return -laguerre_assoc(n - 1, 1, x);
}

double sqrt_factorial_ratio(int hi, int lo) {
  if (hi < 0 || lo < 0) throw std::invalid_argument("sqrt_factorial_ratio: negative argument");
  if (hi < lo) return 1.0 / sqrt_factorial_ratio(lo, hi);
  if (hi - lo > 64 || hi > 256) {
    const double log_ratio = 0.5 * (std::lgamma(hi + 1.0) - std::lgamma(lo + 1.0));
    if (log_ratio > 700.0)
      throw std::range_error("sqrt_factorial_ratio: result exceeds double range at hi=" +
                             std::to_string(hi));
    return std::exp(log_ratio);
  }
  double r = 1.0;
  for (int j = lo + 1; j <= hi; ++j) r *= std::sqrt(static_cast<double>(j));
  return r;
}

Eigen::MatrixXcd displacement_overlap_matrix(Complex z, int dim) {
  if (dim < 1) throw std::invalid_argument("displacement_overlap_matrix: dim must be >= 1");
  const double y = std::norm(z);
  Eigen::MatrixXcd m(dim, dim);

  // Walk each diagonal band d = |row - col| with a degree recurrence for
  // L_j^d(y); the two triangles share the Laguerre value and the factorial
  // ratio and differ only in the power prefactor.
  Complex pow_upper{1.0, 0.0};  // (-z*)^d for row <= col
  Complex pow_lower{1.0, 0.0};  // z^d for row >= col
  for (int d = 0; d < dim; ++d) {
    if (d > 0) {
      pow_upper *= -std::conj(z);
      pow_lower *= z;
    }
    double lag_prev = 0.0;
    double lag = 1.0;  // L_0^d
    for (int j = 0; j + d < dim; ++j) {
      if (j > 0) {
        const double next =
            ((2.0 * (j - 1) + d + 1.0 - y) * lag - (j - 1.0 + d) * lag_prev) / j;
        lag_prev = lag;
        lag = next;
      }
      const double scale = sqrt_factorial_ratio(j, j + d) * lag;
      m(j, j + d) = pow_upper * scale;
      m(j + d, j) = pow_lower * scale;
    }
  }

  if (!m.allFinite())
    throw std::range_error(
        "displacement_overlap_matrix: entries lost precision (dim too large for |z|=" +
        std::to_string(std::abs(z)) + ")");
  return m;
}

}  // namespace rabi::special
