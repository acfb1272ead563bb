// ode.hpp — Adaptive Runge-Kutta integration of small complex ODE systems

#pragma once

#include <Eigen/Dense>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "rabi/types.hpp"

namespace rabi::ode {

struct IntegratorConfig {
  double rel_tol = 1e-8;
  double abs_tol = 1e-8;
  double max_step = 0.0;        // 0 disables the explicit cap
  double reg_floor = 1e-12;     // denominator regularization used by full-mode equations
  EomMode mode = EomMode::simplified;
  double initial_perturbation = 0.0;  // optional seed amplitude on a zero branch

  void validate() const {
    if (!(rel_tol > 0.0) || !(abs_tol > 0.0))
      throw std::invalid_argument("IntegratorConfig: tolerances must be > 0");
    if (reg_floor < 0.0)
      throw std::invalid_argument("IntegratorConfig: reg_floor must be >= 0");
  }
};

struct IntegrationError : std::runtime_error {
  IntegrationError(const std::string& what, double t, Eigen::VectorXcd y)
      : std::runtime_error(what), time(t), state(std::move(y)) {}
  double time;
  Eigen::VectorXcd state;
};

using RhsFn = std::function<void(double, const Eigen::VectorXcd&, Eigen::VectorXcd&)>;

// Dormand-Prince 5(4) with step rejection.  Local error is controlled
// per real component against abs_tol + rel_tol*|y|; steps are clamped so the
// solution is evaluated exactly at every requested grid time.  The step
// sequence depends only on the inputs, never on timing.
std::vector<Eigen::VectorXcd> integrate(const RhsFn& rhs, const Eigen::VectorXcd& y0,
                                        std::span<const double> t_grid,
                                        const IntegratorConfig& config = {});

// Smooth stand-in for 1/|z|^2 near z = 0: |z|^2 / (|z|^4 + floor^2).
// Multiplying a division by z through conj(z) * regularized_inverse_square(z)
// reproduces 1/z away from zero and vanishes at z = 0, where the
// variationally exact equations leave the quotient undetermined.
inline double regularized_inverse_square(Complex z, double floor_eps) {
  const double n = std::norm(z);
  return n / (n * n + floor_eps * floor_eps);
}

}  // namespace rabi::ode
