#include "rabi/ode.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace rabi::ode {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
// Difference between the 5th- and embedded 4th-order weights.
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

bool finite(const Eigen::VectorXcd& v) { return v.allFinite(); }

}  // namespace

std::vector<Eigen::VectorXcd> integrate(const RhsFn& rhs, const Eigen::VectorXcd& y0,
                                        std::span<const double> t_grid,
                                        const IntegratorConfig& config) {
  config.validate();
  if (t_grid.empty()) throw std::invalid_argument("integrate: empty time grid");
  for (std::size_t i = 1; i < t_grid.size(); ++i)
    if (!(t_grid[i] > t_grid[i - 1]))
      throw std::invalid_argument("integrate: time grid must be strictly ascending");

  const Eigen::Index n = y0.size();
  std::vector<Eigen::VectorXcd> out;
  out.reserve(t_grid.size());
  out.push_back(y0);
  if (t_grid.size() == 1) return out;

  Eigen::VectorXcd y = y0;
  Eigen::VectorXcd k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), ytmp(n), y5(n), err(n);

  double t = t_grid[0];
  rhs(t, y, k1);
  if (!finite(k1)) throw IntegrationError("integrate: non-finite derivative at start", t, y);

  const double span = t_grid.back() - t_grid.front();
  double h = std::min(span / 100.0, t_grid[1] - t_grid[0]);
  if (config.max_step > 0.0) h = std::min(h, config.max_step);

  for (std::size_t target_idx = 1; target_idx < t_grid.size(); ++target_idx) {
    const double target = t_grid[target_idx];
    while (t < target) {
      bool clamped = false;
      double step = h;
      if (config.max_step > 0.0) step = std::min(step, config.max_step);
      // Clamp onto the grid point whenever the proposed step would reach it
      // or stop just short of it; landing a rounding error below the target
      // would otherwise leave an unintegrable sliver.
      if (t + 1.01 * step >= target) {
        step = target - t;
        clamped = true;
      }
      const double floor_h = 16.0 * std::numeric_limits<double>::epsilon() *
                             std::max(std::abs(t), 1.0);
      if (step < floor_h)
        throw IntegrationError("integrate: step size underflow at t=" + std::to_string(t), t, y);

      ytmp = y + step * (a21 * k1);
      rhs(t + c2 * step, ytmp, k2);
      ytmp = y + step * (a31 * k1 + a32 * k2);
      rhs(t + c3 * step, ytmp, k3);
      ytmp = y + step * (a41 * k1 + a42 * k2 + a43 * k3);
      rhs(t + c4 * step, ytmp, k4);
      ytmp = y + step * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
      rhs(t + c5 * step, ytmp, k5);
      ytmp = y + step * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
      rhs(t + step, ytmp, k6);
      y5 = y + step * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
      rhs(t + step, y5, k7);

      if (!finite(k2) || !finite(k3) || !finite(k4) || !finite(k5) || !finite(k6) ||
          !finite(k7) || !finite(y5))
        throw IntegrationError("integrate: non-finite derivative at t=" + std::to_string(t), t,
                               y);

      err = step * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
      double err_norm_sq = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        const double sc_re = config.abs_tol +
                             config.rel_tol * std::max(std::abs(y(i).real()),
                                                       std::abs(y5(i).real()));
        const double sc_im = config.abs_tol +
                             config.rel_tol * std::max(std::abs(y(i).imag()),
                                                       std::abs(y5(i).imag()));
        const double er = err(i).real() / sc_re;
        const double ei = err(i).imag() / sc_im;
        err_norm_sq += er * er + ei * ei;
      }
      const double err_norm = std::sqrt(err_norm_sq / (2.0 * static_cast<double>(n)));

      if (err_norm <= 1.0) {
        t = clamped ? target : t + step;
        y.swap(y5);
        k1.swap(k7);
        if (!clamped) {
          const double factor =
              err_norm == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err_norm, -0.2), 0.2, 5.0);
          h = step * factor;
        }
        // A grid-clamped step keeps the previously proposed size, so forced
        // small steps at output times do not disturb the controller.
      } else {
        h = step * std::clamp(0.9 * std::pow(err_norm, -0.2), 0.2, 0.9);
      }
    }
    out.push_back(y);
  }
  return out;
}

}  // namespace rabi::ode
