#include "rabi/d1.hpp"

#include <cmath>

#include "rabi/io.hpp"

namespace rabi::d1 {

D1State rhs(const D1State& s, const ModelParams& p, EomMode mode, double reg_floor) {
  const Complex a = s.amp_up, b = s.amp_down, f = s.disp_up, g = s.disp_down;
  const double hbar = p.hbar, omega = p.omega, lam = p.lambda;
  const Complex i_over_hbar = imag_unit / hbar;

  // Shared coherent-state overlap <0| D_f^dag D_g |0> = K e^{f* g}.
  const Complex e_fg = std::exp(std::conj(f) * g);
  const double k_env = std::exp(-0.5 * (std::norm(f) + std::norm(g)));
  const Complex ovl = k_env * e_fg;

  Complex fdot, gdot;
  if (mode == EomMode::simplified) {
    fdot = -i_over_hbar * (hbar * omega * f + 0.5 * lam);
    gdot = -i_over_hbar * (hbar * omega * g - 0.5 * lam);
  } else {
    const Complex b_over_a = b * std::conj(a) * ode::regularized_inverse_square(a, reg_floor);
    const Complex a_over_b = a * std::conj(b) * ode::regularized_inverse_square(b, reg_floor);
    fdot = -i_over_hbar * (p.v * b_over_a * (g - f) * ovl + hbar * omega * f + 0.5 * lam);
    gdot = -i_over_hbar *
           (p.v * a_over_b * (f - g) * std::conj(e_fg) * k_env + hbar * omega * g - 0.5 * lam);
  }

  // Amplitude equations take the displacement velocities as-is, so both modes
  // conserve |amp_up|^2 + |amp_down|^2 identically.
  const Complex br_f = fdot * std::conj(f) - f * std::conj(fdot);
  const Complex br_g = gdot * std::conj(g) - g * std::conj(gdot);
  const Complex adot =
      -0.5 * a * br_f -
      i_over_hbar * (p.v * b * ovl + hbar * omega * a * std::norm(f) +
                     lam * a * f.real() + 0.5 * p.epsilon * a);
  const Complex bdot =
      -0.5 * b * br_g -
      i_over_hbar * (p.v * a * std::conj(ovl) + hbar * omega * b * std::norm(g) -
                     lam * b * g.real() - 0.5 * p.epsilon * b);

  return D1State{adot, bdot, fdot, gdot};
}

Energies energies(const D1State& s, const ModelParams& p) {
  const Complex a = s.amp_up, b = s.amp_down, f = s.disp_up, g = s.disp_down;
  const double k_env = std::exp(-0.5 * (std::norm(f) + std::norm(g)));
  const Complex e_fg = std::exp(std::conj(f) * g);
  Energies e;
  e.e_spin = 0.5 * p.epsilon * (std::norm(a) - std::norm(b)) +
             2.0 * p.v * k_env * (std::conj(a) * b * e_fg).real();
  e.e_rest = p.hbar * p.omega * (std::norm(a) * std::norm(f) + std::norm(b) * std::norm(g)) +
             p.lambda * (std::norm(a) * f.real() - std::norm(b) * g.real());
  return e;
}

Trajectory propagate_state(const StateRhs& rhs_fn, const D1State& initial,
                           const ode::IntegratorConfig& config,
                           std::span<const double> t_grid) {
  Eigen::VectorXcd y0(4);
  y0 << initial.amp_up, initial.amp_down, initial.disp_up, initial.disp_down;

  auto unpack = [](const Eigen::VectorXcd& y) {
    return D1State{y(0), y(1), y(2), y(3)};
  };
  ode::RhsFn vec_rhs = [&](double, const Eigen::VectorXcd& y, Eigen::VectorXcd& dydt) {
    const D1State d = rhs_fn(unpack(y));
    dydt(0) = d.amp_up;
    dydt(1) = d.amp_down;
    dydt(2) = d.disp_up;
    dydt(3) = d.disp_down;
  };

  const auto raw = ode::integrate(vec_rhs, y0, t_grid, config);

  Trajectory traj;
  traj.states.reserve(raw.size());
  double min_amp = 1.0;
  double min_amp_time = 0.0;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const D1State st = unpack(raw[i]);
    traj.max_norm_drift = std::max(traj.max_norm_drift, std::abs(st.norm_sq() - 1.0));
    const double amp = std::min(std::abs(st.amp_up), std::abs(st.amp_down));
    if (i > 0 && amp < min_amp) {
      min_amp = amp;
      min_amp_time = t_grid[i];
    }
    traj.states.push_back(st);
  }
  if (traj.max_norm_drift > 1e-6)
    traj.warnings.push_back("norm drift " + io::format_double(traj.max_norm_drift) +
                            " exceeds 1e-6");
  if (config.mode == EomMode::full && min_amp < 1e-6)
    traj.warnings.push_back("full-mode trajectory approached the singular set (min |amp| " +
                            io::format_double(min_amp) + " at t=" +
                            io::format_double(min_amp_time) + ")");
  return traj;
}

Trajectory propagate(const D1State& initial, const ModelParams& params,
                     const ode::IntegratorConfig& config, std::span<const double> t_grid) {
  if (std::abs(initial.norm_sq() - 1.0) > 1e-12)
    throw std::invalid_argument("propagate: initial amplitudes must be normalized, got |.|^2=" +
                                io::format_double(initial.norm_sq()));
  auto f = [&params, &config](const D1State& s) {
    return rhs(s, params, config.mode, config.reg_floor);
  };
  return propagate_state(f, initial, config, t_grid);
}

ObservableSeries run(const ModelParams& params, const ode::IntegratorConfig& config,
                     std::span<const double> t_grid) {
  params.validate();
  D1State init;  // up spin, undisplaced oscillator
  if (config.mode == EomMode::simplified)
    init.disp_down = params.lambda / (params.hbar * params.omega);
  if (config.initial_perturbation > 0.0)
    init = apply_initial_perturbation(init, config.initial_perturbation);

  const auto traj = propagate(init, params, config, t_grid);

  ObservableSeries out;
  out.method = "d1";
  out.time.assign(t_grid.begin(), t_grid.end());
  out.max_norm_drift = traj.max_norm_drift;
  out.warnings = traj.warnings;
  for (const auto& st : traj.states) {
    out.pz.push_back(st.pz());
    out.pz_stderr.push_back(0.0);
    out.norm.push_back(st.norm_sq());
    const auto e = energies(st, params);
    out.e_spin.push_back(e.e_spin);
    out.e_rest.push_back(e.e_rest);
    out.e_total.push_back(e.total());
  }
  return out;
}

D1State apply_initial_perturbation(D1State state, double delta) {
  if (delta <= 0.0) return state;
  if (std::abs(state.amp_down) == 0.0) {
    state.amp_down = delta;
    state.amp_up *= std::sqrt(1.0 - delta * delta) / std::abs(state.amp_up);
  }
  return state;
}

}  // namespace rabi::d1
