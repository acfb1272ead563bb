#include "rabi/boltzmann.hpp"

#include <cmath>
#include <stdexcept>

#include "rabi/d1.hpp"
#include "rabi/parallel.hpp"
#include "rabi/special.hpp"
#include "rabi/thermal.hpp"

namespace rabi::boltzmann {

namespace {

// The per-level and thermally-averaged equations share one body; they differ
// only in the Laguerre pair (L, L').  The level's occupation feeds both
// amplitude equations one common fast phase hbar*omega*occupation, which no
// observable sees (populations, amplitude products and energies are all
// invariant under it); the amplitudes are propagated in the rotating gauge
// with that phase removed, since integrating the raw equations makes the
// step error grow with the level for nothing.
D1State rhs_impl(const D1State& s, double lag, double lag_deriv, const ModelParams& p,
                 EomMode mode, double reg_floor) {
  const Complex a = s.amp_up, b = s.amp_down, f = s.disp_up, g = s.disp_down;
  const double hbar = p.hbar, omega = p.omega, lam = p.lambda;
  const Complex i_over_hbar = imag_unit / hbar;

  const Complex e_fg = std::exp(std::conj(f) * g);
  const double k_env = std::exp(-0.5 * (std::norm(f) + std::norm(g)));

  Complex fdot, gdot;
  if (mode == EomMode::simplified) {
    fdot = -i_over_hbar * (hbar * omega * f + 0.5 * lam);
    gdot = -i_over_hbar * (hbar * omega * g - 0.5 * lam);
  } else {
    const Complex b_over_a = b * std::conj(a) * ode::regularized_inverse_square(a, reg_floor);
    const Complex bc_over_ac =
        std::conj(b) * a * ode::regularized_inverse_square(a, reg_floor);
    const Complex a_over_b = a * std::conj(b) * ode::regularized_inverse_square(b, reg_floor);
    const Complex ac_over_bc =
        std::conj(a) * b * ode::regularized_inverse_square(b, reg_floor);
    fdot = -i_over_hbar *
           (p.v * k_env * (g - f) *
                (b_over_a * e_fg * (lag - lag_deriv) - bc_over_ac * std::conj(e_fg) * lag_deriv) +
            hbar * omega * f + 0.5 * lam);
    gdot = -i_over_hbar *
           (p.v * k_env * (f - g) *
                (a_over_b * std::conj(e_fg) * (lag - lag_deriv) - ac_over_bc * e_fg * lag_deriv) +
            hbar * omega * g - 0.5 * lam);
  }

  const Complex br_f = fdot * std::conj(f) - f * std::conj(fdot);
  const Complex br_g = gdot * std::conj(g) - g * std::conj(gdot);
  const Complex adot =
      -0.5 * a * br_f -
      i_over_hbar * (p.v * b * k_env * e_fg * lag + hbar * omega * a * std::norm(f) +
                     lam * a * f.real());
  const Complex bdot =
      -0.5 * b * br_g -
      i_over_hbar * (p.v * a * k_env * std::conj(e_fg) * lag + hbar * omega * b * std::norm(g) -
                     lam * b * g.real());

  return D1State{adot, bdot, fdot, gdot};
}

Energies energy_impl(const D1State& s, double lag, double occupation, const ModelParams& p) {
  const Complex a = s.amp_up, b = s.amp_down, f = s.disp_up, g = s.disp_down;
  const double k_env = std::exp(-0.5 * (std::norm(f) + std::norm(g)));
  const Complex e_fg = std::exp(std::conj(f) * g);
  Energies e;
  e.e_spin = 2.0 * p.v * k_env * lag * (std::conj(a) * b * e_fg).real();
  e.e_rest =
      p.hbar * p.omega *
          (std::norm(a) * (std::norm(f) + occupation) + std::norm(b) * (std::norm(g) + occupation)) +
      p.lambda * (std::norm(a) * f.real() - std::norm(b) * g.real());
  return e;
}

template <class EnergyFn>
ObservableSeries series_from_trajectory(const d1::Trajectory& traj,
                                        std::span<const double> t_grid, EnergyFn&& energy_fn) {
  ObservableSeries out;
  out.time.assign(t_grid.begin(), t_grid.end());
  out.max_norm_drift = traj.max_norm_drift;
  out.warnings = traj.warnings;
  for (const auto& st : traj.states) {
    out.pz.push_back(st.pz());
    out.pz_stderr.push_back(0.0);
    out.norm.push_back(st.norm_sq());
    const Energies e = energy_fn(st);
    out.e_spin.push_back(e.e_spin);
    out.e_rest.push_back(e.e_rest);
    out.e_total.push_back(e.e_spin + e.e_rest);
  }
  return out;
}

}  // namespace

D1State rhs(const D1State& s, int level, const ModelParams& p, EomMode mode, double reg_floor) {
  if (level < 0) throw std::invalid_argument("boltzmann::rhs: level must be >= 0");
  if (p.epsilon != 0.0)
    throw std::invalid_argument("boltzmann::rhs: derived for zero spin bias");
  const double y = std::norm(s.disp_down - s.disp_up);
  return rhs_impl(s, special::laguerre(level, y), special::laguerre_deriv(level, y), p, mode,
                  reg_floor);
}

double fdot_singular_term_magnitude(const D1State& s, int level, const ModelParams& p,
                                    double reg_floor) {
  const Complex a = s.amp_up, b = s.amp_down, f = s.disp_up, g = s.disp_down;
  const double y = std::norm(g - f);
  const double lag = special::laguerre(level, y);
  const double lag_deriv = special::laguerre_deriv(level, y);
  const Complex e_fg = std::exp(std::conj(f) * g);
  const double k_env = std::exp(-0.5 * (std::norm(f) + std::norm(g)));
  const Complex b_over_a = b * std::conj(a) * ode::regularized_inverse_square(a, reg_floor);
  const Complex bc_over_ac = std::conj(b) * a * ode::regularized_inverse_square(a, reg_floor);
  const Complex term =
      (p.v / p.hbar) * k_env * (g - f) *
      (b_over_a * e_fg * (lag - lag_deriv) - bc_over_ac * std::conj(e_fg) * lag_deriv);
  return std::abs(term);
}

D1State ta_rhs(const D1State& s, double beta, const ModelParams& p, EomMode mode,
               double reg_floor) {
  if (p.epsilon != 0.0)
    throw std::invalid_argument("boltzmann::ta_rhs: derived for zero spin bias");
  const double nbar = thermal_occupation(beta, p);
  const double y = std::norm(s.disp_down - s.disp_up);
  const double lag = std::exp(-nbar * y);
  return rhs_impl(s, lag, -nbar * lag, p, mode, reg_floor);
}

Complex initial_g(const ModelParams& p, double phase) {
  const double radius = 0.5 * p.lambda / (p.hbar * p.omega);
  // Any point on the circle of that radius about radius itself keeps the
  // oscillator-plus-coupling energy constant; phase = 0 gives lambda/(hbar omega).
  return radius + radius * std::exp(imag_unit * phase);
}

Energies spin_and_rest_energy(const D1State& s, int level, const ModelParams& p) {
  const double y = std::norm(s.disp_down - s.disp_up);
  return energy_impl(s, special::laguerre(level, y), static_cast<double>(level), p);
}

Energies ta_energy(const D1State& s, double beta, const ModelParams& p) {
  const double nbar = thermal_occupation(beta, p);
  const double y = std::norm(s.disp_down - s.disp_up);
  return energy_impl(s, std::exp(-nbar * y), nbar, p);
}

Result run(double beta, const ModelParams& params, const ThermalConfig& thermal,
           const ode::IntegratorConfig& config, std::span<const double> t_grid,
           bool keep_per_level, unsigned threads) {
  params.validate();
  thermal.validate();
  if (params.epsilon != 0.0)
    throw std::invalid_argument("boltzmann::run: derived for zero spin bias");

  const int n_levels = thermal.boltzmann_nt + 1;
  const auto weights = truncated_boltzmann_weights(beta, params, n_levels);
  const std::size_t nt = t_grid.size();

  std::vector<ObservableSeries> per_level(static_cast<std::size_t>(n_levels));
  std::vector<std::vector<double>> sing_mag(static_cast<std::size_t>(n_levels));

  auto worker = [&](std::size_t li) {
    const int level = static_cast<int>(li);
    D1State init;
    if (config.mode == EomMode::simplified) init.disp_down = initial_g(params);
    if (config.initial_perturbation > 0.0)
      init = d1::apply_initial_perturbation(init, config.initial_perturbation);

    auto rhs_fn = [&](const D1State& st) {
      return rhs(st, level, params, config.mode, config.reg_floor);
    };
    const auto traj = d1::propagate_state(rhs_fn, init, config, t_grid);

    per_level[li] = series_from_trajectory(traj, t_grid, [&](const D1State& st) {
      return spin_and_rest_energy(st, level, params);
    });
    per_level[li].method = "boltzmann-level-" + std::to_string(level);
    auto& mag = sing_mag[li];
    mag.reserve(nt);
    for (const auto& st : traj.states)
      mag.push_back(fdot_singular_term_magnitude(st, level, params, config.reg_floor));
  };

  const auto failures = detail::parallel_for(static_cast<std::size_t>(n_levels), threads, worker);
  if (!failures.empty()) {
    std::string msg = "boltzmann run failed:";
    for (const auto& [li, what] : failures)
      msg += "\n  level " + std::to_string(li) + ": " + what;
    throw std::runtime_error(msg);
  }

  Result res;
  ObservableSeries& s = res.series;
  s.method = "boltzmann";
  s.time.assign(t_grid.begin(), t_grid.end());
  s.pz.assign(nt, 0.0);
  s.pz_stderr.assign(nt, 0.0);
  s.norm.assign(nt, 0.0);
  s.e_spin.assign(nt, 0.0);
  s.e_rest.assign(nt, 0.0);
  s.e_total.assign(nt, 0.0);
  for (int li = 0; li < n_levels; ++li) {
    const double w = weights[static_cast<std::size_t>(li)];
    const auto& lev = per_level[static_cast<std::size_t>(li)];
    s.max_norm_drift = std::max(s.max_norm_drift, lev.max_norm_drift);
    for (const auto& warning : lev.warnings)
      s.warnings.push_back("level " + std::to_string(li) + ": " + warning);
    for (std::size_t ti = 0; ti < nt; ++ti) {
      s.pz[ti] += w * lev.pz[ti];
      s.norm[ti] += w * lev.norm[ti];
      s.e_spin[ti] += w * lev.e_spin[ti];
      s.e_rest[ti] += w * lev.e_rest[ti];
      s.e_total[ti] += w * lev.e_total[ti];
    }
  }

  if (keep_per_level) {
    for (int li = 0; li < n_levels; ++li)
      per_level[static_cast<std::size_t>(li)].extra_columns.push_back(
          {"fdot_singular_term", std::move(sing_mag[static_cast<std::size_t>(li)])});
    res.per_level = std::move(per_level);
  }
  return res;
}

ObservableSeries run_ta(double beta, const ModelParams& params,
                        const ode::IntegratorConfig& config, std::span<const double> t_grid) {
  params.validate();
  if (params.epsilon != 0.0)
    throw std::invalid_argument("boltzmann::run_ta: derived for zero spin bias");
  if (!(beta > 0.0)) throw std::invalid_argument("boltzmann::run_ta: beta must be > 0");

  D1State init;
  if (config.mode == EomMode::simplified) init.disp_down = initial_g(params);
  if (config.initial_perturbation > 0.0)
    init = d1::apply_initial_perturbation(init, config.initial_perturbation);

  auto rhs_fn = [&](const D1State& st) {
    return ta_rhs(st, beta, params, config.mode, config.reg_floor);
  };
  const auto traj = d1::propagate_state(rhs_fn, init, config, t_grid);

  auto out = series_from_trajectory(
      traj, t_grid, [&](const D1State& st) { return ta_energy(st, beta, params); });
  out.method = "ta";
  return out;
}

}  // namespace rabi::boltzmann
