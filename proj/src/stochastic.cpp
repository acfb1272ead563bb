#include "rabi/stochastic.hpp"

#include <cmath>
#include <stdexcept>

#include "rabi/d1.hpp"
#include "rabi/parallel.hpp"
#include "rabi/rng.hpp"
#include "rabi/special.hpp"
#include "rabi/thermal.hpp"

namespace rabi::stochastic {

std::vector<int> sample_signs(int fock_m, std::uint64_t seed, std::uint64_t realization) {
  if (fock_m < 1) throw std::invalid_argument("sample_signs: fock_m must be >= 1");
  rng::Stream stream(seed, rng::purpose_signs, realization);
  std::vector<int> signs(static_cast<std::size_t>(fock_m));
  for (auto& s : signs) s = stream.sign();
  return signs;
}

ThermalWavefunction make_thermal_wavefunction(const std::vector<int>& signs, double beta,
                                              const ModelParams& params) {
  params.validate();
  if (signs.empty()) throw std::invalid_argument("make_thermal_wavefunction: no signs");
  if (!(beta > 0.0)) throw std::invalid_argument("make_thermal_wavefunction: beta must be > 0");
  const int m = static_cast<int>(signs.size());
  const double x = beta * params.hbar * params.omega;
  const double inv_sqrt_q = std::sqrt(-std::expm1(-x));

  ThermalWavefunction tw;
  tw.signs = signs;
  tw.phi.resize(m);
  for (int n = 0; n < m; ++n)
    tw.phi(n) = signs[static_cast<std::size_t>(n)] * std::exp(-0.5 * x * n) * inv_sqrt_q;

  tw.raw_norm = tw.phi.squaredNorm();
  tw.tail_weight = std::exp(-x * m);
  // The untruncated state has unit norm; renormalize the kept part so the
  // variational constraint <Psi|Psi> = 1 holds exactly after truncation.
  tw.phi /= std::sqrt(tw.raw_norm);

  tw.v0 = tw.phi.cast<Complex>();
  tw.v1 = Eigen::VectorXcd::Zero(m);
  for (int n = 0; n + 1 < m; ++n) tw.v1(n) = tw.phi(n + 1) * std::sqrt(n + 1.0);
  tw.t01 = (tw.v0.real().cwiseProduct(tw.v1.real())).sum();
  tw.t11 = tw.v1.real().squaredNorm();
  return tw;
}

ThermalWavefunction zero_temperature_wavefunction(int sign) {
  ThermalWavefunction tw;
  tw.signs = {sign >= 0 ? +1 : -1};
  tw.phi = Eigen::VectorXd::Constant(1, static_cast<double>(tw.signs[0]));
  tw.raw_norm = 1.0;
  tw.tail_weight = 0.0;
  tw.v0 = tw.phi.cast<Complex>();
  tw.v1 = Eigen::VectorXcd::Zero(1);
  tw.t01 = 0.0;
  tw.t11 = 0.0;
  return tw;
}

ThermalQuantities thermal_quantities(const ThermalWavefunction& tw) {
  return ThermalQuantities{tw.t01, tw.t11, tw.t11 + 1.0};
}

double thermal_t(const ThermalWavefunction& tw, int s, int r) {
  if (s < 0 || r < 0) throw std::invalid_argument("thermal_t: orders must be >= 0");
  const int m = static_cast<int>(tw.phi.size());
  double sum = 0.0;
  for (int n = 0; n + std::max(s, r) < m; ++n)
    sum += tw.phi(n + s) * tw.phi(n + r) * special::sqrt_factorial_ratio(n + s, n) *
           special::sqrt_factorial_ratio(n + r, n);
  return sum;
}

double thermal_u(const ThermalWavefunction& tw, int r, int s) {
  if (s < 0 || r < 0) throw std::invalid_argument("thermal_u: orders must be >= 0");
  const int m = static_cast<int>(tw.phi.size());
  double sum = 0.0;
  for (int n = std::max(r, s); n - std::min(r, s) < m; ++n) {
    const int ks = n - s, kr = n - r;
    if (ks >= m || kr >= m) continue;
    sum += tw.phi(ks) * tw.phi(kr) * special::sqrt_factorial_ratio(n, ks) *
           special::sqrt_factorial_ratio(n, kr);
  }
  return sum;
}

namespace {

// Plain bilinear contraction; the v-vectors are real-valued, so no conjugation.
inline Complex contract(const Eigen::VectorXcd& left, const Eigen::MatrixXcd& m,
                        const Eigen::VectorXcd& right) {
  const Eigen::VectorXcd tmp = m * right;
  return (left.transpose() * tmp).value();
}

}  // namespace

Complex overlap(Complex f, Complex g, const ThermalWavefunction& tw) {
  const Complex pref =
      std::exp(Complex(-0.5 * (std::norm(f) + std::norm(g)), 0.0) + std::conj(f) * g);
  const auto m = special::displacement_overlap_matrix(g - f, static_cast<int>(tw.v0.size()));
  return pref * contract(tw.v0, m, tw.v0);
}

Complex overlap_annihilate(Complex f, Complex g, const ThermalWavefunction& tw) {
  const Complex pref =
      std::exp(Complex(-0.5 * (std::norm(f) + std::norm(g)), 0.0) + std::conj(f) * g);
  const auto m = special::displacement_overlap_matrix(g - f, static_cast<int>(tw.v0.size()));
  return pref * contract(tw.v0, m, tw.v1);
}

OverlapSet overlap_set(Complex f, Complex g, const ThermalWavefunction& tw) {
  const Complex pref =
      std::exp(Complex(-0.5 * (std::norm(f) + std::norm(g)), 0.0) + std::conj(f) * g);
  const auto m = special::displacement_overlap_matrix(g - f, static_cast<int>(tw.v0.size()));
  OverlapSet os;
  os.o_fg = pref * contract(tw.v0, m, tw.v0);
  os.o_gf = std::conj(os.o_fg);
  os.o_fg_a = pref * contract(tw.v0, m, tw.v1);
  // <D_g^dag D_f a> is the conjugate of the transposed contraction.
  os.o_gf_a = std::conj(pref * contract(tw.v1, m, tw.v0));
  return os;
}

D1State rhs(const D1State& s, const ThermalWavefunction& tw, const ModelParams& p, EomMode mode,
            double reg_floor) {
  if (p.epsilon != 0.0)
    throw std::invalid_argument("stochastic::rhs: derived for zero spin bias");
  const Complex a = s.amp_up, b = s.amp_down, f = s.disp_up, g = s.disp_down;
  const double hbar = p.hbar, omega = p.omega, lam = p.lambda;
  const Complex i_over_hbar = imag_unit / hbar;
  const double t01 = tw.t01;
  const Complex w = g - f;

  const OverlapSet os = overlap_set(f, g, tw);

  Complex fdot, gdot;
  if (mode == EomMode::simplified) {
    fdot = -i_over_hbar * (hbar * omega * f + 0.5 * lam);
    gdot = -i_over_hbar * (hbar * omega * g - 0.5 * lam);
  } else {
    const Complex s_f = std::conj(a) * b * ((w - t01) * os.o_fg + os.o_fg_a) +
                        a * std::conj(b) * (t01 * os.o_gf - os.o_gf_a);
    const Complex s_g = std::conj(b) * a * ((-w - t01) * os.o_gf + os.o_gf_a) +
                        std::conj(a) * b * (t01 * os.o_fg - os.o_fg_a);
    fdot = -i_over_hbar * (0.5 * lam + hbar * omega * (f + t01) +
                           p.v * s_f * ode::regularized_inverse_square(a, reg_floor));
    gdot = -i_over_hbar * (-0.5 * lam + hbar * omega * (g + t01) +
                           p.v * s_g * ode::regularized_inverse_square(b, reg_floor));
  }

  // t11 enters both amplitude equations as one common phase
  // hbar*omega*t11, invisible to every observable; the amplitudes are
  // propagated in the rotating gauge with it removed (same gauge as the
  // per-level equations).
  const Complex br_f =
      fdot * std::conj(f) - f * std::conj(fdot) + 2.0 * (fdot - std::conj(fdot)) * t01;
  const Complex br_g =
      gdot * std::conj(g) - g * std::conj(gdot) + 2.0 * (gdot - std::conj(gdot)) * t01;

  const Complex adot =
      -0.5 * a * br_f -
      i_over_hbar * (p.v * b * os.o_fg +
                     hbar * omega * a * (std::norm(f) + 2.0 * f.real() * t01) +
                     lam * a * (f.real() + t01));
  const Complex bdot =
      -0.5 * b * br_g -
      i_over_hbar * (p.v * a * os.o_gf +
                     hbar * omega * b * (std::norm(g) + 2.0 * g.real() * t01) -
                     lam * b * (g.real() + t01));

  return D1State{adot, bdot, fdot, gdot};
}

Energies energies(const D1State& s, const ThermalWavefunction& tw, const ModelParams& p) {
  const Complex a = s.amp_up, b = s.amp_down, f = s.disp_up, g = s.disp_down;
  const OverlapSet os = overlap_set(f, g, tw);
  Energies e;
  e.e_spin = 2.0 * p.v * (std::conj(a) * b * os.o_fg).real();
  e.e_rest = p.hbar * p.omega *
                 (std::norm(a) * (std::norm(f) + 2.0 * f.real() * tw.t01 + tw.t11) +
                  std::norm(b) * (std::norm(g) + 2.0 * g.real() * tw.t01 + tw.t11)) +
             p.lambda * (std::norm(a) * (f.real() + tw.t01) -
                         std::norm(b) * (g.real() + tw.t01));
  return e;
}

ObservableSeries run_ensemble(int n_realizations, std::uint64_t seed, double beta,
                              const ModelParams& params, const ThermalConfig& thermal,
                              const ode::IntegratorConfig& config,
                              std::span<const double> t_grid, unsigned threads) {
  if (n_realizations < 1)
    throw std::invalid_argument("run_ensemble: need at least one realization");
  params.validate();
  thermal.validate();
  if (params.epsilon != 0.0)
    throw std::invalid_argument("stochastic::run_ensemble: derived for zero spin bias");

  const std::size_t nt = t_grid.size();
  const auto count = static_cast<std::size_t>(n_realizations);

  struct Row {
    std::vector<double> pz, norm, e_spin, e_rest;
    double max_norm_drift = 0.0;
    std::vector<std::string> warnings;
  };
  std::vector<Row> rows(count);

  auto worker = [&](std::size_t i) {
    const auto signs = sample_signs(thermal.fock_m, seed, i);
    const auto tw = make_thermal_wavefunction(signs, beta, params);

    D1State init;
    if (config.mode == EomMode::simplified)
      init.disp_down = params.lambda / (params.hbar * params.omega);
    if (config.initial_perturbation > 0.0)
      init = d1::apply_initial_perturbation(init, config.initial_perturbation);

    auto rhs_fn = [&](const D1State& st) {
      return rhs(st, tw, params, config.mode, config.reg_floor);
    };
    const auto traj = d1::propagate_state(rhs_fn, init, config, t_grid);

    Row& row = rows[i];
    row.max_norm_drift = traj.max_norm_drift;
    row.warnings = traj.warnings;
    row.pz.reserve(nt);
    row.norm.reserve(nt);
    row.e_spin.reserve(nt);
    row.e_rest.reserve(nt);
    for (const auto& st : traj.states) {
      row.pz.push_back(st.pz());
      row.norm.push_back(st.norm_sq());
      const auto e = energies(st, tw, params);
      row.e_spin.push_back(e.e_spin);
      row.e_rest.push_back(e.e_rest);
    }
  };

  const auto failures = detail::parallel_for(count, threads, worker);
  if (!failures.empty()) {
    std::string msg = "stochastic ensemble refused (" + std::to_string(failures.size()) +
                      " of " + std::to_string(count) + " realizations failed):";
    for (std::size_t k = 0; k < failures.size() && k < 4; ++k)
      msg += "\n  realization " + std::to_string(failures[k].first) + ": " +
             failures[k].second;
    throw std::runtime_error(msg);
  }

  ObservableSeries out;
  out.method = "stochastic";
  out.time.assign(t_grid.begin(), t_grid.end());
  out.pz.assign(nt, 0.0);
  out.pz_stderr.assign(nt, 0.0);
  out.norm.assign(nt, 0.0);
  out.e_spin.assign(nt, 0.0);
  out.e_rest.assign(nt, 0.0);
  out.e_total.assign(nt, 0.0);

  // Deterministic reduction in realization order.
  for (const auto& row : rows) {
    out.max_norm_drift = std::max(out.max_norm_drift, row.max_norm_drift);
    for (std::size_t ti = 0; ti < nt; ++ti) {
      out.pz[ti] += row.pz[ti];
      out.pz_stderr[ti] += row.pz[ti] * row.pz[ti];
      out.norm[ti] += row.norm[ti];
      out.e_spin[ti] += row.e_spin[ti];
      out.e_rest[ti] += row.e_rest[ti];
    }
  }
  const double num = static_cast<double>(count);
  for (std::size_t ti = 0; ti < nt; ++ti) {
    const double mean = out.pz[ti] / num;
    const double var = std::max(0.0, out.pz_stderr[ti] / num - mean * mean);
    out.pz[ti] = mean;
    out.pz_stderr[ti] = count > 1 ? std::sqrt(var / (num - 1.0)) : 0.0;
    out.norm[ti] /= num;
    out.e_spin[ti] /= num;
    out.e_rest[ti] /= num;
    out.e_total[ti] = out.e_spin[ti] + out.e_rest[ti];
  }

  std::size_t warned = 0;
  for (std::size_t i = 0; i < count && warned < 5; ++i)
    for (const auto& w : rows[i].warnings) {
      out.warnings.push_back("realization " + std::to_string(i) + ": " + w);
      if (++warned >= 5) break;
    }
  return out;
}

}  // namespace rabi::stochastic
