// stochastic.hpp — Sign-sampled thermal wavefunctions and their dynamics
//
// A thermal oscillator state is mimicked by random-sign, square-root
// Boltzmann-weighted superpositions of number states; averaging the outer
// product over sign realizations reproduces the canonical density matrix.
// Each realization is propagated with temperature-modified equations of
// motion and observables are ensemble averages.

#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <vector>

#include "rabi/observables.hpp"
#include "rabi/ode.hpp"
#include "rabi/types.hpp"

namespace rabi::stochastic {

// Independent uniform signs for levels 0..fock_m-1, deterministic per
// (seed, realization).
std::vector<int> sample_signs(int fock_m, std::uint64_t seed, std::uint64_t realization);

// One realization's truncated thermal superposition and the contraction
// vectors used by the overlap evaluations:
//   v_s[n] = phi[n+s] * sqrt((n+s)!/n!).
// phi is renormalized to unit norm after truncation (the untruncated state is
// normalized by construction); raw_norm records the pre-renormalization norm
// and tail_weight the Boltzmann weight dropped by the cut.
struct ThermalWavefunction {
  Eigen::VectorXd phi;
  Eigen::VectorXcd v0, v1;  // v1 padded with a trailing zero
  double t01 = 0.0;         // <a> = v0 . v1
  double t11 = 0.0;         // <a^dag a> = v1 . v1
  double raw_norm = 1.0;
  double tail_weight = 0.0;
  std::vector<int> signs;
};

ThermalWavefunction make_thermal_wavefunction(const std::vector<int>& signs, double beta,
                                              const ModelParams& params);

// The zero-temperature limit: all weight on the ground state.
ThermalWavefunction zero_temperature_wavefunction(int sign = +1);

struct ThermalQuantities {
  double t01 = 0.0;  // <a>, vanishes on average over realizations
  double t11 = 0.0;  // <a^dag a>, sign-free
  double u11 = 0.0;  // <a a^dag> = t11 + 1
};

ThermalQuantities thermal_quantities(const ThermalWavefunction& tw);

// Generic normally / anti-normally ordered ladder moments of the truncated
// state: <(a^dag)^r a^s> and <a^r (a^dag)^s>.  Used for the closed-form and
// symmetry checks; the equations of motion only need the low orders above.
double thermal_t(const ThermalWavefunction& tw, int s, int r);
double thermal_u(const ThermalWavefunction& tw, int r, int s);

// <Phi| D_f^dag D_g |Phi> = exp(-(|f|^2+|g|^2)/2) exp(f* g) v0 . M(g-f) . v0.
Complex overlap(Complex f, Complex g, const ThermalWavefunction& tw);

// <Phi| D_f^dag D_g a |Phi>: annihilating on the right shifts the second
// contraction vector by one level, giving v0 . M(g-f) . v1 with the same
// prefactor.
Complex overlap_annihilate(Complex f, Complex g, const ThermalWavefunction& tw);

// All four overlap expectations entering the equations of motion, sharing a
// single overlap-matrix build.  o_gf = conj(o_fg) holds exactly.
struct OverlapSet {
  Complex o_fg, o_gf;      // <D_f^dag D_g>, <D_g^dag D_f>
  Complex o_fg_a, o_gf_a;  // same with a trailing annihilation operator
};

OverlapSet overlap_set(Complex f, Complex g, const ThermalWavefunction& tw);

// Temperature-modified equations of motion for one realization (derived for
// zero spin bias).  A zero-temperature wavefunction reduces them to the
// d1::rhs equations.  Simplified mode drops the thermal drift together with
// the tunneling terms from the displacement equations.  Amplitudes evolve in
// the rotating gauge with the common phase hbar*omega*t11 removed;
// observables are invariant under it.
D1State rhs(const D1State& state, const ThermalWavefunction& tw, const ModelParams& params,
            EomMode mode, double reg_floor = 1e-12);

struct Energies {
  double e_spin = 0.0;
  double e_rest = 0.0;
};

Energies energies(const D1State& state, const ThermalWavefunction& tw,
                  const ModelParams& params);

// Ensemble of n_realizations independent trajectories with per-realization
// sign substreams; the average is accumulated in realization order, so the
// result is identical for any thread count.  All trajectories must succeed:
// partial ensembles would bias the estimator and are refused.
ObservableSeries run_ensemble(int n_realizations, std::uint64_t seed, double beta,
                              const ModelParams& params, const ThermalConfig& thermal,
                              const ode::IntegratorConfig& config,
                              std::span<const double> t_grid, unsigned threads = 0);

}  // namespace rabi::stochastic
