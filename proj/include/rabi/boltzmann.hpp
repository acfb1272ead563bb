// boltzmann.hpp — Per-level propagation with Boltzmann weighting at
// observable time, plus the thermally-averaged single-trajectory variant
//
// Each oscillator level n gets its own two-branch trajectory whose equations
// carry Laguerre factors L_n(|f-g|^2); temperature enters only through the
// weights applied when observables are assembled.  The thermally-averaged
// (TA) variant instead averages the equations before propagating, which
// replaces L_n by the geometric average exp(-nbar y) and n by nbar — a
// single trajectory that is known to miss the envelope decay.

#pragma once

#include <span>
#include <vector>

#include "rabi/observables.hpp"
#include "rabi/ode.hpp"
#include "rabi/types.hpp"

namespace rabi::boltzmann {

// Equations of motion for the level-n trajectory (zero spin bias).  n = 0
// reduces exactly to d1::rhs.  Amplitudes evolve in the rotating gauge with
// the common phase hbar*omega*n removed; populations, amplitude products,
// norms and energies are invariant under it.
D1State rhs(const D1State& state, int level, const ModelParams& params, EomMode mode,
            double reg_floor = 1e-12);

// Magnitude of the amplitude-quotient term in the explicit displacement
// equation — the term that is singular where the up amplitude vanishes.
// Diagnostic for locating unreliable stretches of full-mode trajectories.
double fdot_singular_term_magnitude(const D1State& state, int level,
                                    const ModelParams& params, double reg_floor = 1e-12);

// Thermally-averaged equations: L_n(y) -> exp(-nbar y),
// L_n'(y) -> -nbar exp(-nbar y), n -> nbar, with nbar the thermal occupation.
// Equals the Boltzmann-weight average of the per-level equations.
D1State ta_rhs(const D1State& state, double beta, const ModelParams& params, EomMode mode,
               double reg_floor = 1e-12);

// Simplified-mode initial down-branch displacement lambda/(hbar omega) (phase
// chosen zero; any phase on the circle |g0 - r| = r with r = lambda/(2 hbar
// omega) works).  With it the oscillator-plus-coupling energy is constant in
// time.  The down amplitude starts at zero, so the choice is free.
Complex initial_g(const ModelParams& params, double phase = 0.0);

struct Energies {
  double e_spin = 0.0;  // tunneling part of the variational energy
  double e_rest = 0.0;  // oscillator + coupling part
};

// Split of the level-n variational energy; e_spin + e_rest is the full
// Hamiltonian expectation.
Energies spin_and_rest_energy(const D1State& state, int level, const ModelParams& params);

Energies ta_energy(const D1State& state, double beta, const ModelParams& params);

struct Result {
  ObservableSeries series;                 // Boltzmann-weighted observables
  std::vector<ObservableSeries> per_level; // level-resolved diagnostics
};

// Propagates levels 0..boltzmann_nt once each and weights at observable time
// with renormalized truncated weights.  Per-level series carry the
// singular-term diagnostic as an extra column.
Result run(double beta, const ModelParams& params, const ThermalConfig& thermal,
           const ode::IntegratorConfig& config, std::span<const double> t_grid,
           bool keep_per_level = true, unsigned threads = 0);

// Single-trajectory thermally-averaged run.
ObservableSeries run_ta(double beta, const ModelParams& params,
                        const ode::IntegratorConfig& config, std::span<const double> t_grid);

}  // namespace rabi::boltzmann
