// d1.hpp — Zero-temperature two-branch coherent-state dynamics

#pragma once

#include <functional>
#include <span>

#include "rabi/observables.hpp"
#include "rabi/ode.hpp"
#include "rabi/types.hpp"

namespace rabi::d1 {

// Time derivative of the variational parameters.
//
// In full mode the displacement equations are the variationally exact ones
// made explicit, so they carry amplitude quotients that are singular where an
// amplitude vanishes; those quotients are smoothed with reg_floor (see
// ode::regularized_inverse_square).  At an exact zero the smoothed quotient
// vanishes and the displacement derivative continuously becomes the
// simplified-mode expression, the unique continuation of the regularized
// equations there.  In simplified mode the displacements obey the decoupled
// driven-oscillator equations
//   f' = -i omega f - i lambda/(2 hbar),   g' = -i omega g + i lambda/(2 hbar)
// while the amplitude equations are kept in full.
D1State rhs(const D1State& state, const ModelParams& params, EomMode mode,
            double reg_floor = 1e-12);

struct Energies {
  double e_spin = 0.0;  // tunneling + bias part
  double e_rest = 0.0;  // oscillator + coupling part
  double total() const { return e_spin + e_rest; }
};

Energies energies(const D1State& state, const ModelParams& params);

struct Trajectory {
  std::vector<D1State> states;  // one per grid time
  double max_norm_drift = 0.0;
  std::vector<std::string> warnings;
};

using StateRhs = std::function<D1State(const D1State&)>;

// Integrates an arbitrary four-parameter equation of motion over the grid.
// Flags norm drift beyond 1e-6 and, in full mode, close approaches to the
// singular set (|amplitude| < 1e-6).  Shared by every method built on the
// two-branch ansatz.
Trajectory propagate_state(const StateRhs& rhs_fn, const D1State& initial,
                           const ode::IntegratorConfig& config,
                           std::span<const double> t_grid);

// Zero-temperature propagation from the standard initial state (up spin,
// undisplaced oscillator).  Throws if the initial amplitudes are not
// normalized.
Trajectory propagate(const D1State& initial, const ModelParams& params,
                     const ode::IntegratorConfig& config, std::span<const double> t_grid);

// Full method runner: observables of the single zero-temperature trajectory.
ObservableSeries run(const ModelParams& params, const ode::IntegratorConfig& config,
                     std::span<const double> t_grid);

// Moves a vanishing down-branch amplitude to delta (renormalizing the up
// branch); historically used to step full-mode runs off the singular set.
D1State apply_initial_perturbation(D1State state, double delta);

}  // namespace rabi::d1
