// pfunction.hpp — Thermal sampling of coherent initial conditions
//
// The thermal oscillator state is diagonal in coherent states with Gaussian
// weight P_beta(alpha) = (1/pi)(e^{beta hbar omega} - 1)
// exp(-|alpha|^2 (e^{beta hbar omega} - 1)).  Sampling phase-space centers
// from that density and propagating each with the zero-temperature equations
// carries the temperature entirely in the initial conditions.

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "rabi/observables.hpp"
#include "rabi/ode.hpp"
#include "rabi/types.hpp"

namespace rabi::pfunction {

struct PSample {
  Complex alpha;  // phase-space center; all samples carry equal weight
};

// Draws count centers; real and imaginary parts are independent Gaussians of
// variance 1/(2 (e^{beta hbar omega} - 1)), so E|alpha|^2 equals the thermal
// occupation.
std::vector<PSample> sample_pfunction(double beta, const ModelParams& params, int count,
                                      std::uint64_t seed);

// Propagates each sample with the zero-temperature equations from
// f(0) = alpha and g(0) = alpha (full mode) or alpha + lambda/(hbar omega)
// (simplified mode), then averages the population difference.
ObservableSeries run_ensemble(int n_samples, std::uint64_t seed, double beta,
                              const ModelParams& params, const ode::IntegratorConfig& config,
                              std::span<const double> t_grid, unsigned threads = 0);

}  // namespace rabi::pfunction
