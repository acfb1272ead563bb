// thermal.hpp — Canonical weights of the harmonic oscillator

#pragma once

#include <vector>

#include "rabi/types.hpp"

namespace rabi {

// Q(beta) = sum_n exp(-beta*n*hbar*omega) = (1 - exp(-beta hbar omega))^-1,
// zero-point energy suppressed.
double partition_function(double beta, const ModelParams& params);

// rho_n = exp(-beta*n*hbar*omega) / Q(beta).
double boltzmann_weight(int n, double beta, const ModelParams& params);

// Mean thermal occupation 1/(exp(beta hbar omega) - 1).
double thermal_occupation(double beta, const ModelParams& params);

// Weights for levels 0..count-1, renormalized to sum to one exactly, so a
// truncated thermal mixture stays a proper density matrix.
std::vector<double> truncated_boltzmann_weights(double beta, const ModelParams& params, int count);

}  // namespace rabi
