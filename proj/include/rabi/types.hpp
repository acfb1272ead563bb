// types.hpp — Model constants and shared state types for the Rabi-model solvers

#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>

namespace rabi {

using Complex = std::complex<double>;

inline constexpr Complex imag_unit{0.0, 1.0};

// Constants of the spin-oscillator Hamiltonian
//   H = (epsilon/2) sigma_z + V sigma_x + hbar*omega a^dag a
//       + (lambda/2) sigma_z (a^dag + a),
// with the oscillator zero-point energy dropped throughout.  Energies
// reported by this library follow the same convention; cross-checks against
// references that keep the zero-point term must shift by hbar*omega/2.
struct ModelParams {
  double epsilon = 0.0;  // spin bias
  double v = -0.05;      // tunneling matrix element (may be negative)
  double omega = 1.0;    // oscillator angular frequency
  double lambda = 0.2;   // spin-oscillator coupling
  double hbar = 1.0;
  double kb = 1.0;

  void validate() const {
    if (!(omega > 0.0)) throw std::invalid_argument("ModelParams: omega must be > 0");
    if (!(hbar > 0.0)) throw std::invalid_argument("ModelParams: hbar must be > 0");
    if (!(kb > 0.0)) throw std::invalid_argument("ModelParams: kb must be > 0");
    if (!std::isfinite(epsilon)) throw std::invalid_argument("ModelParams: epsilon not finite");
    if (!std::isfinite(v)) throw std::invalid_argument("ModelParams: v not finite");
    if (!std::isfinite(lambda)) throw std::invalid_argument("ModelParams: lambda not finite");
  }
};

// Inverse temperature plus every truncation order used by the thermal methods.
struct ThermalConfig {
  double beta = 1.0;      // 1/(k_B T)
  int fock_m = 7;         // Fock levels kept in the sampled thermal state and overlap matrices
  int boltzmann_nt = 7;   // highest oscillator level entering Boltzmann sums (levels 0..nt)
  int jmax = 14;          // Fock-space dimension of the exact reference propagation

  void validate() const {
    if (!(beta > 0.0)) throw std::invalid_argument("ThermalConfig: beta must be > 0");
    if (fock_m < 1) throw std::invalid_argument("ThermalConfig: fock_m must be >= 1");
    if (boltzmann_nt < 1) throw std::invalid_argument("ThermalConfig: boltzmann_nt must be >= 1");
    if (jmax < 1) throw std::invalid_argument("ThermalConfig: jmax must be >= 1");
  }
};

// Which form of the coherent-displacement equations of motion to solve.
// `full` keeps the variationally exact (singular) displacement equations with
// denominator regularization; `simplified` replaces them by the decoupled
// driven-oscillator equations, which removes the singularities.
enum class EomMode { full, simplified };

inline const char* to_string(EomMode m) {
  return m == EomMode::full ? "full" : "simplified";
}

// Variational parameters of one two-branch coherent-state trajectory.
struct D1State {
  Complex amp_up{1.0, 0.0};    // spin-up amplitude
  Complex amp_down{0.0, 0.0};  // spin-down amplitude
  Complex disp_up{0.0, 0.0};   // coherent displacement of the up branch
  Complex disp_down{0.0, 0.0}; // coherent displacement of the down branch

  double norm_sq() const { return std::norm(amp_up) + std::norm(amp_down); }
  double pz() const { return std::norm(amp_up) - std::norm(amp_down); }
};

}  // namespace rabi
