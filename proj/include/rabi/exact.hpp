// exact.hpp — Reference propagation in the truncated spin (x) Fock basis

#pragma once

#include <Eigen/Dense>
#include <span>

#include "rabi/observables.hpp"
#include "rabi/types.hpp"

namespace rabi::exact {

// Hamiltonian on the ordered basis (spin up, j = 0..jmax-1), then
// (spin down, j = 0..jmax-1).  Hermitian by construction.
Eigen::MatrixXcd build_hamiltonian(const ModelParams& params, int jmax);

// One eigendecomposition, reused for every initial level and every time.
class SpectralPropagator {
 public:
  SpectralPropagator(const ModelParams& params, int jmax);

  // Coefficients of exp(-i H t / hbar) |up, n> in the truncated basis.
  Eigen::VectorXcd evolve_from_level(int n, double t) const;

  // max |H U - U L| relative to max |H|.
  double residual() const { return residual_; }
  int jmax() const { return jmax_; }
  const Eigen::MatrixXcd& hamiltonian() const { return hamiltonian_; }

 private:
  ModelParams params_;
  int jmax_;
  Eigen::MatrixXcd hamiltonian_;
  Eigen::MatrixXcd vectors_;
  Eigen::VectorXd values_;
  double residual_ = 0.0;
};

struct FockExpansionSeries {
  int level = 0;                        // initial oscillator level
  std::vector<Eigen::VectorXcd> coeffs; // one coefficient vector per grid time
  double max_norm_error = 0.0;          // worst |<phi|phi> - 1|
  double max_top_population = 0.0;      // worst population of the two highest levels
  bool truncation_warning = false;      // top population exceeded 1e-6
};

// Propagates |up, n> across the grid.  Emits a truncation warning when the
// population of the two highest Fock levels exceeds 1e-6 at any sample,
// signalling that jmax is too small.
FockExpansionSeries propagate_fock_initial(int n, const ModelParams& params,
                                           const ThermalConfig& config,
                                           std::span<const double> t_grid);

// Same, reusing an existing decomposition.
FockExpansionSeries propagate_fock_initial(int n, const SpectralPropagator& prop,
                                           std::span<const double> t_grid);

struct Result {
  ObservableSeries series;
  std::vector<FockExpansionSeries> levels;  // one per initial level 0..boltzmann_nt
};

// Boltzmann-weighted population difference over initial levels 0..boltzmann_nt
// with weights renormalized on the kept levels, so the propagated mixture has
// unit trace and pz(0) = 1 exactly.
Result population_difference_qm(double beta, const ModelParams& params,
                                const ThermalConfig& config, std::span<const double> t_grid);

}  // namespace rabi::exact
