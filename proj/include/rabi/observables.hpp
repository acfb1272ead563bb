// observables.hpp — Time series of observables and cross-method comparison

#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace rabi {

// One propagation's observables on a common time grid, together with the
// parameter fingerprint that produced it.  pz_stderr is zero for
// deterministic methods.
struct ObservableSeries {
  std::string method;
  std::vector<double> time;
  std::vector<double> pz;
  std::vector<double> pz_stderr;
  std::vector<double> norm;
  std::vector<double> e_spin;
  std::vector<double> e_rest;
  std::vector<double> e_total;
  std::vector<std::pair<std::string, std::string>> fingerprint;
  std::vector<std::string> warnings;
  double max_norm_drift = 0.0;
  // Method-specific diagnostic columns appended to serialized output.
  std::vector<std::pair<std::string, std::vector<double>>> extra_columns;

  std::size_t size() const { return time.size(); }
};

struct SeriesDistance {
  double sup_norm = 0.0;
  double rms = 0.0;
  std::optional<double> first_divergence_time;  // earliest |dpz| above threshold
};

// Pointwise population-difference distance between two series on identical
// grids.  Throws std::invalid_argument on grid mismatch.
SeriesDistance compare_series(const ObservableSeries& a, const ObservableSeries& b,
                              double divergence_threshold = 0.05);

// Empirical Kronecker delta (1/N) sum_i s_n^i s_m^i from N sign realizations
// over m_levels levels.  The diagonal is exactly one; off-diagonal entries
// shrink like 1/sqrt(N).
Eigen::MatrixXd kron_delta_demo(int n_realizations, int m_levels, std::uint64_t seed);

// Uniform grid 0, dt, 2 dt, ..., up to and including the last multiple <= t_max.
std::vector<double> make_time_grid(double t_max, double dt);

}  // namespace rabi
