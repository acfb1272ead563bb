#include "rabi/observables.hpp"

#include <cmath>
#include <stdexcept>

#include "rabi/stochastic.hpp"

namespace rabi {

SeriesDistance compare_series(const ObservableSeries& a, const ObservableSeries& b,
                              double divergence_threshold) {
  if (a.time.size() != b.time.size())
    throw std::invalid_argument("compare_series: time grids differ in length");
  for (std::size_t i = 0; i < a.time.size(); ++i)
    if (std::abs(a.time[i] - b.time[i]) > 1e-12 * std::max(1.0, std::abs(a.time[i])))
      throw std::invalid_argument("compare_series: time grids differ; resampling is not done");

  SeriesDistance d;
  double sq = 0.0;
  for (std::size_t i = 0; i < a.time.size(); ++i) {
    const double diff = std::abs(a.pz[i] - b.pz[i]);
    sq += diff * diff;
    if (diff > d.sup_norm) d.sup_norm = diff;
    if (!d.first_divergence_time && diff > divergence_threshold)
      d.first_divergence_time = a.time[i];
  }
  d.rms = a.time.empty() ? 0.0 : std::sqrt(sq / static_cast<double>(a.time.size()));
  return d;
}

Eigen::MatrixXd kron_delta_demo(int n_realizations, int m_levels, std::uint64_t seed) {
  if (n_realizations < 1 || m_levels < 1)
    throw std::invalid_argument("kron_delta_demo: counts must be >= 1");
  Eigen::MatrixXi acc = Eigen::MatrixXi::Zero(m_levels, m_levels);
  for (int i = 0; i < n_realizations; ++i) {
    const auto signs = stochastic::sample_signs(m_levels, seed, static_cast<std::uint64_t>(i));
    for (int n = 0; n < m_levels; ++n)
      for (int m = 0; m < m_levels; ++m) acc(n, m) += signs[n] * signs[m];
  }
  // Integer accumulation keeps the diagonal exactly N/N = 1.
  return acc.cast<double>() / static_cast<double>(n_realizations);
}

std::vector<double> make_time_grid(double t_max, double dt) {
  if (!(dt > 0.0) || !(t_max >= 0.0))
    throw std::invalid_argument("make_time_grid: need dt > 0 and t_max >= 0");
  const auto count = static_cast<std::size_t>(std::floor(t_max / dt + 1e-9)) + 1;
  std::vector<double> grid(count);
  for (std::size_t i = 0; i < count; ++i) grid[i] = static_cast<double>(i) * dt;
  return grid;
}

}  // namespace rabi
