#include "rabi/pfunction.hpp"

#include <cmath>
#include <stdexcept>

#include "rabi/d1.hpp"
#include "rabi/parallel.hpp"
#include "rabi/rng.hpp"
#include "rabi/thermal.hpp"

namespace rabi::pfunction {

std::vector<PSample> sample_pfunction(double beta, const ModelParams& params, int count,
                                      std::uint64_t seed) {
  params.validate();
  if (!(beta > 0.0)) throw std::invalid_argument("sample_pfunction: beta must be > 0");
  if (count < 1) throw std::invalid_argument("sample_pfunction: count must be >= 1");
  // Quadrature variance n_bar/2 per real component.
  const double sigma = std::sqrt(0.5 * thermal_occupation(beta, params));
  std::vector<PSample> samples(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    rng::Stream stream(seed, rng::purpose_pfunction, static_cast<std::uint64_t>(i));
    samples[static_cast<std::size_t>(i)].alpha =
        Complex(sigma * stream.gaussian(), sigma * stream.gaussian());
  }
  return samples;
}

ObservableSeries run_ensemble(int n_samples, std::uint64_t seed, double beta,
                              const ModelParams& params, const ode::IntegratorConfig& config,
                              std::span<const double> t_grid, unsigned threads) {
  const auto samples = sample_pfunction(beta, params, n_samples, seed);
  const std::size_t nt = t_grid.size();
  const auto count = static_cast<std::size_t>(n_samples);

  struct Row {
    std::vector<double> pz, norm, e_spin, e_rest;
    double max_norm_drift = 0.0;
    std::vector<std::string> warnings;
  };
  std::vector<Row> rows(count);

  auto worker = [&](std::size_t i) {
    D1State init;
    init.disp_up = samples[i].alpha;
    init.disp_down = samples[i].alpha;
    if (config.mode == EomMode::simplified)
      init.disp_down += params.lambda / (params.hbar * params.omega);
    if (config.initial_perturbation > 0.0)
      init = d1::apply_initial_perturbation(init, config.initial_perturbation);

    const auto traj = d1::propagate(init, params, config, t_grid);
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
      const auto e = d1::energies(st, params);
      row.e_spin.push_back(e.e_spin);
      row.e_rest.push_back(e.e_rest);
    }
  };

  const auto failures = detail::parallel_for(count, threads, worker);
  if (!failures.empty()) {
    std::string msg = "p-function ensemble refused (" + std::to_string(failures.size()) +
                      " of " + std::to_string(count) + " samples failed):";
    for (std::size_t k = 0; k < failures.size() && k < 4; ++k)
      msg += "\n  sample " + std::to_string(failures[k].first) + ": " + failures[k].second;
    throw std::runtime_error(msg);
  }

  ObservableSeries out;
  out.method = "pfunction";
  out.time.assign(t_grid.begin(), t_grid.end());
  out.pz.assign(nt, 0.0);
  out.pz_stderr.assign(nt, 0.0);
  out.norm.assign(nt, 0.0);
  out.e_spin.assign(nt, 0.0);
  out.e_rest.assign(nt, 0.0);
  out.e_total.assign(nt, 0.0);

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
      out.warnings.push_back("sample " + std::to_string(i) + ": " + w);
      if (++warned >= 5) break;
    }
  return out;
}

}  // namespace rabi::pfunction
