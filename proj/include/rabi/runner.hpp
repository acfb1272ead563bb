// runner.hpp — Run configuration and method orchestration behind the CLI

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "rabi/observables.hpp"
#include "rabi/ode.hpp"
#include "rabi/types.hpp"

namespace rabi::runner {

// Everything a reproducible run needs.  Defaults reproduce the benchmark
// configuration: zero bias, V = -0.05, unit constants, lambda = 0.2, T = 1,
// 100 realizations, truncations 7/7/14.
struct RunConfig {
  std::string method = "compare-all";  // exact|d1|ta|stochastic|pfunction|boltzmann|compare-all
  ModelParams params;
  double temperature = 1.0;
  std::string mode = "simplified";  // full|simplified
  int realizations = 100;           // ensemble size for stochastic / p-function
  int fock_m = 7;
  int boltzmann_nt = 7;
  int jmax = 14;
  double t_max = 200.0;
  double dt_out = 0.1;
  std::uint64_t seed = 12345;
  std::string output;  // default: <method>.<format> or <method>-out directory
  std::string format = "csv";  // csv|json
  double rel_tol = 1e-8;
  double abs_tol = 1e-8;
  double reg_floor = 1e-12;
  double initial_perturbation = 0.0;
  bool allow_warnings = false;
  bool per_level_output = false;  // write level-resolved series for boltzmann
  unsigned threads = 0;

  double beta() const { return 1.0 / (params.kb * temperature); }
  EomMode eom_mode() const;
  ode::IntegratorConfig integrator() const;

  // Throws std::invalid_argument naming the offending field.
  void validate() const;
};

// Applies key/value pairs from a JSON config file (keys match the CLI flag
// names) onto a config; flags parsed afterwards override these values.
void apply_json_config(const std::string& path, RunConfig& config);

std::vector<std::pair<std::string, std::string>> fingerprint(const RunConfig& config,
                                                             const std::string& method);

struct RunOutput {
  // Series keyed by method name; single-method runs hold one entry.
  std::map<std::string, ObservableSeries> series;
  // Level-resolved diagnostics (boltzmann only, when requested).
  std::vector<ObservableSeries> per_level;
  std::vector<std::string> warnings;  // union of series warnings
};

// Executes the configured method (or every method for compare-all) on the
// common output grid.
RunOutput execute(const RunConfig& config);

// Serializes the output: one file per series; compare-all writes a directory
// with per-method files plus a comparison summary ranked by sup-norm distance
// from the exact reference.  Returns the paths written.
std::vector<std::string> write_outputs(const RunConfig& config, const RunOutput& output);

}  // namespace rabi::runner
