#include "rabi/runner.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <stdexcept>

#include <json.hpp>

#include "rabi/boltzmann.hpp"
#include "rabi/d1.hpp"
#include "rabi/exact.hpp"
#include "rabi/io.hpp"
#include "rabi/pfunction.hpp"
#include "rabi/stochastic.hpp"
#include "rabi/thermal.hpp"

namespace rabi::runner {

namespace {

const std::set<std::string> known_methods = {"exact",     "d1",        "ta",         "stochastic",
                                             "pfunction", "boltzmann", "compare-all"};

bool is_thermal(const std::string& method) { return method != "d1"; }

}  // namespace

EomMode RunConfig::eom_mode() const {
  return mode == "full" ? EomMode::full : EomMode::simplified;
}

ode::IntegratorConfig RunConfig::integrator() const {
  ode::IntegratorConfig cfg;
  cfg.rel_tol = rel_tol;
  cfg.abs_tol = abs_tol;
  cfg.reg_floor = reg_floor;
  cfg.mode = eom_mode();
  cfg.initial_perturbation = initial_perturbation;
  return cfg;
}

void RunConfig::validate() const {
  if (!known_methods.count(method))
    throw std::invalid_argument("config field 'method': unknown value '" + method + "'");
  params.validate();
  if (mode != "full" && mode != "simplified")
    throw std::invalid_argument("config field 'mode': must be 'full' or 'simplified'");
  if (is_thermal(method) && !(temperature > 0.0))
    throw std::invalid_argument("config field 'temperature': must be > 0 for method '" +
                                method + "'");
  if (realizations < 1) throw std::invalid_argument("config field 'realizations': must be >= 1");
  if (fock_m < 1) throw std::invalid_argument("config field 'fock-m': must be >= 1");
  if (boltzmann_nt < 1)
    throw std::invalid_argument("config field 'boltzmann-nt': must be >= 1");
  if (jmax < 2) throw std::invalid_argument("config field 'jmax': must be >= 2");
  if (boltzmann_nt + 1 > jmax)
    throw std::invalid_argument("config field 'boltzmann-nt': must stay below 'jmax'");
  if (!(t_max > 0.0)) throw std::invalid_argument("config field 't-max': must be > 0");
  if (!(dt_out > 0.0) || dt_out > t_max)
    throw std::invalid_argument("config field 'dt-out': must be in (0, t-max]");
  if (!(rel_tol > 0.0)) throw std::invalid_argument("config field 'rel-tol': must be > 0");
  if (!(abs_tol > 0.0)) throw std::invalid_argument("config field 'abs-tol': must be > 0");
  if (reg_floor < 0.0) throw std::invalid_argument("config field 'reg-floor': must be >= 0");
  if (initial_perturbation < 0.0 || initial_perturbation >= 1.0)
    throw std::invalid_argument("config field 'initial-perturbation': must be in [0, 1)");
  if (format != "csv" && format != "json")
    throw std::invalid_argument("config field 'format': must be 'csv' or 'json'");
}

void apply_json_config(const std::string& path, RunConfig& c) {
  std::ifstream f(path);
  if (!f) throw std::invalid_argument("config file not readable: " + path);
  nlohmann::json j;
  try {
    f >> j;
  } catch (const std::exception& e) {
    throw std::invalid_argument("config file " + path + ": " + e.what());
  }
  auto get = [&](const char* key, auto& field) {
    if (j.contains(key)) j.at(key).get_to(field);
  };
  get("method", c.method);
  get("epsilon", c.params.epsilon);
  get("v", c.params.v);
  get("omega", c.params.omega);
  get("lambda", c.params.lambda);
  get("hbar", c.params.hbar);
  get("kb", c.params.kb);
  get("temperature", c.temperature);
  get("mode", c.mode);
  get("realizations", c.realizations);
  get("fock-m", c.fock_m);
  get("boltzmann-nt", c.boltzmann_nt);
  get("jmax", c.jmax);
  get("t-max", c.t_max);
  get("dt-out", c.dt_out);
  get("seed", c.seed);
  get("output", c.output);
  get("format", c.format);
  get("rel-tol", c.rel_tol);
  get("abs-tol", c.abs_tol);
  get("reg-floor", c.reg_floor);
  get("initial-perturbation", c.initial_perturbation);
  get("allow-warnings", c.allow_warnings);
  get("per-level-output", c.per_level_output);
  get("threads", c.threads);
}

std::vector<std::pair<std::string, std::string>> fingerprint(const RunConfig& c,
                                                             const std::string& method) {
  using io::format_double;
  std::vector<std::pair<std::string, std::string>> fp;
  fp.emplace_back("method", method);
  fp.emplace_back("mode", c.mode);
  fp.emplace_back("epsilon", format_double(c.params.epsilon));
  fp.emplace_back("v", format_double(c.params.v));
  fp.emplace_back("omega", format_double(c.params.omega));
  fp.emplace_back("lambda", format_double(c.params.lambda));
  fp.emplace_back("hbar", format_double(c.params.hbar));
  fp.emplace_back("kb", format_double(c.params.kb));
  if (is_thermal(method)) {
    fp.emplace_back("temperature", format_double(c.temperature));
    fp.emplace_back("beta", format_double(c.beta()));
  }
  fp.emplace_back("realizations", std::to_string(c.realizations));
  fp.emplace_back("fock-m", std::to_string(c.fock_m));
  fp.emplace_back("boltzmann-nt", std::to_string(c.boltzmann_nt));
  fp.emplace_back("jmax", std::to_string(c.jmax));
  fp.emplace_back("t-max", format_double(c.t_max));
  fp.emplace_back("dt-out", format_double(c.dt_out));
  fp.emplace_back("seed", std::to_string(c.seed));
  fp.emplace_back("rel-tol", format_double(c.rel_tol));
  fp.emplace_back("abs-tol", format_double(c.abs_tol));
  fp.emplace_back("reg-floor", format_double(c.reg_floor));
  fp.emplace_back("initial-perturbation", format_double(c.initial_perturbation));
  return fp;
}

RunOutput execute(const RunConfig& config) {
  config.validate();
  const auto grid = make_time_grid(config.t_max, config.dt_out);
  const auto integ = config.integrator();
  const double beta = config.beta();
  ThermalConfig thermal{beta, config.fock_m, config.boltzmann_nt, config.jmax};

  RunOutput out;
  auto add = [&](const std::string& name, ObservableSeries series) {
    series.method = name;
    series.fingerprint = fingerprint(config, name);
    for (const auto& w : series.warnings) out.warnings.push_back(name + ": " + w);
    out.series.emplace(name, std::move(series));
  };

  const bool all = config.method == "compare-all";
  if (all || config.method == "exact")
    add("exact", exact::population_difference_qm(beta, config.params, thermal, grid).series);
  if (all || config.method == "d1") add("d1", d1::run(config.params, integ, grid));
  if (all || config.method == "ta")
    add("ta", boltzmann::run_ta(beta, config.params, integ, grid));
  if (all || config.method == "stochastic")
    add("stochastic",
        stochastic::run_ensemble(config.realizations, config.seed, beta, config.params, thermal,
                                 integ, grid, config.threads));
  if (all || config.method == "pfunction")
    add("pfunction",
        pfunction::run_ensemble(config.realizations, config.seed, beta, config.params, integ,
                                grid, config.threads));
  if (all || config.method == "boltzmann") {
    const bool keep = config.per_level_output;
    auto res = boltzmann::run(beta, config.params, thermal, integ, grid, keep, config.threads);
    add("boltzmann", std::move(res.series));
    if (keep) {
      for (auto& lev : res.per_level) lev.fingerprint = fingerprint(config, lev.method);
      out.per_level = std::move(res.per_level);
    }
  }
  return out;
}

std::vector<std::string> write_outputs(const RunConfig& config, const RunOutput& output) {
  namespace fs = std::filesystem;
  const std::string ext = "." + config.format;
  std::vector<std::string> written;

  auto write_one = [&](const std::string& path, const ObservableSeries& s) {
    if (config.format == "csv")
      io::write_series_csv(path, s);
    else
      io::write_series_json(path, s);
    written.push_back(path);
  };

  if (config.method != "compare-all") {
    const std::string path = config.output.empty() ? config.method + ext : config.output;
    write_one(path, output.series.at(config.method));
    for (const auto& lev : output.per_level) {
      const fs::path p(path);
      fs::path lev_path = p.parent_path() / (lev.method + ext);
      write_one(lev_path.string(), lev);
    }
    return written;
  }

  const fs::path dir = config.output.empty() ? fs::path("compare-all-out")
                                             : fs::path(config.output);
  fs::create_directories(dir);
  for (const auto& [name, series] : output.series)
    write_one((dir / (name + ext)).string(), series);

  // Comparison summary: distance of every method from the exact reference.
  nlohmann::json summary;
  const auto& reference = output.series.at("exact");
  std::vector<std::pair<double, std::string>> ranking;
  for (const auto& [name, series] : output.series) {
    if (name == "exact") continue;
    const auto d = compare_series(reference, series);
    nlohmann::json entry;
    entry["sup_norm"] = d.sup_norm;
    entry["rms"] = d.rms;
    if (d.first_divergence_time) entry["first_divergence_time"] = *d.first_divergence_time;
    summary["vs_exact"][name] = entry;
    ranking.emplace_back(d.sup_norm, name);
  }
  std::sort(ranking.begin(), ranking.end());
  for (const auto& [sup, name] : ranking) summary["ranking"].push_back(name);
  summary["closest_to_exact"] = ranking.front().second;
  nlohmann::json meta = nlohmann::json::object();
  for (const auto& [k, v] : fingerprint(config, "compare-all")) meta[k] = v;
  summary["fingerprint"] = meta;
  summary["warnings"] = output.warnings;

  const std::string summary_path = (dir / "summary.json").string();
  std::ofstream f(summary_path, std::ios::binary);
  if (!f) throw std::runtime_error("write_outputs: cannot open " + summary_path);
  f << summary.dump(2) << "\n";
  written.push_back(summary_path);
  return written;
}

}  // namespace rabi::runner
