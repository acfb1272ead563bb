#include "rabi/io.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace rabi::io {

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::string series_to_csv(const ObservableSeries& series) {
  std::string out;
  out.reserve(series.size() * 160 + 512);
  for (const auto& [key, value] : series.fingerprint)
    out += "# " + key + "=" + value + "\n";
  out += "# max_norm_drift=" + format_double(series.max_norm_drift) + "\n";
  for (const auto& w : series.warnings) out += "# warning: " + w + "\n";

  out += "time,pz,pz_stderr,norm,e_spin,e_rest,e_total";
  for (const auto& [name, values] : series.extra_columns) out += "," + name;
  out += "\n";

  for (std::size_t i = 0; i < series.size(); ++i) {
    out += format_double(series.time[i]);
    out += ',';
    out += format_double(series.pz[i]);
    out += ',';
    out += format_double(series.pz_stderr[i]);
    out += ',';
    out += format_double(series.norm[i]);
    out += ',';
    out += format_double(series.e_spin[i]);
    out += ',';
    out += format_double(series.e_rest[i]);
    out += ',';
    out += format_double(series.e_total[i]);
    for (const auto& [name, values] : series.extra_columns) {
      out += ',';
      out += format_double(values[i]);
    }
    out += '\n';
  }
  return out;
}

void write_series_csv(const std::string& path, const ObservableSeries& series) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("write_series_csv: cannot open " + path);
  f << series_to_csv(series);
  if (!f) throw std::runtime_error("write_series_csv: write failed for " + path);
}

std::string series_to_json(const ObservableSeries& series) {
  nlohmann::json j;
  j["method"] = series.method;
  nlohmann::json meta = nlohmann::json::object();
  for (const auto& [key, value] : series.fingerprint) meta[key] = value;
  j["fingerprint"] = meta;
  j["warnings"] = series.warnings;
  j["max_norm_drift"] = series.max_norm_drift;
  j["data"]["time"] = series.time;
  j["data"]["pz"] = series.pz;
  j["data"]["pz_stderr"] = series.pz_stderr;
  j["data"]["norm"] = series.norm;
  j["data"]["e_spin"] = series.e_spin;
  j["data"]["e_rest"] = series.e_rest;
  j["data"]["e_total"] = series.e_total;
  for (const auto& [name, values] : series.extra_columns) j["data"][name] = values;
  return j.dump(2) + "\n";
}

void write_series_json(const std::string& path, const ObservableSeries& series) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("write_series_json: cannot open " + path);
  f << series_to_json(series);
  if (!f) throw std::runtime_error("write_series_json: write failed for " + path);
}

}  // namespace rabi::io
