// io.hpp — Plot-ready serialization of observable series

#pragma once

#include <string>

#include "rabi/observables.hpp"

namespace rabi::io {

// Doubles rendered with 17 significant digits (exact round trip).
std::string format_double(double x);

// Comment lines ('#') carry the fingerprint and warnings, then a fixed header
//   time,pz,pz_stderr,norm,e_spin,e_rest,e_total
// followed by extra diagnostic columns, one row per sample.
void write_series_csv(const std::string& path, const ObservableSeries& series);
std::string series_to_csv(const ObservableSeries& series);

// Same values mirrored into JSON.
void write_series_json(const std::string& path, const ObservableSeries& series);
std::string series_to_json(const ObservableSeries& series);

}  // namespace rabi::io
