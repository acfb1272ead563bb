#include "rabi/thermal.hpp"

#include <cmath>

namespace rabi {

double partition_function(double beta, const ModelParams& params) {
  params.validate();
  if (!(beta > 0.0)) throw std::invalid_argument("partition_function: beta must be > 0");
  // 1 / (1 - exp(-x)) via expm1 to keep accuracy for small x.
  return 1.0 / (-std::expm1(-beta * params.hbar * params.omega));
}

double boltzmann_weight(int n, double beta, const ModelParams& params) {
  if (n < 0) throw std::invalid_argument("boltzmann_weight: n must be >= 0");
  if (!(beta > 0.0)) throw std::invalid_argument("boltzmann_weight: beta must be > 0");
  const double x = beta * params.hbar * params.omega;
  return std::exp(-x * n) * (-std::expm1(-x));
}

double thermal_occupation(double beta, const ModelParams& params) {
  if (!(beta > 0.0)) throw std::invalid_argument("thermal_occupation: beta must be > 0");
  return 1.0 / std::expm1(beta * params.hbar * params.omega);
}

std::vector<double> truncated_boltzmann_weights(double beta, const ModelParams& params,
                                                int count) {
  if (count < 1) throw std::invalid_argument("truncated_boltzmann_weights: count must be >= 1");
  if (!(beta > 0.0))
    throw std::invalid_argument("truncated_boltzmann_weights: beta must be > 0");
  const double x = beta * params.hbar * params.omega;
  std::vector<double> w(static_cast<std::size_t>(count));
  double sum = 0.0;
  for (int n = 0; n < count; ++n) {
    w[static_cast<std::size_t>(n)] = std::exp(-x * n);
    sum += w[static_cast<std::size_t>(n)];
  }
  for (auto& wi : w) wi /= sum;
  // Absorb the remaining rounding into the dominant weight so the truncated
  // mixture has unit trace exactly.
  double total = 0.0;
  for (const double wi : w) total += wi;
  w[0] += 1.0 - total;
  return w;
}

}  // namespace rabi
