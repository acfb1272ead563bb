// rng.hpp — Seeded substreams with portable uniform/Gaussian draws

#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace rabi::rng {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// Collapses (seed, purpose, stream index) into one engine seed.  Streams with
// distinct indices are statistically independent, so ensemble members can be
// drawn concurrently in any order without changing the result.
inline std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t purpose, std::uint64_t index) {
  std::uint64_t s = seed;
  std::uint64_t a = splitmix64(s);
  s ^= purpose * 0x9e3779b97f4a7c15ull;
  std::uint64_t b = splitmix64(s);
  s ^= index + 0x632be59bd9b4e019ull;
  std::uint64_t c = splitmix64(s);
  return a ^ (b + 0x9e3779b97f4a7c15ull) ^ (c << 1);
}

inline constexpr std::uint64_t purpose_signs = 0x5349474eull;     // thermal sign sequences
inline constexpr std::uint64_t purpose_pfunction = 0x5046554eull; // phase-space sampling

// One deterministic random stream.  Gaussian draws use Box-Muller on uniform
// doubles rather than std::normal_distribution, whose output is
// implementation-defined.
class Stream {
 public:
  Stream(std::uint64_t seed, std::uint64_t purpose, std::uint64_t index)
      : engine_(stream_seed(seed, purpose, index)) {}

  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Uniform on {+1, -1}.
  int sign() { return (engine_() >> 63) ? +1 : -1; }

  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform01();
    while (u1 <= 0.0) u1 = uniform01();
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * 3.14159265358979323846 * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace rabi::rng
