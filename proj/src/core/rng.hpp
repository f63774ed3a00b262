// Deterministic random streams. All randomness in the library flows through
// RandomStream so that a given seed reproduces bit-identical results on any
// platform: mt19937_64 output is fully specified by the standard, and the
// uniform/gaussian transforms below avoid the implementation-defined
// std::*_distribution adapters.
#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <initializer_list>
#include <numbers>
#include <random>

namespace beamsweep {

constexpr uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Hashes (seed, index, index, ...) into an independent stream seed.
inline uint64_t derive_seed(std::initializer_list<uint64_t> parts) {
  uint64_t h = 0x243f6a8885a308d3ULL;
  for (uint64_t p : parts) h = splitmix64(h ^ p);
  return h;
}

class RandomStream {
 public:
  explicit RandomStream(uint64_t seed) : engine_(seed) {}

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Uniform on (0, 1]; safe as a log() argument.
  double uniform_open() {
    return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53;
  }

  double uniform_range(double lo, double hi) {
    return lo + (hi - lo) * uniform();
  }

  bool coin_flip() { return (engine_() >> 63) != 0; }

  // Standard normal pair via Box-Muller.
  std::complex<double> gaussian_pair() {
    const double u1 = uniform_open();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double phi = 2.0 * std::numbers::pi * u2;
    return {r * std::cos(phi), r * std::sin(phi)};
  }

  // Circularly symmetric complex gaussian with E|n|^2 = stddev^2.
  std::complex<double> complex_gaussian(double stddev) {
    return gaussian_pair() * (stddev * std::numbers::sqrt2 / 2.0);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace beamsweep
