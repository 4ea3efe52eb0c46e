#pragma once

#include <complex>
#include <cstdint>
#include <random>

namespace starcov {

// Deterministic substream scheme: every (seed, stream) pair maps to an
// independent generator state via SplitMix64 mixing, so Monte-Carlo trials can
// be partitioned across workers without the result depending on worker count.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

class Rng {
 public:
  Rng(std::uint64_t seed, std::uint64_t stream)
      : engine_(splitmix64(splitmix64(seed) ^ splitmix64(~stream))) {}

  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(engine_);
  }

  double gaussian() { return normal_(engine_); }

  // Circularly symmetric complex Gaussian with the given variance.
  std::complex<double> cgaussian(double variance = 1.0) {
    const double s = std::sqrt(variance * 0.5);
    return {s * normal_(engine_), s * normal_(engine_)};
  }

  double exponential(double mean) {
    return std::exponential_distribution<double>(1.0 / mean)(engine_);
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace starcov
