#pragma once

#include <complex>
#include <cstdint>
#include <random>

// Substream derivation: every random stream in the project is an
// mt19937_64 seeded with a splitmix64 hash chain over
// (master seed, purpose tag, run index, ...). Streams with distinct index
// tuples are treated as independent; runs are therefore reproducible and
// schedulable in any order across workers.

namespace fadediff {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t mix_seed(std::uint64_t seed) { return splitmix64(seed); }

template <typename... Rest>
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t next, Rest... rest) {
  return mix_seed(splitmix64(seed ^ splitmix64(next)), rest...);
}

// Purpose tags for per-run substreams. Keeping the data stream separate
// from the channel streams gives common random numbers across modes that
// share a run index.
enum StreamTag : std::uint64_t {
  kStreamData = 0x64617461,     // regressors + measurement noise
  kStreamChannel = 0x6368616e,  // fading coefficients
  kStreamPilot = 0x70696c74,    // pilot observation noise
  kStreamLink = 0x6c696e6b,     // payload link noise
  kStreamNetwork = 0x6e657477,  // network generation
  kStreamTheory = 0x7468656f,   // Monte Carlo moment estimation
};

class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : eng_(seed) {}

  double gauss() { return normal_(eng_); }
  double uniform() { return uniform_(eng_); }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform_(eng_); }

  // Circular complex Gaussian with E|z|^2 = variance.
  std::complex<double> cgauss(double variance) {
    const double s = std::sqrt(variance * 0.5);
    const double re = s * normal_(eng_);
    const double im = s * normal_(eng_);
    return {re, im};
  }

  std::mt19937_64& engine() { return eng_; }

 private:
  std::mt19937_64 eng_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

}  // namespace fadediff
