#pragma once

#include <complex>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace skyris {

using Rng = std::mt19937_64;

// Seed splitting. Every random stream in a run is identified by a path of
// integers below the master seed, e.g. {Stream::episode, seed_index, episode}.
// The path is folded through SplitMix64; a stream's seed never depends on how
// many numbers another stream consumed.
enum class Stream : std::uint64_t {
  user_layout = 1,
  episode = 2,
  fading = 3,
  policy_init = 4,
  exploration = 5,
  replay = 6,
  worker = 7,
  evaluation = 8,
};

std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path);

inline std::uint64_t tag(Stream s) { return static_cast<std::uint64_t>(s); }

// Zero-mean circularly-symmetric complex Gaussian with E|z|^2 = variance.
std::complex<double> cscg(Rng& rng, double variance);
double standard_normal(Rng& rng);
double uniform01(Rng& rng);

}  // namespace skyris
