#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include <boost/random/normal_distribution.hpp>

namespace klandau {

/// SplitMix64 finalizer; used to derive independent stream seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed of ensemble member `run`: master seed hashed with the run index.
/// Runs can execute in any order, on any worker, with identical streams.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t run) {
  return splitmix64(splitmix64(master) ^ splitmix64(run + 0x632be59bd9b4e019ULL));
}

/// Per-trajectory random stream. Not shared between threads.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double normal() { return normal_(engine_); }
  /// Uniform on [0, 1).
  double uniform() { return std::generate_canonical<double, 53>(engine_); }
  /// Uniform on (0, 1], safe for log().
  double uniform_pos() { return 1.0 - uniform(); }
  double exponential(double rate) { return -std::log(uniform_pos()) / rate; }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  boost::random::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace klandau
