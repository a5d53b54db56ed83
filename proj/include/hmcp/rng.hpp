#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace hmcp {

/// Counter-based stream derivation: folds each label into the master seed
/// with the SplitMix64 finalizer. Identical (master, labels) always give the
/// same stream seed, independent of the order tasks are executed in.
std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> labels);

/// Thin wrapper over mt19937_64 with the draws the simulators need. The
/// conversions are written out here so streams are identical across
/// standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t bits() { return engine_(); }

  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform on (0, 1].
  double uniform_open() { return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53; }

  /// Exponential with the given rate (> 0).
  double exponential(double rate) { return -std::log(uniform_open()) / rate; }

  /// Uniform integer on [0, n), n > 0. Lemire's multiply-shift with rejection.
  std::uint64_t below(std::uint64_t n);

  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace hmcp
