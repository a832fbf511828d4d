// Seeded random streams. Every stochastic routine takes an explicit 64-bit
// seed; replicate r of a batch run uses derive_seed(seed, r), so results do not
// depend on which worker thread runs which replicate.
#pragma once

#include <cstdint>
#include <random>

namespace glyco {

/// SplitMix64 finaliser applied to (seed, stream). Distinct streams give
/// decorrelated 64-bit seeds.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

/// mt19937_64 with a platform-independent mapping to doubles (the standard
/// distributions are implementation-defined, which would break bit-for-bit
/// reproducibility across toolchains).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(derive_seed(seed, 0)) {}

  /// Uniform on the open interval (0, 1).
  double uniform() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Exp(rate) variate.
  double exponential(double rate);

  /// Uniform integer on [0, bound).
  std::uint64_t below(std::uint64_t bound);

  std::uint64_t next() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace glyco
