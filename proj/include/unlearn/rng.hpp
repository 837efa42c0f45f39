#pragma once

#include <cstdint>
#include <string_view>

namespace unlearn {

/// Deterministic 64-bit generator (splitmix64 update). All randomness in the
/// library flows through this class so that a given seed produces identical
/// bytes on every platform and under any trial scheduling; std:: distributions
/// are avoided because their output is implementation-defined.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64();

  /// Uniform double in [0, 1).
  double next_uniform();

  /// Standard normal via Box-Muller; consumes two uniforms per pair.
  double next_normal();

 private:
  std::uint64_t state_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);

/// Derives the seed of an independent substream from a base seed, a purpose
/// label ("x", "noise", ...) and an optional index (trial number, attempt).
std::uint64_t stream_seed(std::uint64_t base, std::string_view purpose);
std::uint64_t stream_seed(std::uint64_t base, std::string_view purpose,
                          std::uint64_t index);

}  // namespace unlearn
