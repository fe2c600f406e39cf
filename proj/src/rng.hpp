#pragma once

#include <array>
#include <cstdint>

namespace wavekin {

/// Philox4x32-10 counter-based generator. Outputs are pure functions of
/// (key, counter), so ensemble members own disjoint streams identified by
/// index and draws are reproducible regardless of scheduling.
struct Philox4x32 {
  static std::array<uint32_t, 4> block(uint32_t key0, uint32_t key1,
                                       const std::array<uint32_t, 4>& counter);
};

enum class StreamPurpose : uint32_t {
  Init = 1,
  Noise = 2,
  Mixture = 3,
  Scratch = 4,
};

/// One member's stream for one purpose. Stateless: every draw is addressed
/// by a 64-bit index.
class RngStream {
 public:
  RngStream(uint64_t seed, uint32_t member, StreamPurpose purpose)
      : key0_(static_cast<uint32_t>(seed)),
        key1_(static_cast<uint32_t>(seed >> 32)),
        member_(member),
        purpose_(static_cast<uint32_t>(purpose)) {}

  uint64_t bits64(uint64_t idx) const;

  /// Two independent standard normals per index (Box-Muller).
  void normal_pair(uint64_t idx, double& z0, double& z1) const;

  double uniform01(uint64_t idx) const;

  /// Uniform integer in [0, n).
  uint32_t uniform_index(uint64_t idx, uint32_t n) const;

 private:
  std::array<uint32_t, 4> raw(uint64_t idx) const;

  uint32_t key0_, key1_, member_, purpose_;
};

}  // namespace wavekin
