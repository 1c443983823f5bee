#pragma once

#include <cstdint>
#include <random>

namespace dualsrc {

// Seeded single-owner uniform stream. The mapping from engine output to
// [0, 1) is fixed here rather than via std::uniform_real_distribution so
// draws are identical across standard library implementations.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  std::uint64_t bits() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace dualsrc
