#pragma once

#include "irs_swipt/types.hpp"

#include <cstdint>
#include <random>

namespace irs_swipt {

// Substream tags. A (seed, tag, index) triple identifies one independent
// stream, so adding a user or an IRS never shifts the draws of another entity.
enum class StreamTag : std::uint32_t {
  IuDirect = 1,
  IuReflected = 2,
  EuDirect = 3,
  EuReflected = 4,
  ApIrs = 5,
  IuPlacement = 6,
  EuPlacement = 7,
  AuxInit = 8,
};

class Rng {
 public:
  Rng(std::uint64_t seed, StreamTag tag, std::uint64_t index = 0) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu),
                      static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(tag),
                      static_cast<std::uint32_t>(index & 0xffffffffu),
                      static_cast<std::uint32_t>(index >> 32)};
    engine_.seed(seq);
  }

  /// Standard circularly-symmetric complex Gaussian, E|z|^2 = 1.
  cd complex_normal() {
    static const double kScale = std::sqrt(0.5);
    const double re = normal_(engine_);
    const double im = normal_(engine_);
    return {kScale * re, kScale * im};
  }

  double uniform() { return uniform_(engine_); }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

}  // namespace irs_swipt
