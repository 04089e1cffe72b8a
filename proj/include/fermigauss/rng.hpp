#pragma once

#include <cstdint>
#include <random>

namespace fermigauss {

/// A (seed, stream) pair. Identical pairs reproduce identical draws on one build.
struct RngSpec {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;

  RngSpec substream(std::uint64_t offset) const { return RngSpec{seed, stream + offset}; }
};

using Engine = std::mt19937_64;

inline Engine make_engine(const RngSpec& spec) {
  std::seed_seq seq{static_cast<std::uint32_t>(spec.seed), static_cast<std::uint32_t>(spec.seed >> 32),
                    static_cast<std::uint32_t>(spec.stream),
                    static_cast<std::uint32_t>(spec.stream >> 32), 0x9e3779b9u};
  return Engine(seq);
}

}  // namespace fermigauss
