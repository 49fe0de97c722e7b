#pragma once

#include <cstdint>
#include <random>

namespace pathid {

using Engine = std::mt19937_64;

// Independent, reproducible engine for (seed, stream). Distinct streams of the
// same seed are used for unrelated noise sources so that toggling one source
// does not shift the others.
inline Engine make_engine(std::uint64_t seed, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                      0x70617468u};
    return Engine(seq);
}

}  // namespace pathid
