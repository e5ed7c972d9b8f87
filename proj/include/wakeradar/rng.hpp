#pragma once

#include <cstdint>
#include <random>

namespace wakeradar {

/// Purpose tags that keep the random substreams of one (frame, bin) cell apart.
enum class Stream : std::uint64_t {
    Noise = 1,
    Clutter = 2,
    Aircraft = 3,
    Wake = 4,
    Ghost = 5,
};

/// SplitMix64 finaliser; a bijective 64-bit mixer.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Counter-based key for one substream. Depends only on its arguments, so
/// any evaluation order produces the same stream.
std::uint64_t substream_key(std::uint64_t seed, std::uint64_t frame, std::uint64_t bin,
                            Stream stream, std::uint64_t index = 0) noexcept;

/// Engine seeded from a substream key.
std::mt19937_64 make_engine(std::uint64_t key);

}  // namespace wakeradar
