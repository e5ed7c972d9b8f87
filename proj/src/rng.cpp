#include "wakeradar/rng.hpp"

namespace wakeradar {

std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t substream_key(std::uint64_t seed, std::uint64_t frame, std::uint64_t bin,
                            Stream stream, std::uint64_t index) noexcept {
    std::uint64_t key = mix64(seed);
    key = mix64(key ^ frame);
    key = mix64(key ^ bin);
    key = mix64(key ^ static_cast<std::uint64_t>(stream));
    return mix64(key ^ index);
}

std::mt19937_64 make_engine(std::uint64_t key) {
    std::seed_seq seq{static_cast<std::uint32_t>(key), static_cast<std::uint32_t>(key >> 32)};
    return std::mt19937_64(seq);
}

}  // namespace wakeradar
