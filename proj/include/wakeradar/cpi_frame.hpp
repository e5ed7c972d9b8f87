#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace wakeradar {

/// Complex IQ cube of one coherent processing interval, stored bin-major:
/// sample (bin, pulse) lives at iq[bin * n_pulses + pulse].
struct CpiFrame {
    std::uint32_t n_bins = 0;
    std::uint32_t n_pulses = 0;
    std::vector<std::complex<float>> iq;
    std::int64_t frame_index = 0;
    double timestamp = 0.0;  // s
    bool aircraft_off_window = false;

    CpiFrame() = default;
    CpiFrame(std::uint32_t bins, std::uint32_t pulses)
        : n_bins(bins), n_pulses(pulses), iq(static_cast<std::size_t>(bins) * pulses) {}

    std::span<std::complex<float>> row(std::size_t bin) {
        return {iq.data() + bin * n_pulses, n_pulses};
    }
    std::span<const std::complex<float>> row(std::size_t bin) const {
        return {iq.data() + bin * n_pulses, n_pulses};
    }
};

}  // namespace wakeradar
