#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>

namespace wakeradar {

/// Inclusive range-bin interval [first, last].
struct BinInterval {
    std::int64_t first = 0;
    std::int64_t last = -1;

    bool empty() const { return last < first; }
    std::int64_t size() const { return empty() ? 0 : last - first + 1; }
    bool contains(std::int64_t bin) const { return bin >= first && bin <= last; }
    friend bool operator==(const BinInterval&, const BinInterval&) = default;
};

/// Wake age regions indexed by distance behind the aircraft over wingspan.
enum class WakeStage { Young, Mature, Old, Decaying };

/// Sign of the time/Doppler drift of spectrogram ridges.
enum class SlopeSign { Positive, Mixed, Negative };

std::string_view to_string(WakeStage stage);
std::string_view to_string(SlopeSign sign);
std::optional<WakeStage> parse_wake_stage(std::string_view text);
std::optional<SlopeSign> parse_slope_sign(std::string_view text);

/// Young drifts up, Mature mixes both, Old and Decaying drift down.
SlopeSign default_slope_for(WakeStage stage);

}  // namespace wakeradar

namespace wakeradar {

/// One local maximum of a Doppler spectrum.
struct DopplerPeak {
    std::size_t index = 0;  // cell on the velocity axis
    double velocity = 0.0;  // m/s, refined between cells
    double amplitude = 0.0;
};

}  // namespace wakeradar
