#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "wakeradar/dscr_detect.hpp"
#include "wakeradar/radar_params.hpp"
#include "wakeradar/types.hpp"

namespace wakeradar {

enum class TrackStatus { Tentative, Confirmed, Coasting, Dropped };
std::string_view to_string(TrackStatus status);

struct TrackFrame {
    std::int64_t frame_index = 0;
    double timestamp = 0.0;  // s
    std::optional<std::int64_t> aircraft_bin;
    double aircraft_velocity = 0.0;  // unfolded, positive = approaching
    BinInterval wake_extent;
    double wake_length_m = 0.0;

    friend bool operator==(const TrackFrame&, const TrackFrame&) = default;
};

struct TrackerConfig {
    int gate = 5;         // bins
    int coast_limit = 3;  // consecutive misses tolerated before Dropped
    int confirm_hits = 3;
    int wake_gap_tolerance = 3;
    double max_speed = 400.0;  // m/s, bound on unfolding candidates
};

void validate(const TrackerConfig& config);

struct Track {
    std::vector<TrackFrame> frames;
    TrackStatus status = TrackStatus::Tentative;
    double range_resolution = 0.0;
    double unambiguous_velocity = 0.0;
    std::optional<double> velocity_hint;  // known true radial velocity, if any
    int consecutive_hits = 0;
    int consecutive_misses = 0;
    bool ever_confirmed = false;

    friend bool operator==(const Track&, const Track&) = default;
};

Track make_track(const RadarConfig& radar, std::optional<double> velocity_hint = std::nullopt);

/// Index into `frames` of the latest frame with an aircraft association.
std::optional<std::size_t> last_association(const Track& track);

/// Constant-velocity prediction `dt` seconds after the last association.
/// Throws NoStateError when nothing has been associated yet.
std::int64_t predict(const Track& track, double dt);

/// Picks v + 2k v_ua closest to the observed bin drift, or the hint/folded
/// value when there is no drift history.
double unfold_velocity(const Track& track, double folded_velocity, std::int64_t bin, double timestamp,
                       const TrackerConfig& config = {});

/// Advances the track by one frame `dt` seconds after the previous one.
Track update(Track track, const ScanResult& frame, double dt, const TrackerConfig& config = {});

/// Wake/Other detections strictly ahead of this frame's associated aircraft.
std::vector<Detection> ahead_report(const Track& track, const ScanResult& frame);

}  // namespace wakeradar
