#include "wakeradar/tracker.hpp"

#include <cmath>
#include <limits>

#include "wakeradar/errors.hpp"

namespace wakeradar {

std::string_view to_string(TrackStatus status) {
    switch (status) {
        case TrackStatus::Tentative: return "Tentative";
        case TrackStatus::Confirmed: return "Confirmed";
        case TrackStatus::Coasting: return "Coasting";
        case TrackStatus::Dropped: return "Dropped";
    }
    return "?";
}

void validate(const TrackerConfig& config) {
    if (config.gate < 0) throw DomainError("gate must be non-negative");
    if (config.coast_limit < 0) throw DomainError("coast_limit must be non-negative");
    if (config.confirm_hits < 1) throw DomainError("confirm_hits must be at least 1");
    if (config.wake_gap_tolerance < 0) throw DomainError("wake_gap_tolerance must be non-negative");
    if (!(config.max_speed > 0.0)) throw DomainError("max_speed must be positive");
}

Track make_track(const RadarConfig& radar, std::optional<double> velocity_hint) {
    validate(radar);
    Track track;
    track.range_resolution = range_resolution(radar.bandwidth);
    track.unambiguous_velocity = unambiguous_velocity(radar);
    track.velocity_hint = velocity_hint;
    return track;
}

std::optional<std::size_t> last_association(const Track& track) {
    for (std::size_t i = track.frames.size(); i-- > 0;) {
        if (track.frames[i].aircraft_bin) return i;
    }
    return std::nullopt;
}

std::int64_t predict(const Track& track, double dt) {
    const auto last = last_association(track);
    if (!last) throw NoStateError("track has no aircraft association to predict from");
    const TrackFrame& f = track.frames[*last];
    if (!(track.range_resolution > 0.0)) return *f.aircraft_bin;
    // Approaching targets (positive velocity) move to lower range bins.
    const double shift = -f.aircraft_velocity * dt / track.range_resolution;
    return *f.aircraft_bin + static_cast<std::int64_t>(std::llround(shift));
}

double unfold_velocity(const Track& track, double folded, std::int64_t bin, double timestamp,
                       const TrackerConfig& config) {
    // Reference: the association two back if available, else the previous one.
    std::vector<std::size_t> history;
    for (std::size_t i = track.frames.size(); i-- > 0 && history.size() < 2;) {
        if (track.frames[i].aircraft_bin) history.push_back(i);
    }
    const double span = 2.0 * track.unambiguous_velocity;
    if (history.empty() || !(span > 0.0)) {
        if (track.velocity_hint) return *track.velocity_hint;
        return folded;
    }
    const TrackFrame& ref = track.frames[history.back()];
    const double elapsed = timestamp - ref.timestamp;
    if (!(elapsed > 0.0)) return folded;
    const double observed = -static_cast<double>(bin - *ref.aircraft_bin) * track.range_resolution / elapsed;
    const auto k_max = static_cast<int>(std::ceil(config.max_speed / span));
    double best = folded;
    double best_err = std::numeric_limits<double>::infinity();
    for (int k = -k_max; k <= k_max; ++k) {
        const double candidate = folded + k * span;
        if (std::abs(candidate) > config.max_speed + span) continue;
        const double err = std::abs(candidate - observed);
        if (err < best_err) {
            best_err = err;
            best = candidate;
        }
    }
    return best;
}

Track update(Track track, const ScanResult& frame, double dt, const TrackerConfig& config) {
    if (!(dt > 0.0)) throw DomainError("update interval must be positive");
    validate(config);
    if (track.status == TrackStatus::Dropped) return track;

    TrackFrame entry;
    entry.frame_index = frame.frame_index;
    entry.timestamp = track.frames.empty() ? 0.0 : track.frames.back().timestamp + dt;
    if (frame.range_resolution > 0.0) track.range_resolution = frame.range_resolution;

    const auto last = last_association(track);
    std::optional<std::int64_t> predicted;
    if (last) predicted = predict(track, entry.timestamp - track.frames[*last].timestamp);

    // Nearest aircraft detection to the prediction; higher DSCR breaks ties.
    const Detection* chosen = nullptr;
    std::int64_t chosen_dist = 0;
    for (const auto& det : frame.detections) {
        if (det.cls != TargetClass::Aircraft) continue;
        if (!predicted) {
            if (frame.aircraft_bin && det.bin_index == *frame.aircraft_bin) chosen = &det;
            continue;
        }
        const std::int64_t dist = std::abs(det.bin_index - *predicted);
        if (dist > config.gate) continue;
        if (!chosen || dist < chosen_dist || (dist == chosen_dist && det.dscr_db > chosen->dscr_db)) {
            chosen = &det;
            chosen_dist = dist;
        }
    }

    if (chosen) {
        entry.aircraft_bin = chosen->bin_index;
        entry.aircraft_velocity =
            unfold_velocity(track, chosen->dominant_velocity, chosen->bin_index, entry.timestamp, config);
        const BinInterval extent = wake_extent(frame.detections, chosen->bin_index, config.wake_gap_tolerance);
        if (!extent.empty() && extent.last < chosen->bin_index) {
            entry.wake_extent = extent;
            entry.wake_length_m = static_cast<double>(extent.size()) * track.range_resolution;
        }
        const bool resuming = track.status == TrackStatus::Coasting && track.ever_confirmed;
        ++track.consecutive_hits;
        track.consecutive_misses = 0;
        if (track.consecutive_hits >= config.confirm_hits || resuming) {
            track.status = TrackStatus::Confirmed;
            track.ever_confirmed = true;
        } else {
            track.status = TrackStatus::Tentative;
        }
    } else if (last) {
        track.consecutive_hits = 0;
        ++track.consecutive_misses;
        track.status = track.consecutive_misses > config.coast_limit ? TrackStatus::Dropped : TrackStatus::Coasting;
    }
    track.frames.push_back(entry);
    return track;
}

std::vector<Detection> ahead_report(const Track& track, const ScanResult& frame) {
    std::vector<Detection> out;
    if (track.frames.empty()) return out;
    const TrackFrame& current = track.frames.back();
    if (current.frame_index != frame.frame_index || !current.aircraft_bin) return out;
    for (const auto& det : frame.detections) {
        if ((det.cls == TargetClass::Wake || det.cls == TargetClass::Other) && det.bin_index > *current.aircraft_bin) {
            out.push_back(det);
        }
    }
    return out;
}

}  // namespace wakeradar
