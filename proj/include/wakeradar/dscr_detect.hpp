#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "wakeradar/dsp_core.hpp"
#include "wakeradar/types.hpp"
#include "wakeradar/wake_signature.hpp"

namespace wakeradar {

enum class TargetClass { Aircraft, Wake, Other, Noise };
std::string_view to_string(TargetClass cls);

/// Replaces the proprietary recognition stage with published discriminators.
struct DetectorConfig {
    double notch_half_width = 2.0;  // m/s
    double dscr_threshold = 8.0;    // dB
    double aircraft_min_speed = 15.0;
    double wake_speed_min = 2.0;
    double wake_speed_max = 12.0;
    int min_peaks_for_wake = 2;
    int wake_gap_tolerance = 3;  // bins
    double min_prominence = 0.05;
    double peak_floor_db = 8.0;  // peaks must clear the spectrum median by this much
    double wingspan = 34.32;     // m, for stage assignment
    int jem_min_lines = 3;
    std::optional<double> noise_floor;  // known noise power; else estimated per frame
};

void validate(const DetectorConfig& config);

struct Detection {
    std::int64_t frame_index = 0;
    std::int64_t bin_index = 0;
    double range_m = 0.0;
    TargetClass cls = TargetClass::Noise;
    double snr_db = 0.0;
    double dscr_db = 0.0;
    double dominant_velocity = 0.0;
    std::vector<DopplerPeak> doppler_peaks;
    std::optional<WakeStage> stage;
    std::optional<JemComb> jem;

    friend bool operator==(const Detection& a, const Detection& b);
};

/// Returned instead of -inf when the chosen cell is exactly zero.
inline constexpr double kDbFloor = -300.0;

/// 10 log10(F(D) / mean F) with the mean over all N cells, masked or not.
double dscr(const DopplerSpectrum& spectrum, std::size_t d_index);

/// Largest unmasked cell; ties go to the smaller |velocity|, then to the
/// negative side.
std::size_t select_dominant_doppler(const DopplerSpectrum& spectrum);

struct PeakOptions {
    double min_prominence = 0.05;  // fraction of the largest unmasked amplitude
    double floor_db = 8.0;         // over the median amplitude
};

/// Unmasked local maxima, strongest first.
std::vector<DopplerPeak> find_doppler_peaks(const DopplerSpectrum& spectrum, const PeakOptions& options = {});

/// Classifies one bin; `spectrum` is notched internally with the configured width.
Detection classify_bin(const DopplerSpectrum& spectrum, const DetectorConfig& config,
                       const std::optional<JemComb>& jem, double noise_power);

struct ScanResult {
    std::int64_t frame_index = 0;
    std::vector<Detection> detections;  // one per range bin, in bin order
    std::optional<std::int64_t> aircraft_bin;
    BinInterval wake_extent;  // empty when there is none
    double noise_power = 0.0;
    double range_resolution = 0.0;
};

/// Raw power rescaled to what it would be if the spectral density outside the
/// clutter notch filled the whole band; a clutter-free noise estimate.
double out_of_notch_power(const DopplerSpectrum& spectrum, double half_width);

/// Noise power is the configured floor, else the median over bins of
/// out_of_notch_power.
ScanResult scan_frame(const RangeDopplerMap& map, const DetectorConfig& config, unsigned threads = 1);

/// Longest gap-tolerant run of Wake bins strictly below `aircraft_bin`.
BinInterval wake_extent(const std::vector<Detection>& detections, std::int64_t aircraft_bin,
                        int gap_tolerance);

}  // namespace wakeradar
