#pragma once

#include <optional>
#include <span>
#include <vector>

#include "wakeradar/dsp_core.hpp"
#include "wakeradar/types.hpp"

namespace wakeradar {

/// Wake age with the distance/wingspan ratio it was derived from.
struct StageAssessment {
    WakeStage stage = WakeStage::Young;
    double r_wv = 0.0;
};

/// Stage from distance behind the aircraft `x` and wingspan `b`. Boundary
/// ratios (1, 10, 100) belong to the earlier stage.
StageAssessment stage_from_distance(double x, double b);

struct SlopeOptions {
    double dead_band = 0.5;         // full-CPI velocity cells per CPI
    double notch_half_width = 2.0;  // m/s
    double max_slope = 120.0;       // full-CPI cells per CPI, search limit
    double grid_step = 0.25;        // spectrogram cells of total drift between candidates
    double floor_db = 6.0;          // over the slice median, for signal presence
    double mixed_fraction = 0.2;    // weaker/stronger drift gain ratio that means "mixed"
};

struct SlopeResult {
    SlopeSign sign = SlopeSign::Mixed;
    double slope = 0.0;          // full-CPI velocity cells per CPI
    double positive_gain = 0.0;  // concentration gain from de-drifting rising ridges
    double negative_gain = 0.0;  // same for falling ridges
};

/// Drift direction of the spectrogram ridges. Each slice is shifted back by a
/// candidate drift and the drift that best concentrates the time-averaged
/// spectrum wins. Comparable gains in both directions mean mixed. Throws
/// InsufficientSignalError when fewer than half the slices rise above noise.
SlopeResult slope_sign_classify(const Spectrogram& spectrogram, const SlopeOptions& options = {});

/// Same spectrogram with the slice order reversed.
Spectrogram time_reversed(const Spectrogram& spectrogram);

struct JemComb {
    double body_velocity = 0.0;
    double stage1_spacing = 0.0;
    std::optional<double> stage2_spacing;
    std::optional<double> stage2_offset;  // anchor relative to body, in (-s2/2, s2/2]
    std::vector<double> stage1_lines;
    std::vector<double> stage2_lines;
    double confidence = 0.0;
};

struct JemOptions {
    int min_lines = 3;
    double min_spacing = 5.0;   // m/s
    double max_spacing = 30.0;  // m/s
    double tolerance_cells = 0.5;
    std::size_t max_peaks = 40;
    double min_prominence = 0.01;
    double floor_db = 8.0;
    double notch_half_width = 2.0;
    std::size_t stage2_anchor_candidates = 6;
};

/// Fits up to two arithmetic Doppler lattices (blade stages) around the
/// strongest line. Empty when fewer than `min_lines` peaks fit stage 1.
std::optional<JemComb> jem_comb_estimate(const DopplerSpectrum& spectrum, const JemOptions& options);
std::optional<JemComb> jem_comb_estimate(const DopplerSpectrum& spectrum, int min_lines = 3);

struct DopplerGroupStats {
    std::size_t n_peaks = 0;
    double mean_speed = 0.0;         // mean |v|
    double peak_spread = 0.0;        // standard deviation of v
    double negative_fraction = 0.0;  // by count
    double magnitude_level = 0.0;    // mean amplitude
};

DopplerGroupStats doppler_group_stats(std::span<const DopplerPeak> peaks);

}  // namespace wakeradar
