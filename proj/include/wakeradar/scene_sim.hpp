#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <vector>

#include "wakeradar/cpi_frame.hpp"
#include "wakeradar/radar_params.hpp"
#include "wakeradar/types.hpp"

namespace wakeradar {

struct JemStage1 {
    double line_spacing = 14.4;   // m/s
    int n_lines_each_side = 6;
    double relative_amplitude = 0.5;
};

/// Second blade stage. Uses the stage-1 line count on each side.
struct JemStage2 {
    double line_spacing = 14.4;   // m/s
    double series_offset = 2.9;   // m/s, anchor relative to the body line
    double relative_amplitude = 0.25;
};

struct AircraftSpec {
    std::int64_t range_bin = 286;
    double radial_velocity_true = -140.1;  // m/s, negative = receding
    double snr_target = 52.35;             // dB
    JemStage1 jem_stage1;
    JemStage2 jem_stage2;
    double wingspan = 34.32;  // m
};

struct WakeSegmentSpec {
    BinInterval bins;
    WakeStage stage = WakeStage::Mature;
    double circulation = 240.0;  // m^2/s
    double core_radius = 3.0;    // m
    int n_scatterers = 8;
    double amplitude_level = 1.0;  // signal power per bin relative to the noise floor (linear)
    std::optional<SlopeSign> slope_sign;  // empty = derived from stage
    double intermittency = 0.3;  // probability a scatterer is silent in a sub-interval
    double drift_min = 40.0;     // Doppler drift over one CPI, in velocity-resolution cells
    double drift_max = 60.0;
    double linewidth = 0.0;      // m/s FWHM of each line from turbulent phase diffusion

    SlopeSign resolved_slope() const { return slope_sign.value_or(default_slope_for(stage)); }
};

struct ClutterSpec {
    double half_width = 1.78;  // m/s
    double power = -3.0;       // dB relative to the noise floor
    int n_lines = 3;
};

struct Scenario {
    RadarConfig radar;
    std::optional<AircraftSpec> aircraft;
    std::vector<WakeSegmentSpec> wake_segments;
    std::vector<WakeSegmentSpec> ghost_segments;
    ClutterSpec clutter;
    double noise_floor = 1.0;
    std::uint32_t n_frames = 1;
    double frame_interval = 0.5;  // s
    std::uint64_t seed = 0;
    double ghost_velocity_cap = 4.0;  // m/s
};

void validate(const AircraftSpec& spec);
void validate(const WakeSegmentSpec& spec);
/// Checks every invariant, including wake-behind / ghost-ahead geometry at frame 0.
void validate(const Scenario& scenario);

/// Lamb-Oseen swirl speed Gamma/(2 pi r) * (1 - exp(-r^2/rc^2)); 0 at the axis.
double lamb_oseen_tangential(double r, double circulation, double core_radius);
/// Radius of the speed maximum, in units of the core radius.
inline constexpr double kLambOseenPeakRadius = 1.1209;
double lamb_oseen_peak_speed(double circulation, double core_radius);

/// Number of gating sub-intervals per CPI.
inline constexpr int kGateSlots = 8;

struct PulseRange {
    std::uint32_t begin = 0;  // first pulse
    std::uint32_t end = 0;    // one past the last pulse
    friend bool operator==(const PulseRange&, const PulseRange&) = default;
};

/// One scattering layer of a wake cell.
struct ScattererLine {
    double velocity = 0.0;   // m/s at mid-CPI
    double amplitude = 0.0;  // relative
    double drift = 0.0;      // m/s change from first to last pulse
    double phase = 0.0;      // rad
    std::uint32_t active_mask = 0;  // bit j = active in gate slot j
    double linewidth = 0.0;         // m/s FWHM (Lorentzian)
    std::uint64_t jitter_key = 0;   // seeds the phase random walk
    std::vector<PulseRange> active_intervals;
};

std::vector<ScattererLine> wake_doppler_population(const WakeSegmentSpec& spec,
                                                   const RadarConfig& config, std::uint64_t seed);

/// Coherent sum of the lines with their drifts and gates, unnormalised.
std::vector<std::complex<double>> scatterer_series(const std::vector<ScattererLine>& lines,
                                                   const RadarConfig& config);

/// Body line plus both JEM combs, scaled so the mean sample power equals
/// `signal_power` exactly.
std::vector<std::complex<double>> aircraft_pulse_series(const AircraftSpec& spec,
                                                        const RadarConfig& config,
                                                        double signal_power,
                                                        std::uint64_t seed = 0);

/// Velocities of every aircraft line (body first), folded into [-v_ua, v_ua).
struct AircraftLines {
    double body = 0.0;
    std::vector<double> stage1;
    std::vector<double> stage2;
};
AircraftLines aircraft_line_velocities(const AircraftSpec& spec, const RadarConfig& config);

/// Where everything sits in a given frame.
struct FrameGeometry {
    std::optional<std::int64_t> aircraft_bin;  // empty when off the window or absent
    bool aircraft_off_window = false;
    std::int64_t shift = 0;                    // bins moved since frame 0
    std::vector<BinInterval> wake;             // per wake segment, clipped to the window
    std::vector<BinInterval> ghosts;           // per ghost segment, clipped
};
FrameGeometry frame_geometry(const Scenario& scenario, std::int64_t frame_index);

/// Per-bin component powers (linear, same units as the noise floor).
double clutter_power(const Scenario& scenario);
double aircraft_signal_power(const Scenario& scenario);

CpiFrame synthesize_frame(const Scenario& scenario, std::int64_t frame_index, unsigned threads = 1);

}  // namespace wakeradar
