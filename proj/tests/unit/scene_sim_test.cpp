#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "support/generators.hpp"
#include "wakeradar/dscr_detect.hpp"
#include "wakeradar/dsp_core.hpp"
#include "wakeradar/errors.hpp"
#include "wakeradar/scene_sim.hpp"

namespace wakeradar {
namespace {

using testing::Gen;

double mean_power(std::span<const std::complex<float>> row) {
    double p = 0.0;
    for (const auto& s : row) p += std::norm(std::complex<double>(s));
    return p / static_cast<double>(row.size());
}

Scenario small_scene() {
    Scenario s;
    s.radar.n_range_bins = 64;
    s.radar.n_pulses = 512;
    AircraftSpec ac;
    ac.range_bin = 40;
    ac.snr_target = 30.0;
    s.aircraft = ac;
    WakeSegmentSpec wake;
    wake.bins = {20, 39};
    wake.stage = WakeStage::Mature;
    wake.amplitude_level = db_to_linear(20.0);
    s.wake_segments.push_back(wake);
    WakeSegmentSpec ghost = wake;
    ghost.bins = {50, 55};
    ghost.stage = WakeStage::Old;
    ghost.amplitude_level = db_to_linear(15.0);
    s.ghost_segments.push_back(ghost);
    s.n_frames = 4;
    s.seed = 99;
    return s;
}

TEST(LambOseen, Examples) {
    EXPECT_EQ(lamb_oseen_tangential(0.0, 100.0, 2.0), 0.0);
    EXPECT_NEAR(lamb_oseen_tangential(2.0, 100.0, 2.0), 100.0 / (4.0 * kPi) * (1.0 - std::exp(-1.0)), 1e-12);
    EXPECT_NEAR(lamb_oseen_tangential(2.0, 100.0, 2.0), 5.030, 5e-4);
    const double far = lamb_oseen_tangential(6.0, 100.0, 2.0);
    EXPECT_NEAR(far / (100.0 / (2.0 * kPi * 6.0)), 1.0, 0.01);
}

TEST(LambOseen, Errors) {
    EXPECT_THROW(lamb_oseen_tangential(1.0, 100.0, 0.0), DomainError);
    EXPECT_THROW(lamb_oseen_tangential(-1.0, 100.0, 2.0), DomainError);
}

TEST(LambOseen, PeakRadiusIsTheMaximum) {
    const double peak = lamb_oseen_peak_speed(240.0, 3.0);
    for (double u = 0.05; u < 10.0; u += 0.01) {
        ASSERT_LE(lamb_oseen_tangential(u * 3.0, 240.0, 3.0), peak + 1e-9) << "u=" << u;
    }
}

TEST(LambOseen, PropertyContinuousAtAxis) {
    Gen gen(11);
    for (int i = 0; i < 200; ++i) {
        const double gamma = gen.uniform(10.0, 500.0);
        const double rc = gen.uniform(0.5, 10.0);
        // Near the axis the profile is solid-body rotation, Gamma r / (2 pi rc^2).
        const double r = rc * 1e-6;
        ASSERT_NEAR(lamb_oseen_tangential(r, gamma, rc), gamma * r / (2.0 * kPi * rc * rc), 1e-9);
    }
}

TEST(WakePopulation, DeterministicForSeed) {
    WakeSegmentSpec spec;
    spec.bins = {0, 0};
    const RadarConfig radar;
    const auto a = wake_doppler_population(spec, radar, 7);
    const auto b = wake_doppler_population(spec, radar, 7);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i].velocity, b[i].velocity);
        EXPECT_EQ(a[i].drift, b[i].drift);
        EXPECT_EQ(a[i].active_intervals, b[i].active_intervals);
    }
    EXPECT_NE(a[0].phase, wake_doppler_population(spec, radar, 8)[0].phase);
}

TEST(WakePopulation, NoIntermittencyMeansAlwaysActive) {
    WakeSegmentSpec spec;
    spec.bins = {0, 0};
    spec.intermittency = 0.0;
    const RadarConfig radar;
    for (const auto& line : wake_doppler_population(spec, radar, 3)) {
        EXPECT_EQ(line.active_mask, (1u << kGateSlots) - 1);
        ASSERT_EQ(line.active_intervals.size(), 1u);
        EXPECT_EQ(line.active_intervals[0], (PulseRange{0, radar.n_pulses}));
    }
}

struct StageSummary {
    double mean_speed = 0.0;
    double negative_fraction = 0.0;
    double positive_spread = 0.0;
    double negative_spread = 0.0;
    int rising = 0;
    int falling = 0;
    double fastest = 0.0;
};

double spread(const std::vector<double>& v) {
    const double m = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(v.size()));
}

StageSummary summarize(WakeStage stage) {
    WakeSegmentSpec spec;
    spec.bins = {0, 0};
    spec.stage = stage;
    const RadarConfig radar;
    StageSummary out;
    std::vector<double> pos, neg;
    int n = 0;
    for (std::uint64_t seed = 0; seed < 500; ++seed) {
        for (const auto& line : wake_doppler_population(spec, radar, seed)) {
            out.mean_speed += std::abs(line.velocity);
            (line.velocity < 0.0 ? neg : pos).push_back(std::abs(line.velocity));
            out.rising += line.drift > 0.0;
            out.falling += line.drift < 0.0;
            out.fastest = std::max(out.fastest, std::abs(line.velocity));
            ++n;
        }
    }
    out.mean_speed /= n;
    out.negative_fraction = static_cast<double>(neg.size()) / n;
    out.positive_spread = spread(pos);
    out.negative_spread = spread(neg);
    return out;
}

TEST(WakePopulation, MatureMeanSpeedNearTableValue) {
    EXPECT_NEAR(summarize(WakeStage::Mature).mean_speed, 6.93, 0.5);
}

TEST(WakePopulation, StageShapes) {
    const double peak = lamb_oseen_peak_speed(240.0, 3.0);
    const StageSummary young = summarize(WakeStage::Young);
    const StageSummary mature = summarize(WakeStage::Mature);
    const StageSummary old = summarize(WakeStage::Old);
    for (const auto* s : {&young, &mature, &old}) EXPECT_LE(s->fastest, 1.2 * peak);
    // Young stays slow and drifts up; old drifts down; mature drifts both ways.
    EXPECT_LT(young.mean_speed, mature.mean_speed);
    EXPECT_EQ(young.falling, 0);
    EXPECT_EQ(old.rising, 0);
    EXPECT_GT(mature.rising, 0);
    EXPECT_GT(mature.falling, 0);
    // Mature suppresses the negative side; old spreads wider on the positive side.
    EXPECT_LT(mature.negative_fraction, old.negative_fraction);
    EXPECT_GT(old.positive_spread, old.negative_spread);
}

TEST(WakePopulation, MatureDominantPairIsStrongest) {
    WakeSegmentSpec spec;
    spec.bins = {0, 0};
    const RadarConfig radar;
    const auto lines = wake_doppler_population(spec, radar, 21);
    const double peak = lamb_oseen_peak_speed(spec.circulation, spec.core_radius);
    EXPECT_DOUBLE_EQ(lines[0].velocity, peak);
    EXPECT_DOUBLE_EQ(lines[1].velocity, -peak);
    for (std::size_t i = 2; i < lines.size(); ++i) EXPECT_LT(lines[i].amplitude, lines[0].amplitude);
}

TEST(WakePopulation, RejectsInvalidSpecs) {
    WakeSegmentSpec spec;
    spec.bins = {0, 0};
    spec.n_scatterers = 0;
    EXPECT_THROW(wake_doppler_population(spec, RadarConfig{}, 1), DomainError);
    spec.n_scatterers = 4;
    spec.core_radius = 0.0;
    EXPECT_THROW(wake_doppler_population(spec, RadarConfig{}, 1), DomainError);
    spec.core_radius = 3.0;
    spec.intermittency = 1.5;
    EXPECT_THROW(wake_doppler_population(spec, RadarConfig{}, 1), DomainError);
}

TEST(AircraftSeries, JemOffGivesSingleBodyPeak) {
    AircraftSpec spec;
    spec.jem_stage1.relative_amplitude = 0.0;
    spec.jem_stage2.relative_amplitude = 0.0;
    const RadarConfig radar;
    const auto series = aircraft_pulse_series(spec, radar, 1000.0);
    const DopplerSpectrum s = doppler_spectrum(std::span<const std::complex<double>>(series), radar);
    const auto peaks = find_doppler_peaks(s, {0.05, 8.0});
    ASSERT_EQ(peaks.size(), 1u);
    const double body = fold_velocity(spec.radial_velocity_true, unambiguous_velocity(radar));
    EXPECT_EQ(peaks[0].index, s.index_of(body));
}

TEST(AircraftSeries, ParsevalPowerCalibration) {
    Gen gen(5);
    const RadarConfig radar;
    for (int i = 0; i < 20; ++i) {
        AircraftSpec spec;
        spec.radial_velocity_true = gen.uniform(-250.0, 250.0);
        const double target = gen.log_uniform(1.0, 1e6);
        const auto series = aircraft_pulse_series(spec, radar, target, static_cast<std::uint64_t>(i));
        double p = 0.0;
        for (const auto& x : series) p += std::norm(x);
        p /= static_cast<double>(series.size());
        ASSERT_NEAR(p / target, 1.0, 1e-9);
        // Same energy seen through the transform.
        const DopplerSpectrum s = doppler_spectrum(std::span<const std::complex<double>>(series), radar);
        double e = 0.0;
        for (double a : s.amplitudes) e += a * a;
        ASSERT_NEAR(e / (static_cast<double>(radar.n_pulses) * radar.n_pulses * target), 1.0, 1e-9);
    }
}

TEST(AircraftSeries, StageOneSpacingVisibleInSpectrum) {
    AircraftSpec spec;
    // Slow enough that no line wraps around the unambiguous interval.
    spec.radial_velocity_true = 10.0;
    spec.jem_stage1.line_spacing = 14.3;
    spec.jem_stage1.n_lines_each_side = 5;
    spec.jem_stage2.relative_amplitude = 0.0;
    const RadarConfig radar;
    const double vres = velocity_resolution(radar);
    const auto series = aircraft_pulse_series(spec, radar, 1000.0);
    const DopplerSpectrum s = doppler_spectrum(std::span<const std::complex<double>>(series), radar);
    auto peaks = find_doppler_peaks(s, {0.05, 8.0});
    std::vector<double> v;
    for (const auto& p : peaks) v.push_back(p.velocity);
    std::sort(v.begin(), v.end());
    ASSERT_EQ(v.size(), 11u);
    for (std::size_t i = 1; i < v.size(); ++i) EXPECT_NEAR(v[i] - v[i - 1], 14.3, vres);
}

TEST(AircraftSeries, RejectsInvalidSpecs) {
    AircraftSpec spec;
    spec.jem_stage2.relative_amplitude = 0.9;
    EXPECT_THROW(aircraft_pulse_series(spec, RadarConfig{}, 1.0), DomainError);
    spec = AircraftSpec{};
    spec.wingspan = 0.0;
    EXPECT_THROW(aircraft_pulse_series(spec, RadarConfig{}, 1.0), DomainError);
}

TEST(SynthesizeFrame, ThreadCountDoesNotChangeSamples) {
    const Scenario s = small_scene();
    for (std::int64_t f = 0; f < 2; ++f) {
        const CpiFrame a = synthesize_frame(s, f, 1);
        const CpiFrame b = synthesize_frame(s, f, 3);
        ASSERT_EQ(a.iq.size(), b.iq.size());
        EXPECT_TRUE(std::equal(a.iq.begin(), a.iq.end(), b.iq.begin()));
        EXPECT_EQ(a.n_bins, 64u);
        EXPECT_EQ(a.n_pulses, 512u);
        EXPECT_DOUBLE_EQ(a.timestamp, 0.5 * static_cast<double>(f));
    }
}

TEST(SynthesizeFrame, ContributionsStayInTheirBins) {
    const Scenario full = small_scene();
    Scenario bare = full;
    bare.wake_segments.clear();
    bare.ghost_segments.clear();
    bare.aircraft.reset();
    for (std::int64_t f = 0; f < full.n_frames; ++f) {
        const CpiFrame a = synthesize_frame(full, f);
        const CpiFrame b = synthesize_frame(bare, f);
        const FrameGeometry geo = frame_geometry(full, f);
        ASSERT_TRUE(geo.aircraft_bin.has_value());
        for (std::int64_t bin = 0; bin < 64; ++bin) {
            const bool wake = geo.wake[0].contains(bin);
            const bool ghost = geo.ghosts[0].contains(bin);
            const bool aircraft = bin == *geo.aircraft_bin;
            if (wake) {
                ASSERT_LT(bin, *geo.aircraft_bin);
            }
            if (ghost) {
                ASSERT_GT(bin, *geo.aircraft_bin);
            }
            const auto ra = a.row(static_cast<std::size_t>(bin));
            const auto rb = b.row(static_cast<std::size_t>(bin));
            const bool same = std::equal(ra.begin(), ra.end(), rb.begin());
            EXPECT_EQ(same, !(wake || ghost || aircraft)) << "frame " << f << " bin " << bin;
        }
    }
}

TEST(SynthesizeFrame, AircraftAdvancesAboutTwoPointThreeBinsPerFrame) {
    Scenario s;
    AircraftSpec ac;
    ac.radial_velocity_true = -140.1;
    s.aircraft = ac;
    s.n_frames = 20;
    const double res = range_resolution(s.radar.bandwidth);
    for (std::int64_t f = 1; f < 20; ++f) {
        const auto prev = frame_geometry(s, f - 1).aircraft_bin;
        const auto now = frame_geometry(s, f).aircraft_bin;
        ASSERT_TRUE(prev && now);
        EXPECT_GE(*now - *prev, 2);
        EXPECT_LE(*now - *prev, 3);
        EXPECT_EQ(*now, 286 + std::llround(140.1 * 0.5 * static_cast<double>(f) / res));
    }
}

TEST(SynthesizeFrame, AircraftLeavingWindowIsFlagged) {
    Scenario s;
    s.radar.n_range_bins = 16;
    s.radar.n_pulses = 64;
    AircraftSpec ac;
    ac.range_bin = 14;
    s.aircraft = ac;
    s.n_frames = 3;
    EXPECT_FALSE(synthesize_frame(s, 0).aircraft_off_window);
    const CpiFrame late = synthesize_frame(s, 2);
    EXPECT_TRUE(late.aircraft_off_window);
    EXPECT_EQ(late.n_bins, 16u);
    EXPECT_THROW(synthesize_frame(s, 3), DomainError);
}

TEST(SynthesizeFrame, RejectsBadGeometry) {
    Scenario s = small_scene();
    s.wake_segments[0].bins = {30, 45};
    EXPECT_THROW(synthesize_frame(s, 0), DomainError);
    s = small_scene();
    s.ghost_segments[0].bins = {35, 52};
    EXPECT_THROW(synthesize_frame(s, 0), DomainError);
    s = small_scene();
    s.frame_interval = 0.0;
    EXPECT_THROW(synthesize_frame(s, 0), DomainError);
}

TEST(SynthesizeFrame, EnergyBudgetOverManyFrames) {
    Scenario s;
    s.radar.n_range_bins = 3;
    s.radar.n_pulses = 2048;
    s.n_frames = 100;
    s.seed = 2718;
    WakeSegmentSpec wake;
    wake.bins = {1, 1};
    wake.amplitude_level = db_to_linear(10.0);
    s.wake_segments.push_back(wake);
    const double clutter = clutter_power(s);
    std::vector<double> sum(3, 0.0);
    for (std::int64_t f = 0; f < 100; ++f) {
        const CpiFrame frame = synthesize_frame(s, f);
        for (std::size_t b = 0; b < 3; ++b) sum[b] += mean_power(frame.row(b)) / 100.0;
    }
    EXPECT_NEAR(sum[0] / (1.0 + clutter), 1.0, 0.01);
    EXPECT_NEAR(sum[2] / (1.0 + clutter), 1.0, 0.01);
    EXPECT_NEAR(sum[1] / (1.0 + clutter + wake.amplitude_level), 1.0, 0.01);
}

TEST(SynthesizeFrame, NoiseOnlyStaysBelowThreshold) {
    Scenario s;
    s.radar.n_range_bins = 1;
    s.clutter.n_lines = 0;
    const DetectorConfig detector;
    int quiet = 0;
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
        s.seed = seed;
        const CpiFrame frame = synthesize_frame(s, 0);
        DopplerSpectrum spectrum = doppler_spectrum(frame.row(0), s.radar);
        notch_clutter_in_place(spectrum, detector.notch_half_width);
        if (dscr(spectrum, select_dominant_doppler(spectrum)) < detector.dscr_threshold) ++quiet;
    }
    EXPECT_GE(quiet, 990);
}

}  // namespace
}  // namespace wakeradar
