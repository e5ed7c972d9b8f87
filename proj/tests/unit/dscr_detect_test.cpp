#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <filesystem>
#include <numeric>

#include "support/generators.hpp"
#include "wakeradar/dscr_detect.hpp"
#include "wakeradar/dsp_core.hpp"
#include "wakeradar/errors.hpp"
#include "wakeradar/io/scenario_file.hpp"
#include "wakeradar/pipeline.hpp"
#include "wakeradar/scene_sim.hpp"

namespace wakeradar {
namespace {

using testing::Gen;
using testing::make_spectrum;
using cd = std::complex<double>;

/// Steady lines, active for the whole CPI, plus complex Gaussian noise.
DopplerSpectrum tones(const std::vector<std::pair<double, double>>& velocity_amplitude, double noise_sigma,
                      std::uint64_t seed, const RadarConfig& config = RadarConfig{}) {
    std::vector<ScattererLine> lines;
    for (const auto& [v, a] : velocity_amplitude) {
        ScattererLine line;
        line.velocity = v;
        line.amplitude = a;
        line.active_intervals = {{0, config.n_pulses}};
        lines.push_back(line);
    }
    auto x = lines.empty() ? std::vector<cd>(config.n_pulses) : scatterer_series(lines, config);
    Gen gen(seed);
    const auto noise = gen.complex_noise(x.size(), noise_sigma);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] += noise[i];
    return doppler_spectrum(std::span<const cd>(x), config);
}

/// Nearest velocity on the Doppler grid, so rectangular-window leakage adds no sidelobe peaks.
double on_grid(double v) {
    const double vres = velocity_resolution(RadarConfig{});
    return std::round(v / vres) * vres;
}

/// Unit floor plus `extras`, with the cell at `velocity` raised to reach the requested DSCR.
DopplerSpectrum floor_with_peak(double velocity, double dscr_target,
                                const std::vector<std::pair<double, double>>& extras = {}) {
    const RadarConfig c;
    const std::size_t n = c.n_pulses;
    auto s = make_spectrum(std::vector<double>(n, 1.0), velocity_resolution(c));
    for (const auto& [v, a] : extras) s.amplitudes[s.index_of(v)] = a;
    const std::size_t d = s.index_of(velocity);
    const double others = std::accumulate(s.amplitudes.begin(), s.amplitudes.end(), 0.0) - s.amplitudes[d];
    const double ratio = std::pow(10.0, dscr_target / 10.0);
    s.amplitudes[d] = ratio * others / (static_cast<double>(n) - ratio);
    s.raw_power = 1.0;
    return s;
}

// dscr

TEST(Dscr, FlatSpectrumIsZeroEverywhere) {
    const auto s = make_spectrum(std::vector<double>(16, 2.5));
    for (std::size_t i = 0; i < s.size(); ++i) EXPECT_NEAR(dscr(s, i), 0.0, 1e-12);
}

TEST(Dscr, FourCellExample) {
    const auto s = make_spectrum({1.0, 1.0, 1.0, 9.0});
    EXPECT_NEAR(dscr(s, 3), 10.0 * std::log10(3.0), 1e-12);
    EXPECT_NEAR(dscr(s, 3), 4.771213, 5e-7);
}

TEST(Dscr, MaskedCellsStillCountInTheMean) {
    auto s = make_spectrum({1.0, 1.0, 1.0, 9.0});
    const double before = dscr(s, 3);
    s.notch_mask = {true, true, false, false};
    EXPECT_EQ(dscr(s, 3), before);
}

TEST(Dscr, Errors) {
    EXPECT_THROW(dscr(make_spectrum(std::vector<double>(8, 0.0)), 2), UndefinedInputError);
    EXPECT_THROW(dscr(make_spectrum(std::vector<double>(8, 1.0)), 8), DomainError);
    EXPECT_EQ(dscr(make_spectrum({0.0, 1.0, 1.0, 1.0}), 0), kDbFloor);
}

TEST(Dscr, PropertyScaleInvariance) {
    Gen gen(11);
    for (int i = 0; i < 1000; ++i) {
        const auto n = static_cast<std::size_t>(gen.integer(2, 512));
        auto a = gen.amplitudes(n, 1e-3, 1.0);
        const auto d = static_cast<std::size_t>(gen.integer(0, static_cast<std::int64_t>(n) - 1));
        const double c = gen.log_uniform(1e-6, 1e6);
        auto scaled = a;
        for (double& x : scaled) x *= c;
        ASSERT_NEAR(dscr(make_spectrum(scaled), d), dscr(make_spectrum(a), d), 1e-12);
    }
}

// select_dominant_doppler

TEST(SelectDominant, ToneAtAircraftVelocity) {
    const double vres = velocity_resolution(RadarConfig{});
    const auto s = tones({{-56.0, 1.0}}, 1.0, 1);
    EXPECT_NEAR(s.velocity_axis[select_dominant_doppler(s)], -56.0, vres);
}

TEST(SelectDominant, NotchRemovesClutterPeak) {
    const double vres = velocity_resolution(RadarConfig{});
    auto s = tones({{0.4, 10.0}, {7.8, 1.0}}, 0.5, 2);
    EXPECT_NEAR(s.velocity_axis[select_dominant_doppler(s)], 0.4, vres);
    notch_clutter_in_place(s, 2.0);
    EXPECT_NEAR(s.velocity_axis[select_dominant_doppler(s)], 7.8, vres);
}

TEST(SelectDominant, TieGoesToSmallerSpeedThenNegative) {
    std::vector<double> a(16, 1.0);
    a[3] = a[13] = 7.0;  // -5 and +5
    EXPECT_EQ(make_spectrum(a).velocity_axis[select_dominant_doppler(make_spectrum(a))], -5.0);
    a[12] = 7.0;  // +4 is slower
    EXPECT_EQ(select_dominant_doppler(make_spectrum(a)), 12u);
}

TEST(SelectDominant, AllMaskedThrows) {
    auto s = make_spectrum(std::vector<double>(8, 1.0));
    s.notch_mask.assign(8, true);
    EXPECT_THROW(select_dominant_doppler(s), NoCandidateError);
}

TEST(SelectDominant, PropertyScaleInvariantAndMaximisesDscr) {
    Gen gen(12);
    for (int i = 0; i < 1000; ++i) {
        const auto n = static_cast<std::size_t>(gen.integer(2, 256));
        auto s = make_spectrum(gen.amplitudes(n, 0.0, 1.0));
        for (std::size_t j = 0; j < n; ++j) s.notch_mask[j] = gen.uniform(0.0, 1.0) < 0.2;
        s.notch_mask[static_cast<std::size_t>(gen.integer(0, static_cast<std::int64_t>(n) - 1))] = false;
        const std::size_t d = select_dominant_doppler(s);
        ASSERT_FALSE(s.notch_mask[d]);
        auto scaled = s;
        const double c = gen.log_uniform(1e-6, 1e6);
        for (double& x : scaled.amplitudes) x *= c;
        ASSERT_EQ(select_dominant_doppler(scaled), d);
        if (std::accumulate(s.amplitudes.begin(), s.amplitudes.end(), 0.0) <= 0.0) continue;
        for (std::size_t j = 0; j < n; ++j) {
            if (!s.notch_mask[j]) {
                ASSERT_GE(dscr(s, d), dscr(s, j));
            }
        }
    }
}

// find_doppler_peaks

TEST(FindPeaks, FiveWakeLines) {
    const double vres = velocity_resolution(RadarConfig{});
    const std::vector<double> truth{-4.2, -3.0, 3.0, 5.0, 5.2};
    std::vector<std::pair<double, double>> lines;
    for (double v : truth) lines.emplace_back(on_grid(v), 1.0);
    const auto peaks = find_doppler_peaks(tones(lines, 0.3, 3));
    ASSERT_EQ(peaks.size(), 5u);
    for (double v : truth) {
        const bool found = std::any_of(peaks.begin(), peaks.end(),
                                       [&](const DopplerPeak& p) { return std::abs(p.velocity - v) <= vres; });
        EXPECT_TRUE(found) << v;
    }
}

TEST(FindPeaks, SingleToneGivesOnePeak) {
    const auto peaks = find_doppler_peaks(tones({{on_grid(9.3), 1.0}}, 0.1, 4));
    ASSERT_EQ(peaks.size(), 1u);
    EXPECT_NEAR(peaks[0].velocity, on_grid(9.3), 0.5 * velocity_resolution(RadarConfig{}));
}

TEST(FindPeaks, SortedStrongestFirstAndUnmasked) {
    auto s = tones({{on_grid(-30.0), 1.0}, {on_grid(0.5), 3.0}, {on_grid(20.0), 2.0}}, 0.1, 5);
    notch_clutter_in_place(s, 2.0);
    const auto peaks = find_doppler_peaks(s);
    const double half = 0.5 * velocity_resolution(RadarConfig{});
    ASSERT_EQ(peaks.size(), 2u);
    EXPECT_NEAR(peaks[0].velocity, on_grid(20.0), half);
    EXPECT_NEAR(peaks[1].velocity, on_grid(-30.0), half);
}

TEST(FindPeaks, PureNoiseIsUsuallyEmpty) {
    int empty = 0;
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
        empty += find_doppler_peaks(tones({}, 1.0, 1000 + seed)).empty();
    }
    EXPECT_GE(empty, 990);
}

TEST(FindPeaks, Errors) {
    EXPECT_THROW(find_doppler_peaks(make_spectrum({1.0, 2.0}), {-0.1, 8.0}), DomainError);
    EXPECT_TRUE(find_doppler_peaks(make_spectrum({})).empty());
    EXPECT_TRUE(find_doppler_peaks(make_spectrum(std::vector<double>(8, 0.0))).empty());
}

// classify_bin

TEST(ClassifyBin, AircraftBin) {
    const auto s = floor_with_peak(-56.06, 17.84);
    const auto det = classify_bin(s, DetectorConfig{}, std::nullopt, 1.0);
    EXPECT_NEAR(det.dscr_db, 17.84, 1e-9);
    EXPECT_EQ(det.cls, TargetClass::Aircraft);
    EXPECT_NEAR(det.dominant_velocity, -56.06, velocity_resolution(RadarConfig{}));
    EXPECT_FALSE(det.stage.has_value());
}

TEST(ClassifyBin, MatureWakeBin) {
    const auto s = floor_with_peak(6.93, 16.72, {{-5.0, 20.0}, {3.0, 15.0}});
    const auto det = classify_bin(s, DetectorConfig{}, std::nullopt, 1.0);
    EXPECT_NEAR(det.dscr_db, 16.72, 1e-9);
    EXPECT_EQ(det.cls, TargetClass::Wake);
    EXPECT_EQ(det.doppler_peaks.size(), 3u);
}

TEST(ClassifyBin, SingleSlowLineIsOther) {
    const auto det = classify_bin(floor_with_peak(6.93, 16.72), DetectorConfig{}, std::nullopt, 1.0);
    EXPECT_EQ(det.cls, TargetClass::Other);
}

TEST(ClassifyBin, ConfirmedCombMakesAircraft) {
    JemComb comb;
    comb.body_velocity = 6.93;
    comb.stage1_spacing = 14.4;
    const auto det = classify_bin(floor_with_peak(6.93, 16.72), DetectorConfig{}, comb, 1.0);
    EXPECT_EQ(det.cls, TargetClass::Aircraft);
    ASSERT_TRUE(det.jem.has_value());
}

TEST(ClassifyBin, BelowThresholdIsNoiseWithoutPeaks) {
    const auto det = classify_bin(floor_with_peak(-56.06, 7.9), DetectorConfig{}, std::nullopt, 1.0);
    EXPECT_EQ(det.cls, TargetClass::Noise);
    EXPECT_TRUE(det.doppler_peaks.empty());
    EXPECT_FALSE(det.stage.has_value());
}

TEST(ClassifyBin, SnrFromRawPower) {
    auto s = floor_with_peak(-56.06, 17.84);
    s.raw_power = 100.0;
    EXPECT_NEAR(classify_bin(s, DetectorConfig{}, std::nullopt, 0.5).snr_db, 10.0 * std::log10(200.0), 1e-12);
}

TEST(ClassifyBin, ClutterOnlyInsideNotchIsNoise) {
    const auto det = classify_bin(tones({{0.3, 30.0}}, 1.0, 6), DetectorConfig{}, std::nullopt, 1.0);
    EXPECT_EQ(det.cls, TargetClass::Noise);
    EXPECT_GT(std::abs(det.dominant_velocity), 2.0);
}

TEST(ClassifyBin, PropertyDeterministicAndInvariantsHold) {
    Gen gen(13);
    const DetectorConfig config;
    for (int i = 0; i < 200; ++i) {
        std::vector<std::pair<double, double>> lines;
        const auto n = gen.integer(0, 4);
        for (std::int64_t k = 0; k < n; ++k) lines.emplace_back(gen.uniform(-80.0, 80.0), gen.log_uniform(0.01, 2.0));
        const auto s = tones(lines, 1.0, 2000 + static_cast<std::uint64_t>(i));
        const auto a = classify_bin(s, config, std::nullopt, 1.0);
        const auto b = classify_bin(s, config, std::nullopt, 1.0);
        ASSERT_EQ(a, b);
        ASSERT_TRUE(std::isfinite(a.dscr_db));
        ASSERT_NE(std::find(s.velocity_axis.begin(), s.velocity_axis.end(), a.dominant_velocity),
                  s.velocity_axis.end());
        if (a.cls == TargetClass::Noise) {
            ASSERT_FALSE(a.stage.has_value());
        }
    }
}

TEST(ClassifyBin, NoiseFalseAlarmRateAtMostOnePercent) {
    const DetectorConfig config;
    int false_alarms = 0;
    for (std::uint64_t seed = 0; seed < 10000; ++seed) {
        const auto det = classify_bin(tones({}, 1.0, 50000 + seed), config, std::nullopt, 1.0);
        false_alarms += det.cls == TargetClass::Aircraft || det.cls == TargetClass::Wake;
    }
    EXPECT_LE(false_alarms, 100);
}

TEST(DetectorConfig, Validation) {
    EXPECT_NO_THROW(validate(DetectorConfig{}));
    DetectorConfig c;
    c.dscr_threshold = 0.0;
    EXPECT_THROW(validate(c), DomainError);
    c = DetectorConfig{};
    c.wake_speed_min = 20.0;
    EXPECT_THROW(validate(c), DomainError);
    c = DetectorConfig{};
    c.wake_speed_min = 14.0;
    c.wake_speed_max = 13.0;
    EXPECT_THROW(validate(c), DomainError);
    c = DetectorConfig{};
    c.noise_floor = 0.0;
    EXPECT_THROW(validate(c), DomainError);
    c = DetectorConfig{};
    c.wake_gap_tolerance = -1;
    EXPECT_THROW(validate(c), DomainError);
}

// out_of_notch_power

TEST(OutOfNotchPower, FlatSpectrumKeepsRawPower) {
    auto s = make_spectrum(std::vector<double>(16, 1.0));
    s.raw_power = 3.0;
    EXPECT_DOUBLE_EQ(out_of_notch_power(s, 2.0), 3.0);
}

TEST(OutOfNotchPower, IgnoresEnergyInsideTheNotch) {
    const std::size_t n = 16;
    auto a = std::vector<double>(n, 1.0);
    const auto with_parseval = [&](std::vector<double> amps) {
        auto s = make_spectrum(amps);
        double e = 0.0;
        for (double x : amps) e += x * x;
        s.raw_power = e / static_cast<double>(n * n);
        return s;
    };
    const double quiet = out_of_notch_power(with_parseval(a), 2.0);
    a[n / 2] = 50.0;
    a[n / 2 + 1] = 20.0;
    EXPECT_NEAR(out_of_notch_power(with_parseval(a), 2.0), quiet, 1e-15);
    EXPECT_DOUBLE_EQ(quiet, 1.0 / static_cast<double>(n));
}

TEST(OutOfNotchPower, DegenerateInputsReturnRawPower) {
    auto s = make_spectrum(std::vector<double>(4, 0.0));
    s.raw_power = 2.0;
    EXPECT_EQ(out_of_notch_power(s, 1.0), 2.0);
    s.amplitudes = {1.0, 1.0, 1.0, 1.0};
    EXPECT_EQ(out_of_notch_power(s, 100.0), 2.0);
}

// wake_extent

std::vector<Detection> with_classes(const std::string& pattern) {
    std::vector<Detection> out(pattern.size());
    for (std::size_t i = 0; i < pattern.size(); ++i) {
        out[i].bin_index = static_cast<std::int64_t>(i);
        out[i].cls = pattern[i] == 'W' ? TargetClass::Wake : pattern[i] == 'A' ? TargetClass::Aircraft
                                                                                : TargetClass::Noise;
    }
    return out;
}

TEST(WakeExtent, Examples) {
    const auto d = with_classes("WW....WW.WWW.A.WWWWWW");
    EXPECT_EQ(wake_extent(d, 13, 4), (BinInterval{0, 11}));
    EXPECT_EQ(wake_extent(d, 13, 3), (BinInterval{6, 11}));
    EXPECT_EQ(wake_extent(d, 13, 1), (BinInterval{6, 11}));
    EXPECT_EQ(wake_extent(d, 13, 0), (BinInterval{9, 11}));
    EXPECT_TRUE(wake_extent(d, 0, 3).empty());
}

TEST(WakeExtent, EqualRunsPreferTheAircraftSide) {
    const auto d = with_classes("WW..WW.A");
    EXPECT_EQ(wake_extent(d, 7, 0), (BinInterval{4, 5}));
}

TEST(WakeExtent, PropertyBehindAircraftAndEndsOnWake) {
    Gen gen(14);
    for (int i = 0; i < 1000; ++i) {
        std::string pattern(static_cast<std::size_t>(gen.integer(1, 80)), '.');
        for (char& ch : pattern) ch = gen.uniform(0.0, 1.0) < 0.4 ? 'W' : '.';
        const auto d = with_classes(pattern);
        const auto ac = gen.integer(0, static_cast<std::int64_t>(pattern.size()));
        const auto tol = static_cast<int>(gen.integer(0, 4));
        const BinInterval e = wake_extent(d, ac, tol);
        if (e.empty()) continue;
        ASSERT_LT(e.last, ac);
        ASSERT_EQ(pattern[static_cast<std::size_t>(e.first)], 'W');
        ASSERT_EQ(pattern[static_cast<std::size_t>(e.last)], 'W');
        int gap = 0;
        for (std::int64_t b = e.first; b <= e.last; ++b) {
            gap = pattern[static_cast<std::size_t>(b)] == 'W' ? 0 : gap + 1;
            ASSERT_LE(gap, tol);
        }
    }
}

// scan_frame and the pipeline

Scenario reference_scene() {
    return io::load_scenario(std::filesystem::path(WAKERADAR_SCENARIO_DIR) / "reference.cfg");
}

TEST(ScanFrame, ReferenceSceneFindsAircraftAndWakeBehindIt) {
    const Scenario scene = reference_scene();
    const ScanResult scan = process_frame(synthesize_frame(scene, 0), scene.radar, DetectorConfig{});
    ASSERT_TRUE(scan.aircraft_bin.has_value());
    EXPECT_EQ(*scan.aircraft_bin, 286);
    ASSERT_FALSE(scan.wake_extent.empty());
    EXPECT_GE(scan.wake_extent.first, 1);
    EXPECT_LE(scan.wake_extent.last, 285);
    EXPECT_GE(scan.wake_extent.size(), 100);
    EXPECT_EQ(scan.detections.size(), scene.radar.n_range_bins);
    for (const auto& det : scan.detections) {
        if (det.cls == TargetClass::Wake && det.bin_index < 286) {
            EXPECT_TRUE(det.stage.has_value());
        }
        if (det.bin_index > 286) {
            EXPECT_FALSE(det.stage.has_value());
        }
    }
}

TEST(ScanFrame, GhostsAheadAreReportedButExcluded) {
    const Scenario scene = reference_scene();
    const ScanResult scan = process_frame(synthesize_frame(scene, 0), scene.radar, DetectorConfig{});
    const BinInterval ghost = scene.ghost_segments.at(0).bins;
    int flagged = 0;
    for (std::int64_t b = ghost.first; b <= ghost.last; ++b) {
        const auto cls = scan.detections.at(static_cast<std::size_t>(b)).cls;
        flagged += cls == TargetClass::Wake || cls == TargetClass::Other;
    }
    EXPECT_GT(flagged, 0);
    EXPECT_FALSE(scan.wake_extent.contains(ghost.first));
    EXPECT_LT(scan.wake_extent.last, ghost.first);
}

TEST(ScanFrame, CombFlagsAircraftFoldedIntoWakeBand) {
    const Scenario scene = io::load_scenario(std::filesystem::path(WAKERADAR_SCENARIO_DIR) / "track16.cfg");
    const double folded = fold_velocity(-140.1, unambiguous_velocity(scene.radar));
    ASSERT_LT(std::abs(folded), DetectorConfig{}.wake_speed_max);
    const ScanResult scan = process_frame(synthesize_frame(scene, 0), scene.radar, DetectorConfig{});
    ASSERT_TRUE(scan.aircraft_bin.has_value());
    EXPECT_EQ(*scan.aircraft_bin, 286);
    const Detection& det = scan.detections[286];
    EXPECT_EQ(det.cls, TargetClass::Aircraft);
    EXPECT_TRUE(det.jem.has_value());
    EXPECT_NEAR(det.dominant_velocity, folded, velocity_resolution(scene.radar));
    for (const auto& d : scan.detections) {
        if (d.bin_index != 286) {
            EXPECT_NE(d.cls, TargetClass::Aircraft) << d.bin_index;
        }
    }
}

TEST(ScanFrame, EmptySceneHasNoAircraftAndNoExtent) {
    Scenario s;
    s.radar.n_range_bins = 32;
    s.seed = 5;
    const ScanResult scan = process_frame(synthesize_frame(s, 0), s.radar, DetectorConfig{});
    EXPECT_FALSE(scan.aircraft_bin.has_value());
    EXPECT_TRUE(scan.wake_extent.empty());
    for (const auto& det : scan.detections) EXPECT_NE(det.cls, TargetClass::Aircraft);
}

TEST(ScanFrame, ConfiguredNoiseFloorIsUsed) {
    Scenario s;
    s.radar.n_range_bins = 8;
    DetectorConfig config;
    config.noise_floor = 4.0;
    const auto map = range_doppler_map(synthesize_frame(s, 0), s.radar);
    EXPECT_EQ(scan_frame(map, config).noise_power, 4.0);
    config.noise_floor.reset();
    EXPECT_NEAR(scan_frame(map, config).noise_power, s.noise_floor, 0.1);
}

TEST(ScanFrame, ThreadCountDoesNotChangeDetections) {
    Scenario s = reference_scene();
    s.radar.n_range_bins = 300;
    s.ghost_segments.clear();
    const auto map = range_doppler_map(synthesize_frame(s, 0), s.radar);
    const ScanResult one = scan_frame(map, DetectorConfig{}, 1);
    const ScanResult four = scan_frame(map, DetectorConfig{}, 4);
    EXPECT_EQ(one.detections, four.detections);
    EXPECT_EQ(one.aircraft_bin, four.aircraft_bin);
    EXPECT_EQ(one.wake_extent, four.wake_extent);
}

TEST(Pipeline, ProcessFrameMatchesManualChainAndStampsFrame) {
    Scenario s;
    s.radar.n_range_bins = 16;
    AircraftSpec ac;
    ac.range_bin = 10;
    s.aircraft = ac;
    const CpiFrame frame = synthesize_frame(s, 0);
    const ScanResult manual = scan_frame(range_doppler_map(frame, s.radar), DetectorConfig{});
    const ScanResult piped = process_frame(frame, s.radar, DetectorConfig{});
    EXPECT_EQ(manual.detections, piped.detections);
    ASSERT_TRUE(piped.aircraft_bin.has_value());
    EXPECT_EQ(*piped.aircraft_bin, 10);
}

}  // namespace
}  // namespace wakeradar
