#include "wakeradar/scene_sim.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "wakeradar/errors.hpp"
#include "wakeradar/parallel.hpp"
#include "wakeradar/rng.hpp"

namespace wakeradar {

namespace {

using cd = std::complex<double>;

double uniform(std::mt19937_64& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

bool chance(std::mt19937_64& rng, double p) { return uniform(rng, 0.0, 1.0) < p; }

std::vector<PulseRange> intervals_from_mask(std::uint32_t mask, std::uint32_t n_pulses) {
    std::vector<PulseRange> out;
    for (int slot = 0; slot < kGateSlots; ++slot) {
        if (!(mask & (1u << slot))) continue;
        const auto begin = static_cast<std::uint32_t>(std::uint64_t(n_pulses) * slot / kGateSlots);
        const auto end = static_cast<std::uint32_t>(std::uint64_t(n_pulses) * (slot + 1) / kGateSlots);
        if (!out.empty() && out.back().end == begin) {
            out.back().end = end;
        } else {
            out.push_back({begin, end});
        }
    }
    return out;
}

std::uint32_t draw_gate_mask(std::mt19937_64& rng, double p_silent) {
    std::uint32_t mask = 0;
    for (int slot = 0; slot < kGateSlots; ++slot) {
        if (!chance(rng, p_silent)) mask |= 1u << slot;
    }
    if (mask == 0) {
        // A scatterer is never silent for the whole CPI.
        mask = 1u << std::uniform_int_distribution<int>(0, kGateSlots - 1)(rng);
    }
    return mask;
}

void scale_to_power(std::vector<cd>& series, double power) {
    double current = 0.0;
    for (const auto& s : series) current += std::norm(s);
    current /= static_cast<double>(series.size());
    if (current <= 0.0) return;
    const double gain = std::sqrt(power / current);
    for (auto& s : series) s *= gain;
}

void add_tone(std::vector<cd>& series, double velocity, double amplitude, double phase,
              double lambda, double prf) {
    const double step = 2.0 * kPi * (2.0 * velocity / lambda) / prf;
    for (std::size_t n = 0; n < series.size(); ++n) {
        series[n] += std::polar(amplitude, phase + step * static_cast<double>(n));
    }
}

std::int64_t aircraft_shift(const Scenario& scenario, std::int64_t frame_index) {
    if (!scenario.aircraft) return 0;
    // Negative radial velocity is receding, so range grows.
    const double metres = -scenario.aircraft->radial_velocity_true * scenario.frame_interval *
                          static_cast<double>(frame_index);
    return static_cast<std::int64_t>(std::llround(metres / range_resolution(scenario.radar.bandwidth)));
}

BinInterval clip(BinInterval interval, std::int64_t lo, std::int64_t hi) {
    interval.first = std::max(interval.first, lo);
    interval.last = std::min(interval.last, hi);
    return interval;
}

}  // namespace

void validate(const AircraftSpec& spec) {
    if (!(spec.wingspan > 0.0)) throw DomainError("aircraft wingspan must be positive");
    const auto in_unit = [](double a) { return a >= 0.0 && a <= 1.0; };
    if (!in_unit(spec.jem_stage1.relative_amplitude) || !in_unit(spec.jem_stage2.relative_amplitude)) {
        throw DomainError("JEM relative amplitudes must lie in [0, 1]");
    }
    if (spec.jem_stage2.relative_amplitude > spec.jem_stage1.relative_amplitude) {
        throw DomainError("stage-2 JEM amplitude must not exceed the stage-1 amplitude");
    }
    if (!(spec.jem_stage1.line_spacing > 0.0) || !(spec.jem_stage2.line_spacing > 0.0)) {
        throw DomainError("JEM line spacings must be positive");
    }
    if (spec.jem_stage1.n_lines_each_side < 0) throw DomainError("JEM line count must be >= 0");
    if (!std::isfinite(spec.radial_velocity_true) || !std::isfinite(spec.snr_target)) {
        throw DomainError("aircraft velocity and SNR target must be finite");
    }
}

void validate(const WakeSegmentSpec& spec) {
    if (spec.bins.empty()) throw DomainError("wake segment bin interval is empty");
    if (spec.n_scatterers < 1) throw DomainError("wake segment needs at least one scatterer");
    if (!(spec.core_radius > 0.0)) throw DomainError("wake core_radius must be positive");
    if (!(spec.circulation > 0.0)) throw DomainError("wake circulation must be positive");
    if (!(spec.amplitude_level >= 0.0) || !std::isfinite(spec.amplitude_level)) {
        throw DomainError("wake amplitude_level must be finite and non-negative");
    }
    if (!(spec.intermittency >= 0.0 && spec.intermittency <= 1.0)) {
        throw DomainError("wake intermittency must lie in [0, 1]");
    }
    if (!(spec.drift_min >= 0.0 && spec.drift_max >= spec.drift_min) || !std::isfinite(spec.drift_max)) {
        throw DomainError("wake drift range must satisfy 0 <= drift_min <= drift_max");
    }
    if (!(spec.linewidth >= 0.0) || !std::isfinite(spec.linewidth)) {
        throw DomainError("wake linewidth must be finite and non-negative");
    }
}

void validate(const Scenario& scenario) {
    validate(scenario.radar);
    const auto n_bins = static_cast<std::int64_t>(scenario.radar.n_range_bins);
    if (!(scenario.noise_floor > 0.0)) throw DomainError("noise_floor must be positive");
    if (!(scenario.frame_interval > 0.0)) throw DomainError("frame_interval must be positive");
    if (scenario.n_frames < 1) throw DomainError("n_frames must be at least 1");
    if (!(scenario.clutter.half_width >= 0.0)) throw DomainError("clutter half_width must be >= 0");
    if (scenario.clutter.n_lines < 0) throw DomainError("clutter line count must be >= 0");
    if (!(scenario.ghost_velocity_cap > 0.0)) throw DomainError("ghost velocity cap must be positive");

    const auto check_window = [&](const WakeSegmentSpec& seg, const char* kind) {
        validate(seg);
        if (seg.bins.first < 0 || seg.bins.last >= n_bins) {
            throw DomainError(std::string(kind) + " segment [" + std::to_string(seg.bins.first) +
                              ", " + std::to_string(seg.bins.last) + "] leaves the range window");
        }
    };
    for (const auto& seg : scenario.wake_segments) check_window(seg, "wake");
    for (const auto& seg : scenario.ghost_segments) check_window(seg, "ghost");

    if (scenario.aircraft) {
        const auto& ac = *scenario.aircraft;
        validate(ac);
        if (ac.range_bin < 0 || ac.range_bin >= n_bins) {
            throw DomainError("aircraft range_bin " + std::to_string(ac.range_bin) +
                              " is outside the range window");
        }
        for (const auto& seg : scenario.wake_segments) {
            if (seg.bins.last >= ac.range_bin) {
                throw DomainError("wake segment must lie strictly behind the aircraft bin");
            }
        }
        for (const auto& seg : scenario.ghost_segments) {
            if (seg.bins.first <= ac.range_bin) {
                throw DomainError("ghost segment must lie strictly ahead of the aircraft bin");
            }
        }
        if (!(aircraft_signal_power(scenario) > 0.0)) {
            throw DomainError("aircraft snr_target is below the noise-plus-clutter level");
        }
    }
}

double lamb_oseen_tangential(double r, double circulation, double core_radius) {
    if (!(core_radius > 0.0)) throw DomainError("core_radius must be positive");
    if (r < 0.0) throw DomainError("radius must be non-negative");
    if (r == 0.0) return 0.0;
    const double x = (r * r) / (core_radius * core_radius);
    return circulation / (2.0 * kPi * r) * -std::expm1(-x);
}

double lamb_oseen_peak_speed(double circulation, double core_radius) {
    return lamb_oseen_tangential(kLambOseenPeakRadius * core_radius, circulation, core_radius);
}

std::vector<ScattererLine> wake_doppler_population(const WakeSegmentSpec& spec,
                                                   const RadarConfig& config, std::uint64_t seed) {
    validate(spec);
    auto rng = make_engine(seed);
    const double v_res = velocity_resolution(config);
    const SlopeSign slope = spec.resolved_slope();
    const double rc = spec.core_radius;
    const double gamma = spec.circulation;

    std::vector<ScattererLine> lines;
    lines.reserve(static_cast<std::size_t>(spec.n_scatterers));
    for (int i = 0; i < spec.n_scatterers; ++i) {
        // Radius (in core radii), line-of-sight factor, sign and strength per age.
        double u = 1.0;
        double los = 1.0;
        double amplitude = 1.0;
        bool negative = false;
        double p_silent = spec.intermittency;
        switch (spec.stage) {
            case WakeStage::Young:
                // Dense core: sampled inside it, where speed grows with radius.
                u = uniform(rng, 0.2, 0.5);
                negative = chance(rng, 0.4);
                los = uniform(rng, 0.85, 1.0);
                amplitude = uniform(rng, 0.5, 1.0);
                break;
            case WakeStage::Mature:
                if (i < 2) {
                    // The dominant layers, one per vortex of the pair: fastest,
                    // strongest, rarely silent.
                    u = kLambOseenPeakRadius;
                    negative = i == 1;
                    los = 1.0;
                    amplitude = 1.0;
                    p_silent *= 0.5;
                } else {
                    u = uniform(rng, 0.8, 1.6);
                    negative = chance(rng, 0.15);
                    los = uniform(rng, 0.7, 1.0);
                    amplitude = uniform(rng, 0.15, 0.45);
                }
                break;
            case WakeStage::Old:
            case WakeStage::Decaying:
                // Diffused core: sampled outside it, where speed falls with radius.
                u = uniform(rng, 1.2, 2.4);
                negative = chance(rng, 0.4);
                los = negative ? uniform(rng, 0.75, 1.0) : uniform(rng, 0.6, 1.2);
                amplitude = uniform(rng, 0.3, 1.0);
                break;
        }
        ScattererLine line;
        const double speed = lamb_oseen_tangential(u * rc, gamma, rc) * los;
        line.velocity = negative ? -speed : speed;
        line.amplitude = amplitude;

        double drift = uniform(rng, spec.drift_min, spec.drift_max) * v_res;
        if (slope == SlopeSign::Negative) drift = -drift;
        // Mixed: drift directions alternate so both are equally represented.
        if (slope == SlopeSign::Mixed && i % 2 == 1) drift = -drift;
        line.drift = drift;
        line.phase = uniform(rng, 0.0, 2.0 * kPi);
        line.active_mask = draw_gate_mask(rng, p_silent);
        line.active_intervals = intervals_from_mask(line.active_mask, config.n_pulses);
        line.linewidth = spec.linewidth;
        line.jitter_key = rng();
        lines.push_back(std::move(line));
    }
    return lines;
}

std::vector<cd> scatterer_series(const std::vector<ScattererLine>& lines, const RadarConfig& config) {
    validate(config);
    const double lambda = wavelength(config);
    const double cpi = config.cpi_seconds();
    std::vector<cd> series(config.n_pulses, cd{});
    const double k = 2.0 * kPi * 2.0 / lambda;
    for (const auto& line : lines) {
        // A phase random walk with per-pulse variance D has a Lorentzian
        // spectrum of FWHM D * prf / (2 pi) Hz.
        const double d = 2.0 * kPi * (2.0 * line.linewidth / lambda) / config.prf;
        std::vector<double> walk;
        if (d > 0.0) {
            auto rng = make_engine(line.jitter_key);
            std::normal_distribution<double> step(0.0, std::sqrt(d));
            walk.resize(config.n_pulses);
            double phi = 0.0;
            for (auto& w : walk) {
                w = phi;
                phi += step(rng);
            }
        }
        for (const auto& range : line.active_intervals) {
            for (std::uint32_t n = range.begin; n < range.end; ++n) {
                const double t = static_cast<double>(n) / config.prf;
                // Integral of v(t) = velocity + drift * (t / cpi - 1/2).
                const double travelled = line.velocity * t + line.drift * (t * t / (2.0 * cpi) - 0.5 * t);
                const double jitter = walk.empty() ? 0.0 : walk[n];
                series[n] += std::polar(line.amplitude, line.phase + k * travelled + jitter);
            }
        }
    }
    return series;
}

AircraftLines aircraft_line_velocities(const AircraftSpec& spec, const RadarConfig& config) {
    const double v_ua = unambiguous_velocity(config);
    AircraftLines lines;
    lines.body = fold_velocity(spec.radial_velocity_true, v_ua);
    const int n = spec.jem_stage1.n_lines_each_side;
    const double s1 = spec.jem_stage1.line_spacing;
    const double s2 = spec.jem_stage2.line_spacing;
    const double anchor2 = lines.body + spec.jem_stage2.series_offset;
    for (int k = 1; k <= n; ++k) {
        lines.stage1.push_back(fold_velocity(lines.body - k * s1, v_ua));
        lines.stage1.push_back(fold_velocity(lines.body + k * s1, v_ua));
    }
    lines.stage2.push_back(fold_velocity(anchor2, v_ua));
    for (int k = 1; k <= n; ++k) {
        lines.stage2.push_back(fold_velocity(anchor2 - k * s2, v_ua));
        lines.stage2.push_back(fold_velocity(anchor2 + k * s2, v_ua));
    }
    return lines;
}

std::vector<cd> aircraft_pulse_series(const AircraftSpec& spec, const RadarConfig& config,
                                      double signal_power, std::uint64_t seed) {
    validate(spec);
    validate(config);
    if (!(signal_power > 0.0)) throw DomainError("aircraft signal power must be positive");
    auto rng = make_engine(seed);
    const double lambda = wavelength(config);
    const AircraftLines lines = aircraft_line_velocities(spec, config);

    std::vector<cd> series(config.n_pulses, cd{});
    const auto phase = [&] { return uniform(rng, 0.0, 2.0 * kPi); };
    add_tone(series, lines.body, 1.0, phase(), lambda, config.prf);
    if (spec.jem_stage1.relative_amplitude > 0.0) {
        for (double v : lines.stage1) {
            add_tone(series, v, spec.jem_stage1.relative_amplitude, phase(), lambda, config.prf);
        }
    }
    if (spec.jem_stage2.relative_amplitude > 0.0) {
        for (double v : lines.stage2) {
            add_tone(series, v, spec.jem_stage2.relative_amplitude, phase(), lambda, config.prf);
        }
    }
    scale_to_power(series, signal_power);
    return series;
}

double clutter_power(const Scenario& scenario) {
    if (scenario.clutter.n_lines <= 0) return 0.0;
    return scenario.noise_floor * db_to_linear(scenario.clutter.power);
}

double aircraft_signal_power(const Scenario& scenario) {
    if (!scenario.aircraft) return 0.0;
    const double total = scenario.noise_floor * db_to_linear(scenario.aircraft->snr_target);
    return total - scenario.noise_floor - clutter_power(scenario);
}

FrameGeometry frame_geometry(const Scenario& scenario, std::int64_t frame_index) {
    FrameGeometry geo;
    const auto n_bins = static_cast<std::int64_t>(scenario.radar.n_range_bins);
    std::int64_t behind_limit = n_bins - 1;
    std::int64_t ahead_limit = 0;
    if (scenario.aircraft) {
        geo.shift = aircraft_shift(scenario, frame_index);
        const std::int64_t position = scenario.aircraft->range_bin + geo.shift;
        if (position >= 0 && position < n_bins) {
            geo.aircraft_bin = position;
        } else {
            geo.aircraft_off_window = true;
        }
        behind_limit = std::min(behind_limit, position - 1);
        ahead_limit = std::max<std::int64_t>(0, position + 1);
    }
    for (const auto& seg : scenario.wake_segments) {
        BinInterval moved{seg.bins.first + geo.shift, seg.bins.last + geo.shift};
        geo.wake.push_back(clip(moved, 0, behind_limit));
    }
    for (const auto& seg : scenario.ghost_segments) {
        geo.ghosts.push_back(clip(seg.bins, ahead_limit, n_bins - 1));
    }
    return geo;
}

CpiFrame synthesize_frame(const Scenario& scenario, std::int64_t frame_index, unsigned threads) {
    validate(scenario);
    if (frame_index < 0 || frame_index >= static_cast<std::int64_t>(scenario.n_frames)) {
        throw DomainError("frame index " + std::to_string(frame_index) + " is outside [0, " +
                          std::to_string(scenario.n_frames) + ")");
    }
    const RadarConfig& radar = scenario.radar;
    const FrameGeometry geo = frame_geometry(scenario, frame_index);
    const double lambda = wavelength(radar);
    const double p_clutter = clutter_power(scenario);
    const double noise_sigma = std::sqrt(scenario.noise_floor / 2.0);
    const auto frame_key = static_cast<std::uint64_t>(frame_index);

    CpiFrame frame(radar.n_range_bins, radar.n_pulses);
    frame.frame_index = frame_index;
    frame.timestamp = static_cast<double>(frame_index) * scenario.frame_interval;
    frame.aircraft_off_window = geo.aircraft_off_window;

    parallel_for(radar.n_range_bins, threads, [&](std::size_t bin_index) {
        const auto bin = static_cast<std::int64_t>(bin_index);
        std::vector<cd> total(radar.n_pulses, cd{});

        auto noise_rng = make_engine(substream_key(scenario.seed, frame_key, bin_index, Stream::Noise));
        std::normal_distribution<double> gauss(0.0, noise_sigma);
        for (auto& s : total) {
            const double re = gauss(noise_rng);
            const double im = gauss(noise_rng);
            s = cd(re, im);
        }

        const auto accumulate = [&](std::vector<cd> component, double power) {
            scale_to_power(component, power);
            for (std::size_t n = 0; n < total.size(); ++n) total[n] += component[n];
        };

        if (p_clutter > 0.0) {
            auto rng = make_engine(substream_key(scenario.seed, frame_key, bin_index, Stream::Clutter));
            std::vector<cd> clutter(radar.n_pulses, cd{});
            const double hw = scenario.clutter.half_width;
            for (int i = 0; i < scenario.clutter.n_lines; ++i) {
                const double v = hw > 0.0 ? uniform(rng, -hw, hw) : 0.0;
                add_tone(clutter, v, 1.0, uniform(rng, 0.0, 2.0 * kPi), lambda, radar.prf);
            }
            accumulate(std::move(clutter), p_clutter);
        }

        if (geo.aircraft_bin && *geo.aircraft_bin == bin) {
            const auto key = substream_key(scenario.seed, frame_key, bin_index, Stream::Aircraft);
            accumulate(aircraft_pulse_series(*scenario.aircraft, radar, aircraft_signal_power(scenario), key),
                       aircraft_signal_power(scenario));
        }

        for (std::size_t s = 0; s < scenario.wake_segments.size(); ++s) {
            const auto& seg = scenario.wake_segments[s];
            if (!geo.wake[s].contains(bin) || seg.amplitude_level <= 0.0) continue;
            const auto key = substream_key(scenario.seed, frame_key, bin_index, Stream::Wake, s);
            accumulate(scatterer_series(wake_doppler_population(seg, radar, key), radar),
                       seg.amplitude_level * scenario.noise_floor);
        }

        for (std::size_t s = 0; s < scenario.ghost_segments.size(); ++s) {
            const auto& seg = scenario.ghost_segments[s];
            if (!geo.ghosts[s].contains(bin) || seg.amplitude_level <= 0.0) continue;
            const auto key = substream_key(scenario.seed, frame_key, bin_index, Stream::Ghost, s);
            auto lines = wake_doppler_population(seg, radar, key);
            double fastest = 0.0;
            for (const auto& line : lines) fastest = std::max(fastest, std::abs(line.velocity));
            if (fastest > scenario.ghost_velocity_cap) {
                const double shrink = scenario.ghost_velocity_cap / fastest;
                for (auto& line : lines) {
                    line.velocity *= shrink;
                    line.drift *= shrink;
                }
            }
            accumulate(scatterer_series(lines, radar), seg.amplitude_level * scenario.noise_floor);
        }

        auto row = frame.row(bin_index);
        for (std::size_t n = 0; n < total.size(); ++n) {
            row[n] = std::complex<float>(static_cast<float>(total[n].real()),
                                         static_cast<float>(total[n].imag()));
        }
    });
    return frame;
}

}  // namespace wakeradar
