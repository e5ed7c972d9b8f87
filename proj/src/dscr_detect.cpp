#include "wakeradar/dscr_detect.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "wakeradar/errors.hpp"
#include "wakeradar/parallel.hpp"

namespace wakeradar {

namespace {

double median_of(std::vector<double> values) {
    if (values.empty()) return 0.0;
    const auto mid = values.begin() + static_cast<std::ptrdiff_t>(values.size() / 2);
    std::nth_element(values.begin(), mid, values.end());
    return *mid;
}

bool masked(const DopplerSpectrum& s, std::size_t i) {
    return i < s.notch_mask.size() && s.notch_mask[i];
}

double interpolated_velocity(const DopplerSpectrum& s, std::size_t i) {
    if (i == 0 || i + 1 >= s.size()) return s.velocity_axis[i];
    const double l = s.amplitudes[i - 1];
    const double c = s.amplitudes[i];
    const double r = s.amplitudes[i + 1];
    const double denom = l - 2.0 * c + r;
    if (denom >= 0.0) return s.velocity_axis[i];
    const double delta = std::clamp(0.5 * (l - r) / denom, -0.5, 0.5);
    return s.velocity_axis[i] + delta * s.velocity_step;
}

/// Height above the higher of the two lowest points reached before a taller
/// cell (or the edge) on each side.
double prominence(const std::vector<double>& a, std::size_t i) {
    const double h = a[i];
    double left_min = h;
    for (std::size_t j = i; j-- > 0;) {
        if (a[j] > h) break;
        left_min = std::min(left_min, a[j]);
    }
    double right_min = h;
    for (std::size_t j = i + 1; j < a.size(); ++j) {
        if (a[j] > h) break;
        right_min = std::min(right_min, a[j]);
    }
    return h - std::max(left_min, right_min);
}

int lines_beyond(const JemComb& comb, double speed) {
    int n = 0;
    for (const auto* lines : {&comb.stage1_lines, &comb.stage2_lines}) {
        for (double v : *lines) n += std::abs(v) > speed;
    }
    return n;
}

}  // namespace

std::string_view to_string(TargetClass cls) {
    switch (cls) {
        case TargetClass::Aircraft: return "Aircraft";
        case TargetClass::Wake: return "Wake";
        case TargetClass::Other: return "Other";
        case TargetClass::Noise: return "Noise";
    }
    return "?";
}

bool operator==(const Detection& a, const Detection& b) {
    const auto same_peaks = [](const std::vector<DopplerPeak>& x, const std::vector<DopplerPeak>& y) {
        return std::equal(x.begin(), x.end(), y.begin(), y.end(), [](const auto& p, const auto& q) {
            return p.index == q.index && p.velocity == q.velocity && p.amplitude == q.amplitude;
        });
    };
    const auto same_jem = [](const std::optional<JemComb>& x, const std::optional<JemComb>& y) {
        if (x.has_value() != y.has_value()) return false;
        if (!x) return true;
        return x->body_velocity == y->body_velocity && x->stage1_spacing == y->stage1_spacing &&
               x->stage2_spacing == y->stage2_spacing && x->stage2_offset == y->stage2_offset &&
               x->stage1_lines == y->stage1_lines && x->stage2_lines == y->stage2_lines &&
               x->confidence == y->confidence;
    };
    return a.frame_index == b.frame_index && a.bin_index == b.bin_index && a.range_m == b.range_m &&
           a.cls == b.cls && a.snr_db == b.snr_db && a.dscr_db == b.dscr_db &&
           a.dominant_velocity == b.dominant_velocity && same_peaks(a.doppler_peaks, b.doppler_peaks) &&
           a.stage == b.stage && same_jem(a.jem, b.jem);
}

void validate(const DetectorConfig& config) {
    if (!(config.dscr_threshold > 0.0)) throw DomainError("dscr_threshold must be positive");
    if (!(config.notch_half_width >= 0.0)) throw DomainError("notch_half_width must be >= 0");
    if (!(config.wake_speed_min < config.wake_speed_max)) {
        throw DomainError("wake speed band must satisfy min < max");
    }
    if (!(config.wake_speed_min < config.aircraft_min_speed)) {
        throw DomainError("wake_speed_min must be below aircraft_min_speed");
    }
    if (config.min_peaks_for_wake < 0) throw DomainError("min_peaks_for_wake must be >= 0");
    if (config.wake_gap_tolerance < 0) throw DomainError("wake_gap_tolerance must be >= 0");
    if (!(config.wingspan > 0.0)) throw DomainError("wingspan must be positive");
    if (config.noise_floor && !(*config.noise_floor > 0.0)) {
        throw DomainError("noise_floor must be positive when given");
    }
}

double dscr(const DopplerSpectrum& spectrum, std::size_t d_index) {
    const std::size_t n = spectrum.size();
    if (d_index >= n) {
        throw DomainError("Doppler index " + std::to_string(d_index) + " outside spectrum of " +
                          std::to_string(n));
    }
    const double sum = std::accumulate(spectrum.amplitudes.begin(), spectrum.amplitudes.end(), 0.0);
    const double mean = sum / static_cast<double>(n);
    if (!(mean > 0.0)) throw UndefinedInputError("DSCR is undefined for an all-zero spectrum");
    const double peak = spectrum.amplitudes[d_index];
    if (peak <= 0.0) return kDbFloor;
    return 10.0 * std::log10(peak / mean);
}

std::size_t select_dominant_doppler(const DopplerSpectrum& spectrum) {
    std::optional<std::size_t> best;
    for (std::size_t i = 0; i < spectrum.size(); ++i) {
        if (masked(spectrum, i)) continue;
        if (!best) {
            best = i;
            continue;
        }
        const double a = spectrum.amplitudes[i];
        const double b = spectrum.amplitudes[*best];
        if (a > b) {
            best = i;
        } else if (a == b) {
            const double va = spectrum.velocity_axis[i];
            const double vb = spectrum.velocity_axis[*best];
            if (std::abs(va) < std::abs(vb) || (std::abs(va) == std::abs(vb) && va < vb)) best = i;
        }
    }
    if (!best) throw NoCandidateError("every spectral cell is masked");
    return *best;
}

std::vector<DopplerPeak> find_doppler_peaks(const DopplerSpectrum& spectrum, const PeakOptions& options) {
    if (options.min_prominence < 0.0) throw DomainError("min_prominence must be >= 0");
    const auto& a = spectrum.amplitudes;
    const std::size_t n = a.size();
    std::vector<DopplerPeak> peaks;
    if (n == 0) return peaks;

    double global_max = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!masked(spectrum, i)) global_max = std::max(global_max, a[i]);
    }
    if (global_max <= 0.0) return peaks;
    const double floor = median_of(a) * std::pow(10.0, options.floor_db / 10.0);
    const double min_prom = options.min_prominence * global_max;

    for (std::size_t i = 0; i < n; ++i) {
        if (masked(spectrum, i) || a[i] < floor || a[i] <= 0.0) continue;
        const bool left_ok = i == 0 || a[i] > a[i - 1];
        const bool right_ok = i + 1 == n || a[i] >= a[i + 1];
        if (!left_ok || !right_ok) continue;
        if (prominence(a, i) < min_prom) continue;
        peaks.push_back({i, interpolated_velocity(spectrum, i), a[i]});
    }
    std::stable_sort(peaks.begin(), peaks.end(),
                     [](const DopplerPeak& x, const DopplerPeak& y) { return x.amplitude > y.amplitude; });
    return peaks;
}

Detection classify_bin(const DopplerSpectrum& input, const DetectorConfig& config,
                       const std::optional<JemComb>& jem, double noise_power) {
    DopplerSpectrum spectrum = input;
    notch_clutter_in_place(spectrum, config.notch_half_width);

    Detection det;
    det.bin_index = spectrum.bin_index;
    det.snr_db = (spectrum.raw_power > 0.0 && noise_power > 0.0) ? snr_db(spectrum.raw_power, noise_power)
                                                                  : kDbFloor;
    const std::size_t d = select_dominant_doppler(spectrum);
    det.dominant_velocity = spectrum.velocity_axis[d];
    const double total = std::accumulate(spectrum.amplitudes.begin(), spectrum.amplitudes.end(), 0.0);
    if (!(total > 0.0)) {
        det.dscr_db = kDbFloor;
        det.cls = TargetClass::Noise;
        return det;
    }
    det.dscr_db = dscr(spectrum, d);
    det.doppler_peaks = find_doppler_peaks(spectrum, {config.min_prominence, config.peak_floor_db});

    const double speed = std::abs(det.dominant_velocity);
    if (det.dscr_db < config.dscr_threshold) {
        det.cls = TargetClass::Noise;
        det.doppler_peaks.clear();
    } else if (speed >= config.aircraft_min_speed || jem.has_value()) {
        det.cls = TargetClass::Aircraft;
        det.jem = jem;
    } else if (speed >= config.wake_speed_min && speed <= config.wake_speed_max &&
               static_cast<int>(det.doppler_peaks.size()) >= config.min_peaks_for_wake) {
        det.cls = TargetClass::Wake;
    } else {
        det.cls = TargetClass::Other;
    }
    return det;
}

BinInterval wake_extent(const std::vector<Detection>& detections, std::int64_t aircraft_bin,
                        int gap_tolerance) {
    std::vector<std::int64_t> wake_bins;
    for (const auto& det : detections) {
        if (det.cls == TargetClass::Wake && det.bin_index < aircraft_bin) wake_bins.push_back(det.bin_index);
    }
    std::sort(wake_bins.begin(), wake_bins.end());
    BinInterval best;
    std::size_t start = 0;
    for (std::size_t i = 0; i < wake_bins.size(); ++i) {
        const bool run_ends = i + 1 == wake_bins.size() ||
                              wake_bins[i + 1] - wake_bins[i] - 1 > gap_tolerance;
        if (!run_ends) continue;
        const BinInterval run{wake_bins[start], wake_bins[i]};
        // Longer wins; equal length goes to the run nearer the aircraft.
        if (best.empty() || run.size() >= best.size()) best = run;
        start = i + 1;
    }
    return best;
}

double out_of_notch_power(const DopplerSpectrum& spectrum, double half_width) {
    double all = 0.0;
    double outside = 0.0;
    std::size_t n_outside = 0;
    for (std::size_t i = 0; i < spectrum.size(); ++i) {
        const double e = spectrum.amplitudes[i] * spectrum.amplitudes[i];
        all += e;
        if (std::abs(spectrum.velocity_axis[i]) > half_width) {
            outside += e;
            ++n_outside;
        }
    }
    if (!(all > 0.0) || n_outside == 0) return spectrum.raw_power;
    return spectrum.raw_power * (outside / all) * (static_cast<double>(spectrum.size()) / static_cast<double>(n_outside));
}

ScanResult scan_frame(const RangeDopplerMap& map, const DetectorConfig& config, unsigned threads) {
    validate(config);
    ScanResult result;
    result.frame_index = map.frame_index;
    result.range_resolution = map.range_resolution;
    if (config.noise_floor) {
        result.noise_power = *config.noise_floor;
    } else {
        std::vector<double> powers;
        powers.reserve(map.rows.size());
        for (const auto& row : map.rows) powers.push_back(out_of_notch_power(row, config.notch_half_width));
        result.noise_power = median_of(std::move(powers));
    }

    JemOptions jem_options;
    jem_options.min_lines = config.jem_min_lines;
    jem_options.notch_half_width = config.notch_half_width;

    result.detections.resize(map.rows.size());
    parallel_for(map.rows.size(), threads, [&](std::size_t i) {
        const auto& row = map.rows[i];
        Detection det = classify_bin(row, config, std::nullopt, result.noise_power);
        // A body line folded into the wake band still counts when the comb
        // reaches speeds no wake return has.
        const bool fast = std::abs(det.dominant_velocity) > config.wake_speed_max;
        const auto outside = std::count_if(det.doppler_peaks.begin(), det.doppler_peaks.end(), [&](const auto& p) {
            return std::abs(p.velocity) > config.wake_speed_max;
        });
        if (det.cls != TargetClass::Noise && (fast || outside >= config.jem_min_lines)) {
            if (auto jem = jem_comb_estimate(row, jem_options)) {
                if (fast || lines_beyond(*jem, config.wake_speed_max) >= config.jem_min_lines) {
                    det = classify_bin(row, config, jem, result.noise_power);
                }
            }
        }
        det.frame_index = map.frame_index;
        det.bin_index = static_cast<std::int64_t>(i);
        det.range_m = static_cast<double>(i) * map.range_resolution;
        result.detections[i] = std::move(det);
    });

    for (const auto& det : result.detections) {
        if (det.cls != TargetClass::Aircraft) continue;
        if (!result.aircraft_bin || det.dscr_db > result.detections[*result.aircraft_bin].dscr_db) {
            result.aircraft_bin = det.bin_index;
        }
    }
    if (result.aircraft_bin) {
        const std::int64_t ac = *result.aircraft_bin;
        result.wake_extent = wake_extent(result.detections, ac, config.wake_gap_tolerance);
        for (auto& det : result.detections) {
            if (det.cls == TargetClass::Wake && det.bin_index < ac) {
                const double x = static_cast<double>(ac - det.bin_index) * map.range_resolution;
                det.stage = stage_from_distance(x, config.wingspan).stage;
            }
        }
    }
    return result;
}

}  // namespace wakeradar
