#include "wakeradar/io/scenario_file.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <locale>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "wakeradar/errors.hpp"

namespace wakeradar::io {

namespace pt = boost::property_tree;

namespace {

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

pt::ptree parse_ini(std::string_view text) {
    std::istringstream in{std::string(text)};
    pt::ptree tree;
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        // Byte offset of the offending line.
        std::uint64_t offset = 0;
        for (unsigned long line = 1; line < e.line() && offset < text.size(); ++line) {
            const auto nl = text.find('\n', offset);
            if (nl == std::string_view::npos) break;
            offset = nl + 1;
        }
        throw FormatError("line " + std::to_string(e.line()) + ": " + e.message(), offset);
    }
    return tree;
}

double to_double(const std::string& field, const std::string& raw) {
    double value = 0.0;
    const char* begin = raw.data();
    const char* end = raw.data() + raw.size();
    if (begin != end && *begin == '+') ++begin;
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end || !std::isfinite(value)) {
        throw FormatError(field + ": expected a number, got \"" + raw + "\"", 0);
    }
    return value;
}

template <typename Int>
Int to_int(const std::string& field, const std::string& raw) {
    Int value{};
    const auto [ptr, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), value);
    if (ec != std::errc{} || ptr != raw.data() + raw.size()) {
        throw FormatError(field + ": expected an integer, got \"" + raw + "\"", 0);
    }
    return value;
}

std::string format_double(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

/// One section with key bookkeeping: every key must be consumed.
class Section {
public:
    Section(std::string name, const pt::ptree& tree) : name_(std::move(name)), tree_(tree) {
        for (const auto& [key, child] : tree_) {
            if (!child.empty()) throw FormatError(field(key) + ": nested keys are not allowed", 0);
            if (!keys_.insert(key).second) throw FormatError(field(key) + ": duplicate key", 0);
        }
    }

    std::optional<std::string> raw(const std::string& key) {
        const auto it = tree_.find(key);
        if (it == tree_.not_found()) return std::nullopt;
        used_.insert(key);
        return it->second.data();
    }
    std::string required(const std::string& key) {
        auto v = raw(key);
        if (!v) throw FormatError(field(key) + ": required key is missing", 0);
        return *v;
    }

    void number(const std::string& key, double& out, bool need = false) {
        if (auto v = need ? std::optional(required(key)) : raw(key)) out = to_double(field(key), *v);
    }
    template <typename Int>
    void integer(const std::string& key, Int& out, bool need = false) {
        if (auto v = need ? std::optional(required(key)) : raw(key)) out = to_int<Int>(field(key), *v);
    }

    void finish() const {
        for (const auto& key : keys_) {
            if (!used_.count(key)) throw FormatError(field(key) + ": unknown key", 0);
        }
    }
    std::string field(const std::string& key) const { return "[" + name_ + "] " + key; }

private:
    std::string name_;
    const pt::ptree& tree_;
    std::set<std::string> keys_;
    std::set<std::string> used_;
};

WakeSegmentSpec parse_segment(Section& s) {
    WakeSegmentSpec spec;
    s.integer("first_bin", spec.bins.first, true);
    s.integer("last_bin", spec.bins.last, true);
    const std::string stage = s.required("stage");
    const auto parsed_stage = parse_wake_stage(stage);
    if (!parsed_stage) throw FormatError(s.field("stage") + ": unknown stage \"" + stage + "\"", 0);
    spec.stage = *parsed_stage;
    s.number("circulation_m2ps", spec.circulation);
    s.number("core_radius_m", spec.core_radius);
    s.integer("n_scatterers", spec.n_scatterers);
    double level_db = 0.0;
    s.number("level_db", level_db, true);
    spec.amplitude_level = db_to_linear(level_db);
    if (auto slope = s.raw("slope")) {
        spec.slope_sign = parse_slope_sign(*slope);
        if (!spec.slope_sign) throw FormatError(s.field("slope") + ": unknown slope \"" + *slope + "\"", 0);
    }
    s.number("intermittency", spec.intermittency);
    s.number("drift_min_cells", spec.drift_min);
    s.number("drift_max_cells", spec.drift_max);
    s.number("linewidth_mps", spec.linewidth);
    s.finish();
    return spec;
}

void write_segment(std::ostream& out, const std::string& name, const WakeSegmentSpec& spec) {
    out << "[" << name << "]\n";
    out << "first_bin = " << spec.bins.first << "\n";
    out << "last_bin = " << spec.bins.last << "\n";
    out << "stage = " << to_string(spec.stage) << "\n";
    out << "circulation_m2ps = " << format_double(spec.circulation) << "\n";
    out << "core_radius_m = " << format_double(spec.core_radius) << "\n";
    out << "n_scatterers = " << spec.n_scatterers << "\n";
    out << "level_db = " << format_double(10.0 * std::log10(spec.amplitude_level)) << "\n";
    if (spec.slope_sign) out << "slope = " << to_string(*spec.slope_sign) << "\n";
    out << "intermittency = " << format_double(spec.intermittency) << "\n";
    out << "drift_min_cells = " << format_double(spec.drift_min) << "\n";
    out << "drift_max_cells = " << format_double(spec.drift_max) << "\n";
    out << "linewidth_mps = " << format_double(spec.linewidth) << "\n\n";
}

/// "wake.3" -> 3; anything else is rejected.
std::optional<int> indexed(const std::string& name, const std::string& prefix) {
    if (name.rfind(prefix + ".", 0) != 0) return std::nullopt;
    const std::string tail = name.substr(prefix.size() + 1);
    int n = 0;
    const auto [ptr, ec] = std::from_chars(tail.data(), tail.data() + tail.size(), n);
    if (tail.empty() || ec != std::errc{} || ptr != tail.data() + tail.size()) {
        throw FormatError("[" + name + "]: section index must be an integer", 0);
    }
    return n;
}

}  // namespace

Scenario parse_scenario(std::string_view text) {
    const pt::ptree tree = parse_ini(text);
    Scenario sc;
    bool have_radar = false;
    std::map<int, WakeSegmentSpec> wakes;
    std::map<int, WakeSegmentSpec> ghosts;
    for (const auto& [name, body] : tree) {
        if (body.empty() && !body.data().empty()) throw FormatError(name + ": key outside any section", 0);
        Section s(name, body);
        if (name == "radar") {
            have_radar = true;
            auto& r = sc.radar;
            s.number("carrier_hz", r.carrier_frequency, true);
            s.number("prf_hz", r.prf, true);
            s.integer("n_pulses", r.n_pulses, true);
            s.number("bandwidth_hz", r.bandwidth, true);
            s.integer("n_range_bins", r.n_range_bins, true);
            s.number("peak_power_w", r.peak_power);
            s.number("noise_figure", r.noise_figure);
            s.number("system_temperature_k", r.system_temperature);
            s.number("antenna_gain", r.antenna_gain);
            s.number("effective_aperture_m2", r.effective_aperture);
            s.finish();
        } else if (name == "aircraft") {
            AircraftSpec a;
            s.integer("range_bin", a.range_bin, true);
            s.number("radial_velocity_mps", a.radial_velocity_true, true);
            s.number("snr_db", a.snr_target, true);
            s.number("jem1_spacing_mps", a.jem_stage1.line_spacing);
            s.integer("jem1_lines_each_side", a.jem_stage1.n_lines_each_side);
            s.number("jem1_relative_amplitude", a.jem_stage1.relative_amplitude);
            s.number("jem2_spacing_mps", a.jem_stage2.line_spacing);
            s.number("jem2_offset_mps", a.jem_stage2.series_offset);
            s.number("jem2_relative_amplitude", a.jem_stage2.relative_amplitude);
            s.number("wingspan_m", a.wingspan);
            s.finish();
            sc.aircraft = a;
        } else if (name == "clutter") {
            s.number("half_width_mps", sc.clutter.half_width);
            s.number("power_db", sc.clutter.power);
            s.integer("n_lines", sc.clutter.n_lines);
            s.finish();
        } else if (name == "sim") {
            s.integer("n_frames", sc.n_frames);
            s.number("frame_interval_s", sc.frame_interval);
            s.integer("seed", sc.seed);
            s.number("noise_floor", sc.noise_floor);
            s.number("ghost_velocity_cap_mps", sc.ghost_velocity_cap);
            s.finish();
        } else if (auto n = indexed(name, "wake")) {
            wakes[*n] = parse_segment(s);
        } else if (auto g = indexed(name, "ghost")) {
            ghosts[*g] = parse_segment(s);
        } else {
            throw FormatError("[" + name + "]: unknown section", 0);
        }
    }
    if (!have_radar) throw FormatError("[radar]: required section is missing", 0);
    for (auto& [n, spec] : wakes) sc.wake_segments.push_back(spec);
    for (auto& [n, spec] : ghosts) sc.ghost_segments.push_back(spec);
    validate(sc);
    return sc;
}

Scenario load_scenario(const std::filesystem::path& path) { return parse_scenario(read_text(path)); }

std::string format_scenario(const Scenario& sc) {
    std::ostringstream out;
    out.imbue(std::locale::classic());
    const auto& r = sc.radar;
    out << "[radar]\n"
        << "carrier_hz = " << format_double(r.carrier_frequency) << "\n"
        << "prf_hz = " << format_double(r.prf) << "\n"
        << "n_pulses = " << r.n_pulses << "\n"
        << "bandwidth_hz = " << format_double(r.bandwidth) << "\n"
        << "n_range_bins = " << r.n_range_bins << "\n"
        << "peak_power_w = " << format_double(r.peak_power) << "\n"
        << "noise_figure = " << format_double(r.noise_figure) << "\n"
        << "system_temperature_k = " << format_double(r.system_temperature) << "\n"
        << "antenna_gain = " << format_double(r.antenna_gain) << "\n"
        << "effective_aperture_m2 = " << format_double(r.effective_aperture) << "\n\n";
    if (sc.aircraft) {
        const auto& a = *sc.aircraft;
        out << "[aircraft]\n"
            << "range_bin = " << a.range_bin << "\n"
            << "radial_velocity_mps = " << format_double(a.radial_velocity_true) << "\n"
            << "snr_db = " << format_double(a.snr_target) << "\n"
            << "jem1_spacing_mps = " << format_double(a.jem_stage1.line_spacing) << "\n"
            << "jem1_lines_each_side = " << a.jem_stage1.n_lines_each_side << "\n"
            << "jem1_relative_amplitude = " << format_double(a.jem_stage1.relative_amplitude) << "\n"
            << "jem2_spacing_mps = " << format_double(a.jem_stage2.line_spacing) << "\n"
            << "jem2_offset_mps = " << format_double(a.jem_stage2.series_offset) << "\n"
            << "jem2_relative_amplitude = " << format_double(a.jem_stage2.relative_amplitude) << "\n"
            << "wingspan_m = " << format_double(a.wingspan) << "\n\n";
    }
    for (std::size_t i = 0; i < sc.wake_segments.size(); ++i) {
        write_segment(out, "wake." + std::to_string(i), sc.wake_segments[i]);
    }
    for (std::size_t i = 0; i < sc.ghost_segments.size(); ++i) {
        write_segment(out, "ghost." + std::to_string(i), sc.ghost_segments[i]);
    }
    out << "[clutter]\n"
        << "half_width_mps = " << format_double(sc.clutter.half_width) << "\n"
        << "power_db = " << format_double(sc.clutter.power) << "\n"
        << "n_lines = " << sc.clutter.n_lines << "\n\n";
    out << "[sim]\n"
        << "n_frames = " << sc.n_frames << "\n"
        << "frame_interval_s = " << format_double(sc.frame_interval) << "\n"
        << "seed = " << sc.seed << "\n"
        << "noise_floor = " << format_double(sc.noise_floor) << "\n"
        << "ghost_velocity_cap_mps = " << format_double(sc.ghost_velocity_cap) << "\n";
    return out.str();
}

DetectorConfig parse_detector_config(std::string_view text) {
    const pt::ptree tree = parse_ini(text);
    DetectorConfig cfg;
    for (const auto& [name, body] : tree) {
        if (name != "detector") throw FormatError("[" + name + "]: unknown section", 0);
        Section s(name, body);
        s.number("notch_half_width_mps", cfg.notch_half_width);
        s.number("dscr_threshold_db", cfg.dscr_threshold);
        s.number("aircraft_min_speed_mps", cfg.aircraft_min_speed);
        s.number("wake_speed_min_mps", cfg.wake_speed_min);
        s.number("wake_speed_max_mps", cfg.wake_speed_max);
        s.integer("min_peaks_for_wake", cfg.min_peaks_for_wake);
        s.integer("wake_gap_tolerance_bins", cfg.wake_gap_tolerance);
        s.number("min_prominence", cfg.min_prominence);
        s.number("peak_floor_db", cfg.peak_floor_db);
        s.number("wingspan_m", cfg.wingspan);
        s.integer("jem_min_lines", cfg.jem_min_lines);
        double noise = 0.0;
        if (body.find("noise_floor") != body.not_found()) {
            s.number("noise_floor", noise);
            cfg.noise_floor = noise;
        }
        s.finish();
    }
    validate(cfg);
    return cfg;
}

DetectorConfig load_detector_config(const std::filesystem::path& path) {
    return parse_detector_config(read_text(path));
}

std::string format_detector_config(const DetectorConfig& cfg) {
    std::ostringstream out;
    out.imbue(std::locale::classic());
    out << "[detector]\n"
        << "notch_half_width_mps = " << format_double(cfg.notch_half_width) << "\n"
        << "dscr_threshold_db = " << format_double(cfg.dscr_threshold) << "\n"
        << "aircraft_min_speed_mps = " << format_double(cfg.aircraft_min_speed) << "\n"
        << "wake_speed_min_mps = " << format_double(cfg.wake_speed_min) << "\n"
        << "wake_speed_max_mps = " << format_double(cfg.wake_speed_max) << "\n"
        << "min_peaks_for_wake = " << cfg.min_peaks_for_wake << "\n"
        << "wake_gap_tolerance_bins = " << cfg.wake_gap_tolerance << "\n"
        << "min_prominence = " << format_double(cfg.min_prominence) << "\n"
        << "peak_floor_db = " << format_double(cfg.peak_floor_db) << "\n"
        << "wingspan_m = " << format_double(cfg.wingspan) << "\n"
        << "jem_min_lines = " << cfg.jem_min_lines << "\n";
    if (cfg.noise_floor) out << "noise_floor = " << format_double(*cfg.noise_floor) << "\n";
    return out.str();
}

}  // namespace wakeradar::io
