#include "wakeradar/io/detections_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <locale>
#include <sstream>

#include <nlohmann/json.hpp>

namespace wakeradar::io {

namespace {

std::vector<const Detection*> ordered(std::span<const Detection> detections) {
    std::vector<const Detection*> rows;
    rows.reserve(detections.size());
    for (const auto& d : detections) rows.push_back(&d);
    std::stable_sort(rows.begin(), rows.end(), [](const Detection* a, const Detection* b) {
        return std::tie(a->frame_index, a->bin_index) < std::tie(b->frame_index, b->bin_index);
    });
    return rows;
}

/// Rounded to the printed precision so JSON and CSV agree.
double rounded(double value) {
    const double r = std::round(value * 1000.0) / 1000.0;
    return r == 0.0 ? 0.0 : r;
}

nlohmann::json to_json(const Detection& d) {
    nlohmann::json j;
    j["frame"] = d.frame_index;
    j["bin"] = d.bin_index;
    j["range_m"] = rounded(d.range_m);
    j["class"] = std::string(to_string(d.cls));
    j["snr_db"] = rounded(d.snr_db);
    j["dscr_db"] = rounded(d.dscr_db);
    j["velocity_mps"] = rounded(d.dominant_velocity);
    j["stage"] = d.stage ? nlohmann::json(std::string(to_string(*d.stage))) : nlohmann::json(nullptr);
    if (d.jem) {
        j["jem"] = {{"body_velocity", rounded(d.jem->body_velocity)},
                    {"stage1_spacing", rounded(d.jem->stage1_spacing)},
                    {"stage1_lines", d.jem->stage1_lines.size()},
                    {"stage2_lines", d.jem->stage2_lines.size()},
                    {"confidence", rounded(d.jem->confidence)}};
        if (d.jem->stage2_spacing) j["jem"]["stage2_spacing"] = rounded(*d.jem->stage2_spacing);
        if (d.jem->stage2_offset) j["jem"]["stage2_offset"] = rounded(*d.jem->stage2_offset);
    }
    return j;
}

}  // namespace

std::string format_fixed(double value, int decimals) {
    if (!std::isfinite(value)) return std::isnan(value) ? "nan" : (value > 0 ? "inf" : "-inf");
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::fixed, decimals);
    std::string s(buf, ptr);
    // Avoid a signed zero such as "-0.000".
    if (s.front() == '-' && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
    return s;
}

void emit_detections(std::ostream& out, std::span<const Detection> detections, DetectionFormat format) {
    // Integers would otherwise pick up the stream's digit grouping.
    const std::locale previous = out.imbue(std::locale::classic());
    struct Restore {
        std::ostream& out;
        const std::locale& locale;
        ~Restore() { out.imbue(locale); }
    } restore{out, previous};
    const auto rows = ordered(detections);
    if (format == DetectionFormat::Csv) {
        out << kDetectionCsvHeader << '\n';
        for (const Detection* d : rows) {
            out << d->frame_index << ',' << d->bin_index << ',' << format_fixed(d->range_m) << ','
                << to_string(d->cls) << ',' << format_fixed(d->snr_db) << ',' << format_fixed(d->dscr_db) << ','
                << format_fixed(d->dominant_velocity) << ',' << (d->stage ? to_string(*d->stage) : "") << '\n';
        }
        return;
    }
    nlohmann::json arr = nlohmann::json::array();
    for (const Detection* d : rows) arr.push_back(to_json(*d));
    out << arr.dump(2) << '\n';
}

std::string emit_detections(std::span<const Detection> detections, DetectionFormat format) {
    std::ostringstream out;
    emit_detections(out, detections, format);
    return out.str();
}

void emit_track_jsonl(std::ostream& out, const Track& track) {
    for (const auto& f : track.frames) {
        nlohmann::json j;
        j["frame"] = f.frame_index;
        j["timestamp_s"] = rounded(f.timestamp);
        j["aircraft_bin"] = f.aircraft_bin ? nlohmann::json(*f.aircraft_bin) : nlohmann::json(nullptr);
        j["aircraft_velocity_mps"] = rounded(f.aircraft_velocity);
        if (f.wake_extent.empty()) {
            j["wake_extent"] = nullptr;
        } else {
            j["wake_extent"] = {f.wake_extent.first, f.wake_extent.last};
        }
        j["wake_length_m"] = rounded(f.wake_length_m);
        out << j.dump() << '\n';
    }
    nlohmann::json summary;
    summary["status"] = std::string(to_string(track.status));
    summary["frames"] = track.frames.size();
    out << summary.dump() << '\n';
}

}  // namespace wakeradar::io
