#pragma once

#include <ostream>
#include <span>
#include <string>

#include "wakeradar/dscr_detect.hpp"
#include "wakeradar/tracker.hpp"

namespace wakeradar::io {

enum class DetectionFormat { Csv, Json };

inline constexpr const char* kDetectionCsvHeader = "frame,bin,range_m,class,snr_db,dscr_db,velocity_mps,stage";

/// Rows ordered by (frame, bin), numbers with three decimals and a dot
/// separator regardless of locale.
void emit_detections(std::ostream& out, std::span<const Detection> detections, DetectionFormat format);
std::string emit_detections(std::span<const Detection> detections, DetectionFormat format);

/// Fixed-point text with `decimals` digits, independent of the C++ locale.
std::string format_fixed(double value, int decimals = 3);

/// One JSON object per track frame, newline-terminated.
void emit_track_jsonl(std::ostream& out, const Track& track);

}  // namespace wakeradar::io
