#pragma once

#include "wakeradar/cpi_frame.hpp"
#include "wakeradar/dscr_detect.hpp"
#include "wakeradar/radar_params.hpp"

namespace wakeradar {

/// Range-Doppler FFTs followed by the detection scan of every bin.
ScanResult process_frame(const CpiFrame& frame, const RadarConfig& radar, const DetectorConfig& detector,
                         unsigned threads = 1);

}  // namespace wakeradar
