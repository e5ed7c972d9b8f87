#include "wakeradar/pipeline.hpp"

#include "wakeradar/dsp_core.hpp"

namespace wakeradar {

ScanResult process_frame(const CpiFrame& frame, const RadarConfig& radar, const DetectorConfig& detector,
                         unsigned threads) {
    RangeDopplerMap map = range_doppler_map(frame, radar, Window::Rectangular, threads);
    ScanResult result = scan_frame(map, detector, threads);
    result.frame_index = frame.frame_index;
    for (auto& det : result.detections) det.frame_index = frame.frame_index;
    return result;
}

}  // namespace wakeradar
