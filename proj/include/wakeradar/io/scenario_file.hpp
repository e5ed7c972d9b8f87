#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "wakeradar/dscr_detect.hpp"
#include "wakeradar/scene_sim.hpp"

namespace wakeradar::io {

/// INI-style scenario text: sections [radar], [aircraft], [wake.N], [ghost.N],
/// [clutter], [sim]. Unknown sections or keys and missing required keys throw
/// FormatError naming the field.
Scenario parse_scenario(std::string_view text);
Scenario load_scenario(const std::filesystem::path& path);
std::string format_scenario(const Scenario& scenario);

/// [detector] section; every key is optional.
DetectorConfig parse_detector_config(std::string_view text);
DetectorConfig load_detector_config(const std::filesystem::path& path);
std::string format_detector_config(const DetectorConfig& config);

/// Environment variable naming the default detector config path.
inline constexpr const char* kDetectorConfigEnv = "WAKERADAR_DETECTOR_CONFIG";

}  // namespace wakeradar::io
