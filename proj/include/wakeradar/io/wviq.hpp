#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <vector>

#include "wakeradar/cpi_frame.hpp"
#include "wakeradar/radar_params.hpp"

namespace wakeradar::io {

inline constexpr char kWviqMagic[4] = {'W', 'V', 'I', 'Q'};
inline constexpr std::uint16_t kWviqVersion = 1;
inline constexpr std::uint64_t kWviqHeaderBytes = 42;

struct WviqHeader {
    std::uint16_t version = kWviqVersion;
    double carrier_frequency = 0.0;  // Hz
    double prf = 0.0;                // Hz
    double range_resolution = 0.0;   // m
    std::uint32_t n_pulses = 0;
    std::uint32_t n_bins = 0;
    std::uint32_t n_frames = 0;

    std::uint64_t frame_bytes() const { return std::uint64_t{n_bins} * n_pulses * 8; }
    std::uint64_t payload_bytes() const { return frame_bytes() * n_frames; }
    /// Radar parameters recoverable from the header (bandwidth from the range
    /// resolution, everything else at its default).
    RadarConfig radar() const;
};

WviqHeader make_header(const RadarConfig& config, std::uint32_t n_frames);

struct WviqData {
    WviqHeader header;
    std::vector<CpiFrame> frames;
};

void write_wviq(const std::vector<CpiFrame>& frames, const RadarConfig& config,
                const std::filesystem::path& path);
/// Throws FormatError with the byte offset on bad magic, version or length.
WviqData read_wviq(const std::filesystem::path& path);

/// Frame-at-a-time writer; the frame count is fixed up front.
class WviqWriter {
public:
    WviqWriter(const std::filesystem::path& path, const RadarConfig& config, std::uint32_t n_frames);
    void write(const CpiFrame& frame);
    /// Throws FormatError if fewer frames than announced were written.
    void close();
    ~WviqWriter();

    WviqWriter(const WviqWriter&) = delete;
    WviqWriter& operator=(const WviqWriter&) = delete;

private:
    std::ofstream out_;
    WviqHeader header_;
    std::uint32_t written_ = 0;
    bool closed_ = false;
};

/// Validates the header and total length on open, then reads frames on demand.
class WviqReader {
public:
    explicit WviqReader(const std::filesystem::path& path);
    const WviqHeader& header() const { return header_; }
    CpiFrame read(std::uint32_t frame_index);

private:
    std::ifstream in_;
    WviqHeader header_;
};

}  // namespace wakeradar::io
