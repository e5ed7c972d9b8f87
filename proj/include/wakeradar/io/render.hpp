#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "wakeradar/dsp_core.hpp"

namespace wakeradar::io {

enum class Scale { Db, Linear };

struct RenderOptions {
    Scale scale = Scale::Db;
    double dynamic_range_db = 60.0;  // below the peak, for Scale::Db
    std::size_t max_height = 2048;   // Doppler cells; more are averaged down by powers of two
    bool color = false;              // P6 with a monotone colormap instead of P5
};

struct Image {
    std::size_t width = 0;
    std::size_t height = 0;
    int channels = 1;
    std::vector<std::uint8_t> pixels;  // row-major, top row first

    std::uint8_t at(std::size_t x, std::size_t y, int c = 0) const {
        return pixels[(y * width + x) * static_cast<std::size_t>(channels) + static_cast<std::size_t>(c)];
    }
};

/// Range bins across, Doppler cells down with the most positive velocity on
/// the top row.
Image render_map(const RangeDopplerMap& map, const RenderOptions& options = {});
/// Time slices across, Doppler down.
Image render_spectrogram(const Spectrogram& spectrogram, const RenderOptions& options = {});

/// Binary PGM (P5) or PPM (P6) by channel count.
void write_image(const Image& image, const std::filesystem::path& path);

}  // namespace wakeradar::io
