#include "wakeradar/io/render.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <locale>
#include <string>

#include "wakeradar/errors.hpp"

namespace wakeradar::io {

namespace {

std::size_t decimation(std::size_t n, std::size_t max_height) {
    std::size_t factor = 1;
    while (max_height > 0 && n / factor > max_height && factor < n) factor *= 2;
    return factor;
}

std::uint8_t to_level(double amplitude, double peak, const RenderOptions& options) {
    if (!(peak > 0.0) || !(amplitude > 0.0)) return 0;
    double x = 0.0;
    if (options.scale == Scale::Linear) {
        x = amplitude / peak;
    } else {
        const double db = 20.0 * std::log10(amplitude / peak);
        x = 1.0 + db / options.dynamic_range_db;
    }
    x = std::clamp(x, 0.0, 1.0);
    return static_cast<std::uint8_t>(std::lround(255.0 * x));
}

/// Black -> red -> yellow -> white; luminance rises monotonically.
void colorize(std::uint8_t level, std::uint8_t* rgb) {
    const double x = level / 255.0;
    rgb[0] = static_cast<std::uint8_t>(std::lround(255.0 * std::clamp(3.0 * x, 0.0, 1.0)));
    rgb[1] = static_cast<std::uint8_t>(std::lround(255.0 * std::clamp(3.0 * x - 1.0, 0.0, 1.0)));
    rgb[2] = static_cast<std::uint8_t>(std::lround(255.0 * std::clamp(3.0 * x - 2.0, 0.0, 1.0)));
}

/// `value(column, cell)` with `n_cells` Doppler cells in ascending velocity.
Image render_grid(std::size_t width, std::size_t n_cells,
                  const std::function<double(std::size_t, std::size_t)>& value, const RenderOptions& options) {
    if (width == 0 || n_cells == 0) throw DimensionError("cannot render an empty map");
    if (options.scale == Scale::Db && !(options.dynamic_range_db > 0.0)) {
        throw DomainError("dynamic_range_db must be positive");
    }
    const std::size_t factor = decimation(n_cells, options.max_height);
    Image img;
    img.width = width;
    img.height = n_cells / factor;
    img.channels = options.color ? 3 : 1;

    std::vector<double> cells(img.width * img.height, 0.0);
    double peak = 0.0;
    for (std::size_t x = 0; x < img.width; ++x) {
        for (std::size_t r = 0; r < img.height; ++r) {
            double sum = 0.0;
            for (std::size_t j = 0; j < factor; ++j) sum += value(x, r * factor + j);
            const double v = sum / static_cast<double>(factor);
            // Highest velocity on the top row.
            cells[(img.height - 1 - r) * img.width + x] = v;
            peak = std::max(peak, v);
        }
    }
    img.pixels.resize(cells.size() * static_cast<std::size_t>(img.channels));
    for (std::size_t i = 0; i < cells.size(); ++i) {
        const std::uint8_t level = to_level(cells[i], peak, options);
        if (img.channels == 1) {
            img.pixels[i] = level;
        } else {
            colorize(level, &img.pixels[3 * i]);
        }
    }
    return img;
}

}  // namespace

Image render_map(const RangeDopplerMap& map, const RenderOptions& options) {
    if (map.rows.empty()) throw DimensionError("cannot render an empty map");
    const std::size_t n = map.rows.front().size();
    for (const auto& row : map.rows) {
        if (row.size() != n) throw DimensionError("range-Doppler rows differ in length");
    }
    return render_grid(
        map.rows.size(), n, [&](std::size_t x, std::size_t c) { return map.rows[x].amplitudes[c]; }, options);
}

Image render_spectrogram(const Spectrogram& sg, const RenderOptions& options) {
    return render_grid(
        sg.n_slices, sg.n_freq, [&](std::size_t t, std::size_t c) { return sg.at(t, c); }, options);
}

void write_image(const Image& image, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    out.imbue(std::locale::classic());
    out << (image.channels == 3 ? "P6" : "P5") << '\n' << image.width << ' ' << image.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(image.pixels.data()), static_cast<std::streamsize>(image.pixels.size()));
    if (!out) throw Error("write failed: " + path.string());
}

}  // namespace wakeradar::io
