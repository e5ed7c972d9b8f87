#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "wakeradar/cpi_frame.hpp"
#include "wakeradar/radar_params.hpp"

namespace wakeradar {

enum class Window { Rectangular, Hann };

/// Window coefficients of length n (periodic Hann).
std::vector<double> window_coefficients(Window window, std::size_t n);

/// FFT-shifted magnitude spectrum of one range cell: index N/2 is zero velocity,
/// index i sits at (i - N/2) * velocity_resolution.
struct DopplerSpectrum {
    std::vector<double> amplitudes;
    std::vector<double> velocity_axis;  // m/s
    std::vector<bool> notch_mask;       // true = excluded as clutter
    std::int64_t bin_index = -1;
    double velocity_step = 0.0;  // m/s per cell
    double raw_power = 0.0;      // mean |x|^2 of the time samples

    std::size_t size() const { return amplitudes.size(); }
    /// Axis index for a velocity, rounded to the nearest cell and clamped.
    std::size_t index_of(double velocity) const;
};

struct RangeDopplerMap {
    std::vector<DopplerSpectrum> rows;
    std::int64_t frame_index = 0;
    double range_resolution = 0.0;  // m per row
};

/// Short-time magnitude spectra within one CPI. Row t is the shifted spectrum
/// of the slice starting at pulse t * hop.
struct Spectrogram {
    std::vector<double> magnitudes;  // row-major [n_slices x n_freq]
    std::size_t n_slices = 0;
    std::size_t n_freq = 0;
    std::vector<double> time_axis;      // s, slice centres
    std::vector<double> velocity_axis;  // m/s
    double cpi_seconds = 0.0;
    double cpi_velocity_resolution = 0.0;  // full-CPI Doppler cell width

    double at(std::size_t slice, std::size_t freq) const { return magnitudes[slice * n_freq + freq]; }
    std::span<const double> slice(std::size_t t) const {
        return {magnitudes.data() + t * n_freq, n_freq};
    }
};

/// Doppler spectrum of a pulse train. Throws DimensionError unless the length
/// equals config.n_pulses.
DopplerSpectrum doppler_spectrum(std::span<const std::complex<double>> pulses,
                                 const RadarConfig& config, Window window = Window::Rectangular);
DopplerSpectrum doppler_spectrum(std::span<const std::complex<float>> pulses,
                                 const RadarConfig& config, Window window = Window::Rectangular);


/// One spectrum per range bin; `threads` only affects speed, never the result.
RangeDopplerMap range_doppler_map(const CpiFrame& frame, const RadarConfig& config,
                                  Window window = Window::Rectangular, unsigned threads = 1);

/// Marks |velocity| <= half_width as clutter. Amplitudes are left untouched.
DopplerSpectrum notch_clutter(DopplerSpectrum spectrum, double half_width);
void notch_clutter_in_place(DopplerSpectrum& spectrum, double half_width);

inline constexpr std::size_t kDefaultSpectrogramWindow = 256;
inline constexpr std::size_t kDefaultSpectrogramHop = 64;

Spectrogram micro_doppler_spectrogram(std::span<const std::complex<double>> pulses,
                                      const RadarConfig& config,
                                      std::size_t win_len = kDefaultSpectrogramWindow,
                                      std::size_t hop = kDefaultSpectrogramHop,
                                      Window window = Window::Hann);
Spectrogram micro_doppler_spectrogram(std::span<const std::complex<float>> pulses,
                                      const RadarConfig& config,
                                      std::size_t win_len = kDefaultSpectrogramWindow,
                                      std::size_t hop = kDefaultSpectrogramHop,
                                      Window window = Window::Hann);

}  // namespace wakeradar
