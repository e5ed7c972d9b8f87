#include "wakeradar/dsp_core.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <string>

#include "wakeradar/errors.hpp"
#include "wakeradar/parallel.hpp"

namespace wakeradar {

namespace {

// The FFTW planner is not thread-safe; execution of an existing plan is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

class FftPlan {
public:
    explicit FftPlan(std::size_t n) : n_(n) {
        in_ = fftw_alloc_complex(n);
        out_ = fftw_alloc_complex(n);
        std::lock_guard lock(planner_mutex());
        plan_ = fftw_plan_dft_1d(static_cast<int>(n), in_, out_, FFTW_FORWARD, FFTW_ESTIMATE);
    }
    ~FftPlan() {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(plan_);
        fftw_free(in_);
        fftw_free(out_);
    }
    FftPlan(const FftPlan&) = delete;
    FftPlan& operator=(const FftPlan&) = delete;

    std::complex<double>* input() { return reinterpret_cast<std::complex<double>*>(in_); }
    const std::complex<double>* output() const {
        return reinterpret_cast<const std::complex<double>*>(out_);
    }
    void execute() { fftw_execute(plan_); }
    std::size_t size() const { return n_; }

private:
    std::size_t n_;
    fftw_complex* in_ = nullptr;
    fftw_complex* out_ = nullptr;
    fftw_plan plan_ = nullptr;
};

FftPlan& plan_for(std::size_t n) {
    thread_local std::map<std::size_t, std::unique_ptr<FftPlan>> cache;
    auto& slot = cache[n];
    if (!slot) slot = std::make_unique<FftPlan>(n);
    return *slot;
}

/// Windowed, shifted magnitude spectrum written into `out` (size n).
template <typename Sample>
void shifted_magnitudes(std::span<const Sample> samples, std::span<const double> window,
                        std::span<double> out) {
    const std::size_t n = samples.size();
    FftPlan& plan = plan_for(n);
    std::complex<double>* in = plan.input();
    for (std::size_t i = 0; i < n; ++i) {
        const std::complex<double> s(samples[i].real(), samples[i].imag());
        in[i] = window.empty() ? s : s * window[i];
    }
    plan.execute();
    const std::complex<double>* spec = plan.output();
    const std::size_t half = n / 2;
    for (std::size_t i = 0; i < n; ++i) {
        // Shifted index i holds FFT bin (i - n/2) mod n.
        const std::size_t k = (i + n - half) % n;
        out[i] = std::abs(spec[k]);
    }
}

std::vector<double> velocity_axis(std::size_t n, double step) {
    std::vector<double> axis(n);
    const auto half = static_cast<std::int64_t>(n / 2);
    for (std::size_t i = 0; i < n; ++i) {
        axis[i] = static_cast<double>(static_cast<std::int64_t>(i) - half) * step;
    }
    return axis;
}

template <typename Sample>
DopplerSpectrum spectrum_impl(std::span<const Sample> pulses, const RadarConfig& config,
                              Window window) {
    validate(config);
    if (pulses.size() != config.n_pulses) {
        throw DimensionError("pulse series has " + std::to_string(pulses.size()) +
                             " samples, configuration expects " +
                             std::to_string(config.n_pulses));
    }
    const std::size_t n = pulses.size();
    DopplerSpectrum spectrum;
    spectrum.velocity_step = velocity_resolution(config);
    spectrum.velocity_axis = velocity_axis(n, spectrum.velocity_step);
    spectrum.amplitudes.assign(n, 0.0);
    spectrum.notch_mask.assign(n, false);

    std::vector<double> coeffs;
    if (window != Window::Rectangular) coeffs = window_coefficients(window, n);
    shifted_magnitudes<Sample>(pulses, coeffs, spectrum.amplitudes);

    double power = 0.0;
    for (const auto& s : pulses) power += std::norm(std::complex<double>(s.real(), s.imag()));
    spectrum.raw_power = power / static_cast<double>(n);
    return spectrum;
}

template <typename Sample>
Spectrogram spectrogram_impl(std::span<const Sample> pulses, const RadarConfig& config,
                             std::size_t win_len, std::size_t hop, Window window) {
    validate(config);
    if (pulses.size() != config.n_pulses) {
        throw DimensionError("pulse series has " + std::to_string(pulses.size()) +
                             " samples, configuration expects " +
                             std::to_string(config.n_pulses));
    }
    if (win_len < 2 || win_len > pulses.size()) {
        throw DimensionError("spectrogram window must lie in [2, n_pulses], got " +
                             std::to_string(win_len));
    }
    if (hop < 1) throw DimensionError("spectrogram hop must be at least 1");

    Spectrogram sg;
    sg.n_freq = win_len;
    sg.n_slices = (pulses.size() - win_len) / hop + 1;
    sg.magnitudes.assign(sg.n_slices * sg.n_freq, 0.0);
    sg.cpi_seconds = config.cpi_seconds();
    sg.cpi_velocity_resolution = velocity_resolution(config);

    RadarConfig slice_config = config;
    slice_config.n_pulses = static_cast<std::uint32_t>(win_len);
    sg.velocity_axis = velocity_axis(win_len, velocity_resolution(slice_config));

    std::vector<double> coeffs;
    if (window != Window::Rectangular) coeffs = window_coefficients(window, win_len);
    sg.time_axis.resize(sg.n_slices);
    for (std::size_t t = 0; t < sg.n_slices; ++t) {
        const std::size_t start = t * hop;
        sg.time_axis[t] = (static_cast<double>(start) + 0.5 * static_cast<double>(win_len)) / config.prf;
        shifted_magnitudes<Sample>(pulses.subspan(start, win_len), coeffs,
                                   std::span<double>(sg.magnitudes.data() + t * win_len, win_len));
    }
    return sg;
}

}  // namespace

std::vector<double> window_coefficients(Window window, std::size_t n) {
    std::vector<double> w(n, 1.0);
    if (window == Window::Hann) {
        for (std::size_t i = 0; i < n; ++i) {
            w[i] = 0.5 * (1.0 - std::cos(2.0 * kPi * static_cast<double>(i) / static_cast<double>(n)));
        }
    }
    return w;
}

std::size_t DopplerSpectrum::index_of(double velocity) const {
    if (amplitudes.empty() || velocity_step <= 0.0) return 0;
    const double half = static_cast<double>(amplitudes.size() / 2);
    const double idx = std::round(velocity / velocity_step + half);
    return static_cast<std::size_t>(std::clamp(idx, 0.0, static_cast<double>(amplitudes.size() - 1)));
}

DopplerSpectrum doppler_spectrum(std::span<const std::complex<double>> pulses,
                                 const RadarConfig& config, Window window) {
    return spectrum_impl(pulses, config, window);
}

DopplerSpectrum doppler_spectrum(std::span<const std::complex<float>> pulses,
                                 const RadarConfig& config, Window window) {
    return spectrum_impl(pulses, config, window);
}

RangeDopplerMap range_doppler_map(const CpiFrame& frame, const RadarConfig& config,
                                  Window window, unsigned threads) {
    validate(config);
    if (frame.n_bins != config.n_range_bins || frame.n_pulses != config.n_pulses ||
        frame.iq.size() != static_cast<std::size_t>(frame.n_bins) * frame.n_pulses) {
        throw DimensionError("frame is " + std::to_string(frame.n_bins) + " x " +
                             std::to_string(frame.n_pulses) + ", configuration expects " +
                             std::to_string(config.n_range_bins) + " x " +
                             std::to_string(config.n_pulses));
    }
    RangeDopplerMap map;
    map.frame_index = frame.frame_index;
    map.range_resolution = range_resolution(config.bandwidth);
    map.rows.resize(frame.n_bins);
    parallel_for(frame.n_bins, threads, [&](std::size_t bin) {
        map.rows[bin] = doppler_spectrum(frame.row(bin), config, window);
        map.rows[bin].bin_index = static_cast<std::int64_t>(bin);
    });
    return map;
}

void notch_clutter_in_place(DopplerSpectrum& spectrum, double half_width) {
    if (half_width < 0.0) throw DomainError("notch half-width must be non-negative");
    spectrum.notch_mask.resize(spectrum.size(), false);
    for (std::size_t i = 0; i < spectrum.size(); ++i) {
        if (std::abs(spectrum.velocity_axis[i]) <= half_width) spectrum.notch_mask[i] = true;
    }
}

DopplerSpectrum notch_clutter(DopplerSpectrum spectrum, double half_width) {
    notch_clutter_in_place(spectrum, half_width);
    return spectrum;
}

Spectrogram micro_doppler_spectrogram(std::span<const std::complex<double>> pulses,
                                      const RadarConfig& config, std::size_t win_len,
                                      std::size_t hop, Window window) {
    return spectrogram_impl(pulses, config, win_len, hop, window);
}

Spectrogram micro_doppler_spectrogram(std::span<const std::complex<float>> pulses,
                                      const RadarConfig& config, std::size_t win_len,
                                      std::size_t hop, Window window) {
    return spectrogram_impl(pulses, config, win_len, hop, window);
}

}  // namespace wakeradar
