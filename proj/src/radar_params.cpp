#include "wakeradar/radar_params.hpp"

#include <cmath>
#include <string>

#include "wakeradar/errors.hpp"

namespace wakeradar {

namespace {

void require_positive(double value, const char* name) {
    if (!(value > 0.0) || !std::isfinite(value)) {
        throw DomainError(std::string(name) + " must be positive and finite, got " +
                          std::to_string(value));
    }
}

}  // namespace

void validate(const RadarConfig& config) {
    require_positive(config.carrier_frequency, "carrier_frequency");
    require_positive(config.prf, "prf");
    require_positive(config.bandwidth, "bandwidth");
    if (config.n_pulses < 2) throw DomainError("n_pulses must be at least 2");
    if (config.n_range_bins < 1) throw DomainError("n_range_bins must be at least 1");
}

double wavelength_for(double carrier_frequency) {
    require_positive(carrier_frequency, "carrier_frequency");
    return kSpeedOfLight / carrier_frequency;
}

double wavelength(const RadarConfig& config) { return wavelength_for(config.carrier_frequency); }

double range_resolution(double bandwidth) {
    require_positive(bandwidth, "bandwidth");
    return kSpeedOfLight / (2.0 * bandwidth);
}

double velocity_resolution(const RadarConfig& config) {
    validate(config);
    return wavelength(config) / (2.0 * config.cpi_seconds());
}

double unambiguous_velocity(const RadarConfig& config) {
    // prf -> 0 degenerates to 0 rather than failing, so only the carrier is checked.
    if (config.prf < 0.0) throw DomainError("prf must be non-negative");
    return wavelength(config) * config.prf / 4.0;
}

double fold_velocity(double v_true, double v_ua) {
    require_positive(v_ua, "v_ua");
    if (!std::isfinite(v_true)) throw DomainError("v_true must be finite");
    const double span = 2.0 * v_ua;
    double folded = v_true;
    const double wraps = std::floor((v_true + v_ua) / span);
    if (std::abs(wraps) > 1048576.0) {
        // Absurdly far outside the interval: jump most of the way in one step.
        folded -= span * (wraps - std::copysign(1.0, wraps));
    }
    // Step by whole spans so results stay bit-identical to sequential unwrapping.
    while (folded >= v_ua) folded -= span;
    while (folded < -v_ua) folded += span;
    return folded;
}

double detection_range(const RadarConfig& config, const LinkBudgetQuery& query) {
    require_positive(config.peak_power, "peak_power");
    require_positive(config.antenna_gain, "antenna_gain");
    require_positive(config.effective_aperture, "effective_aperture");
    require_positive(config.bandwidth, "bandwidth");
    require_positive(config.system_temperature, "system_temperature");
    require_positive(config.noise_figure, "noise_figure");
    require_positive(query.target_rcs, "target_rcs");
    require_positive(query.required_snr, "required_snr");
    require_positive(query.boltzmann_constant, "boltzmann_constant");

    const double four_pi = 4.0 * kPi;
    const double numerator =
        config.peak_power * config.antenna_gain * config.effective_aperture * query.target_rcs;
    const double denominator = four_pi * four_pi * query.boltzmann_constant *
                               config.system_temperature * config.bandwidth *
                               config.noise_figure * query.required_snr;
    return std::sqrt(std::sqrt(numerator / denominator));
}

double snr_db(double signal_power, double noise_power) {
    require_positive(signal_power, "signal_power");
    require_positive(noise_power, "noise_power");
    return 10.0 * std::log10(signal_power / noise_power);
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

}  // namespace wakeradar
