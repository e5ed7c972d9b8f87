#pragma once

#include <cstdint>

namespace wakeradar {

inline constexpr double kSpeedOfLight = 299'792'458.0;     // m/s
inline constexpr double kBoltzmann = 1.380649e-23;         // J/K
inline constexpr double kPi = 3.14159265358979323846;

/// Radar front-end and waveform parameters. The CPI length is always derived
/// from `n_pulses / prf`; it is never stored.
struct RadarConfig {
    double carrier_frequency = 10.1e9;  // Hz
    double prf = 11.4e3;                // Hz
    std::uint32_t n_pulses = 2048;      // pulses per CPI
    double bandwidth = 5.0e6;           // Hz
    std::uint32_t n_range_bins = 512;
    double peak_power = 320.0;          // W
    double noise_figure = 1.0;          // linear ratio
    double system_temperature = 290.0;  // K
    double antenna_gain = 1.0;          // linear ratio
    double effective_aperture = 1.0;    // m^2

    double cpi_seconds() const { return static_cast<double>(n_pulses) / prf; }
};

/// Throws DomainError naming the first field that breaks the invariants.
void validate(const RadarConfig& config);

struct LinkBudgetQuery {
    double target_rcs = 1.0;    // m^2
    double required_snr = 1.0;  // linear ratio
    double boltzmann_constant = kBoltzmann;
};

double wavelength(const RadarConfig& config);
double wavelength_for(double carrier_frequency);

/// c / (2B).
double range_resolution(double bandwidth);

/// lambda / (2 * CPI); the spacing of the Doppler velocity axis.
double velocity_resolution(const RadarConfig& config);

/// lambda * PRF / 4. The measurable interval is [-v_ua, +v_ua).
double unambiguous_velocity(const RadarConfig& config);

/// Maps a true radial velocity into [-v_ua, +v_ua) modulo 2 * v_ua.
double fold_velocity(double v_true, double v_ua);

/// Maximum detection range from the monostatic radar equation, with G and
/// A_e kept as independent factors.
double detection_range(const RadarConfig& config, const LinkBudgetQuery& query);

double snr_db(double signal_power, double noise_power);

double db_to_linear(double db);

}  // namespace wakeradar
