#include "wakeradar/wake_signature.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "wakeradar/dscr_detect.hpp"
#include "wakeradar/errors.hpp"

namespace wakeradar {

namespace {

double median_of(std::vector<double> values) {
    if (values.empty()) return 0.0;
    const auto mid = values.begin() + static_cast<std::ptrdiff_t>(values.size() / 2);
    std::nth_element(values.begin(), mid, values.end());
    return *mid;
}

// --- slopes -----------------------------------------------------------------

/// Linear interpolation of row at fractional cell x; zero outside.
double sample(std::span<const double> row, double x) {
    if (!(x >= 0.0) || x > static_cast<double>(row.size() - 1)) return 0.0;
    const auto i = static_cast<std::size_t>(x);
    if (i + 1 >= row.size()) return row[i];
    const double frac = x - static_cast<double>(i);
    return row[i] + frac * (row[i + 1] - row[i]);
}

double parabolic_offset(double l, double c, double r) {
    const double denom = l - 2.0 * c + r;
    if (denom >= 0.0) return 0.0;
    return std::clamp(0.5 * (l - r) / denom, -0.5, 0.5);
}

// --- comb lattices ----------------------------------------------------------

struct LatticeMatch {
    std::size_t peak = 0;
    int k = 0;
    double unwrapped = 0.0;  // anchor + k * spacing + residual
    double residual = 0.0;
};

double wrap_centered(double x, double span) {
    return x - span * std::floor(x / span + 0.5);
}

/// Peaks lying on anchor + k * spacing (modulo the aliasing span), one per k.
/// |k| stays within half a span so no two lattice points fold onto each other.
std::vector<LatticeMatch> match_lattice(const std::vector<DopplerPeak>& peaks,
                                        const std::vector<std::size_t>& candidates, double anchor,
                                        double spacing, double span, double tolerance) {
    const int k_max = static_cast<int>(std::floor(0.5 * span / spacing));
    std::vector<LatticeMatch> by_k;
    for (std::size_t idx : candidates) {
        const double d0 = wrap_centered(peaks[idx].velocity - anchor, span);
        std::optional<LatticeMatch> best;
        for (double d : {d0, d0 - span, d0 + span}) {
            const int k = static_cast<int>(std::lround(d / spacing));
            if (std::abs(k) > k_max) continue;
            const double r = d - k * spacing;
            if (std::abs(r) > tolerance) continue;
            if (!best || std::abs(r) < std::abs(best->residual)) {
                best = LatticeMatch{idx, k, anchor + d, r};
            }
        }
        if (!best) continue;
        auto same_k = std::find_if(by_k.begin(), by_k.end(), [&](const auto& m) { return m.k == best->k; });
        if (same_k == by_k.end()) {
            by_k.push_back(*best);
        } else if (peaks[idx].amplitude > peaks[same_k->peak].amplitude) {
            *same_k = *best;
        }
    }
    return by_k;
}

struct LatticeFit {
    double anchor = 0.0;
    double spacing = 0.0;
    std::vector<LatticeMatch> matches;
    double score = -1e300;
};

/// Matched count minus half the lattice points left empty between the
/// outermost matches. Sub-multiples of the true spacing leave every other
/// point empty and lose.
double lattice_score(const std::vector<LatticeMatch>& matches, double anchor, double spacing,
                     double span, double notch) {
    if (matches.empty()) return -1e300;
    int k_lo = 0;
    int k_hi = 0;
    for (const auto& m : matches) {
        k_lo = std::min(k_lo, m.k);
        k_hi = std::max(k_hi, m.k);
    }
    int expected = 0;
    for (int k = k_lo; k <= k_hi; ++k) {
        const double v = wrap_centered(anchor + k * spacing, span);
        if (std::abs(v) > notch) ++expected;
    }
    const double missing = std::max(0, expected - static_cast<int>(matches.size()));
    return static_cast<double>(matches.size()) - 0.5 * missing;
}

/// Linear fit of unwrapped velocity against k, then one re-match.
LatticeFit refine(const std::vector<DopplerPeak>& peaks, const std::vector<std::size_t>& candidates,
                  LatticeFit fit, double span, double tolerance, double notch) {
    for (int pass = 0; pass < 2; ++pass) {
        if (fit.matches.size() < 2) break;
        double mk = 0.0;
        double mv = 0.0;
        for (const auto& m : fit.matches) {
            mk += m.k;
            mv += m.unwrapped;
        }
        mk /= static_cast<double>(fit.matches.size());
        mv /= static_cast<double>(fit.matches.size());
        double skk = 0.0;
        double skv = 0.0;
        for (const auto& m : fit.matches) {
            skk += (m.k - mk) * (m.k - mk);
            skv += (m.k - mk) * (m.unwrapped - mv);
        }
        if (skk <= 0.0) break;
        const double spacing = skv / skk;
        if (!(spacing > 0.0)) break;
        const double anchor = mv - spacing * mk;
        auto matches = match_lattice(peaks, candidates, anchor, spacing, span, tolerance);
        if (matches.size() < fit.matches.size()) break;
        fit.anchor = anchor;
        fit.spacing = spacing;
        fit.matches = std::move(matches);
        fit.score = lattice_score(fit.matches, fit.anchor, fit.spacing, span, notch);
    }
    return fit;
}

LatticeFit search_lattice(const std::vector<DopplerPeak>& peaks, const std::vector<std::size_t>& candidates,
                          double anchor, const JemOptions& options, double step, double span) {
    const double tolerance = options.tolerance_cells * step;
    const double grid = step / 4.0;
    LatticeFit best;
    for (double s = options.min_spacing; s <= options.max_spacing + 1e-12; s += grid) {
        auto matches = match_lattice(peaks, candidates, anchor, s, span, tolerance);
        const double score = lattice_score(matches, anchor, s, span, options.notch_half_width);
        // Ties go to the wider spacing.
        if (score >= best.score) {
            best.anchor = anchor;
            best.spacing = s;
            best.matches = std::move(matches);
            best.score = score;
        }
    }
    return refine(peaks, candidates, std::move(best), span, tolerance, options.notch_half_width);
}

}  // namespace

StageAssessment stage_from_distance(double x, double b) {
    if (!(b > 0.0)) throw DomainError("wingspan must be positive");
    if (!(x >= 0.0)) throw DomainError("distance behind the aircraft must be non-negative");
    StageAssessment out;
    out.r_wv = x / b;
    if (out.r_wv <= 1.0) {
        out.stage = WakeStage::Young;
    } else if (out.r_wv <= 10.0) {
        out.stage = WakeStage::Mature;
    } else if (out.r_wv <= 100.0) {
        out.stage = WakeStage::Old;
    } else {
        out.stage = WakeStage::Decaying;
    }
    return out;
}

Spectrogram time_reversed(const Spectrogram& spectrogram) {
    Spectrogram out = spectrogram;
    for (std::size_t t = 0; t < spectrogram.n_slices; ++t) {
        const auto src = spectrogram.slice(spectrogram.n_slices - 1 - t);
        std::copy(src.begin(), src.end(), out.magnitudes.begin() + static_cast<std::ptrdiff_t>(t * out.n_freq));
    }
    return out;
}

SlopeResult slope_sign_classify(const Spectrogram& sg, const SlopeOptions& options) {
    if (sg.n_slices < 3) throw InsufficientSignalError("slope fit needs at least 3 time slices");
    if (!(options.grid_step > 0.0) || !(options.max_slope > 0.0)) {
        throw DomainError("slope grid_step and max_slope must be positive");
    }
    const std::size_t nf = sg.n_freq;
    const std::size_t nt = sg.n_slices;
    const double cell = nf > 1 ? sg.velocity_axis[1] - sg.velocity_axis[0] : 0.0;
    const double ratio = std::pow(10.0, options.floor_db / 10.0);

    // Excess magnitude over each slice's median, clutter band zeroed.
    std::vector<std::vector<double>> rows(nt, std::vector<double>(nf, 0.0));
    std::size_t n_present = 0;
    for (std::size_t t = 0; t < nt; ++t) {
        const auto row = sg.slice(t);
        const double median = median_of(std::vector<double>(row.begin(), row.end()));
        bool present = false;
        for (std::size_t f = 0; f < nf; ++f) {
            if (std::abs(sg.velocity_axis[f]) <= options.notch_half_width) continue;
            rows[t][f] = std::max(0.0, row[f] - median);
            present = present || row[f] >= median * ratio;
        }
        if (present) ++n_present;
    }
    if (2 * n_present < nt) {
        throw InsufficientSignalError("signal rises above noise in only " + std::to_string(n_present) + " of " +
                                      std::to_string(nt) + " slices");
    }

    const double slice_seconds = sg.time_axis[1] - sg.time_axis[0];
    if (!(cell > 0.0) || !(slice_seconds > 0.0) || !(sg.cpi_seconds > 0.0) || !(sg.cpi_velocity_resolution > 0.0)) {
        throw DomainError("spectrogram lacks axis or CPI metadata");
    }
    // Full-CPI cells per CPI -> spectrogram cells per slice.
    const double per_slice = sg.cpi_velocity_resolution * slice_seconds / (sg.cpi_seconds * cell);
    const double span_slices = static_cast<double>(nt - 1);
    const double step = options.grid_step / (per_slice * span_slices);
    const auto n_grid = static_cast<int>(std::ceil(options.max_slope / step));
    const double half = 0.5 * span_slices;

    // Concentration of the de-drifted mean spectrum. Mirrored slices are
    // added pairwise so the reversed spectrogram gives C(-s) bit for bit.
    const auto concentration = [&](double slope) {
        const double shift = slope * per_slice;
        std::vector<double> profile(nf, 0.0);
        for (std::size_t t = 0; t < nt / 2; ++t) {
            const std::size_t u = nt - 1 - t;
            const double tau = static_cast<double>(t) - half;
            for (std::size_t f = 0; f < nf; ++f) {
                const double x = static_cast<double>(f);
                profile[f] += sample(rows[t], x + shift * tau) + sample(rows[u], x - shift * tau);
            }
        }
        if (nt % 2 == 1) {
            for (std::size_t f = 0; f < nf; ++f) profile[f] += rows[nt / 2][f];
        }
        double c = 0.0;
        for (double p : profile) c += p * p;
        return c;
    };

    std::vector<double> scores(static_cast<std::size_t>(2 * n_grid + 1));
    for (int i = -n_grid; i <= n_grid; ++i) scores[static_cast<std::size_t>(i + n_grid)] = concentration(i * step);
    const double c0 = scores[static_cast<std::size_t>(n_grid)];

    // Best slope; ties go to the smaller |slope|, an exact +/- tie to zero.
    int best = 0;
    for (int i = 1; i <= n_grid; ++i) {
        const double up = scores[static_cast<std::size_t>(n_grid + i)];
        const double down = scores[static_cast<std::size_t>(n_grid - i)];
        const double current = scores[static_cast<std::size_t>(n_grid + best)];
        const double top = std::max(up, down);
        if (top > current) best = up > down ? i : (down > up ? -i : 0);
        if (up == down && up > current) best = 0;
    }
    double slope = best * step;
    if (best != 0 && std::abs(best) < n_grid) {
        const auto b = static_cast<std::size_t>(best + n_grid);
        slope += step * parabolic_offset(scores[b - 1], scores[b], scores[b + 1]);
    }

    SlopeResult result;
    result.slope = slope;
    // Gain of each direction: the largest rise above the running minimum
    // walking out from zero drift. Aligning one family of ridges smears the
    // other, so a second family shows up as a rise after a dip.
    for (int dir : {1, -1}) {
        double running_min = c0;
        double gain = 0.0;
        for (int i = 1; i <= n_grid; ++i) {
            const double c = scores[static_cast<std::size_t>(n_grid + dir * i)];
            running_min = std::min(running_min, c);
            if (i * step >= options.dead_band) gain = std::max(gain, c - running_min);
        }
        (dir > 0 ? result.positive_gain : result.negative_gain) = gain;
    }
    const double strong = std::max(result.positive_gain, result.negative_gain);
    const double weak = std::min(result.positive_gain, result.negative_gain);
    if (std::abs(slope) < options.dead_band || !(strong > 0.0) || weak >= options.mixed_fraction * strong) {
        result.sign = SlopeSign::Mixed;
    } else {
        result.sign = slope > 0.0 ? SlopeSign::Positive : SlopeSign::Negative;
    }
    return result;
}

std::optional<JemComb> jem_comb_estimate(const DopplerSpectrum& input, const JemOptions& options) {
    if (options.min_lines < 3) throw DomainError("JEM comb needs min_lines >= 3");
    if (input.size() < 4 || input.velocity_step <= 0.0) return std::nullopt;
    const DopplerSpectrum spectrum = notch_clutter(input, options.notch_half_width);

    auto peaks = find_doppler_peaks(spectrum, {options.min_prominence, options.floor_db});
    if (peaks.size() > options.max_peaks) peaks.resize(options.max_peaks);
    if (static_cast<int>(peaks.size()) < options.min_lines) return std::nullopt;

    const double step = spectrum.velocity_step;
    const double span = step * static_cast<double>(spectrum.size());

    std::vector<std::size_t> all(peaks.size());
    std::iota(all.begin(), all.end(), std::size_t{0});
    const LatticeFit first = search_lattice(peaks, all, peaks[0].velocity, options, step, span);
    if (static_cast<int>(first.matches.size()) < options.min_lines) return std::nullopt;

    JemComb comb;
    comb.body_velocity = peaks[0].velocity;
    comb.stage1_spacing = first.spacing;
    std::vector<bool> used(peaks.size(), false);
    for (const auto& m : first.matches) {
        used[m.peak] = true;
        if (m.k != 0) comb.stage1_lines.push_back(peaks[m.peak].velocity);
    }
    used[0] = true;

    std::vector<std::size_t> rest;
    for (std::size_t i = 0; i < peaks.size(); ++i) {
        if (!used[i]) rest.push_back(i);
    }
    std::size_t explained = first.matches.size();
    if (static_cast<int>(rest.size()) >= options.min_lines) {
        LatticeFit second;
        const std::size_t n_anchor = std::min(options.stage2_anchor_candidates, rest.size());
        for (std::size_t a = 0; a < n_anchor; ++a) {
            LatticeFit fit = search_lattice(peaks, rest, peaks[rest[a]].velocity, options, step, span);
            if (fit.score > second.score) second = std::move(fit);
        }
        if (static_cast<int>(second.matches.size()) >= options.min_lines) {
            comb.stage2_spacing = second.spacing;
            const double rel = wrap_centered(second.anchor - comb.body_velocity, span);
            double offset = rel - second.spacing * std::floor(rel / second.spacing + 0.5);
            if (offset <= -0.5 * second.spacing) offset += second.spacing;
            comb.stage2_offset = offset;
            for (const auto& m : second.matches) comb.stage2_lines.push_back(peaks[m.peak].velocity);
            explained += second.matches.size();
        }
    }
    std::sort(comb.stage1_lines.begin(), comb.stage1_lines.end());
    std::sort(comb.stage2_lines.begin(), comb.stage2_lines.end());
    comb.confidence = std::min(1.0, static_cast<double>(explained) / static_cast<double>(peaks.size()));
    return comb;
}

std::optional<JemComb> jem_comb_estimate(const DopplerSpectrum& spectrum, int min_lines) {
    JemOptions options;
    options.min_lines = min_lines;
    return jem_comb_estimate(spectrum, options);
}

DopplerGroupStats doppler_group_stats(std::span<const DopplerPeak> peaks) {
    DopplerGroupStats stats;
    stats.n_peaks = peaks.size();
    if (peaks.empty()) return stats;
    const auto n = static_cast<double>(peaks.size());
    double mean_v = 0.0;
    std::size_t negative = 0;
    for (const auto& p : peaks) {
        stats.mean_speed += std::abs(p.velocity);
        stats.magnitude_level += p.amplitude;
        mean_v += p.velocity;
        if (p.velocity < 0.0) ++negative;
    }
    stats.mean_speed /= n;
    stats.magnitude_level /= n;
    mean_v /= n;
    double var = 0.0;
    for (const auto& p : peaks) var += (p.velocity - mean_v) * (p.velocity - mean_v);
    stats.peak_spread = std::sqrt(var / n);
    stats.negative_fraction = static_cast<double>(negative) / n;
    return stats;
}

}  // namespace wakeradar
