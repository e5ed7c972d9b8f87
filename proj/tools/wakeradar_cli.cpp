// Command-line front end: simulate, process, detect, track, analyze, budget, compare.
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "wakeradar/dscr_detect.hpp"
#include "wakeradar/dsp_core.hpp"
#include "wakeradar/errors.hpp"
#include "wakeradar/io/detections_io.hpp"
#include "wakeradar/io/render.hpp"
#include "wakeradar/io/scenario_file.hpp"
#include "wakeradar/io/wviq.hpp"
#include "wakeradar/pipeline.hpp"
#include "wakeradar/radar_params.hpp"
#include "wakeradar/scene_sim.hpp"
#include "wakeradar/tracker.hpp"
#include "wakeradar/wake_signature.hpp"

namespace wr = wakeradar;
namespace wio = wakeradar::io;

namespace {

enum Exit { kOk = 0, kUsage = 1, kFormat = 2, kDomain = 3 };

wr::DetectorConfig detector_config(const std::string& path) {
    if (!path.empty()) return wio::load_detector_config(path);
    if (const char* env = std::getenv(wio::kDetectorConfigEnv); env && *env) return wio::load_detector_config(env);
    return {};
}

/// Writes to `path`, or to stdout for "-".
template <typename Fn>
void with_output(const std::string& path, Fn&& fn) {
    if (path == "-") {
        fn(std::cout);
        std::cout.flush();
        return;
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw wr::Error("cannot open " + path + " for writing");
    fn(out);
    if (!out) throw wr::Error("write failed: " + path);
}

std::string fmt(double v, int decimals = 3) { return wio::format_fixed(v, decimals); }

struct Rates {
    double aircraft = 0.0;    // frames with the aircraft detected at its true bin (+-1)
    double wake = 0.0;        // true wake bins labelled Wake
    double false_wake = 0.0;  // Wake labels outside every true wake segment
    double jem_stage2 = 0.0;  // aircraft frames with a second comb found
    double wake_dscr = 0.0;   // mean DSCR over detected wake bins
};

Rates scenario_rates(const wr::Scenario& sc, const wr::DetectorConfig& det, unsigned threads) {
    Rates r;
    std::size_t wake_truth = 0;
    std::size_t wake_hits = 0;
    std::size_t wake_labels = 0;
    std::size_t false_labels = 0;
    std::size_t ac_frames = 0;
    std::size_t ac_hits = 0;
    std::size_t stage2 = 0;
    double dscr_sum = 0.0;
    for (std::uint32_t k = 0; k < sc.n_frames; ++k) {
        const auto frame = wr::synthesize_frame(sc, k, threads);
        const auto scan = wr::process_frame(frame, sc.radar, det, threads);
        const auto geo = wr::frame_geometry(sc, k);
        if (geo.aircraft_bin) {
            ++ac_frames;
            if (scan.aircraft_bin && std::llabs(*scan.aircraft_bin - *geo.aircraft_bin) <= 1) {
                ++ac_hits;
                const auto& jem = scan.detections[static_cast<std::size_t>(*scan.aircraft_bin)].jem;
                if (jem && jem->stage2_spacing) ++stage2;
            }
        }
        for (const auto& d : scan.detections) {
            bool in_wake = false;
            for (const auto& seg : geo.wake) in_wake = in_wake || seg.contains(d.bin_index);
            if (in_wake) ++wake_truth;
            if (d.cls != wr::TargetClass::Wake) continue;
            ++wake_labels;
            dscr_sum += d.dscr_db;
            if (in_wake) {
                ++wake_hits;
            } else {
                ++false_labels;
            }
        }
    }
    r.aircraft = ac_frames ? static_cast<double>(ac_hits) / static_cast<double>(ac_frames) : 0.0;
    r.wake = wake_truth ? static_cast<double>(wake_hits) / static_cast<double>(wake_truth) : 0.0;
    r.false_wake = wake_labels ? static_cast<double>(false_labels) / static_cast<double>(wake_labels) : 0.0;
    r.jem_stage2 = ac_hits ? static_cast<double>(stage2) / static_cast<double>(ac_hits) : 0.0;
    r.wake_dscr = wake_labels ? dscr_sum / static_cast<double>(wake_labels) : 0.0;
    return r;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Pulse-Doppler wake-vortex simulation and detection"};
    app.require_subcommand(1);
    unsigned threads = 0;
    app.add_option("--threads", threads, "Worker threads (0 = all cores)");

    // simulate
    auto* sim = app.add_subcommand("simulate", "Synthesize IQ frames from a scenario file");
    std::string sim_scenario;
    std::string sim_out;
    std::optional<std::uint64_t> sim_seed;
    std::optional<std::uint32_t> sim_frames;
    sim->add_option("scenario", sim_scenario, "Scenario file")->required()->check(CLI::ExistingFile);
    sim->add_option("-o,--output", sim_out, "Output WVIQ file")->required();
    sim->add_option("--seed", sim_seed, "Override the scenario seed");
    sim->add_option("--frames", sim_frames, "Override the number of frames");

    // process
    auto* proc = app.add_subcommand("process", "Render the range-Doppler map of one frame");
    std::string proc_in;
    std::string proc_out;
    std::uint32_t proc_frame = 0;
    bool proc_linear = false;
    bool proc_color = false;
    double proc_range = 60.0;
    std::size_t proc_height = 2048;
    proc->add_option("wviq", proc_in, "Input WVIQ file")->required()->check(CLI::ExistingFile);
    proc->add_option("--frame", proc_frame, "Frame index");
    proc->add_option("-o,--output", proc_out, "Output PGM/PPM image")->required();
    proc->add_flag("--linear", proc_linear, "Linear amplitude scale instead of dB");
    proc->add_flag("--color", proc_color, "Write a PPM with a colormap");
    proc->add_option("--dynamic-range", proc_range, "dB shown below the peak");
    proc->add_option("--max-height", proc_height, "Doppler cells before decimation");

    // detect
    auto* det = app.add_subcommand("detect", "Detect and classify every range bin");
    std::string det_in;
    std::string det_cfg;
    std::string det_out = "-";
    std::string det_format = "csv";
    bool det_all = false;
    det->add_option("wviq", det_in, "Input WVIQ file")->required()->check(CLI::ExistingFile);
    det->add_option("--config", det_cfg, "Detector config file")->check(CLI::ExistingFile);
    det->add_option("-o,--output", det_out, "Output file ('-' = stdout)");
    det->add_option("--format", det_format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    det->add_flag("--all", det_all, "Include Noise bins");

    // track
    auto* trk = app.add_subcommand("track", "Track the aircraft and its wake across frames");
    std::string trk_in;
    std::string trk_cfg;
    std::string trk_out = "-";
    double trk_dt = 0.5;
    wr::TrackerConfig trk_opts;
    std::optional<double> trk_hint;
    trk->add_option("wviq", trk_in, "Input WVIQ file")->required()->check(CLI::ExistingFile);
    trk->add_option("--config", trk_cfg, "Detector config file")->check(CLI::ExistingFile);
    trk->add_option("-o,--output", trk_out, "Output JSON lines ('-' = stdout)");
    trk->add_option("--dt", trk_dt, "Seconds between frames");
    trk->add_option("--gate", trk_opts.gate, "Association gate in bins");
    trk->add_option("--coast-limit", trk_opts.coast_limit, "Misses tolerated before a track is dropped");
    trk->add_option("--velocity-hint", trk_hint, "Known true radial velocity, m/s (positive = approaching)");

    // analyze
    auto* ana = app.add_subcommand("analyze", "Inspect one range bin of one frame");
    std::string ana_in;
    std::string ana_cfg;
    std::string ana_image;
    std::int64_t ana_bin = 0;
    std::uint32_t ana_frame = 0;
    ana->add_option("wviq", ana_in, "Input WVIQ file")->required()->check(CLI::ExistingFile);
    ana->add_option("--bin", ana_bin, "Range bin")->required();
    ana->add_option("--frame", ana_frame, "Frame index");
    ana->add_option("--config", ana_cfg, "Detector config file")->check(CLI::ExistingFile);
    ana->add_option("--spectrogram", ana_image, "Write the micro-Doppler spectrogram as PGM");

    // budget
    auto* bud = app.add_subcommand("budget", "Derived radar quantities and detection range");
    std::string bud_cfg;
    double bud_rcs = 1.0;
    double bud_snr_db = 13.0;
    bud->add_option("config", bud_cfg, "Scenario file with a [radar] section")->required()->check(CLI::ExistingFile);
    bud->add_option("--rcs", bud_rcs, "Target RCS, m^2");
    bud->add_option("--snr-db", bud_snr_db, "Required SNR, dB");

    // compare
    auto* cmp = app.add_subcommand("compare", "Detection rates of two scenarios (radar configurations)");
    std::string cmp_a;
    std::string cmp_b;
    std::string cmp_cfg;
    cmp->add_option("scenario_a", cmp_a, "First scenario")->required()->check(CLI::ExistingFile);
    cmp->add_option("scenario_b", cmp_b, "Second scenario")->required()->check(CLI::ExistingFile);
    cmp->add_option("--config", cmp_cfg, "Detector config file")->check(CLI::ExistingFile);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (*sim) {
            wr::Scenario sc = wio::load_scenario(sim_scenario);
            if (sim_seed) sc.seed = *sim_seed;
            if (sim_frames) sc.n_frames = *sim_frames;
            wr::validate(sc);
            wio::WviqWriter writer(sim_out, sc.radar, sc.n_frames);
            for (std::uint32_t k = 0; k < sc.n_frames; ++k) writer.write(wr::synthesize_frame(sc, k, threads));
            writer.close();
        } else if (*proc) {
            wio::WviqReader reader(proc_in);
            const auto radar = reader.header().radar();
            const auto map = wr::range_doppler_map(reader.read(proc_frame), radar, wr::Window::Rectangular, threads);
            wio::RenderOptions opts;
            opts.scale = proc_linear ? wio::Scale::Linear : wio::Scale::Db;
            opts.color = proc_color;
            opts.dynamic_range_db = proc_range;
            opts.max_height = proc_height;
            wio::write_image(wio::render_map(map, opts), proc_out);
        } else if (*det) {
            const auto cfg = detector_config(det_cfg);
            wio::WviqReader reader(det_in);
            const auto radar = reader.header().radar();
            std::vector<wr::Detection> rows;
            for (std::uint32_t k = 0; k < reader.header().n_frames; ++k) {
                auto scan = wr::process_frame(reader.read(k), radar, cfg, threads);
                for (auto& d : scan.detections) {
                    if (det_all || d.cls != wr::TargetClass::Noise) rows.push_back(std::move(d));
                }
            }
            const auto format = det_format == "json" ? wio::DetectionFormat::Json : wio::DetectionFormat::Csv;
            with_output(det_out, [&](std::ostream& out) { wio::emit_detections(out, rows, format); });
        } else if (*trk) {
            const auto cfg = detector_config(trk_cfg);
            wio::WviqReader reader(trk_in);
            const auto radar = reader.header().radar();
            wr::Track track = wr::make_track(radar, trk_hint);
            std::size_t ahead_total = 0;
            for (std::uint32_t k = 0; k < reader.header().n_frames; ++k) {
                const auto scan = wr::process_frame(reader.read(k), radar, cfg, threads);
                track = wr::update(std::move(track), scan, trk_dt, trk_opts);
                ahead_total += wr::ahead_report(track, scan).size();
            }
            with_output(trk_out, [&](std::ostream& out) { wio::emit_track_jsonl(out, track); });
            std::cerr << "ahead-of-aircraft detections (not associated): " << ahead_total << "\n";
        } else if (*ana) {
            const auto cfg = detector_config(ana_cfg);
            wio::WviqReader reader(ana_in);
            const auto radar = reader.header().radar();
            const auto frame = reader.read(ana_frame);
            if (ana_bin < 0 || ana_bin >= static_cast<std::int64_t>(frame.n_bins)) {
                throw wr::DomainError("bin " + std::to_string(ana_bin) + " outside 0.." +
                                      std::to_string(frame.n_bins - 1));
            }
            const auto scan = wr::process_frame(frame, radar, cfg, threads);
            const auto& d = scan.detections[static_cast<std::size_t>(ana_bin)];
            std::cout << "frame " << ana_frame << " bin " << ana_bin << " range_m " << fmt(d.range_m) << "\n";
            std::cout << "class " << wr::to_string(d.cls) << " snr_db " << fmt(d.snr_db) << " dscr_db "
                      << fmt(d.dscr_db) << " dominant_velocity_mps " << fmt(d.dominant_velocity) << "\n";
            std::cout << "peaks " << d.doppler_peaks.size() << "\n";
            for (const auto& p : d.doppler_peaks) {
                std::cout << "  v " << fmt(p.velocity) << " amplitude " << fmt(p.amplitude, 1) << "\n";
            }
            const auto stats = wr::doppler_group_stats(d.doppler_peaks);
            std::cout << "group mean_speed " << fmt(stats.mean_speed) << " spread " << fmt(stats.peak_spread)
                      << " negative_fraction " << fmt(stats.negative_fraction) << "\n";
            if (scan.aircraft_bin) {
                std::cout << "aircraft_bin " << *scan.aircraft_bin;
                if (ana_bin <= *scan.aircraft_bin) {
                    const double x = static_cast<double>(*scan.aircraft_bin - ana_bin) * scan.range_resolution;
                    const auto stage = wr::stage_from_distance(x, cfg.wingspan);
                    std::cout << " distance_behind_m " << fmt(x) << " r_wv " << fmt(stage.r_wv) << " stage "
                              << wr::to_string(stage.stage);
                } else {
                    std::cout << " (bin is ahead of the aircraft)";
                }
                std::cout << "\n";
            } else {
                std::cout << "aircraft_bin none\n";
            }
            const auto spectrum = wr::doppler_spectrum(frame.row(static_cast<std::size_t>(ana_bin)), radar);
            if (auto jem = wr::jem_comb_estimate(spectrum, cfg.jem_min_lines)) {
                std::cout << "jem body " << fmt(jem->body_velocity) << " spacing " << fmt(jem->stage1_spacing)
                          << " lines " << jem->stage1_lines.size();
                if (jem->stage2_spacing) {
                    std::cout << " stage2_spacing " << fmt(*jem->stage2_spacing) << " stage2_offset "
                              << fmt(*jem->stage2_offset) << " stage2_lines " << jem->stage2_lines.size();
                }
                std::cout << " confidence " << fmt(jem->confidence) << "\n";
            } else {
                std::cout << "jem none\n";
            }
            const auto sg = wr::micro_doppler_spectrogram(frame.row(static_cast<std::size_t>(ana_bin)), radar);
            try {
                const auto slope = wr::slope_sign_classify(sg);
                std::cout << "slope " << wr::to_string(slope.sign) << " " << fmt(slope.slope)
                          << " cells/CPI (gain up " << fmt(slope.positive_gain, 1) << ", down "
                          << fmt(slope.negative_gain, 1) << ")\n";
            } catch (const wr::InsufficientSignalError& e) {
                std::cout << "slope insufficient signal: " << e.what() << "\n";
            }
            if (!ana_image.empty()) wio::write_image(wio::render_spectrogram(sg), ana_image);
        } else if (*bud) {
            const auto sc = wio::load_scenario(bud_cfg);
            const auto& r = sc.radar;
            wr::LinkBudgetQuery q;
            q.target_rcs = bud_rcs;
            q.required_snr = wr::db_to_linear(bud_snr_db);
            const double range = wr::detection_range(r, q);
            auto boosted = r;
            boosted.peak_power *= 16.0;
            std::cout << "wavelength_m " << fmt(wr::wavelength(r), 5) << "\n"
                      << "cpi_ms " << fmt(1e3 * r.cpi_seconds()) << "\n"
                      << "range_resolution_m " << fmt(wr::range_resolution(r.bandwidth)) << "\n"
                      << "velocity_resolution_mps " << fmt(wr::velocity_resolution(r)) << "\n"
                      << "unambiguous_velocity_mps " << fmt(wr::unambiguous_velocity(r)) << "\n"
                      << "instrumented_range_m "
                      << fmt(static_cast<double>(r.n_range_bins) * wr::range_resolution(r.bandwidth)) << "\n"
                      << "detection_range_m " << fmt(range) << " (rcs " << fmt(bud_rcs) << " m^2, snr "
                      << fmt(bud_snr_db) << " dB)\n"
                      << "detection_range_16x_power_m " << fmt(wr::detection_range(boosted, q)) << "\n";
        } else if (*cmp) {
            const auto cfg = detector_config(cmp_cfg);
            const auto a = wio::load_scenario(cmp_a);
            const auto b = wio::load_scenario(cmp_b);
            const Rates ra = scenario_rates(a, cfg, threads);
            const Rates rb = scenario_rates(b, cfg, threads);
            const auto line = [](const char* name, double x, double y) {
                std::cout << name << " " << fmt(x) << " " << fmt(y) << " delta " << fmt(y - x) << "\n";
            };
            std::cout << "metric A B\n";
            std::cout << "cpi_ms " << fmt(1e3 * a.radar.cpi_seconds()) << " " << fmt(1e3 * b.radar.cpi_seconds())
                      << "\n";
            std::cout << "prf_khz " << fmt(a.radar.prf / 1e3) << " " << fmt(b.radar.prf / 1e3) << "\n";
            line("aircraft_rate", ra.aircraft, rb.aircraft);
            line("wake_rate", ra.wake, rb.wake);
            line("false_wake_fraction", ra.false_wake, rb.false_wake);
            line("jem_stage2_rate", ra.jem_stage2, rb.jem_stage2);
            line("mean_wake_dscr_db", ra.wake_dscr, rb.wake_dscr);
        }
    } catch (const wr::FormatError& e) {
        std::cerr << "format error: " << e.what();
        if (e.offset() > 0) std::cerr << " (offset " << e.offset() << ")";
        std::cerr << "\n";
        return kFormat;
    } catch (const wr::DomainError& e) {
        std::cerr << "domain error: " << e.what() << "\n";
        return kDomain;
    } catch (const wr::DimensionError& e) {
        std::cerr << "dimension error: " << e.what() << "\n";
        return kDomain;
    } catch (const wr::UndefinedInputError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return kDomain;
    } catch (const wr::NoCandidateError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return kDomain;
    } catch (const wr::InsufficientSignalError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return kDomain;
    } catch (const wr::NoStateError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kDomain;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kFormat;
    }
    return kOk;
}
