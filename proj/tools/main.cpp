// Copyright 2026 The echo-lab Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at

//     http://www.apache.org/licenses/LICENSE-2.0

// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// echo-lab command-line tool.
//
// Exit codes: 0 success, 1 usage error, 2 config error, 3 I/O error,
// 4 runtime error, 5 paper-check criteria failed.

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "config.hpp"
#include "echolab/afc.hpp"
#include "echolab/analysis.hpp"
#include "echolab/error.hpp"
#include "echolab/franson.hpp"
#include "echolab/montecarlo.hpp"
#include "echolab/paper_check.hpp"
#include "echolab/tagio.hpp"
#include "report.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace echolab::cli {
namespace {

enum ExitCode { kOk = 0, kUsage = 1, kConfig = 2, kIo = 3, kRuntime = 4, kChecksFailed = 5 };

struct Common {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out_dir = ".";
    std::string format = "json";
    std::string duration;
};

AppConfig load(const Common& c)
{
    AppConfig cfg = c.config_path.empty() ? load_config_text("{}") : load_config(c.config_path);
    if (c.seed) {
        cfg.experiment.seed = *c.seed;
        cfg.resolved["seed"] = std::to_string(*c.seed);
    }
    if (!c.duration.empty()) {
        try {
            cfg.experiment.duration_s = parse_quantity(c.duration, Dimension::Time);
        } catch (const ConfigError& e) {
            throw ConfigError(std::string("--duration: ") + e.what());
        }
        if (!(cfg.experiment.duration_s > 0.0)) {
            throw ConfigError("--duration: must be positive");
        }
        cfg.resolved["duration"] = c.duration;
    }
    for (const auto& w : cfg.warnings) {
        std::cerr << "warning: " << w << '\n';
    }
    return cfg;
}

Format format_of(const Common& c) { return c.format == "csv" ? Format::Csv : Format::Json; }

Provenance provenance(const std::string& command, const AppConfig& cfg)
{
    return {command, cfg.hash(), cfg.experiment.seed};
}

double quantity_arg(const std::string& flag, const std::string& text, Dimension dim)
{
    try {
        return parse_quantity(text, dim);
    } catch (const ConfigError& e) {
        throw ConfigError(flag + ": " + e.what());
    }
}

void announce(const std::vector<fs::path>& files)
{
    for (const auto& f : files) {
        std::cout << "wrote " << f.string() << '\n';
    }
}

// ---- simulate --------------------------------------------------------------

int cmd_simulate(const Common& c, const std::string& tag_format)
{
    const auto cfg = load(c);
    const auto& x = cfg.experiment;
    const auto streams = run_experiment(x, x.seed, x.duration_s);
    const auto tags = streams.merged();

    ensure_directory(c.out_dir);
    std::vector<fs::path> files;
    const fs::path tag_path = fs::path(c.out_dir) / (tag_format == "csv" ? "tags.csv" : "tags.etag");
    if (tag_format == "csv") {
        write_tags_csv(tag_path, tags);
    } else {
        write_tags_binary(tag_path, tags, 3);
    }
    files.push_back(tag_path);

    Report r;
    r.provenance = provenance("simulate", cfg);
    r.warnings = cfg.warnings;
    r.text("tag_file", tag_path.filename().string());
    r.scalar("duration_s", x.duration_s);
    r.scalar("duty_cycle", x.schedule.duty_cycle());
    r.count("tags_idler", static_cast<std::uint64_t>(streams.idler.size()));
    r.count("tags_signal_port1", static_cast<std::uint64_t>(channel_times(streams.signal, kSignalPort1Channel).size()));
    r.count("tags_signal_port2", static_cast<std::uint64_t>(channel_times(streams.signal, kSignalPort2Channel).size()));
    if (x.memory.enabled) {
        r.scalar("memory_transmission_prob", x.memory.action.transmission_prob);
        r.scalar("memory_echo_efficiency", x.memory.action.echo_efficiency);
        r.scalar("memory_storage_time_s", x.memory.action.storage_time_s);
        r.text("memory_action_source", cfg.memory_action_from_comb ? "comb" : "config");
    }
    const auto written = write_report(c.out_dir, "simulate", format_of(c), r);
    files.insert(files.end(), written.begin(), written.end());
    announce(files);
    return kOk;
}

// ---- analyze ---------------------------------------------------------------

int cmd_analyze(const Common& c, const std::string& tags_path)
{
    const auto cfg = load(c);
    const auto& an = cfg.analysis;
    auto tags = read_tags(tags_path);
    std::stable_sort(tags.begin(), tags.end(), [](const TimeTag& a, const TimeTag& b) {
        return a.time_ps < b.time_ps;
    });

    Report r;
    r.provenance = provenance("analyze", cfg);
    r.text("tag_file", fs::path(tags_path).filename().string());
    const auto idler = channel_times(tags, kIdlerChannel);
    r.count("singles_idler", static_cast<std::uint64_t>(idler.size()));

    ensure_directory(c.out_dir);
    std::vector<fs::path> files;
    Table peaks_table{"peaks", {"stop_channel", "tau_s", "counts"}, {}};
    for (std::uint8_t ch : {kSignalPort1Channel, kSignalPort2Channel}) {
        const auto stop = channel_times(tags, ch);
        const std::string tag = "ch" + std::to_string(ch);
        r.count("singles_" + tag, static_cast<std::uint64_t>(stop.size()));
        if (stop.empty()) {
            continue;
        }
        auto hist = build_histogram(idler, stop, an.bin_width_s, an.range_lo_s, an.range_hi_s);
        hist.start_channel = kIdlerChannel;
        hist.stop_channel = ch;
        const auto hist_path = fs::path(c.out_dir) / ("histogram_" + tag + ".csv");
        {
            std::ofstream out(hist_path, std::ios::trunc);
            if (!out) {
                throw IoError("cannot write " + hist_path.string());
            }
            out << r.provenance.csv_comment() << '\n';
            write_histogram_csv(out, hist);
        }
        files.push_back(hist_path);

        auto attempt = [&](const std::string& name, auto&& fn) {
            try {
                fn();
            } catch (const Error& e) {
                r.results[name] = nullptr;
                r.warnings.push_back(name + ": " + e.what());
            }
        };
        r.count("coincidences_" + tag, static_cast<std::uint64_t>(window_counts(hist, an.center_tau_s, an.window_s)));
        attempt("g2_" + tag, [&] {
            const auto g = g2_from_histogram(hist, an.center_tau_s, an.side_taus_s, an.window_s);
            r.estimate("g2_" + tag, g.value, g.sigma);
        });
        attempt("car_" + tag, [&] {
            const auto car = car_from_histogram(hist, an.window_s, cfg.experiment.source.pump.period_s,
                                                an.center_tau_s, an.subtract_background);
            r.estimate("car_" + tag, car.value, car.sigma);
        });
        attempt("fwhm_fit_" + tag, [&] {
            const auto deltas = coincidence_deltas(idler, stop, an.center_tau_s - an.fit_half_range_s,
                                                   an.center_tau_s + an.fit_half_range_s);
            const auto fit = fit_coincidence_profile(deltas, an.center_tau_s, an.fit_half_range_s);
            r.estimate("fwhm_fit_" + tag + "_s", fit.fwhm.value, fit.fwhm.sigma);
            r.estimate("signal_lifetime_" + tag + "_s", fit.signal_lifetime.value,
                       fit.signal_lifetime.sigma);
            r.estimate("idler_lifetime_" + tag + "_s", fit.idler_lifetime.value,
                       fit.idler_lifetime.sigma);
        });
        attempt("fwhm_histogram_" + tag + "_s",
                [&] { r.scalar("fwhm_histogram_" + tag + "_s", histogram_fwhm(hist)); });
        attempt("peaks_" + tag, [&] {
            for (const auto& p : find_peaks(hist, an.window_s, 3.0 * an.window_s, 1)) {
                peaks_table.rows.push_back({ch, p.time_s, p.counts});
            }
        });
    }
    r.tables.push_back(peaks_table);
    const auto written = write_report(c.out_dir, "analysis", format_of(c), r);
    files.insert(files.end(), written.begin(), written.end());
    for (const auto& w : r.warnings) {
        std::cerr << "warning: " << w << '\n';
    }
    announce(files);
    return kOk;
}

// ---- memory-theory ---------------------------------------------------------

struct TheoryArgs {
    std::vector<double> depths = {0.5, 1.0, 1.3, 2.1, 3.0};
    std::vector<double> finesses = {2.0, 4.0, 8.0};
    double background = 0.0;
    std::string storage_time = "1936 ns";
    bool echo_sim = false;
};

double echo_sim(const AfcComb& comb)
{
    const std::size_t n = 1u << 18;
    const double df = comb.tooth_fwhm_hz() / 16.0;
    const FrequencyGrid grid{df * static_cast<double>(n), n};
    const SpectralLine input{0.0, grid.span_hz / 150.0, LineShape::Lorentzian};
    return simulate_echo(comb, input, grid).first_echo_efficiency;
}

int cmd_memory_theory(const Common& c, const TheoryArgs& a)
{
    const auto cfg = load(c);
    const double tm = quantity_arg("--storage-time", a.storage_time, Dimension::Time);
    Table t{"efficiency",
            {"tooth_shape", "peak_depth", "background_depth", "finesse", "gamma_t", "eta",
             "eta_with_background"},
            {}};
    if (a.echo_sim) {
        t.columns.push_back("eta_echo_sim");
    }
    const double inf = std::numeric_limits<double>::infinity();
    for (double d : a.depths) {
        const auto opt = optimal_square_params(d, a.background, tm);
        std::vector<ordered_json> row = {"square-optimal", d,          a.background, opt.finesse,
                                         opt.gamma_t,      opt.eta_opt, opt.eta_with_background};
        if (a.echo_sim) {
            row.push_back(echo_sim(build_comb(tm, d, a.background, opt.finesse, ToothShape::Square, inf)) );
        }
        t.rows.push_back(row);
        for (double f : a.finesses) {
            const double eta = efficiency_lorentzian(d, f, 0.0);
            std::vector<ordered_json> lrow = {"lorentzian", d, a.background, f, kPi / f, eta,
                                              efficiency_lorentzian(d, f, a.background)};
            if (a.echo_sim) {
                lrow.push_back(echo_sim(build_comb(tm, d, a.background, f, ToothShape::Lorentzian, inf)));
            }
            t.rows.push_back(lrow);
        }
    }
    for (const auto& row : t.rows) {
        std::cout << row[0].get<std::string>() << " d=" << row[1].dump() << " F=" << row[3].dump()
                  << " eta=" << row[5].dump() << '\n';
    }
    Report r;
    r.provenance = provenance("memory-theory", cfg);
    r.scalar("storage_time_s", tm);
    r.tables.push_back(t);
    announce(write_report(c.out_dir, "memory_theory", format_of(c), r));
    return kOk;
}

// ---- optimize-tm -----------------------------------------------------------

struct OptimizeArgs {
    std::string rep = "32 ns";
    std::string side_period;
    std::string field;
    std::string lo = "300 ns";
    std::string hi = "2000 ns";
    std::string photon_width = "4 ns";
    std::size_t top = 0;
};

int cmd_optimize(const Common& c, const OptimizeArgs& a)
{
    const auto cfg = load(c);
    const double rep = quantity_arg("--rep", a.rep, Dimension::Time);
    double side = 0.0;
    if (!a.side_period.empty()) {
        side = quantity_arg("--side-period", a.side_period, Dimension::Time);
    } else {
        MagnetConfig mag = cfg.experiment.memory.magnet;
        if (!a.field.empty()) {
            mag.field_t = quantity_arg("--field", a.field, Dimension::Field);
        }
        side = side_hole_splitting(mag).storage_period_s;
        if (!std::isfinite(side)) {
            throw ConfigError("--field: a non-zero magnetic field or --side-period is required");
        }
    }
    const double width = quantity_arg("--photon-width", a.photon_width, Dimension::Time);
    auto list = optimize_storage_time(rep, side, quantity_arg("--range-lo", a.lo, Dimension::Time),
                                      quantity_arg("--range-hi", a.hi, Dimension::Time));
    if (a.top > 0 && list.size() > a.top) {
        list.resize(a.top);
    }
    Table t{"candidates",
            {"storage_time_s", "residual_s", "half_period_index", "half_integer", "tbp", "modes"},
            {}};
    for (const auto& cand : list) {
        const auto m = multiplexing_metrics(cand.storage_time_s, width, rep);
        t.rows.push_back({cand.storage_time_s, cand.residual_s, cand.half_period_index,
                          cand.half_integer, m.tbp, m.mode_count});
        std::cout << cand.storage_time_s * 1e9 << " ns  residual " << cand.residual_s * 1e9
                  << " ns\n";
    }
    Report r;
    r.provenance = provenance("optimize-tm", cfg);
    r.scalar("rep_period_s", rep);
    r.scalar("side_period_s", side);
    r.tables.push_back(t);
    announce(write_report(c.out_dir, "optimize_tm", format_of(c), r));
    return kOk;
}

// ---- witness ---------------------------------------------------------------

struct WitnessArgs {
    double g2 = 0.0;
    double g2_sigma = 0.0;
    double visibility = 0.0;
    double visibility_sigma = 0.0;
    int port = 1;
    double k = 1.0;
};

int cmd_witness(const Common& c, const WitnessArgs& a)
{
    const auto cfg = load(c);
    const auto w = witness({a.g2, a.g2_sigma}, {a.visibility, a.visibility_sigma}, a.port, a.k);
    const auto p = basis_projections(a.g2, a.visibility);
    Report r;
    r.provenance = provenance("witness", cfg);
    r.estimate("g2", w.g2.value, w.g2.sigma);
    r.estimate("visibility", w.visibility.value, w.visibility.sigma);
    r.estimate("W", w.w.value, w.w.sigma);
    r.results["port"] = w.port;
    r.scalar("k_sigma", a.k);
    r.results["entangled"] = w.entangled;
    r.scalar("pz_cross", p.pz_cross);
    r.scalar("px_cross", p.px_cross);
    r.scalar("py_cross", p.py_cross);
    std::cout << "W = " << w.w.value << " +- " << w.w.sigma
              << (w.entangled ? " (entangled)" : " (not certified)") << '\n';
    announce(write_report(c.out_dir, "witness", format_of(c), r));
    return kOk;
}

// ---- paper-check -----------------------------------------------------------

int cmd_paper_check(const Common& c)
{
    const auto cfg = load(c);
    PaperCheckOptions opt;
    if (c.seed) {
        opt.seed = *c.seed;
    }
    opt.workers = cfg.experiment.workers;
    Table t{"criteria", {"id", "name", "pass", "detail"}, {}};
    bool all = true;
    for (const auto& res : run_paper_check(opt)) {
        std::cout << format_result(res) << std::endl;
        t.rows.push_back({res.id, res.name, res.pass, res.detail});
        all = all && res.pass;
    }
    Report r;
    r.provenance = {"paper-check", cfg.hash(), opt.seed};
    r.results["all_pass"] = all;
    r.tables.push_back(t);
    announce(write_report(c.out_dir, "paper_check", format_of(c), r));
    return all ? kOk : kChecksFailed;
}

int run(int argc, char** argv)
{
    CLI::App app{"echo-lab: AFC quantum-memory simulation and analysis"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);

    Common common;
    auto add_common = [&common](CLI::App* sub) {
        sub->add_option("--config", common.config_path, "YAML configuration file");
        sub->add_option("--seed", common.seed, "random seed (overrides the config)");
        sub->add_option("--out-dir", common.out_dir, "directory for output files")
            ->capture_default_str();
        sub->add_option("--format", common.format, "report format")
            ->check(CLI::IsMember({"csv", "json"}))
            ->capture_default_str();
        sub->add_option("--duration", common.duration, "simulated time, e.g. \"10 s\"");
    };

    std::string tag_format = "binary";
    auto* sim = app.add_subcommand("simulate", "generate time-tag streams");
    add_common(sim);
    sim->add_option("--tag-format", tag_format, "tag file format")
        ->check(CLI::IsMember({"binary", "csv"}))
        ->capture_default_str();

    std::string tags_path;
    auto* ana = app.add_subcommand("analyze", "histograms and figures of merit from a tag file");
    add_common(ana);
    ana->add_option("--tags", tags_path, "tag file (binary or CSV)")->required();

    TheoryArgs theory;
    auto* mt = app.add_subcommand("memory-theory", "closed-form AFC efficiency tables");
    add_common(mt);
    mt->add_option("--depth", theory.depths, "peak optical depths")->delimiter(',');
    mt->add_option("--finesse", theory.finesses, "Lorentzian finesses")->delimiter(',');
    mt->add_option("--background", theory.background, "background optical depth d0");
    mt->add_option("--storage-time", theory.storage_time, "storage time")->capture_default_str();
    mt->add_flag("--echo-sim", theory.echo_sim, "add a frequency-domain echo simulation column");

    OptimizeArgs optim;
    auto* ot = app.add_subcommand("optimize-tm", "storage times compatible with the side hole");
    add_common(ot);
    ot->add_option("--rep", optim.rep, "repetition period")->capture_default_str();
    ot->add_option("--side-period", optim.side_period, "side-hole period (overrides --field)");
    ot->add_option("--field", optim.field, "magnetic field, e.g. \"1.5 T\"");
    ot->add_option("--range-lo", optim.lo, "search range start")->capture_default_str();
    ot->add_option("--range-hi", optim.hi, "search range end")->capture_default_str();
    ot->add_option("--photon-width", optim.photon_width, "photon temporal width")
        ->capture_default_str();
    ot->add_option("--top", optim.top, "keep the best N candidates (0 keeps all)");

    WitnessArgs wit;
    auto* wc = app.add_subcommand("witness", "entanglement witness from g2 and visibility");
    add_common(wc);
    wc->add_option("--g2", wit.g2, "cross-correlation g2")->required();
    wc->add_option("--g2-sigma", wit.g2_sigma, "uncertainty of g2");
    wc->add_option("--visibility", wit.visibility, "Franson visibility")->required();
    wc->add_option("--visibility-sigma", wit.visibility_sigma, "uncertainty of the visibility");
    wc->add_option("--port", wit.port, "interferometer output port")
        ->check(CLI::IsMember({1, 2}));
    wc->add_option("--k", wit.k, "significance multiplier for the entanglement flag");

    auto* pc = app.add_subcommand("paper-check", "run the acceptance recipe");
    add_common(pc);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (*sim) {
            return cmd_simulate(common, tag_format);
        }
        if (*ana) {
            return cmd_analyze(common, tags_path);
        }
        if (*mt) {
            return cmd_memory_theory(common, theory);
        }
        if (*ot) {
            return cmd_optimize(common, optim);
        }
        if (*wc) {
            return cmd_witness(common, wit);
        }
        if (*pc) {
            return cmd_paper_check(common);
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfig;
    } catch (const IoError& e) {
        std::cerr << "I/O error: " << e.what() << '\n';
        return kIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kRuntime;
    }
    return kUsage;
}

} // namespace
} // namespace echolab::cli

int main(int argc, char** argv) { return echolab::cli::run(argc, argv); }
