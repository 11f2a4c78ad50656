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

#include "echolab/paper_check.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <random>
#include <sstream>

#include <fmt/format.h>

#include "echolab/afc.hpp"
#include "echolab/analysis.hpp"
#include "echolab/franson.hpp"
#include "echolab/montecarlo.hpp"
#include "echolab/source.hpp"
#include "echolab/tagio.hpp"

namespace echolab {

namespace {

template <typename F>
CriterionResult timed(int id, const char* name, F&& body)
{
    CriterionResult r;
    r.id = id;
    r.name = name;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        body(r);
    } catch (const std::exception& e) {
        r.pass = false;
        r.detail += std::string(r.detail.empty() ? "" : "; ") + "error: " + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

void append(std::string& s, const std::string& part)
{
    if (!s.empty()) {
        s += "; ";
    }
    s += part;
}

ExperimentConfig quiet_config(double mu, std::uint64_t seed, unsigned workers)
{
    ExperimentConfig cfg;
    cfg.source.pump.mean_pairs_per_pulse = mu;
    cfg.seed = seed;
    cfg.workers = workers;
    return cfg;
}

double window_count(const TagStreams& s, std::uint8_t stop, double center_s, double window_s)
{
    const auto hist = build_histogram(channel_times(s.idler, kIdlerChannel),
                                      channel_times(s.signal, stop), 1e-9, center_s - window_s,
                                      center_s + window_s);
    return static_cast<double>(window_counts(hist, center_s, window_s));
}

// Central-window port-1 visibility from runs at total phase 0 and pi.
Visibility franson_visibility(ExperimentConfig cfg, double center_s, double duration_s)
{
    cfg.franson.signal_enabled = true;
    cfg.franson.idler_enabled = true;
    cfg.franson.pair.phase_idler_rad = 0.0;
    cfg.franson.pair.phase_signal_rad = 0.0;
    const auto in_phase = run_experiment(cfg, cfg.seed, duration_s);
    cfg.franson.pair.phase_signal_rad = kPi;
    const auto out_phase = run_experiment(cfg, cfg.seed + 1, duration_s);
    const double a = window_count(in_phase, kSignalPort1Channel, center_s, 4e-9);
    const double b = window_count(out_phase, kSignalPort1Channel, center_s, 4e-9);
    return visibility_from_extrema(std::max(a, b), std::min(a, b));
}

} // namespace

CriterionResult check_witness_table()
{
    return timed(1, "witness-table", [](CriterionResult& r) {
        const auto p1 = witness({7.16, 0.10}, {0.760, 0.018}, 1);
        const auto p2 = witness({7.16, 0.10}, {0.685, 0.021}, 2);
        auto ok = [](const WitnessResult& w, double value, double sigma) {
            return std::abs(w.w.value - value) <= 1e-3 && std::abs(w.w.sigma - sigma) <= 1e-3;
        };
        r.pass = ok(p1, -0.271, 0.009) && ok(p2, -0.234, 0.010);
        r.detail = fmt::format("port1 W={:.5f}+-{:.5f} (expected -0.271+-0.009); "
                               "port2 W={:.5f}+-{:.5f} (expected -0.234+-0.010)",
                               p1.w.value, p1.w.sigma, p2.w.value, p2.w.sigma);
    });
}

CriterionResult check_efficiency_theory()
{
    return timed(2, "efficiency-theory", [](CriterionResult& r) {
        const auto a = optimal_square_params(2.1, 0.0, 1936e-9);
        const auto b = optimal_square_params(1.3, 0.8, 1936e-9);
        r.pass = std::abs(a.eta_opt - 0.174) <= 1e-3 && std::abs(b.eta_with_background - 0.042) <= 1e-3;
        r.detail = fmt::format("d=2.1: eta={:.4f} (0.174), Gamma t={:.4f}; "
                               "d=1.3, d0=0.8: eta={:.4f} (0.042)",
                               a.eta_opt, a.gamma_t, b.eta_with_background);
    });
}

CriterionResult check_echo_oracle()
{
    return timed(3, "echo-oracle", [](CriterionResult& r) {
        const double tm = 1e-6;
        const SpectralLine input{0.0, 20e6, LineShape::Lorentzian};
        const FrequencyGrid grid{(1u << 18) * 10e3, 1u << 18};
        bool pass = true;
        for (double d : {0.5, 1.0, 2.1, 3.0}) {
            const auto opt = optimal_square_params(d, 0.0, tm);
            const auto comb = build_comb(tm, d, 0.0, opt.finesse, ToothShape::Square,
                                         std::numeric_limits<double>::infinity());
            const double sim = simulate_echo(comb, input, grid).first_echo_efficiency;
            const double rel = sim / opt.eta_opt - 1.0;
            pass = pass && std::abs(rel) <= 0.05;
            append(r.detail, fmt::format("square d={} F={:.3f}: sim={:.5f} closed={:.5f} ({:+.2f}%)",
                                         d, opt.finesse, sim, opt.eta_opt, 100.0 * rel));
        }
        for (double f : {2.0, 4.0, 8.0}) {
            const double d = 2.1;
            const auto comb = build_comb(tm, d, 0.0, f, ToothShape::Lorentzian,
                                         std::numeric_limits<double>::infinity());
            const double sim = simulate_echo(comb, input, grid).first_echo_efficiency;
            const double closed = efficiency_lorentzian(d, f, 0.0);
            const double rel = sim / closed - 1.0;
            pass = pass && std::abs(rel) <= 0.10;
            append(r.detail, fmt::format("lorentzian d={} F={}: sim={:.5f} closed={:.5f} ({:+.2f}%)",
                                         d, f, sim, closed, 100.0 * rel));
        }
        r.pass = pass;
    });
}

CriterionResult check_coincidence_profile(const PaperCheckOptions& opt)
{
    return timed(4, "coincidence-profile", [&](CriterionResult& r) {
        const double closed = profile_fwhm(997e-12, 980e-12);
        // Low mu keeps multi-pair accidentals out of the +-15 ns fit range.
        auto cfg = quiet_config(5e-4, opt.seed, opt.workers);
        const double pairs_per_window = 5e-4 * cfg.schedule.memory_window_s / 32e-9;
        const double windows = std::ceil(1e6 / pairs_per_window);
        const double duration = windows * cfg.schedule.cycle_s();
        const auto s = run_experiment(cfg, opt.seed, duration);
        const auto deltas = coincidence_deltas(channel_times(s.idler, kIdlerChannel),
                                               channel_times(s.signal, kSignalPort1Channel),
                                               -15e-9, 15e-9);
        const auto fit = fit_coincidence_profile(deltas, 0.0, 15e-9);
        const bool closed_ok = std::abs(closed - 1370e-12) <= 1e-12;
        const bool mc_ok = std::abs(fit.fwhm.value - closed) <= 3.0 * fit.fwhm.sigma;
        r.pass = closed_ok && mc_ok;
        r.detail = fmt::format("closed form {:.2f} ps (1370 +- 1); Monte Carlo {:.2f} +- {:.2f} ps "
                               "from {} coincidences (T_s={:.1f} ps, T_i={:.1f} ps)",
                               closed * 1e12, fit.fwhm.value * 1e12, fit.fwhm.sigma * 1e12,
                               deltas.size(), fit.signal_lifetime.value * 1e12,
                               fit.idler_lifetime.value * 1e12);
    });
}

CriterionResult check_five_peaks(const PaperCheckOptions& opt)
{
    return timed(5, "five-peak-structure", [&](CriterionResult& r) {
        const double tm = 1936e-9;
        const double v_int = 0.8;
        auto cfg = quiet_config(2e-3, opt.seed, opt.workers);
        cfg.state = TimeBinState::ideal(v_int);
        cfg.memory.enabled = true;
        cfg.memory.action = {0.3, 0.2, tm};
        cfg.franson.signal_enabled = true;
        cfg.franson.idler_enabled = true;
        const double duration = 4.0 * cfg.schedule.cycle_s();

        const auto run = [&](double phase, std::uint64_t seed) {
            auto c = cfg;
            c.franson.pair.phase_signal_rad = phase;
            const auto s = run_experiment(c, seed, duration);
            return build_histogram(channel_times(s.idler, kIdlerChannel),
                                   channel_times(s.signal, kSignalPort1Channel), 1e-9, 1860e-9,
                                   2010e-9);
        };
        const auto h0 = run(0.0, opt.seed);
        const auto hpi = run(kPi, opt.seed + 1);

        auto summed = h0;
        summed += hpi;
        const auto peaks = find_peaks(summed, 4e-9, 12e-9, 10);
        bool found_all = true;
        std::string found;
        for (double t : {1904e-9, 1920e-9, 1936e-9, 1952e-9, 1968e-9}) {
            const bool hit = std::any_of(peaks.begin(), peaks.end(), [&](const HistogramPeak& p) {
                return std::abs(p.time_s - t) <= 2e-9;
            });
            found_all = found_all && hit;
            found += fmt::format("{}{:.0f}", found.empty() ? "" : "/", t * 1e9);
            found += hit ? "" : "(missing)";
        }

        bool sides_flat = true;
        std::string sides;
        for (double t : {1904e-9, 1968e-9}) {
            const auto a = static_cast<double>(window_counts(h0, t, 4e-9));
            const auto b = static_cast<double>(window_counts(hpi, t, 4e-9));
            const double z = std::abs(a - b) / std::sqrt(std::max(a + b, 1.0));
            sides_flat = sides_flat && z < 3.0;
            append(sides, fmt::format("{:.0f} ns {:.0f}/{:.0f} ({:.1f} sigma)", t * 1e9, a, b, z));
        }

        const auto m = static_cast<double>(window_counts(h0, tm, 4e-9));
        const auto n = static_cast<double>(window_counts(hpi, tm, 4e-9));
        const auto vis = visibility_from_extrema(m, n);
        const bool contrast_ok = std::abs(vis.value - v_int) <= 3.0 * vis.sigma;
        r.pass = found_all && sides_flat && contrast_ok;
        r.detail = fmt::format("peaks {}; side peaks phi=0/pi: {}; central contrast {:.4f} +- {:.4f} "
                               "(injected {})",
                               found, sides, vis.value, vis.sigma, v_int);
    });
}

CriterionResult check_classical_bounds(const PaperCheckOptions& opt)
{
    return timed(6, "classical-bounds", [&](CriterionResult& r) {
        // Thermal light split on a beam splitter.
        auto thermal = quiet_config(0.5, opt.seed, opt.workers);
        thermal.kind = SourceKind::SplitThermal;
        thermal.schedule.memory_window_s = 0.2;
        const double dur = thermal.schedule.cycle_s();
        const auto ts = run_experiment(thermal, opt.seed, dur);
        const auto th = build_histogram(channel_times(ts.idler, kIdlerChannel),
                                        channel_times(ts.signal, kSignalPort1Channel), 1e-9,
                                        -48e-9, 48e-9);
        const auto g_th = g2_from_histogram(th, 0.0, {-32e-9, 32e-9}, 16e-9);
        const auto v_th = franson_visibility(thermal, 0.0, dur);
        const auto w_th =
            witness(g_th, {std::clamp(v_th.value, 0.0, 1.0), v_th.sigma});
        const bool thermal_ok = std::abs(g_th.value - 2.0) <= 3.0 * g_th.sigma && w_th.w.value >= 0.0;

        // Ideal entangled pairs at vanishing mu.
        auto ideal = quiet_config(1e-4, opt.seed + 10, opt.workers);
        const double dur_ideal = 200.0 * ideal.schedule.cycle_s();
        const auto is = run_experiment(ideal, ideal.seed, dur_ideal);
        const auto ih = build_histogram(channel_times(is.idler, kIdlerChannel),
                                        channel_times(is.signal, kSignalPort1Channel), 1e-9,
                                        -48e-9, 48e-9);
        const auto g_id = g2_from_histogram(ih, 0.0, {-32e-9, 32e-9}, 4e-9);
        const auto v_id = franson_visibility(ideal, 0.0, 20.0 * ideal.schedule.cycle_s());
        const auto w_id = witness(g_id, {v_id.value, v_id.sigma});
        const double floor = 1.0 / (g_id.value + 2.0) - 0.5;
        const bool ideal_ok = std::abs(w_id.w.value - floor) <= 3.0 * w_id.w.sigma + 1e-12;

        r.pass = thermal_ok && ideal_ok;
        r.detail = fmt::format("thermal g2={:.4f}+-{:.4f}, V={:.4f}+-{:.4f}, W={:.4f}; "
                               "ideal g2={:.1f}+-{:.1f}, V={:.5f}+-{:.5f}, W={:.5f}+-{:.5f} "
                               "(expected {:.5f})",
                               g_th.value, g_th.sigma, v_th.value, v_th.sigma, w_th.w.value,
                               g_id.value, g_id.sigma, v_id.value, v_id.sigma, w_id.w.value,
                               w_id.w.sigma, floor);
    });
}

CriterionResult check_multiplexing()
{
    return timed(7, "multiplexing", [](CriterionResult& r) {
        const auto m = multiplexing_metrics(1936e-9, 4e-9, 32e-9);
        r.pass = m.tbp == 484.0 && m.mode_count == 60.5;
        r.detail = fmt::format("TBP={} modes={}", m.tbp, m.mode_count);
    });
}

CriterionResult check_storage_optimizer()
{
    return timed(8, "storage-time-optimizer", [](CriterionResult& r) {
        const auto list = optimize_storage_time(32e-9, 315e-9, 300e-9, 2000e-9);
        bool pass = true;
        for (double t : {336e-9, 1296e-9, 1616e-9, 1936e-9}) {
            const auto it = std::find_if(list.begin(), list.end(), [&](const StorageTimeCandidate& c) {
                return std::abs(c.storage_time_s - t) < 1e-12;
            });
            const bool ok = it != list.end() && it->half_integer;
            pass = pass && ok;
            append(r.detail, ok ? fmt::format("{:.0f} ns residual {:.0f} ns", t * 1e9,
                                              it->residual_s * 1e9)
                                : fmt::format("{:.0f} ns missing", t * 1e9));
        }
        r.detail += fmt::format(" ({} candidates)", list.size());
        r.pass = pass;
    });
}

namespace {

std::vector<std::uint64_t> brute_force_histogram(const std::vector<Picoseconds>& start,
                                                 const std::vector<Picoseconds>& stop,
                                                 Picoseconds width, Picoseconds lo, std::size_t bins)
{
    std::vector<std::uint64_t> counts(bins, 0);
    for (auto a : start) {
        for (auto b : stop) {
            const Picoseconds d = b - a;
            if (d >= lo && d < lo + static_cast<Picoseconds>(bins) * width) {
                ++counts[static_cast<std::size_t>((d - lo) / width)];
            }
        }
    }
    return counts;
}

std::string serialize(const std::vector<TimeTag>& tags)
{
    std::ostringstream os;
    write_tags_binary(os, tags, 3);
    return os.str();
}

} // namespace

CriterionResult check_determinism(const PaperCheckOptions& opt)
{
    return timed(9, "determinism-and-oracles", [&](CriterionResult& r) {
        auto cfg = quiet_config(0.05, opt.seed, 1);
        cfg.memory.enabled = true;
        cfg.memory.action = {0.4, 0.1, 1936e-9};
        cfg.franson.signal_enabled = true;
        cfg.franson.idler_enabled = true;
        cfg.franson.phase_noise_sigma_rad = 0.2;
        cfg.signal_detector = {0.8, 100.0, 50e-12, 20e-9};
        cfg.idler_detector = {0.7, 100.0, 50e-12, 20e-9};
        cfg.chunk_pulses = 1u << 20;
        const double dur = cfg.schedule.cycle_s();
        const auto a = run_experiment(cfg, opt.seed, dur).merged();
        const auto b = run_experiment(cfg, opt.seed, dur).merged();
        cfg.workers = 4;
        const auto c = run_experiment(cfg, opt.seed, dur).merged();
        const bool identical = serialize(a) == serialize(b) && serialize(a) == serialize(c);

        std::mt19937_64 rng(opt.seed);
        int agree = 0;
        for (int k = 0; k < 200; ++k) {
            std::uniform_int_distribution<int> size(0, 60);
            std::uniform_int_distribution<Picoseconds> when(0, 20000);
            std::vector<Picoseconds> start(static_cast<std::size_t>(size(rng)));
            std::vector<Picoseconds> stop(static_cast<std::size_t>(size(rng)));
            for (auto& t : start) {
                t = when(rng);
            }
            for (auto& t : stop) {
                t = when(rng);
            }
            std::sort(start.begin(), start.end());
            std::sort(stop.begin(), stop.end());
            const Picoseconds width = std::uniform_int_distribution<Picoseconds>(1, 700)(rng);
            const Picoseconds lo = std::uniform_int_distribution<Picoseconds>(-8000, 2000)(rng);
            const Picoseconds hi = lo + std::uniform_int_distribution<Picoseconds>(1, 10000)(rng);
            const auto h = build_histogram(start, stop, to_seconds(width), to_seconds(lo), to_seconds(hi));
            agree += h.counts == brute_force_histogram(start, stop, width, lo, h.counts.size());
        }
        r.pass = identical && !a.empty() && agree == 200;
        r.detail = fmt::format("{} tags, repeat and 4-worker runs {}; histogram oracle {}/200",
                               a.size(), identical ? "byte-identical" : "DIFFER", agree);
    });
}

std::vector<CriterionResult> run_paper_check(const PaperCheckOptions& opt)
{
    return {check_witness_table(),          check_efficiency_theory(),
            check_echo_oracle(),            check_coincidence_profile(opt),
            check_five_peaks(opt),          check_classical_bounds(opt),
            check_multiplexing(),           check_storage_optimizer(),
            check_determinism(opt)};
}

std::string format_result(const CriterionResult& r)
{
    return fmt::format("{} {} {} ({:.2f} s): {}", r.pass ? "PASS" : "FAIL", r.id, r.name, r.seconds,
                       r.detail);
}

} // namespace echolab
