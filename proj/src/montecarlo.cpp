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

#include "echolab/montecarlo.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <complex>
#include <exception>
#include <mutex>
#include <random>
#include <string>
#include <thread>

#include "echolab/error.hpp"

namespace echolab {

namespace {

using cplx = std::complex<double>;
using Effect = std::array<std::array<cplx, 2>, 2>; // F(j, k) over emission bins

struct LocalOutcome {
    bool detected = false;
    MemoryBranch branch = MemoryBranch::Transmitted;
    std::uint8_t slot = 0;
    std::uint8_t port = 1;
    Effect effect{};
};

Effect outer(const std::array<cplx, 2>& m)
{
    Effect f{};
    for (int j = 0; j < 2; ++j) {
        for (int k = 0; k < 2; ++k) {
            f[j][k] = m[j] * std::conj(m[k]);
        }
    }
    return f;
}

// Detection outcomes of one photon. `branches` lists (branch, probability)
// before the analyser; the undetected outcome completes the set to identity.
std::vector<LocalOutcome> local_outcomes(
    const std::vector<std::pair<MemoryBranch, double>>& branches, bool interferometer,
    double phase, double loss_short, double loss_long, double efficiency)
{
    std::vector<LocalOutcome> out;
    Effect detected_sum{};
    const std::array<double, 2> arm_t = {std::sqrt(1.0 - loss_short), std::sqrt(1.0 - loss_long)};
    for (const auto& [branch, prob] : branches) {
        const double pre = std::sqrt(prob * efficiency);
        if (interferometer) {
            for (int slot = 0; slot <= 2; ++slot) {
                for (int port = 1; port <= 2; ++port) {
                    std::array<cplx, 2> m{};
                    for (int bin = 0; bin < 2; ++bin) {
                        const int arm = slot - bin;
                        if (arm == 0) {
                            m[bin] = pre * arm_t[0] * 0.5;
                        } else if (arm == 1) {
                            const double sign = port == 1 ? 1.0 : -1.0;
                            m[bin] = pre * arm_t[1] * sign * 0.5 * std::polar(1.0, phase);
                        }
                    }
                    LocalOutcome o;
                    o.detected = true;
                    o.branch = branch;
                    o.slot = static_cast<std::uint8_t>(slot);
                    o.port = static_cast<std::uint8_t>(port);
                    o.effect = outer(m);
                    out.push_back(o);
                }
            }
        } else {
            for (int bin = 0; bin < 2; ++bin) {
                std::array<cplx, 2> m{};
                m[bin] = pre;
                LocalOutcome o;
                o.detected = true;
                o.branch = branch;
                o.slot = static_cast<std::uint8_t>(bin);
                o.port = 1;
                o.effect = outer(m);
                out.push_back(o);
            }
        }
    }
    for (const auto& o : out) {
        for (int j = 0; j < 2; ++j) {
            for (int k = 0; k < 2; ++k) {
                detected_sum[j][k] += o.effect[j][k];
            }
        }
    }
    LocalOutcome lost;
    lost.detected = false;
    for (int j = 0; j < 2; ++j) {
        for (int k = 0; k < 2; ++k) {
            lost.effect[j][k] = (j == k ? 1.0 : 0.0) - detected_sum[j][k];
        }
    }
    out.push_back(lost);
    return out;
}

// Fixed representative (bin, arm) for a detection slot, used for timing.
std::pair<int, int> slot_path(int slot, bool interferometer)
{
    if (!interferometer) {
        return {slot, 0};
    }
    switch (slot) {
    case 0:
        return {0, 0};
    case 1:
        return {1, 0};
    default:
        return {1, 1};
    }
}

std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t a, std::uint64_t b, std::uint32_t salt)
{
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                      static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32), salt};
    return std::mt19937_64(seq);
}

constexpr std::uint32_t kChunkSalt = 0x45544147u;
constexpr std::uint32_t kPhaseSalt = 0x50484153u;

} // namespace

void validate(const ExperimentSchedule& s)
{
    if (!(s.polarization_window_s >= 0.0) || !(s.afc_window_s >= 0.0) || !(s.delay_s >= 0.0) ||
        !(s.trailing_delay_s >= 0.0)) {
        throw InvalidParameter("schedule windows must be non-negative");
    }
    if (!(s.memory_window_s > 0.0)) {
        throw InvalidParameter("memory window must be positive");
    }
}

void validate(const MemoryActionModel& m)
{
    auto prob = [](double p) { return p >= 0.0 && p <= 1.0; };
    if (!prob(m.transmission_prob) || !prob(m.echo_efficiency) ||
        m.transmission_prob + m.echo_efficiency > 1.0 + 1e-12) {
        throw InvalidParameter("memory transmission and echo probabilities must be in [0, 1] "
                               "and sum to at most 1");
    }
    if (m.echo_efficiency > 0.0 && !(m.storage_time_s > 0.0)) {
        throw InvalidParameter("memory storage time must be positive");
    }
}

MemoryActionModel memory_action_from_comb(const AfcComb& comb)
{
    validate(comb);
    const double d = comb.peak_depth;
    const double f = comb.finesse;
    double mean = 0.0;
    double first = 0.0;
    switch (comb.tooth_shape) {
    case ToothShape::Square:
        mean = d / f;
        first = d * std::sin(kPi / f) / kPi;
        break;
    case ToothShape::Lorentzian:
        mean = d * kPi / (2.0 * f);
        first = mean * std::exp(-kPi / f);
        break;
    case ToothShape::Gaussian:
        mean = d / f * std::sqrt(kPi / (4.0 * kLn2));
        first = mean * std::exp(-kPi * kPi / (4.0 * kLn2 * f * f));
        break;
    }
    const double total = comb.background_depth + mean;
    MemoryActionModel m;
    m.transmission_prob = std::exp(-total);
    m.echo_efficiency = first * first * std::exp(-total);
    m.storage_time_s = comb.storage_time_s();
    return m;
}

double PairOutcomeTable::total() const
{
    double s = 0.0;
    for (const auto& r : rows) {
        s += r.probability;
    }
    return s;
}

double PairOutcomeTable::joint(MemoryBranch branch, int signal_slot, int signal_port,
                               int idler_slot, int idler_port) const
{
    double s = 0.0;
    for (const auto& r : rows) {
        if (r.signal_detected && r.idler_detected && r.branch == branch &&
            r.signal_slot == signal_slot && r.signal_port == signal_port &&
            r.idler_slot == idler_slot && r.idler_port == idler_port) {
            s += r.probability;
        }
    }
    return s;
}

PairOutcomeTable pair_outcome_table(const TimeBinState& state, const FransonPair& pair,
                                    const MemoryActionModel& memory,
                                    const DetectorModel& signal_det,
                                    const DetectorModel& idler_det, AnalyzerSetup setup)
{
    validate(state);
    validate(memory);
    validate(signal_det);
    validate(idler_det);
    if (setup.signal_interferometer || setup.idler_interferometer) {
        validate(pair);
    }

    std::vector<std::pair<MemoryBranch, double>> signal_branches;
    signal_branches.emplace_back(MemoryBranch::Transmitted, memory.transmission_prob);
    if (memory.echo_efficiency > 0.0) {
        signal_branches.emplace_back(MemoryBranch::Echoed, memory.echo_efficiency);
    }
    const auto sig = local_outcomes(signal_branches, setup.signal_interferometer,
                                    pair.phase_signal_rad, pair.loss_short, pair.loss_long,
                                    signal_det.efficiency);
    const auto idl = local_outcomes({{MemoryBranch::Transmitted, 1.0}}, setup.idler_interferometer,
                                    pair.phase_idler_rad, pair.loss_short, pair.loss_long,
                                    idler_det.efficiency);

    // rho = c |psi><psi| + (1 - c) diag(|psi|^2), index 2 * signal_bin + idler_bin.
    std::array<std::array<cplx, 4>, 4> rho{};
    for (int j = 0; j < 4; ++j) {
        for (int k = 0; k < 4; ++k) {
            const cplx v = state.amplitudes[j] * std::conj(state.amplitudes[k]);
            rho[j][k] = j == k ? v : state.coherence * v;
        }
    }

    PairOutcomeTable table;
    for (const auto& s : sig) {
        for (const auto& i : idl) {
            cplx p = 0.0;
            for (int j = 0; j < 4; ++j) {
                for (int k = 0; k < 4; ++k) {
                    p += rho[j][k] * s.effect[j / 2][k / 2] * i.effect[j % 2][k % 2];
                }
            }
            PairOutcome row;
            row.signal_detected = s.detected;
            row.branch = s.branch;
            row.signal_slot = s.slot;
            row.signal_port = s.port;
            row.idler_detected = i.detected;
            row.idler_slot = i.slot;
            row.idler_port = i.port;
            row.probability = std::max(0.0, p.real());
            if (row.probability > 0.0) {
                table.rows.push_back(row);
            }
        }
    }
    return table;
}

PairOutcomeTable fold_pulse_train(const PairOutcomeTable& table)
{
    PairOutcomeTable out;
    for (MemoryBranch branch : {MemoryBranch::Transmitted, MemoryBranch::Echoed}) {
        double all = 0.0;
        double mid = 0.0;
        for (const auto& r : table.rows) {
            if (r.signal_detected && r.idler_detected && r.branch == branch &&
                r.signal_slot == r.idler_slot) {
                all += r.probability;
                if (r.signal_slot == 1) {
                    mid += r.probability;
                }
            }
        }
        for (const auto& r : table.rows) {
            const bool same_slot = r.signal_detected && r.idler_detected && r.branch == branch &&
                                   r.signal_slot == r.idler_slot;
            if (!same_slot || mid <= 0.0) {
                continue;
            }
            if (r.signal_slot == 1) {
                PairOutcome folded = r;
                folded.probability = r.probability * all / mid;
                out.rows.push_back(folded);
            }
        }
        if (mid <= 0.0) {
            for (const auto& r : table.rows) {
                if (r.signal_detected && r.idler_detected && r.branch == branch &&
                    r.signal_slot == r.idler_slot) {
                    out.rows.push_back(r);
                }
            }
        }
    }
    for (const auto& r : table.rows) {
        const bool same_slot =
            r.signal_detected && r.idler_detected && r.signal_slot == r.idler_slot;
        if (!same_slot) {
            out.rows.push_back(r);
        }
    }
    return out;
}

void validate(const ExperimentConfig& config)
{
    validate(config.source);
    validate(config.state);
    validate(config.signal_detector);
    validate(config.idler_detector);
    validate(config.schedule);
    if (config.memory.enabled) {
        validate(config.memory.action);
    }
    if (config.franson.signal_enabled || config.franson.idler_enabled) {
        validate(config.franson.pair);
    }
    if (!(config.franson.phase_noise_sigma_rad >= 0.0)) {
        throw InvalidParameter("phase noise must be non-negative");
    }
    if (config.chunk_pulses == 0) {
        throw InvalidParameter("chunk size must be positive");
    }
    if (to_ps(config.source.pump.period_s) <= 0) {
        throw InvalidParameter("pump period must be at least 1 ps");
    }
}

std::vector<TimeTag> TagStreams::merged() const
{
    std::vector<TimeTag> out;
    out.reserve(signal.size() + idler.size());
    std::merge(signal.begin(), signal.end(), idler.begin(), idler.end(), std::back_inserter(out),
               [](const TimeTag& a, const TimeTag& b) {
                   return a.time_ps != b.time_ps ? a.time_ps < b.time_ps : a.channel < b.channel;
               });
    return out;
}

std::vector<Picoseconds> channel_times(const std::vector<TimeTag>& tags, std::uint8_t channel)
{
    std::vector<Picoseconds> out;
    for (const auto& t : tags) {
        if (t.channel == channel) {
            out.push_back(t.time_ps);
        }
    }
    return out;
}

std::vector<TimeTag> apply_dead_time(const std::vector<TimeTag>& tags, Picoseconds dead_time)
{
    std::array<Picoseconds, 256> next_free{};
    std::array<bool, 256> seen{};
    std::vector<TimeTag> out;
    out.reserve(tags.size());
    for (const auto& t : tags) {
        if (seen[t.channel] && t.time_ps < next_free[t.channel]) {
            continue;
        }
        seen[t.channel] = true;
        next_free[t.channel] = t.time_ps + dead_time;
        out.push_back(t);
    }
    return out;
}

namespace {

struct Chunk {
    std::uint64_t window = 0;
    std::uint64_t index = 0;   // chunk index inside the window
    Picoseconds window_start = 0;
    Picoseconds window_end = 0;
    std::uint64_t first_pulse = 0;
    std::uint64_t end_pulse = 0;
};

struct WindowPlan {
    PairOutcomeTable table;
    std::vector<double> cumulative;
};

class ChunkGenerator {
public:
    ChunkGenerator(const ExperimentConfig& config, const WindowPlan& plan, const Chunk& chunk,
                   std::uint64_t seed)
        : cfg_(config), plan_(plan), chunk_(chunk),
          rng_(make_rng(seed, chunk.window, chunk.index, kChunkSalt))
    {
        period_ps_ = to_ps(cfg_.source.pump.period_s);
        pulse_width_ps_ = cfg_.source.pump.pulse_width_s * 1e12;
        ts_ps_ = cfg_.source.signal_lifetime_s * 1e12;
        ti_ps_ = cfg_.source.idler_lifetime_s * 1e12;
        sig_interf_ = cfg_.franson.signal_enabled;
        idl_interf_ = cfg_.franson.idler_enabled;
        delay_s_ps_ = cfg_.franson.pair.delay_signal_s * 1e12;
        delay_i_ps_ = cfg_.franson.pair.delay_idler_s * 1e12;
        storage_ps_ = cfg_.memory.enabled ? cfg_.memory.action.storage_time_s * 1e12 : 0.0;
    }

    std::vector<TimeTag> run()
    {
        const Picoseconds span_start =
            chunk_.window_start + static_cast<Picoseconds>(chunk_.first_pulse) * period_ps_;
        const Picoseconds span_end =
            std::min(chunk_.window_end,
                     chunk_.window_start + static_cast<Picoseconds>(chunk_.end_pulse) * period_ps_);
        if (cfg_.source.pump.mode == PumpMode::CW) {
            generate_cw(span_start, span_end);
        } else {
            generate_pulsed();
        }
        add_dark_counts(span_start, span_end);
        return std::move(tags_);
    }

private:
    double exp_delay(double lifetime_ps)
    {
        return std::exponential_distribution<double>(1.0 / lifetime_ps)(rng_);
    }

    double jitter(double sigma_s)
    {
        if (sigma_s <= 0.0) {
            return 0.0;
        }
        return std::normal_distribution<double>(0.0, sigma_s * 1e12)(rng_);
    }

    void push(std::uint8_t channel, Picoseconds base, double offset_ps)
    {
        tags_.push_back({base + static_cast<Picoseconds>(std::llround(offset_ps)), channel});
    }

    void push_idler(Picoseconds base, double offset_ps)
    {
        const Picoseconds t = base + static_cast<Picoseconds>(std::llround(offset_ps));
        // Idler photons are gated to the memory window.
        if (t >= chunk_.window_start && t < chunk_.window_end) {
            tags_.push_back({t, kIdlerChannel});
        }
    }

    std::uint64_t pairs_in_nonempty_pulse()
    {
        const double mu = cfg_.source.pump.mean_pairs_per_pulse;
        if (cfg_.source.statistics == PairStatistics::Thermal) {
            // Conditional on n >= 1, n - 1 is geometric with ratio mu / (1 + mu).
            std::geometric_distribution<std::uint64_t> extra(1.0 / (1.0 + mu));
            return 1 + extra(rng_);
        }
        // Zero-truncated Poisson by inversion.
        std::uniform_real_distribution<double> uni(0.0, 1.0);
        const double u = uni(rng_);
        const double p0 = std::exp(-mu);
        double target = p0 + u * (1.0 - p0);
        double p = p0;
        double cdf = p0;
        std::uint64_t n = 0;
        while (cdf < target && n < 10000) {
            ++n;
            p *= mu / static_cast<double>(n);
            cdf += p;
        }
        return std::max<std::uint64_t>(n, 1);
    }

    double nonempty_probability() const
    {
        const double mu = cfg_.source.pump.mean_pairs_per_pulse;
        return cfg_.source.statistics == PairStatistics::Thermal ? mu / (1.0 + mu)
                                                                 : -std::expm1(-mu);
    }

    void generate_pulsed()
    {
        const double p = nonempty_probability();
        if (p <= 0.0) {
            return;
        }
        std::geometric_distribution<std::uint64_t> gap(std::min(p, 1.0));
        std::uniform_real_distribution<double> uni(0.0, 1.0);
        std::uint64_t j = chunk_.first_pulse;
        while (true) {
            j += p >= 1.0 ? 0 : gap(rng_);
            if (j >= chunk_.end_pulse) {
                break;
            }
            const Picoseconds base = chunk_.window_start + static_cast<Picoseconds>(j) * period_ps_;
            const std::uint64_t n = pairs_in_nonempty_pulse();
            for (std::uint64_t k = 0; k < n; ++k) {
                const double t0 = uni(rng_) * pulse_width_ps_;
                emit(base, t0);
            }
            ++j;
        }
    }

    void generate_cw(Picoseconds span_start, Picoseconds span_end)
    {
        const double rate_per_ps = cfg_.source.pump.mean_pairs_per_pulse / static_cast<double>(period_ps_);
        if (rate_per_ps <= 0.0) {
            return;
        }
        std::exponential_distribution<double> gap(rate_per_ps);
        const double span = static_cast<double>(span_end - span_start);
        double t = gap(rng_);
        while (t < span) {
            emit(span_start, t);
            t += gap(rng_);
        }
    }

    void emit(Picoseconds base, double t0)
    {
        if (cfg_.kind == SourceKind::SplitThermal) {
            emit_split_photon(base, t0);
        } else {
            emit_pair(base, t0);
        }
    }

    void emit_pair(Picoseconds base, double t0)
    {
        const double xs = exp_delay(ts_ps_);
        const double xi = exp_delay(ti_ps_);
        std::uniform_real_distribution<double> uni(0.0, plan_.cumulative.back());
        const double u = uni(rng_);
        auto it = std::upper_bound(plan_.cumulative.begin(), plan_.cumulative.end(), u);
        if (it == plan_.cumulative.end()) {
            --it;
        }
        const auto& row = plan_.table.rows[static_cast<std::size_t>(it - plan_.cumulative.begin())];
        const double period = static_cast<double>(period_ps_);
        if (row.signal_detected) {
            const auto [bin, arm] = slot_path(row.signal_slot, sig_interf_);
            const double branch = row.branch == MemoryBranch::Echoed ? storage_ps_ : 0.0;
            const double offset = t0 + bin * period + branch + arm * delay_s_ps_ + xs +
                                  jitter(cfg_.signal_detector.jitter_sigma_s);
            const auto channel = sig_interf_ ? (row.signal_port == 1 ? kSignalPort1Channel
                                                                     : kSignalPort2Channel)
                                             : kSignalPort1Channel;
            push(channel, base, offset);
        }
        if (row.idler_detected && row.idler_port == 1) {
            const auto [bin, arm] = slot_path(row.idler_slot, idl_interf_);
            const double offset = t0 + bin * period + arm * delay_i_ps_ + xi +
                                  jitter(cfg_.idler_detector.jitter_sigma_s);
            push_idler(base, offset);
        }
    }

    // Classical thermal light split on a beam splitter: each photon goes to
    // either analyser on its own, with no pair correlation and no time-bin
    // coherence.
    void emit_split_photon(Picoseconds base, double t0)
    {
        std::uniform_real_distribution<double> uni(0.0, 1.0);
        const bool to_signal = uni(rng_) < 0.5;
        const auto& pair = cfg_.franson.pair;
        auto arm_choice = [&](bool interferometer, int& arm, int& port) {
            arm = 0;
            port = 1;
            if (!interferometer) {
                return true;
            }
            arm = uni(rng_) < 0.5 ? 0 : 1;
            port = uni(rng_) < 0.5 ? 1 : 2;
            const double loss = arm == 0 ? pair.loss_short : pair.loss_long;
            return uni(rng_) >= loss;
        };
        if (to_signal) {
            const double xs = exp_delay(ts_ps_);
            const auto& mem = cfg_.memory.action;
            double branch = 0.0;
            if (cfg_.memory.enabled) {
                const double u = uni(rng_);
                if (u < mem.transmission_prob) {
                    branch = 0.0;
                } else if (u < mem.transmission_prob + mem.echo_efficiency) {
                    branch = storage_ps_;
                } else {
                    return;
                }
            }
            int arm = 0;
            int port = 1;
            if (!arm_choice(sig_interf_, arm, port)) {
                return;
            }
            if (uni(rng_) >= cfg_.signal_detector.efficiency) {
                return;
            }
            const double offset = t0 + branch + arm * delay_s_ps_ + xs +
                                  jitter(cfg_.signal_detector.jitter_sigma_s);
            push(port == 1 ? kSignalPort1Channel : kSignalPort2Channel, base, offset);
        } else {
            const double xi = exp_delay(ti_ps_);
            int arm = 0;
            int port = 1;
            if (!arm_choice(idl_interf_, arm, port) || port != 1) {
                return;
            }
            if (uni(rng_) >= cfg_.idler_detector.efficiency) {
                return;
            }
            const double offset =
                t0 + arm * delay_i_ps_ + xi + jitter(cfg_.idler_detector.jitter_sigma_s);
            push_idler(base, offset);
        }
    }

    void add_dark_counts(Picoseconds span_start, Picoseconds span_end)
    {
        if (span_end <= span_start) {
            return;
        }
        const double span_s = to_seconds(span_end - span_start);
        const double noise = cfg_.source.noise_rate_per_channel_hz;
        std::vector<std::pair<std::uint8_t, double>> channels = {
            {kIdlerChannel, cfg_.idler_detector.dark_rate_hz + noise},
            {kSignalPort1Channel, cfg_.signal_detector.dark_rate_hz + noise}};
        if (sig_interf_) {
            channels.emplace_back(kSignalPort2Channel, cfg_.signal_detector.dark_rate_hz + noise);
        }
        std::uniform_int_distribution<Picoseconds> when(span_start, span_end - 1);
        for (const auto& [channel, rate] : channels) {
            if (rate <= 0.0) {
                continue;
            }
            std::poisson_distribution<std::uint64_t> count(rate * span_s);
            const std::uint64_t n = count(rng_);
            for (std::uint64_t k = 0; k < n; ++k) {
                tags_.push_back({when(rng_), channel});
            }
        }
    }

    const ExperimentConfig& cfg_;
    const WindowPlan& plan_;
    const Chunk& chunk_;
    std::mt19937_64 rng_;
    std::vector<TimeTag> tags_;
    Picoseconds period_ps_ = 0;
    double pulse_width_ps_ = 0.0;
    double ts_ps_ = 0.0;
    double ti_ps_ = 0.0;
    double delay_s_ps_ = 0.0;
    double delay_i_ps_ = 0.0;
    double storage_ps_ = 0.0;
    bool sig_interf_ = false;
    bool idl_interf_ = false;
};

WindowPlan make_window_plan(const ExperimentConfig& cfg, double phase_noise)
{
    FransonPair pair = cfg.franson.pair;
    pair.phase_signal_rad += phase_noise;
    MemoryActionModel memory = cfg.memory.enabled ? cfg.memory.action : MemoryActionModel{};
    AnalyzerSetup setup{cfg.franson.signal_enabled, cfg.franson.idler_enabled};
    // Detector efficiencies are applied inside the table.
    WindowPlan plan;
    plan.table =
        pair_outcome_table(cfg.state, pair, memory, cfg.signal_detector, cfg.idler_detector, setup);
    if (setup.signal_interferometer && setup.idler_interferometer) {
        plan.table = fold_pulse_train(plan.table);
    }
    double acc = 0.0;
    for (const auto& r : plan.table.rows) {
        acc += r.probability;
        plan.cumulative.push_back(acc);
    }
    if (plan.cumulative.empty()) {
        plan.cumulative.push_back(1.0);
        plan.table.rows.push_back(PairOutcome{});
    }
    return plan;
}

} // namespace

TagStreams run_experiment(const ExperimentConfig& config, std::uint64_t seed, double duration_s)
{
    validate(config);
    if (!(duration_s > 0.0)) {
        throw InvalidParameter("duration must be positive");
    }

    const auto& sched = config.schedule;
    const Picoseconds cycle = to_ps(sched.cycle_s());
    const Picoseconds offset = to_ps(sched.memory_offset_s());
    const Picoseconds window = to_ps(sched.memory_window_s);
    const Picoseconds duration = to_ps(duration_s);
    const Picoseconds period = to_ps(config.source.pump.period_s);

    std::vector<Chunk> chunks;
    std::vector<WindowPlan> plans;
    for (std::uint64_t w = 0;; ++w) {
        const Picoseconds start = static_cast<Picoseconds>(w) * cycle + offset;
        if (start >= duration) {
            break;
        }
        const Picoseconds end = std::min(start + window, duration);
        double phase_noise = 0.0;
        if (config.franson.phase_noise_sigma_rad > 0.0) {
            auto rng = make_rng(seed, w, 0, kPhaseSalt);
            phase_noise =
                std::normal_distribution<double>(0.0, config.franson.phase_noise_sigma_rad)(rng);
        }
        plans.push_back(make_window_plan(config, phase_noise));
        const auto pulses = static_cast<std::uint64_t>((end - start + period - 1) / period);
        for (std::uint64_t first = 0, idx = 0; first < pulses; first += config.chunk_pulses, ++idx) {
            chunks.push_back({w, idx, start, end, first, std::min(pulses, first + config.chunk_pulses)});
        }
        if (cycle <= 0) {
            break;
        }
    }

    std::vector<std::vector<TimeTag>> results(chunks.size());
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (std::size_t i = next++; i < chunks.size(); i = next++) {
            try {
                ChunkGenerator gen(config, plans[chunks[i].window], chunks[i], seed);
                results[i] = gen.run();
            } catch (...) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure) {
                    failure = std::current_exception();
                }
            }
        }
    };
    const unsigned n_workers = std::max(1u, std::min<unsigned>(config.workers,
                                                              static_cast<unsigned>(chunks.size())));
    if (n_workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned k = 0; k < n_workers; ++k) {
            pool.emplace_back(worker);
        }
        for (auto& t : pool) {
            t.join();
        }
    }
    if (failure) {
        std::rethrow_exception(failure);
    }

    std::vector<TimeTag> all;
    for (auto& r : results) {
        all.insert(all.end(), r.begin(), r.end());
    }
    std::sort(all.begin(), all.end(), [](const TimeTag& a, const TimeTag& b) {
        return a.time_ps != b.time_ps ? a.time_ps < b.time_ps : a.channel < b.channel;
    });

    TagStreams out;
    std::vector<TimeTag> signal;
    std::vector<TimeTag> idler;
    for (const auto& t : all) {
        (t.channel == kIdlerChannel ? idler : signal).push_back(t);
    }
    out.signal = apply_dead_time(signal, to_ps(config.signal_detector.dead_time_s));
    out.idler = apply_dead_time(idler, to_ps(config.idler_detector.dead_time_s));
    return out;
}

} // namespace echolab
