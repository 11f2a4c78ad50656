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

#pragma once

#include <cstdint>
#include <vector>

#include "echolab/afc.hpp"
#include "echolab/constants.hpp"
#include "echolab/detector.hpp"
#include "echolab/franson.hpp"
#include "echolab/source.hpp"

namespace echolab {

struct TimeTag {
    Picoseconds time_ps = 0;
    std::uint8_t channel = 0;

    friend bool operator==(const TimeTag&, const TimeTag&) = default;
};

inline constexpr std::uint8_t kIdlerChannel = 0;
inline constexpr std::uint8_t kSignalPort1Channel = 1;
inline constexpr std::uint8_t kSignalPort2Channel = 2;

// Repeating experimental cycle; photons are only generated and recorded in
// the memory window.
struct ExperimentSchedule {
    double polarization_window_s = 1.8;
    double afc_window_s = 1.9;
    double delay_s = 0.2;
    double memory_window_s = 1.0;
    double trailing_delay_s = 0.1;

    double cycle_s() const
    {
        return polarization_window_s + afc_window_s + delay_s + memory_window_s + trailing_delay_s;
    }
    double memory_offset_s() const { return polarization_window_s + afc_window_s + delay_s; }
    double duty_cycle() const { return memory_window_s / cycle_s(); }
};

void validate(const ExperimentSchedule& schedule);

// What the memory does to one signal photon: transmitted straight through,
// re-emitted after storage_time_s, or lost.
struct MemoryActionModel {
    double transmission_prob = 1.0;
    double echo_efficiency = 0.0;
    double storage_time_s = 0.0;
};

void validate(const MemoryActionModel& memory);

// Broadband-input action of a comb: transmission exp(-<alpha>) and first echo
// |b1|^2 exp(-<alpha>), b1 the first Fourier coefficient of alpha over one period.
MemoryActionModel memory_action_from_comb(const AfcComb& comb);

enum class MemoryBranch : std::uint8_t { Transmitted, Echoed };

// Detection slot counts pump periods after the early emission bin:
// slot = bin + arm (arm 1 = long arm). Without an interferometer slot = bin.
struct PairOutcome {
    bool signal_detected = false;
    MemoryBranch branch = MemoryBranch::Transmitted;
    std::uint8_t signal_slot = 0;
    std::uint8_t signal_port = 1;
    bool idler_detected = false;
    std::uint8_t idler_slot = 0;
    std::uint8_t idler_port = 1;
    double probability = 0.0;
};

struct AnalyzerSetup {
    bool signal_interferometer = true;
    bool idler_interferometer = true;
};

struct PairOutcomeTable {
    std::vector<PairOutcome> rows;

    double total() const;
    // Probability of a coincidence in the given slots/ports for a memory branch.
    double joint(MemoryBranch branch, int signal_slot, int signal_port, int idler_slot,
                 int idler_port) const;
};

// Enumerates every detection outcome of one pair. Paths that end in the same
// detection slots and ports add coherently, weighted by the state coherence.
PairOutcomeTable pair_outcome_table(const TimeBinState& state, const FransonPair& pair,
                                    const MemoryActionModel& memory,
                                    const DetectorModel& signal_det,
                                    const DetectorModel& idler_det, AnalyzerSetup setup = {});

// Pump-train limit: in a phase-coherent pulse train the outer central-class
// paths (both photons in slot 0 or both in slot 2) interfere with the
// neighbouring pulse's amplitude, so every same-slot coincidence carries the
// slot-1 port statistics. Mass is conserved per memory branch.
PairOutcomeTable fold_pulse_train(const PairOutcomeTable& table);

enum class SourceKind { Pairs, SplitThermal };

struct MemorySettings {
    bool enabled = false;
    AfcComb comb{};
    MemoryActionModel action{};
    MagnetConfig magnet{};
};

struct FransonSettings {
    bool signal_enabled = false;
    bool idler_enabled = false;
    FransonPair pair{};
    double phase_noise_sigma_rad = 0.0; // Gaussian jitter on the total phase per memory window
};

struct ExperimentConfig {
    PairSource source{};
    SourceKind kind = SourceKind::Pairs;
    TimeBinState state = TimeBinState::ideal();
    MemorySettings memory{};
    FransonSettings franson{};
    DetectorModel signal_detector{};
    DetectorModel idler_detector{};
    ExperimentSchedule schedule{};
    std::uint64_t seed = 1;
    double duration_s = 5.0;
    std::uint64_t chunk_pulses = 1u << 22; // pulses per independent random stream
    unsigned workers = 1;
};

void validate(const ExperimentConfig& config);

struct TagStreams {
    std::vector<TimeTag> signal; // channels 1 and 2, time ordered
    std::vector<TimeTag> idler;  // channel 0, time ordered

    std::vector<TimeTag> merged() const;
};

TagStreams run_experiment(const ExperimentConfig& config, std::uint64_t seed, double duration_s);

inline TagStreams run_experiment(const ExperimentConfig& config)
{
    return run_experiment(config, config.seed, config.duration_s);
}

// Times of one channel, in order.
std::vector<Picoseconds> channel_times(const std::vector<TimeTag>& tags, std::uint8_t channel);

// Non-paralyzable dead time applied independently per channel to a time-ordered stream.
std::vector<TimeTag> apply_dead_time(const std::vector<TimeTag>& tags, Picoseconds dead_time);

} // namespace echolab
