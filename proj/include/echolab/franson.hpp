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

#include <array>
#include <complex>
#include <iosfwd>
#include <string>
#include <vector>

namespace echolab {

// Two-photon time-bin state in the basis {ee, el, le, ll} (signal first).
// `coherence` scales every coherence between distinct bin pairs; it models
// phase noise accumulated before the interferometers.
struct TimeBinState {
    std::array<std::complex<double>, 4> amplitudes{};
    double coherence = 1.0;

    enum Index { EE = 0, EL = 1, LE = 2, LL = 3 };

    // (|ee> + |ll>) / sqrt(2) with the given coherence.
    static TimeBinState ideal(double coherence = 1.0);
};

void validate(const TimeBinState& state);

struct FransonPair {
    double delay_signal_s = 32e-9;
    double delay_idler_s = 32e-9;
    double phase_signal_rad = 0.0;
    double phase_idler_rad = 0.0;
    double loss_short = 0.0; // per-arm loss probability
    double loss_long = 0.0;

    double total_phase() const { return phase_signal_rad + phase_idler_rad; }
};

void validate(const FransonPair& pair);

enum class PeakLabel { SideEl, Accidental, Central, SideLe };

std::string to_string(PeakLabel label);

struct Peak {
    double time_s = 0.0;
    PeakLabel label = PeakLabel::Central;
};

struct PeakStructure {
    std::vector<Peak> peaks;     // sorted by time
    bool half_integer = true;    // false when t_M / rep_period is not (n + 1/2)
};

// Expected peaks of the idler-start / signal-stop histogram around the
// retrieved photon: central at t_M, side peaks at t_M -+ delay, and the
// accidental peaks from unstored photons at the neighbouring multiples of
// rep_period.
PeakStructure peak_structure(double storage_time_s, double delay_s, double rep_period_s);

// Relative central-peak coincidence rate at total phase phi for output port 1
// or 2: (1 +- V cos phi) / 2.
double central_peak_rate(double total_phase_rad, double visibility, int port);

struct Visibility {
    double value = 0.0;
    double sigma = 0.0;
    double phase_offset_rad = 0.0; // fit mode only
    double amplitude = 0.0;        // fit mode only: mean count A
};

// (max - min) / (max + min) with Poissonian propagation.
Visibility visibility_from_extrema(double max_count, double min_count);

struct FringePoint {
    double phase_rad = 0.0;
    double count = 0.0;
};

// Weighted least squares of A (1 + V cos(phi + phi0)) with Poisson weights,
// uncertainty from the fit covariance. Needs at least 4 points.
Visibility visibility_from_fringe(const std::vector<FringePoint>& points);

struct DelayMatchInput {
    double delay_signal_s = 0.0;
    double delay_idler_s = 0.0;
    double single_photon_coherence_s = 0.0;
    double pump_period_s = 0.0;
    double pair_coherence_floor_s = 0.0;
    double period_tolerance_s = 4e-9; // defaults to the pump pulse width
};

struct DelayMatchReport {
    bool pass = true;
    std::vector<std::string> reasons; // one entry per failed clause, tagged (a), (b), (c)
};

DelayMatchReport delay_matching_check(const DelayMatchInput& in);

struct FringeRow {
    double phase_deg = 0.0;
    double counts_port1 = 0.0;
    double counts_port2 = 0.0;
};

void write_fringe_csv(std::ostream& os, const std::vector<FringeRow>& rows);

} // namespace echolab
