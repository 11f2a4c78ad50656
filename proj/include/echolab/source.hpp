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
#include <optional>

#include "echolab/detector.hpp"
#include "echolab/spectral.hpp"

namespace echolab {

enum class PumpMode { Pulsed, CW };

enum class PairStatistics { Thermal, Poissonian };

struct PumpTrain {
    double period_s = 32e-9;
    double pulse_width_s = 4e-9;
    PumpMode mode = PumpMode::Pulsed;
    double mean_pairs_per_pulse = 0.01;
};

struct PairSource {
    PumpTrain pump;
    SpectralLine signal_line{0.0, 183e6, LineShape::Lorentzian};
    SpectralLine idler_line{0.0, 185e6, LineShape::Lorentzian};
    double signal_lifetime_s = 980e-12;
    double idler_lifetime_s = 997e-12;
    double noise_rate_per_channel_hz = 0.0;
    PairStatistics statistics = PairStatistics::Thermal;
};

void validate(const PumpTrain& pump);
void validate(const PairSource& src);

// Source whose lifetimes follow from its lines through T = 1/(2 pi dnu).
PairSource with_lifetimes_from_lines(PairSource src);

double pair_number_pmf(double mu, std::uint64_t n,
                       PairStatistics stats = PairStatistics::Thermal);

// Peak-normalised idler-start / signal-stop coincidence probability at
// time difference tau: exp(-tau/T_s) for tau > 0, exp(tau/T_i) for tau < 0.
double coincidence_profile(double idler_lifetime_s, double signal_lifetime_s, double tau_s);

// Closed form ln2 (T_i + T_s).
double profile_fwhm(double idler_lifetime_s, double signal_lifetime_s);

// Fraction of the (unit-area) profile that lies inside [-window/2, window/2].
double profile_window_fraction(double idler_lifetime_s, double signal_lifetime_s,
                               double window_s);

struct AnalyticRates {
    double cc_rate_hz = 0.0;          // true coincidences inside the window
    double accidental_rate_hz = 0.0;  // accidental coincidences inside the window
    double car = 0.0;                 // (true + accidental) / accidental
    double p_signal = 0.0;            // click probability per pulse (or per window in CW)
    double p_idler = 0.0;
    double p_joint = 0.0;             // same-pulse joint click probability
};

// Coincidence and accidental rates for threshold detectors. `window_s` is the
// coincidence window centred on tau = 0 (true) and on tau = +-period
// (accidental).
AnalyticRates analytic_rates(const PairSource& src, const DetectorModel& signal_det,
                             const DetectorModel& idler_det, double window_s);

} // namespace echolab
