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

#include <cstddef>
#include <iosfwd>
#include <limits>
#include <vector>

#include "echolab/spectral.hpp"

namespace echolab {

enum class ToothShape { Lorentzian, Gaussian, Square };

// Periodic absorption structure of an atomic frequency comb. Optical depths
// are exponents of intensity attenuation. The envelope is a Gaussian of
// `envelope_fwhm_hz`; an infinite value gives a flat comb.
struct AfcComb {
    double tooth_spacing_hz = 0.0;
    double finesse = 2.0;
    double peak_depth = 0.0;
    double background_depth = 0.0;
    ToothShape tooth_shape = ToothShape::Lorentzian;
    double envelope_fwhm_hz = 200e6;
    double center_hz = 0.0;

    double storage_time_s() const { return 1.0 / tooth_spacing_hz; }
    double tooth_fwhm_hz() const { return tooth_spacing_hz / finesse; }

    double envelope(double nu_hz) const;
    // Single tooth centred at zero detuning, peak 1.
    double tooth(double offset_hz) const;
    // Optical depth alpha(nu) = d0 + envelope(nu) d sum_k tooth(nu - k Delta).
    double absorption(double nu_hz) const;
    // Unit-peak periodic tooth train: no envelope, depths or background.
    double comb_profile(double nu_hz) const;
};

inline constexpr double kEnvelopeCutoff = 1e-3;

void validate(const AfcComb& comb);

AfcComb build_comb(double storage_time_s, double peak_depth, double background_depth,
                   double finesse, ToothShape shape, double envelope_fwhm_hz = 200e6,
                   double center_hz = 0.0);

// Closed-form storage efficiency for a comb of finesse F with peak optical
// depth d and background d0 (Gaussian-dephasing form).
double efficiency_lorentzian(double peak_depth, double finesse, double background_depth);

struct SquareOptimum {
    double gamma_opt = 0.0;              // optimal tooth half width, rad/s
    double gamma_t = 0.0;                // gamma_opt * t_M (dimensionless)
    double tooth_width_hz = 0.0;         // full tooth width gamma_opt / pi
    double finesse = 0.0;                // tooth spacing over full width
    double eta_opt = 0.0;                // without background
    double eta_with_background = 0.0;    // eta_opt * exp(-d0)
};

// Optimal square-tooth comb. The background enters as a multiplicative
// exp(-d0); callers that quote an efficiency for a measured total depth d
// with background d0 pass (d - d0, d0).
SquareOptimum optimal_square_params(double peak_depth, double background_depth,
                                    double storage_time_s);

// Square-tooth efficiency for an arbitrary half width gamma (rad/s).
double square_tooth_efficiency(double peak_depth, double gamma, double storage_time_s);

struct FrequencyGrid {
    double span_hz = 0.0;
    std::size_t n_samples = 0;

    double resolution_hz() const { return span_hz / static_cast<double>(n_samples); }
};

struct EchoResult {
    std::vector<double> time_grid_s;     // centred: negative times first
    std::vector<double> output_intensity; // normalised so that the input sums to 1
    double transmission_fraction = 0.0;
    double first_echo_efficiency = 0.0;
    double echo_time_s = 0.0;
    double lobe_half_width_s = 0.0;
};

// Coherence time used to size the integration lobes, 1 / (pi fwhm).
double coherence_time(const SpectralLine& line);

// Propagates the input wavepacket through the comb with a causal transfer
// function H = exp(-(alpha/2 + i phi)), phi the Kramers-Kronig partner of
// alpha/2, and measures the energy in the transmitted and first echo lobes.
EchoResult simulate_echo(const AfcComb& comb, const SpectralLine& input, const FrequencyGrid& grid);

struct CountsEfficiency {
    double eta = 0.0;
    double sigma = 0.0;
};

// eta = cc_echo / cc_trans * sc_trans / sc_input with sqrt(N) error propagation.
CountsEfficiency efficiency_from_counts(double cc_echo, double cc_trans, double sc_trans,
                                        double sc_input);

struct MagnetConfig {
    double field_t = 0.0;
    double angle_deg = 120.0;
    double temperature_k = 0.23;
};

void validate(const MagnetConfig& mag);

inline constexpr double kSideHoleSlopeHzPerT = 2.11e6;

struct SideHoleSplitting {
    double splitting_hz = 0.0;
    double storage_period_s = std::numeric_limits<double>::infinity();
};

SideHoleSplitting side_hole_splitting(const MagnetConfig& mag,
                                      double slope_hz_per_t = kSideHoleSlopeHzPerT);

struct StorageTimeCandidate {
    double storage_time_s = 0.0;
    double residual_s = 0.0;        // distance to nearest multiple of the side period
    long long half_period_index = 0; // t_M = (n + 1/2) rep_period
    bool half_integer = true;
};

// Half-integer multiples of rep_period inside [lo, hi], ranked by distance to
// the nearest multiple of side_period (ties: smaller t_M first).
std::vector<StorageTimeCandidate> optimize_storage_time(double rep_period_s, double side_period_s,
                                                        double range_lo_s, double range_hi_s);

struct MultiplexingMetrics {
    double tbp = 0.0;
    double mode_count = 0.0;
};

MultiplexingMetrics multiplexing_metrics(double storage_time_s, double photon_width_s,
                                         double rep_period_s);

void write_absorption_csv(std::ostream& os, const AfcComb& comb, double span_hz,
                          std::size_t n_samples);
void write_echo_csv(std::ostream& os, const EchoResult& echo);

} // namespace echolab
