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
#include <filesystem>
#include <iosfwd>
#include <vector>

#include "echolab/constants.hpp"
#include "echolab/montecarlo.hpp"

namespace echolab {

struct Estimate {
    double value = 0.0;
    double sigma = 0.0;
};

// Histogram of stop - start time differences. Bin k covers
// [origin + k * bin_width, origin + (k + 1) * bin_width).
struct CoincidenceHistogram {
    Picoseconds bin_width_ps = 1;
    Picoseconds origin_ps = 0;
    std::vector<std::uint64_t> counts;
    std::uint8_t start_channel = kIdlerChannel;
    std::uint8_t stop_channel = kSignalPort1Channel;
    double integration_time_s = 0.0;

    double bin_width_s() const { return to_seconds(bin_width_ps); }
    double origin_s() const { return to_seconds(origin_ps); }
    double bin_center_s(std::size_t k) const;
    std::uint64_t total() const;

    // Adds the counts of a histogram with identical binning (partial sums
    // over disjoint time spans).
    CoincidenceHistogram& operator+=(const CoincidenceHistogram& other);
};

// All pairs with stop - start in [range_lo, range_hi), range_hi rounded up to
// a whole bin. Both inputs must be sorted; unsorted input raises
// InputOrderError.
CoincidenceHistogram build_histogram(const std::vector<Picoseconds>& start,
                                     const std::vector<Picoseconds>& stop, double bin_width_s,
                                     double range_lo_s, double range_hi_s);

CoincidenceHistogram build_histogram(const std::vector<TimeTag>& tags, std::uint8_t start_channel,
                                     std::uint8_t stop_channel, double bin_width_s,
                                     double range_lo_s, double range_hi_s,
                                     double integration_time_s = 0.0);

// Raw stop - start differences in [range_lo, range_hi), in seconds.
std::vector<double> coincidence_deltas(const std::vector<Picoseconds>& start,
                                       const std::vector<Picoseconds>& stop, double range_lo_s,
                                       double range_hi_s);

// Counts in the bins whose centre lies in [center - window/2, center + window/2).
std::uint64_t window_counts(const CoincidenceHistogram& hist, double center_s, double window_s);

// Central-window counts over the mean of the side windows, Poisson errors.
Estimate g2_from_histogram(const CoincidenceHistogram& hist, double center_tau_s,
                           const std::vector<double>& side_taus_s, double window_s);

struct CoincidenceStats {
    double p_si = 0.0;
    double p_s = 0.0;
    double p_i = 0.0;
};

double g2_from_stats(const CoincidenceStats& stats);

// Central window over the mean of the windows one pump period either side.
// With subtract_accidentals the mean accidental level is removed from the
// central window first.
Estimate car_from_histogram(const CoincidenceHistogram& hist, double window_s,
                            double period_s = 32e-9, double center_tau_s = 0.0,
                            bool subtract_accidentals = false);

struct BasisProjections {
    double pz_cross = 0.0;
    double px_cross = 0.0;
    double py_cross = 0.0;
};

BasisProjections basis_projections(double g2, double visibility);

struct WitnessResult {
    Estimate visibility;
    Estimate g2;
    Estimate w;
    int port = 1;
    bool entangled = false;
};

// W = 1/(g2 + 2) - V/2; entangled when W + k sigma_W < 0.
WitnessResult witness(Estimate g2, Estimate visibility, int port = 1, double k_sigma = 1.0);

struct BoltzmannPoint {
    double splitting_j = 0.0;
    double population_ratio = 1.0;
};

// Energy of a splitting given in Hz.
double splitting_energy_j(double splitting_hz);

// Least-squares fit of ln(ratio) = -dE / (k_B T) through the origin.
Estimate boltzmann_temperature(const std::vector<BoltzmannPoint>& points);

struct SideHolePoint {
    double field_t = 0.0;
    double splitting_hz = 0.0;
};

// Least-squares slope through the origin, in Hz/T.
Estimate fit_side_hole_slope(const std::vector<SideHolePoint>& points);

struct HistogramPeak {
    double time_s = 0.0;
    std::uint64_t counts = 0; // summed over the search window
};

// Local maxima of the window-summed histogram above min_counts, at least
// min_separation apart (the larger peak wins).
std::vector<HistogramPeak> find_peaks(const CoincidenceHistogram& hist, double window_s,
                                      double min_separation_s, std::uint64_t min_counts);

struct ProfileFit {
    Estimate signal_lifetime;
    Estimate idler_lifetime;
    Estimate fwhm;
    std::size_t positive = 0;
    std::size_t negative = 0;
};

// Maximum-likelihood fit of the two-sided exponential coincidence profile to
// raw differences (positive side decays with the signal lifetime), truncated
// at +-half_range around center.
ProfileFit fit_coincidence_profile(const std::vector<double>& deltas_s, double center_s,
                                   double half_range_s);

// Full width at half maximum of the histogram peak, by linear interpolation.
double histogram_fwhm(const CoincidenceHistogram& hist);

void write_histogram_csv(std::ostream& out, const CoincidenceHistogram& hist);

} // namespace echolab
