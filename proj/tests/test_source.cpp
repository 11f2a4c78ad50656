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

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "echolab/error.hpp"
#include "echolab/source.hpp"

namespace echolab {
namespace {

TEST(PairNumber, Examples)
{
    EXPECT_DOUBLE_EQ(pair_number_pmf(0.0, 0), 1.0);
    EXPECT_DOUBLE_EQ(pair_number_pmf(0.0, 3), 0.0);
    EXPECT_NEAR(pair_number_pmf(0.1, 1), 0.1 / 1.21, 1e-12);
    EXPECT_THROW(pair_number_pmf(-0.1, 0), InvalidParameter);
}

TEST(PairNumber, NormalisedWithMeanMu)
{
    for (auto stats : {PairStatistics::Thermal, PairStatistics::Poissonian}) {
        for (double mu : {0.01, 0.1, 0.7, 2.0}) {
            double sum = 0.0;
            double mean = 0.0;
            for (std::uint64_t n = 0; n < 400; ++n) {
                const double p = pair_number_pmf(mu, n, stats);
                sum += p;
                mean += static_cast<double>(n) * p;
            }
            EXPECT_NEAR(sum, 1.0, 1e-12);
            EXPECT_NEAR(mean, mu, 1e-10);
        }
    }
}

TEST(CoincidenceProfile, Shape)
{
    EXPECT_DOUBLE_EQ(coincidence_profile(997e-12, 980e-12, 0.0), 1.0);
    EXPECT_NEAR(coincidence_profile(997e-12, 980e-12, 980e-12), std::exp(-1.0), 1e-12);
    EXPECT_NEAR(coincidence_profile(997e-12, 980e-12, -997e-12), std::exp(-1.0), 1e-12);
    EXPECT_THROW(coincidence_profile(0.0, 1e-9, 0.0), InvalidParameter);
}

double half_max_width(double ti, double ts)
{
    auto bisect = [&](double sign, double scale) {
        double lo = 0.0;
        double hi = 50.0 * scale;
        for (int k = 0; k < 200; ++k) {
            const double mid = 0.5 * (lo + hi);
            (coincidence_profile(ti, ts, sign * mid) > 0.5 ? lo : hi) = mid;
        }
        return 0.5 * (lo + hi);
    };
    return bisect(1.0, ts) + bisect(-1.0, ti);
}

TEST(ProfileFwhm, MatchesHalfMaxSearch)
{
    EXPECT_NEAR(profile_fwhm(997e-12, 980e-12) * 1e12, 1370.0, 1.0);
    EXPECT_NEAR(profile_fwhm(1e-9, 3e-9) * 1e9, 2.7726, 1e-4);
    EXPECT_NEAR(profile_fwhm(2e-9, 2e-9), 2.0 * std::log(2.0) * 2e-9, 1e-20);
    for (auto [ti, ts] : {std::pair{997e-12, 980e-12}, {1e-9, 3e-9}, {5e-12, 7e-9}}) {
        EXPECT_NEAR(profile_fwhm(ti, ts) / half_max_width(ti, ts), 1.0, 1e-3);
    }
}

TEST(CoincidenceProfile, IntegratesToLifetimeSum)
{
    const double ti = 997e-12;
    const double ts = 980e-12;
    const int n = 200000;
    const double lim = 40e-9;
    const double h = 2.0 * lim / n;
    double sum = 0.0;
    for (int k = 0; k < n; ++k) {
        sum += coincidence_profile(ti, ts, -lim + (k + 0.5) * h) * h;
    }
    EXPECT_NEAR(sum / (ti + ts), 1.0, 1e-3);
}

TEST(ProfileWindowFraction, MatchesQuadrature)
{
    const double ti = 997e-12;
    const double ts = 980e-12;
    for (double w : {0.5e-9, 2e-9, 4e-9}) {
        const int n = 100000;
        const double h = w / n;
        double sum = 0.0;
        for (int k = 0; k < n; ++k) {
            sum += coincidence_profile(ti, ts, -w / 2 + (k + 0.5) * h) * h;
        }
        EXPECT_NEAR(profile_window_fraction(ti, ts, w), sum / (ti + ts), 1e-6);
    }
}

TEST(LinesAndLifetimes, DerivedConsistently)
{
    PairSource src;
    src = with_lifetimes_from_lines(src);
    EXPECT_NEAR(src.signal_lifetime_s * 2.0 * M_PI * 183e6, 1.0, 1e-9);
    EXPECT_NEAR(src.idler_lifetime_s * 2.0 * M_PI * 185e6, 1.0, 1e-9);
}

TEST(PumpTrain, Invariants)
{
    PairSource src;
    src.pump.pulse_width_s = 40e-9;
    EXPECT_THROW(validate(src), InvalidParameter);
    src.pump.pulse_width_s = 4e-9;
    src.pump.mean_pairs_per_pulse = -1.0;
    EXPECT_THROW(validate(src), InvalidParameter);
}

// Brute force over pair numbers: sample n per pulse, detect each photon with
// its efficiency, count same-pulse and different-pulse click coincidences.
TEST(AnalyticRates, CarMatchesPairNumberMonteCarlo)
{
    PairSource src;
    src.pump.mean_pairs_per_pulse = 0.1;
    const DetectorModel ideal{};
    const auto rates = analytic_rates(src, ideal, ideal, src.pump.period_s);
    EXPECT_NEAR(rates.car, 11.0, 0.01);

    std::mt19937_64 rng(11);
    std::geometric_distribution<int> thermal(1.0 / 1.1);
    const int pulses = 2000000;
    double joint = 0.0;
    double cross = 0.0;
    bool prev_idler = false;
    for (int k = 0; k < pulses; ++k) {
        const bool click = thermal(rng) > 0;
        joint += click;
        cross += click && prev_idler;
        prev_idler = click;
    }
    const double car_mc = joint / cross;
    const double sigma = car_mc * std::sqrt(1.0 / joint + 1.0 / cross);
    EXPECT_NEAR(rates.car, car_mc, 3.0 * sigma);
}

TEST(AnalyticRates, MuZeroLimitAndMonotonicity)
{
    PairSource src;
    DetectorModel det;
    det.efficiency = 0.3;
    double last_cc = 0.0;
    double last_car = std::numeric_limits<double>::infinity();
    for (double mu : {1e-4, 1e-3, 0.01, 0.05, 0.1, 0.2}) {
        src.pump.mean_pairs_per_pulse = mu;
        const auto r = analytic_rates(src, det, det, 4e-9);
        EXPECT_GT(r.cc_rate_hz, last_cc);
        EXPECT_LT(r.car, last_car);
        last_cc = r.cc_rate_hz;
        last_car = r.car;
    }
    src.pump.mean_pairs_per_pulse = 1e-6;
    const auto tiny = analytic_rates(src, DetectorModel{}, DetectorModel{}, 32e-9);
    EXPECT_NEAR(tiny.car * 1e-6, 1.0, 1e-4);
}

TEST(AnalyticRates, LinearRegimeDoubling)
{
    PairSource src;
    DetectorModel det;
    det.efficiency = 0.1;
    src.pump.mean_pairs_per_pulse = 1e-4;
    const double a = analytic_rates(src, det, det, 4e-9).cc_rate_hz;
    src.pump.mean_pairs_per_pulse = 2e-4;
    const double b = analytic_rates(src, det, det, 4e-9).cc_rate_hz;
    EXPECT_NEAR(b / a, 2.0, 1e-3);
}

TEST(AnalyticRates, RejectsBadWindow)
{
    EXPECT_THROW(analytic_rates(PairSource{}, DetectorModel{}, DetectorModel{}, 0.0),
                 InvalidParameter);
}

TEST(AnalyticRates, ContinuousPump)
{
    PairSource src;
    src.pump.mode = PumpMode::CW;
    src.pump.mean_pairs_per_pulse = 0.01;
    DetectorModel det;
    det.efficiency = 0.5;
    const auto r = analytic_rates(src, det, det, 4e-9);
    const double pair_rate = 0.01 / 32e-9;
    EXPECT_NEAR(r.accidental_rate_hz, std::pow(pair_rate * 0.5, 2) * 4e-9, 1e-9);
    EXPECT_GT(r.car, 1.0);
}

} // namespace
} // namespace echolab
