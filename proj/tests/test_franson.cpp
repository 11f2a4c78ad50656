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
#include <sstream>

#include <gtest/gtest.h>

#include "echolab/error.hpp"
#include "echolab/franson.hpp"

namespace echolab {
namespace {

TEST(PeakStructure, FivePeaksAroundRetrieval)
{
    const auto ps = peak_structure(1936e-9, 32e-9, 32e-9);
    ASSERT_EQ(ps.peaks.size(), 5u);
    EXPECT_TRUE(ps.half_integer);
    const double expect_ns[] = {1904, 1920, 1936, 1952, 1968};
    const PeakLabel expect_label[] = {PeakLabel::SideEl, PeakLabel::Accidental, PeakLabel::Central,
                                      PeakLabel::Accidental, PeakLabel::SideLe};
    for (int k = 0; k < 5; ++k) {
        EXPECT_NEAR(ps.peaks[k].time_s * 1e9, expect_ns[k], 1e-9);
        EXPECT_EQ(ps.peaks[k].label, expect_label[k]);
    }
    EXPECT_NEAR(ps.peaks[2].time_s - ps.peaks[1].time_s, 16e-9, 1e-15);
    EXPECT_NEAR(ps.peaks[3].time_s - ps.peaks[2].time_s, 16e-9, 1e-15);
}

TEST(PeakStructure, IntegerRatioIsFlagged)
{
    const auto ps = peak_structure(1920e-9, 32e-9, 32e-9);
    EXPECT_FALSE(ps.half_integer);
    int accidental = 0;
    for (const auto& p : ps.peaks) {
        accidental += p.label == PeakLabel::Accidental;
    }
    EXPECT_EQ(accidental, 1);
}

TEST(PeakStructure, ZeroDelayMergesSidePeaks)
{
    const auto ps = peak_structure(1936e-9, 0.0, 32e-9);
    for (const auto& p : ps.peaks) {
        if (p.label != PeakLabel::Accidental) {
            EXPECT_DOUBLE_EQ(p.time_s, 1936e-9);
        }
    }
}

TEST(PeakStructure, Labels)
{
    EXPECT_EQ(to_string(PeakLabel::SideEl), "side_el");
    EXPECT_EQ(to_string(PeakLabel::SideLe), "side_le");
    EXPECT_EQ(to_string(PeakLabel::Central), "central");
    EXPECT_EQ(to_string(PeakLabel::Accidental), "accidental");
}

TEST(CentralPeakRate, Examples)
{
    EXPECT_DOUBLE_EQ(central_peak_rate(0.0, 1.0, 1), 1.0);
    EXPECT_DOUBLE_EQ(central_peak_rate(0.0, 1.0, 2), 0.0);
    EXPECT_NEAR(central_peak_rate(M_PI / 2, 0.37, 1), 0.5, 1e-15);
    EXPECT_NEAR(central_peak_rate(M_PI / 2, 0.37, 2), 0.5, 1e-15);
    EXPECT_NEAR(central_peak_rate(0.0, 0.76, 1), 0.88, 1e-12);
}

TEST(CentralPeakRate, PortsAreComplementary)
{
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> phi(-10.0, 10.0);
    std::uniform_real_distribution<double> vis(0.0, 1.0);
    for (int k = 0; k < 1000; ++k) {
        const double p = phi(rng);
        const double v = vis(rng);
        EXPECT_NEAR(central_peak_rate(p, v, 1) + central_peak_rate(p, v, 2), 1.0, 1e-14);
    }
}

TEST(CentralPeakRate, RejectsBadInput)
{
    EXPECT_THROW(central_peak_rate(0.0, 1.1, 1), InvalidParameter);
    EXPECT_THROW(central_peak_rate(0.0, -0.1, 1), InvalidParameter);
    EXPECT_THROW(central_peak_rate(0.0, 0.5, 3), InvalidParameter);
}

TEST(Visibility, FromExtrema)
{
    EXPECT_NEAR(visibility_from_extrema(178, 22).value, 0.78, 1e-12);
    EXPECT_DOUBLE_EQ(visibility_from_extrema(50, 50).value, 0.0);
    EXPECT_DOUBLE_EQ(visibility_from_extrema(50, 0).value, 1.0);
    EXPECT_THROW(visibility_from_extrema(0, 0), UndefinedVisibility);
}

TEST(Visibility, ExtremaSigmaMatchesPropagation)
{
    // Numerical derivative propagation with Var = counts.
    const double a = 178, b = 22;
    const double h = 1e-4;
    const double da = (visibility_from_extrema(a + h, b).value -
                       visibility_from_extrema(a - h, b).value) / (2 * h);
    const double db = (visibility_from_extrema(a, b + h).value -
                       visibility_from_extrema(a, b - h).value) / (2 * h);
    EXPECT_NEAR(visibility_from_extrema(a, b).sigma, std::sqrt(da * da * a + db * db * b), 1e-8);
}

std::vector<FringePoint> fringe(double v, double phi0, double amp, int n)
{
    std::vector<FringePoint> pts;
    for (int k = 0; k < n; ++k) {
        const double phi = 2.0 * M_PI * k / n;
        pts.push_back({phi, amp * (1.0 + v * std::cos(phi + phi0))});
    }
    return pts;
}

TEST(Visibility, NoiselessFringeRecovered)
{
    for (double v : {0.0, 0.3, 0.78, 1.0}) {
        const auto fit = visibility_from_fringe(fringe(v, 0.4, 500.0, 12));
        EXPECT_NEAR(fit.value, v, 1e-6);
        EXPECT_NEAR(fit.amplitude, 500.0, 1e-6);
        if (v > 0) {
            EXPECT_NEAR(fit.phase_offset_rad, 0.4, 1e-6);
        }
    }
}

TEST(Visibility, PoissonFringeWithinThreeSigma)
{
    std::mt19937_64 rng(11);
    int outside = 0;
    const int trials = 200;
    for (int t = 0; t < trials; ++t) {
        auto pts = fringe(0.78, -1.1, 300.0, 8);
        for (auto& p : pts) {
            p.count = static_cast<double>(std::poisson_distribution<long>(p.count)(rng));
        }
        const auto fit = visibility_from_fringe(pts);
        outside += std::abs(fit.value - 0.78) > 3.0 * fit.sigma;
    }
    // 3 sigma excursions occur at the 0.3% level.
    EXPECT_LE(outside, 4);
}

TEST(Visibility, FitNeedsFourPoints)
{
    EXPECT_THROW(visibility_from_fringe(fringe(0.5, 0.0, 10.0, 3)), InvalidParameter);
    auto zero = fringe(0.5, 0.0, 0.0, 6);
    EXPECT_THROW(visibility_from_fringe(zero), UndefinedVisibility);
}

DelayMatchInput match(double d1, double d2, double coh, double period, double floor)
{
    DelayMatchInput in;
    in.delay_signal_s = d1;
    in.delay_idler_s = d2;
    in.single_photon_coherence_s = coh;
    in.pump_period_s = period;
    in.pair_coherence_floor_s = floor;
    return in;
}

bool has_clause(const DelayMatchReport& r, const std::string& tag)
{
    for (const auto& s : r.reasons) {
        if (s.rfind(tag, 0) == 0) {
            return true;
        }
    }
    return false;
}

TEST(DelayMatching, Examples)
{
    const auto ok = delay_matching_check(match(32e-9, 32e-9, 1e-9, 32e-9, 1e-9));
    EXPECT_TRUE(ok.pass);
    EXPECT_TRUE(ok.reasons.empty());

    const auto c = delay_matching_check(match(32e-9, 35e-9, 1e-9, 32e-9, 1e-9));
    EXPECT_FALSE(c.pass);
    ASSERT_EQ(c.reasons.size(), 1u);
    EXPECT_TRUE(has_clause(c, "(c)"));

    const auto ab = delay_matching_check(match(0.5e-9, 0.5e-9, 1e-9, 32e-9, 1e-9));
    EXPECT_FALSE(ab.pass);
    ASSERT_EQ(ab.reasons.size(), 2u);
    EXPECT_TRUE(has_clause(ab, "(a)"));
    EXPECT_TRUE(has_clause(ab, "(b)"));
}

TEST(DelayMatching, RejectsNonPositive)
{
    EXPECT_THROW(delay_matching_check(match(0.0, 32e-9, 1e-9, 32e-9, 1e-9)), InvalidParameter);
}

TEST(TimeBinState, IdealIsNormalised)
{
    EXPECT_NO_THROW(validate(TimeBinState::ideal(0.9)));
    TimeBinState bad;
    bad.amplitudes = {1.0, 1.0, 0.0, 0.0};
    EXPECT_THROW(validate(bad), InvalidParameter);
    EXPECT_THROW(validate(TimeBinState::ideal(1.5)), InvalidParameter);
}

TEST(FringeCsv, Header)
{
    std::ostringstream os;
    write_fringe_csv(os, {{0.0, 10, 2}, {90.0, 6, 6}});
    EXPECT_EQ(os.str(), "phase_deg,counts_port1,counts_port2\n0,10,2\n90,6,6\n");
}

} // namespace
} // namespace echolab
