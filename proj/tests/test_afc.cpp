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
#include <limits>
#include <sstream>

#include <gtest/gtest.h>

#include "echolab/afc.hpp"
#include "echolab/error.hpp"
#include "echolab/montecarlo.hpp"

namespace echolab {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Mean and first cosine coefficient of alpha over one comb period, by
// midpoint quadrature of the sampled profile.
std::pair<double, double> fourier_oracle(const AfcComb& comb)
{
    const int n = 200000;
    double mean = 0.0;
    double first = 0.0;
    for (int k = 0; k < n; ++k) {
        const double x = (k + 0.5) / n - 0.5;
        const double a = comb.background_depth +
                         comb.peak_depth *
                             comb.comb_profile(comb.center_hz + x * comb.tooth_spacing_hz);
        mean += a / n;
        first += a * std::cos(2.0 * M_PI * x) / n;
    }
    return {mean, first};
}

double oracle_echo(const AfcComb& comb)
{
    const auto [mean, first] = fourier_oracle(comb);
    return first * first * std::exp(-mean);
}

FrequencyGrid acceptance_grid() { return {(1u << 18) * 10e3, 1u << 18}; }

const SpectralLine kInput{0.0, 20e6, LineShape::Lorentzian};

TEST(BuildComb, SpacingFromStorageTime)
{
    EXPECT_NEAR(build_comb(1936e-9, 2.1, 0.0, 2.5, ToothShape::Lorentzian).tooth_spacing_hz / 1e6,
                0.5166, 1e-4);
    EXPECT_NEAR(build_comb(336e-9, 2.1, 0.0, 2.5, ToothShape::Lorentzian).tooth_spacing_hz / 1e6,
                2.976, 1e-3);
}

TEST(BuildComb, ZeroDepthIsFlatBackground)
{
    const auto comb = build_comb(1e-6, 0.0, 0.7, 3.0, ToothShape::Gaussian);
    for (double nu : {-3e8, -1.2e6, 0.0, 0.25e6, 5e7}) {
        EXPECT_DOUBLE_EQ(comb.absorption(nu), 0.7);
    }
}

TEST(BuildComb, FinesseMustExceedOne)
{
    EXPECT_THROW(build_comb(1e-6, 1.0, 0.0, 1.0, ToothShape::Square), InvalidParameter);
    EXPECT_THROW(build_comb(1e-6, -1.0, 0.0, 2.0, ToothShape::Square), InvalidParameter);
}

TEST(BuildComb, PeriodicNearCentre)
{
    for (auto shape : {ToothShape::Lorentzian, ToothShape::Gaussian, ToothShape::Square}) {
        const auto comb = build_comb(1e-6, 2.1, 0.1, 3.0, shape);
        for (double nu : {0.0, 0.13e6, 0.41e6, 0.77e6}) {
            EXPECT_NEAR(comb.comb_profile(nu), comb.comb_profile(nu + 1e6), 1e-9 * 2.1);
        }
    }
}

TEST(BuildComb, LorentzianProfileMatchesDirectSum)
{
    const auto comb = build_comb(1e-6, 1.7, 0.0, 3.0, ToothShape::Lorentzian, kInf);
    for (double nu : {0.0, 0.1e6, 0.37e6, 0.5e6}) {
        double direct = 0.0;
        const double hw = 0.5 * comb.tooth_fwhm_hz();
        for (int k = -200000; k <= 200000; ++k) {
            const double x = (nu - k * 1e6) / hw;
            direct += 1.7 / (1.0 + x * x);
        }
        EXPECT_NEAR(comb.absorption(nu), direct, 1e-4);
    }
}

TEST(EfficiencyLorentzian, Examples)
{
    EXPECT_NEAR(efficiency_lorentzian(2.1, 2.0, 0.0), 0.0651, 5e-5);
    EXPECT_DOUBLE_EQ(efficiency_lorentzian(0.0, 2.0, 0.0), 0.0);
    EXPECT_NEAR(efficiency_lorentzian(2.1, 3.0, 1.3) / efficiency_lorentzian(2.1, 3.0, 0.3),
                std::exp(-1.0), 1e-12);
    EXPECT_THROW(efficiency_lorentzian(2.1, 0.9, 0.0), InvalidParameter);
}

TEST(OptimalSquare, PaperValues)
{
    const auto a = optimal_square_params(2.1, 0.0, 1936e-9);
    EXPECT_NEAR(a.eta_opt, 0.174, 1e-3);
    EXPECT_NEAR(a.gamma_t, 1.2483, 1e-4);
    const auto b = optimal_square_params(1.3, 0.8, 1936e-9);
    EXPECT_NEAR(b.eta_with_background, 0.042, 1e-3);
    EXPECT_THROW(optimal_square_params(0.0, 0.0, 1e-6), InvalidParameter);
}

TEST(OptimalSquare, IndependentOfStorageTime)
{
    const auto a = optimal_square_params(1.7, 0.0, 336e-9);
    const auto b = optimal_square_params(1.7, 0.0, 1936e-9);
    EXPECT_NEAR(a.eta_opt, b.eta_opt, 1e-15);
    EXPECT_NEAR(a.gamma_t, b.gamma_t, 1e-15);
}

TEST(OptimalSquare, MaximumOfWidthSweep)
{
    const double tm = 1e-6;
    for (double d : {0.5, 1.0, 2.1, 3.0}) {
        const auto opt = optimal_square_params(d, 0.0, tm);
        const int n = 200;
        const double step = (M_PI / tm) / n;
        double best = -1.0;
        double best_gamma = 0.0;
        for (int k = 1; k <= n; ++k) {
            const double g = k * step;
            const double eta = square_tooth_efficiency(d, g, tm);
            if (eta > best) {
                best = eta;
                best_gamma = g;
            }
        }
        EXPECT_LE(std::abs(best_gamma - opt.gamma_opt), step);
        EXPECT_GE(opt.eta_opt, best - 1e-15);
    }
}

TEST(SimulateEcho, TransparentMedium)
{
    const auto comb = build_comb(1e-6, 0.0, 0.0, 3.0, ToothShape::Lorentzian, kInf);
    const auto r = simulate_echo(comb, kInput, acceptance_grid());
    // The integration lobe holds 99.75% of a Lorentzian input.
    EXPECT_NEAR(r.transmission_fraction, 1.0, 3e-3);
    EXPECT_NEAR(r.first_echo_efficiency, 0.0, 1e-6);
}

TEST(SimulateEcho, FlatAbsorptionIsBeerLambert)
{
    const auto comb = build_comb(1e-6, 0.0, 2.1, 3.0, ToothShape::Lorentzian, kInf);
    const auto r = simulate_echo(comb, kInput, acceptance_grid());
    EXPECT_NEAR(r.transmission_fraction, std::exp(-2.1), 3e-3 * std::exp(-2.1));
    EXPECT_LT(r.first_echo_efficiency, 1e-6);
}

TEST(SimulateEcho, SquareTeethAtOptimum)
{
    for (double d : {0.5, 1.0, 2.1, 3.0}) {
        const auto opt = optimal_square_params(d, 0.0, 1e-6);
        const auto comb = build_comb(1e-6, d, 0.0, opt.finesse, ToothShape::Square, kInf);
        const auto r = simulate_echo(comb, kInput, acceptance_grid());
        EXPECT_NEAR(r.first_echo_efficiency / opt.eta_opt, 1.0, 0.05) << "d=" << d;
        EXPECT_NEAR(r.first_echo_efficiency / oracle_echo(comb), 1.0, 0.01) << "d=" << d;
        EXPECT_LE(r.transmission_fraction + r.first_echo_efficiency, 1.0);
    }
}

TEST(SimulateEcho, SmoothTeethMatchFourierOracle)
{
    for (auto shape : {ToothShape::Lorentzian, ToothShape::Gaussian}) {
        for (double f : {2.0, 4.0, 8.0}) {
            const auto comb = build_comb(1e-6, 2.1, 0.0, f, shape, kInf);
            const auto r = simulate_echo(comb, kInput, acceptance_grid());
            EXPECT_NEAR(r.first_echo_efficiency / oracle_echo(comb), 1.0, 0.02) << "F=" << f;
            EXPECT_NEAR(r.transmission_fraction, std::exp(-fourier_oracle(comb).first), 0.01);
        }
    }
}

TEST(SimulateEcho, EchoArrivesAtStorageTime)
{
    const auto grid = acceptance_grid();
    const auto comb = build_comb(1e-6, 2.1, 0.0, 3.0, ToothShape::Lorentzian, kInf);
    const auto r = simulate_echo(comb, kInput, grid);
    // Dispersion of the causal response shifts the peak by well under a
    // coherence time.
    EXPECT_NEAR(r.echo_time_s, 1e-6, 0.1 * coherence_time(kInput));
}

TEST(SimulateEcho, CoarseGridNamesRequiredSamples)
{
    const auto comb = build_comb(1e-6, 2.1, 0.0, 8.0, ToothShape::Lorentzian, kInf);
    try {
        simulate_echo(comb, kInput, {(1u << 12) * 100e3, 1u << 12});
        FAIL() << "expected a resolution error";
    } catch (const ResolutionError& e) {
        EXPECT_GT(e.required_samples(), 1u << 12);
        EXPECT_NE(std::string(e.what()).find(std::to_string(e.required_samples())),
                  std::string::npos);
    }
}

TEST(SimulateEcho, NarrowSpanRejected)
{
    const auto comb = build_comb(1e-6, 2.1, 0.0, 3.0, ToothShape::Lorentzian, kInf);
    EXPECT_THROW(simulate_echo(comb, kInput, {(1u << 12) * 10e3, 1u << 12}), ResolutionError);
}

TEST(MemoryAction, ClosedFormsMatchQuadrature)
{
    for (auto shape : {ToothShape::Lorentzian, ToothShape::Gaussian, ToothShape::Square}) {
        const auto comb = build_comb(1936e-9, 2.1, 0.2, 2.5, shape, kInf);
        const auto m = memory_action_from_comb(comb);
        const auto [mean, first] = fourier_oracle(comb);
        EXPECT_NEAR(m.transmission_prob, std::exp(-mean), 1e-6);
        EXPECT_NEAR(m.echo_efficiency, first * first * std::exp(-mean), 1e-6);
        EXPECT_DOUBLE_EQ(m.storage_time_s, 1936e-9);
    }
}

TEST(EfficiencyFromCounts, Examples)
{
    EXPECT_NEAR(efficiency_from_counts(2, 100, 5e5, 1e6).eta, 0.01, 1e-15);
    EXPECT_DOUBLE_EQ(efficiency_from_counts(0, 37, 12, 99).eta, 0.0);
    EXPECT_DOUBLE_EQ(efficiency_from_counts(40, 40, 700, 700).eta, 1.0);
    EXPECT_THROW(efficiency_from_counts(1, 0, 1, 1), DivisionDomainError);
    EXPECT_THROW(efficiency_from_counts(1, 1, 1, 0), DivisionDomainError);
}

TEST(EfficiencyFromCounts, UncertaintyMatchesFiniteDifferences)
{
    const double n[4] = {25, 400, 5e4, 1e5};
    auto eta = [](const double* c) { return c[0] / c[1] * c[2] / c[3]; };
    double var = 0.0;
    for (int j = 0; j < 4; ++j) {
        double up[4] = {n[0], n[1], n[2], n[3]};
        const double h = 1e-6 * n[j];
        up[j] += h;
        const double deriv = (eta(up) - eta(n)) / h;
        var += deriv * deriv * n[j];
    }
    EXPECT_NEAR(efficiency_from_counts(n[0], n[1], n[2], n[3]).sigma, std::sqrt(var), 1e-6);
}

TEST(SideHole, Splitting)
{
    MagnetConfig mag;
    mag.field_t = 1.5;
    const auto s = side_hole_splitting(mag);
    EXPECT_NEAR(s.splitting_hz / 1e6, 3.17, 0.01);
    EXPECT_NEAR(s.storage_period_s * 1e9, 316.0, 1.0);
    mag.field_t = 1.0;
    EXPECT_DOUBLE_EQ(side_hole_splitting(mag).splitting_hz, 2.11e6);
    mag.field_t = 0.0;
    EXPECT_DOUBLE_EQ(side_hole_splitting(mag).splitting_hz, 0.0);
    EXPECT_TRUE(std::isinf(side_hole_splitting(mag).storage_period_s));
    mag.field_t = -1.0;
    EXPECT_THROW(side_hole_splitting(mag), InvalidParameter);
}

TEST(StorageTime, SmallRange)
{
    const auto c = optimize_storage_time(32e-9, 315e-9, 300e-9, 350e-9);
    ASSERT_EQ(c.size(), 2u);
    EXPECT_NEAR(c[0].storage_time_s, 304e-9, 1e-15);
    EXPECT_NEAR(c[0].residual_s, 11e-9, 1e-15);
    EXPECT_NEAR(c[1].storage_time_s, 336e-9, 1e-15);
    EXPECT_NEAR(c[1].residual_s, 21e-9, 1e-15);
}

TEST(StorageTime, PaperCandidatesAndConstruction)
{
    const auto c = optimize_storage_time(32e-9, 315e-9, 1200e-9, 2000e-9);
    for (double t : {1296e-9, 1616e-9, 1936e-9}) {
        EXPECT_TRUE(std::any_of(c.begin(), c.end(), [&](const StorageTimeCandidate& x) {
            return std::abs(x.storage_time_s - t) < 1e-15;
        }));
    }
    for (std::size_t k = 0; k < c.size(); ++k) {
        const double r = c[k].storage_time_s / 32e-9 - 0.5;
        EXPECT_NEAR(r, std::round(r), 1e-9);
        EXPECT_TRUE(c[k].half_integer);
        if (k > 0) {
            EXPECT_LE(c[k - 1].residual_s, c[k].residual_s);
        }
    }
    EXPECT_TRUE(optimize_storage_time(32e-9, 315e-9, 2000e-9, 1000e-9).empty());
}

TEST(Multiplexing, Examples)
{
    const auto m = multiplexing_metrics(1936e-9, 4e-9, 32e-9);
    EXPECT_EQ(m.tbp, 484.0);
    EXPECT_EQ(m.mode_count, 60.5);
    const auto one = multiplexing_metrics(7e-9, 7e-9, 7e-9);
    EXPECT_EQ(one.tbp, 1.0);
    EXPECT_EQ(one.mode_count, 1.0);
    const auto s = multiplexing_metrics(336e-9, 4e-9, 32e-9);
    EXPECT_NEAR(s.tbp, 84.0, 1e-12);
    EXPECT_NEAR(s.mode_count, 10.5, 1e-12);
}

TEST(CsvExport, Headers)
{
    std::ostringstream a;
    write_absorption_csv(a, build_comb(1e-6, 2.1, 0.0, 3.0, ToothShape::Square), 10e6, 11);
    EXPECT_EQ(a.str().rfind("detuning_hz,optical_depth\n", 0), 0u);
    std::ostringstream e;
    EchoResult r;
    r.time_grid_s = {0.0};
    r.output_intensity = {1.0};
    write_echo_csv(e, r);
    EXPECT_EQ(e.str().rfind("time_s,intensity\n", 0), 0u);
}

} // namespace
} // namespace echolab
