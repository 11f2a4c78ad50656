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

#include <gtest/gtest.h>

#include "echolab/analysis.hpp"
#include "echolab/franson.hpp"
#include "echolab/montecarlo.hpp"

namespace echolab {
namespace {

ExperimentConfig base_config(double coherence)
{
    ExperimentConfig cfg;
    cfg.state = TimeBinState::ideal(coherence);
    cfg.source.pump.mean_pairs_per_pulse = 2e-3;
    cfg.signal_detector.efficiency = 0.5;
    cfg.signal_detector.dead_time_s = 20e-9;
    cfg.idler_detector = cfg.signal_detector;
    cfg.schedule.polarization_window_s = 0.0;
    cfg.schedule.afc_window_s = 0.0;
    cfg.schedule.delay_s = 0.0;
    cfg.schedule.trailing_delay_s = 0.0;
    cfg.schedule.memory_window_s = 1.0;
    cfg.workers = 2;
    return cfg;
}

CoincidenceHistogram histogram(const TagStreams& tags, std::uint8_t stop)
{
    return build_histogram(tags.merged(), kIdlerChannel, stop, 1e-9, -100e-9, 100e-9);
}

class Pipeline : public ::testing::TestWithParam<double> {};

TEST_P(Pipeline, VisibilityAndWitnessFromStreams)
{
    const double v = GetParam();
    const double window = 4e-9;

    auto cfg = base_config(v);
    const auto z_basis = run_experiment(cfg, 101, 3.0);
    const auto g2 = g2_from_histogram(histogram(z_basis, kSignalPort1Channel), 0.0,
                                      {-64e-9, -32e-9, 32e-9, 64e-9}, window);

    cfg.franson.signal_enabled = true;
    cfg.franson.idler_enabled = true;
    const auto bright = run_experiment(cfg, 102, 5.0);
    cfg.franson.pair.phase_signal_rad = kPi;
    const auto dark = run_experiment(cfg, 103, 5.0);
    const auto hb = histogram(bright, kSignalPort1Channel);
    const auto hd = histogram(dark, kSignalPort1Channel);
    const auto max_c = static_cast<double>(window_counts(hb, 0.0, window));
    const auto min_c = static_cast<double>(window_counts(hd, 0.0, window));
    const auto vis = visibility_from_extrema(max_c, min_c);

    // Multi-pair accidentals fill the minimum; three periods out no pair
    // can contribute, so that level is subtracted from both extrema.
    double acc = 0.0;
    for (const auto* h : {&hb, &hd}) {
        acc += static_cast<double>(window_counts(*h, -96e-9, window) +
                                   window_counts(*h, 96e-9, window)) / 4.0;
    }
    const double corrected = (max_c - min_c) / (max_c + min_c - 2.0 * acc);
    EXPECT_NEAR(corrected, v, 3 * vis.sigma + 3 * std::sqrt(acc) / (max_c + min_c));
    EXPECT_LE(vis.value, corrected + 1e-12);
    const auto w = witness(g2, {vis.value, vis.sigma});
    if (v - 2.0 / (g2.value + 2.0) > 3 * vis.sigma) {
        EXPECT_LT(w.w.value, 0.0);
        EXPECT_TRUE(w.entangled);
    }
}

INSTANTIATE_TEST_SUITE_P(Coherence, Pipeline, ::testing::Values(0.5, 0.8, 1.0));

} // namespace
} // namespace echolab
