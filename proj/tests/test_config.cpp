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
#include <cstdlib>
#include <string>

#include <gtest/gtest.h>

#include "config.hpp"
#include "echolab/error.hpp"

namespace echolab::cli {
namespace {

TEST(Quantity, ConvertsUnits)
{
    EXPECT_DOUBLE_EQ(parse_quantity("32 ns", Dimension::Time), 32e-9);
    EXPECT_DOUBLE_EQ(parse_quantity("1.936us", Dimension::Time), 1.936e-6);
    EXPECT_DOUBLE_EQ(parse_quantity("185 MHz", Dimension::Frequency), 185e6);
    EXPECT_DOUBLE_EQ(parse_quantity("1.5 T", Dimension::Field), 1.5);
    EXPECT_DOUBLE_EQ(parse_quantity("230 mK", Dimension::Temperature), 0.23);
    EXPECT_DOUBLE_EQ(parse_quantity("180 deg", Dimension::Angle), M_PI);
    EXPECT_DOUBLE_EQ(parse_quantity("2e-3 s", Dimension::Time), 2e-3);
}

TEST(Quantity, UnitsAreMandatory)
{
    EXPECT_THROW(parse_quantity("32", Dimension::Time), ConfigError);
    EXPECT_THROW(parse_quantity("32 MHz", Dimension::Time), ConfigError);
    EXPECT_THROW(parse_quantity("fast ns", Dimension::Time), ConfigError);
}

TEST(Config, Defaults)
{
    const auto cfg = load_config_text("seed: 3\n");
    EXPECT_EQ(cfg.experiment.seed, 3u);
    EXPECT_DOUBLE_EQ(cfg.experiment.source.pump.period_s, 32e-9);
    EXPECT_DOUBLE_EQ(cfg.analysis.window_s, 4e-9);
    EXPECT_TRUE(cfg.warnings.empty());
}

TEST(Config, ReadsNestedKeys)
{
    const auto cfg = load_config_text(R"(
duration: "2 s"
source:
  mean_pairs_per_pulse: 0.02
  period: "32 ns"
memory:
  enabled: true
  storage_time: "1936 ns"
  peak_depth: 2.1
  finesse: 2.5
  magnet:
    field: "1.5 T"
franson:
  signal_enabled: true
  idler_enabled: true
  phase_signal: "90 deg"
detectors:
  signal:
    efficiency: 0.6
    dead_time: "20 ns"
analysis:
  side_taus: ["-64 ns", "64 ns"]
)");
    const auto& x = cfg.experiment;
    EXPECT_DOUBLE_EQ(x.duration_s, 2.0);
    EXPECT_DOUBLE_EQ(x.source.pump.mean_pairs_per_pulse, 0.02);
    EXPECT_TRUE(x.memory.enabled);
    EXPECT_NEAR(x.memory.action.storage_time_s, 1936e-9, 1e-18);
    EXPECT_GT(x.memory.action.echo_efficiency, 0.0);
    EXPECT_TRUE(cfg.memory_action_from_comb);
    EXPECT_DOUBLE_EQ(x.memory.magnet.field_t, 1.5);
    EXPECT_NEAR(x.franson.pair.phase_signal_rad, M_PI / 2, 1e-15);
    EXPECT_DOUBLE_EQ(x.signal_detector.efficiency, 0.6);
    EXPECT_DOUBLE_EQ(x.signal_detector.dead_time_s, 20e-9);
    ASSERT_EQ(cfg.analysis.side_taus_s.size(), 2u);
    EXPECT_DOUBLE_EQ(cfg.analysis.side_taus_s[1], 64e-9);
}

TEST(Config, ExplicitMemoryAction)
{
    const auto cfg = load_config_text(
        "memory:\n  enabled: true\n  transmission_prob: 0.3\n  echo_efficiency: 0.2\n");
    EXPECT_FALSE(cfg.memory_action_from_comb);
    EXPECT_DOUBLE_EQ(cfg.experiment.memory.action.transmission_prob, 0.3);
    EXPECT_DOUBLE_EQ(cfg.experiment.memory.action.echo_efficiency, 0.2);
}

TEST(Config, LifetimesFollowLinewidths)
{
    const auto cfg = load_config_text(
        "source:\n  signal_linewidth: \"183 MHz\"\n  idler_linewidth: \"185 MHz\"\n");
    EXPECT_NEAR(cfg.experiment.source.signal_lifetime_s, 1.0 / (2 * M_PI * 183e6), 1e-18);
    EXPECT_NEAR(cfg.experiment.source.idler_lifetime_s, 1.0 / (2 * M_PI * 185e6), 1e-18);
}

std::string error_of(const std::string& yaml)
{
    try {
        load_config_text(yaml);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

TEST(Config, ErrorsNameTheField)
{
    EXPECT_NE(error_of("source:\n  period: 32\n").find("source.period"), std::string::npos);
    EXPECT_NE(error_of("source:\n  perod: \"32 ns\"\n").find("source.perod: unknown key"),
              std::string::npos);
    EXPECT_NE(error_of("detectors:\n  signal:\n    efficiency: 1.5\n").find("detectors.signal"),
              std::string::npos);
    EXPECT_NE(error_of("memory:\n  tooth_shape: triangle\n").find("memory.tooth_shape"),
              std::string::npos);
    EXPECT_NE(error_of("seed: [1, 2]\n").find("seed"), std::string::npos);
    EXPECT_FALSE(error_of("source: {\n").empty());
}

TEST(Config, DelayMismatchWarns)
{
    const auto cfg = load_config_text(R"(
franson:
  signal_enabled: true
  idler_enabled: true
  delay_signal: "32 ns"
  delay_idler: "35 ns"
)");
    ASSERT_EQ(cfg.warnings.size(), 1u);
    EXPECT_NE(cfg.warnings[0].find("(c)"), std::string::npos);
}

TEST(Config, EnvironmentOverridesFile)
{
    EXPECT_EQ(env_name("detectors.signal.dark_rate"), "ECHOLAB_DETECTORS_SIGNAL_DARK_RATE");
    ::setenv("ECHOLAB_DETECTORS_SIGNAL_DARK_RATE", "75 Hz", 1);
    ::setenv("ECHOLAB_SEED", "99", 1);
    const auto cfg = load_config_text("seed: 5\ndetectors:\n  signal:\n    dark_rate: \"10 Hz\"\n");
    ::unsetenv("ECHOLAB_DETECTORS_SIGNAL_DARK_RATE");
    ::unsetenv("ECHOLAB_SEED");
    EXPECT_DOUBLE_EQ(cfg.experiment.signal_detector.dark_rate_hz, 75.0);
    EXPECT_EQ(cfg.experiment.seed, 99u);
}

TEST(Config, BadEnvironmentValueNamesKey)
{
    ::setenv("ECHOLAB_SOURCE_PERIOD", "32", 1);
    const auto what = error_of("seed: 1\n");
    ::unsetenv("ECHOLAB_SOURCE_PERIOD");
    EXPECT_NE(what.find("source.period"), std::string::npos);
}

TEST(Config, HashTracksValues)
{
    const auto a = load_config_text("seed: 1\n");
    const auto b = load_config_text("seed: 1\n");
    const auto c = load_config_text("seed: 2\n");
    EXPECT_EQ(a.hash(), b.hash());
    EXPECT_NE(a.hash(), c.hash());
    EXPECT_EQ(a.hash().size(), 16u);
}

TEST(Config, MissingFileIsIoError)
{
    EXPECT_THROW(load_config("/nonexistent/echolab.yaml"), IoError);
}

} // namespace
} // namespace echolab::cli
