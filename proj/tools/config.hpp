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
#include <map>
#include <string>
#include <vector>

#include "echolab/montecarlo.hpp"

namespace echolab::cli {

enum class Dimension { Time, Frequency, Field, Temperature, Angle };

// Parses "32 ns", "185 MHz", "1.5 T", "230 mK", "120 deg" into SI units
// (angles in radians). A bare number is rejected: units are mandatory.
double parse_quantity(const std::string& text, Dimension dim);

struct AnalysisSettings {
    double bin_width_s = 1e-9;
    double range_lo_s = -100e-9;
    double range_hi_s = 100e-9;
    double window_s = 4e-9;
    double center_tau_s = 0.0;
    std::vector<double> side_taus_s = {-32e-9, 32e-9};
    double fit_half_range_s = 15e-9;
    double k_sigma = 1.0;
    bool subtract_background = false;
};

struct AppConfig {
    ExperimentConfig experiment;
    AnalysisSettings analysis;
    bool memory_action_from_comb = true;
    std::vector<std::string> warnings; // delay-matching diagnostics
    std::map<std::string, std::string> resolved; // every value read, by key path

    // FNV-1a over the resolved values, hex.
    std::string hash() const;
};

// Environment variables ECHOLAB_<PATH> (path upper-cased, dots as
// underscores) override the file. Throws ConfigError naming the key path.
AppConfig load_config(const std::filesystem::path& path);
AppConfig load_config_text(const std::string& yaml_text);

// Environment variable name overriding a key path.
std::string env_name(const std::string& key_path);

} // namespace echolab::cli
