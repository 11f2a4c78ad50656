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

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace echolab::cli {

inline constexpr const char* kVersion = "0.1.0";

enum class Format { Csv, Json };

struct Provenance {
    std::string command;
    std::string config_hash;
    std::uint64_t seed = 0;

    nlohmann::ordered_json to_json() const;
    std::string csv_comment() const;
};

struct Table {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<nlohmann::ordered_json>> rows;
};

// Scalars (value, optional sigma) plus named tables. JSON goes to
// <stem>.json; CSV to <stem>.csv for scalars and <stem>_<table>.csv.
struct Report {
    Provenance provenance;
    nlohmann::ordered_json results = nlohmann::ordered_json::object();
    std::vector<Table> tables;
    std::vector<std::string> warnings;

    void scalar(const std::string& name, double value);
    void estimate(const std::string& name, double value, double sigma);
    void count(const std::string& name, std::uint64_t value);
    void text(const std::string& name, const std::string& value);
};

std::vector<std::filesystem::path> write_report(const std::filesystem::path& dir,
                                                const std::string& stem, Format format,
                                                const Report& report);

void ensure_directory(const std::filesystem::path& dir);

} // namespace echolab::cli
