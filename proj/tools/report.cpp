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

#include "report.hpp"

#include <fstream>

#include "echolab/error.hpp"

namespace echolab::cli {

namespace {

std::string csv_cell(const nlohmann::ordered_json& v)
{
    if (v.is_string()) {
        return v.get<std::string>();
    }
    if (v.is_null()) {
        return "";
    }
    return v.dump();
}

std::ofstream open(const std::filesystem::path& p)
{
    std::ofstream out(p, std::ios::trunc);
    if (!out) {
        throw IoError("cannot write " + p.string());
    }
    return out;
}

} // namespace

nlohmann::ordered_json Provenance::to_json() const
{
    return {{"tool", "echo-lab"},
            {"version", kVersion},
            {"command", command},
            {"config_hash", config_hash},
            {"seed", seed}};
}

std::string Provenance::csv_comment() const
{
    return "# echo-lab " + std::string(kVersion) + " " + command + " config_hash=" + config_hash +
           " seed=" + std::to_string(seed);
}

void Report::scalar(const std::string& name, double value) { results[name] = value; }

void Report::estimate(const std::string& name, double value, double sigma)
{
    results[name] = {{"value", value}, {"sigma", sigma}};
}

void Report::count(const std::string& name, std::uint64_t value) { results[name] = value; }

void Report::text(const std::string& name, const std::string& value) { results[name] = value; }

void ensure_directory(const std::filesystem::path& dir)
{
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec || !std::filesystem::is_directory(dir)) {
        throw IoError("cannot create output directory " + dir.string());
    }
}

std::vector<std::filesystem::path> write_report(const std::filesystem::path& dir,
                                                const std::string& stem, Format format,
                                                const Report& report)
{
    ensure_directory(dir);
    std::vector<std::filesystem::path> written;
    if (format == Format::Json) {
        nlohmann::ordered_json doc;
        doc["provenance"] = report.provenance.to_json();
        if (!report.warnings.empty()) {
            doc["warnings"] = report.warnings;
        }
        if (!report.results.empty()) {
            doc["results"] = report.results;
        }
        for (const auto& t : report.tables) {
            auto rows = nlohmann::ordered_json::array();
            for (const auto& row : t.rows) {
                nlohmann::ordered_json obj;
                for (std::size_t k = 0; k < t.columns.size() && k < row.size(); ++k) {
                    obj[t.columns[k]] = row[k];
                }
                rows.push_back(obj);
            }
            doc[t.name] = rows;
        }
        const auto path = dir / (stem + ".json");
        auto out = open(path);
        out << doc.dump(2) << '\n';
        written.push_back(path);
        return written;
    }

    if (!report.results.empty()) {
        const auto path = dir / (stem + ".csv");
        auto out = open(path);
        out << report.provenance.csv_comment() << '\n';
        for (const auto& w : report.warnings) {
            out << "# warning: " << w << '\n';
        }
        out << "quantity,value,sigma\n";
        for (const auto& [name, v] : report.results.items()) {
            if (v.is_object() && v.contains("value")) {
                out << name << ',' << csv_cell(v["value"]) << ',' << csv_cell(v["sigma"]) << '\n';
            } else {
                out << name << ',' << csv_cell(v) << ",\n";
            }
        }
        written.push_back(path);
    }
    for (const auto& t : report.tables) {
        const auto path = dir / (stem + "_" + t.name + ".csv");
        auto out = open(path);
        out << report.provenance.csv_comment() << '\n';
        for (std::size_t k = 0; k < t.columns.size(); ++k) {
            out << (k ? "," : "") << t.columns[k];
        }
        out << '\n';
        for (const auto& row : t.rows) {
            for (std::size_t k = 0; k < row.size(); ++k) {
                out << (k ? "," : "") << csv_cell(row[k]);
            }
            out << '\n';
        }
        written.push_back(path);
    }
    return written;
}

} // namespace echolab::cli
