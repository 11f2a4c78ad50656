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

#include "config.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <functional>
#include <optional>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "echolab/error.hpp"

namespace echolab::cli {

namespace {

struct Unit {
    const char* name;
    double scale;
};

const std::vector<Unit>& units_for(Dimension dim)
{
    static const std::vector<Unit> time = {{"s", 1.0},   {"ms", 1e-3},  {"us", 1e-6},
                                           {"µs", 1e-6}, {"ns", 1e-9},  {"ps", 1e-12},
                                           {"fs", 1e-15}};
    static const std::vector<Unit> freq = {
        {"Hz", 1.0}, {"kHz", 1e3}, {"MHz", 1e6}, {"GHz", 1e9}, {"THz", 1e12}};
    static const std::vector<Unit> field = {{"T", 1.0}, {"mT", 1e-3}, {"G", 1e-4}};
    static const std::vector<Unit> temp = {{"K", 1.0}, {"mK", 1e-3}, {"uK", 1e-6}};
    static const std::vector<Unit> angle = {{"rad", 1.0}, {"mrad", 1e-3}, {"deg", kPi / 180.0}};
    switch (dim) {
    case Dimension::Time:
        return time;
    case Dimension::Frequency:
        return freq;
    case Dimension::Field:
        return field;
    case Dimension::Temperature:
        return temp;
    case Dimension::Angle:
        return angle;
    }
    return time;
}

std::string trim(const std::string& s)
{
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) {
        ++b;
    }
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) {
        --e;
    }
    return s.substr(b, e - b);
}

std::optional<double> parse_number(const std::string& text)
{
    const std::string t = trim(text);
    if (t.empty()) {
        return std::nullopt;
    }
    std::istringstream is(t);
    is.imbue(std::locale::classic());
    double v = 0.0;
    is >> v;
    if (is.fail() || !is.eof() || !std::isfinite(v)) {
        return std::nullopt;
    }
    return v;
}

class Reader {
public:
    Reader(YAML::Node root, AppConfig& out) : root_(std::move(root)), out_(out) {}

    std::optional<std::string> scalar(const std::string& path)
    {
        known_.insert(path);
        if (const char* env = std::getenv(env_name(path).c_str())) {
            out_.resolved[path] = env;
            return std::string(env);
        }
        YAML::Node node = lookup(path);
        if (!node || node.IsNull()) {
            return std::nullopt;
        }
        if (!node.IsScalar()) {
            throw ConfigError(path + ": expected a single value");
        }
        out_.resolved[path] = node.Scalar();
        return node.Scalar();
    }

    void quantity(const std::string& path, Dimension dim, double& target)
    {
        if (auto s = scalar(path)) {
            try {
                target = parse_quantity(*s, dim);
            } catch (const ConfigError& e) {
                throw ConfigError(path + ": " + e.what());
            }
        }
    }

    void number(const std::string& path, double& target)
    {
        if (auto s = scalar(path)) {
            auto v = parse_number(*s);
            if (!v) {
                throw ConfigError(path + ": expected a number, got '" + *s + "'");
            }
            target = *v;
        }
    }

    template <typename Int>
    void integer(const std::string& path, Int& target)
    {
        if (auto s = scalar(path)) {
            const std::string t = trim(*s);
            char* end = nullptr;
            errno = 0;
            const unsigned long long v = std::strtoull(t.c_str(), &end, 10);
            if (t.empty() || t[0] == '-' || *end != '\0' || errno != 0) {
                throw ConfigError(path + ": expected a non-negative integer, got '" + *s + "'");
            }
            target = static_cast<Int>(v);
        }
    }

    void flag(const std::string& path, bool& target)
    {
        if (auto s = scalar(path)) {
            const std::string t = trim(*s);
            if (t == "true" || t == "yes" || t == "on" || t == "1") {
                target = true;
            } else if (t == "false" || t == "no" || t == "off" || t == "0") {
                target = false;
            } else {
                throw ConfigError(path + ": expected true or false, got '" + *s + "'");
            }
        }
    }

    template <typename E>
    void choice(const std::string& path, const std::map<std::string, E>& options, E& target)
    {
        if (auto s = scalar(path)) {
            auto it = options.find(trim(*s));
            if (it == options.end()) {
                std::string allowed;
                for (const auto& [k, v] : options) {
                    allowed += (allowed.empty() ? "" : ", ") + k;
                }
                throw ConfigError(path + ": unknown value '" + *s + "' (allowed: " + allowed + ")");
            }
            target = it->second;
        }
    }

    void quantity_list(const std::string& path, Dimension dim, std::vector<double>& target)
    {
        known_.insert(path);
        std::vector<std::string> items;
        if (const char* env = std::getenv(env_name(path).c_str())) {
            std::stringstream ss(env);
            std::string item;
            while (std::getline(ss, item, ',')) {
                items.push_back(item);
            }
            out_.resolved[path] = env;
        } else {
            YAML::Node node = lookup(path);
            if (!node || node.IsNull()) {
                return;
            }
            if (!node.IsSequence()) {
                throw ConfigError(path + ": expected a list");
            }
            std::string joined;
            for (const auto& n : node) {
                if (!n.IsScalar()) {
                    throw ConfigError(path + ": list items must be values");
                }
                items.push_back(n.Scalar());
                joined += (joined.empty() ? "" : ",") + n.Scalar();
            }
            out_.resolved[path] = joined;
        }
        target.clear();
        for (const auto& item : items) {
            try {
                target.push_back(parse_quantity(item, dim));
            } catch (const ConfigError& e) {
                throw ConfigError(path + ": " + e.what());
            }
        }
    }

    bool present(const std::string& path)
    {
        if (std::getenv(env_name(path).c_str())) {
            return true;
        }
        YAML::Node node = lookup(path);
        return node && !node.IsNull();
    }

    void reject_unknown() const { walk(root_, ""); }

private:
    YAML::Node lookup(const std::string& path) const
    {
        std::vector<std::string> parts;
        std::stringstream ss(path);
        std::string part;
        while (std::getline(ss, part, '.')) {
            parts.push_back(part);
        }
        return descend(root_, parts, 0);
    }

    static YAML::Node descend(const YAML::Node& node, const std::vector<std::string>& parts,
                              std::size_t i)
    {
        if (i == parts.size()) {
            return node;
        }
        if (!node || !node.IsMap()) {
            return YAML::Node(YAML::NodeType::Undefined);
        }
        return descend(node[parts[i]], parts, i + 1);
    }

    void walk(const YAML::Node& node, const std::string& prefix) const
    {
        if (node.IsMap()) {
            for (const auto& kv : node) {
                const std::string key = kv.first.as<std::string>();
                walk(kv.second, prefix.empty() ? key : prefix + "." + key);
            }
            return;
        }
        if (!prefix.empty() && !known_.count(prefix)) {
            throw ConfigError(prefix + ": unknown key");
        }
    }

    YAML::Node root_;
    AppConfig& out_;
    std::set<std::string> known_;
};

template <typename F>
void checked(const std::string& section, F&& fn)
{
    try {
        fn();
    } catch (const InvalidParameter& e) {
        throw ConfigError(section + ": " + e.what());
    }
}

AppConfig build(const YAML::Node& root)
{
    if (root && !root.IsNull() && !root.IsMap()) {
        throw ConfigError("top level must be a mapping");
    }
    AppConfig cfg;
    Reader r(root, cfg);
    auto& x = cfg.experiment;

    r.integer("seed", x.seed);
    r.quantity("duration", Dimension::Time, x.duration_s);

    auto& src = x.source;
    r.choice<SourceKind>("source.kind",
                         {{"pairs", SourceKind::Pairs}, {"split-thermal", SourceKind::SplitThermal}},
                         x.kind);
    r.choice<PairStatistics>(
        "source.statistics",
        {{"thermal", PairStatistics::Thermal}, {"poissonian", PairStatistics::Poissonian}},
        src.statistics);
    r.choice<PumpMode>("source.pump_mode", {{"pulsed", PumpMode::Pulsed}, {"cw", PumpMode::CW}},
                       src.pump.mode);
    r.quantity("source.period", Dimension::Time, src.pump.period_s);
    r.quantity("source.pulse_width", Dimension::Time, src.pump.pulse_width_s);
    r.number("source.mean_pairs_per_pulse", src.pump.mean_pairs_per_pulse);
    r.quantity("source.signal_linewidth", Dimension::Frequency, src.signal_line.fwhm_hz);
    r.quantity("source.idler_linewidth", Dimension::Frequency, src.idler_line.fwhm_hz);
    const bool lifetimes_given =
        r.present("source.signal_lifetime") || r.present("source.idler_lifetime");
    const bool lines_given =
        r.present("source.signal_linewidth") || r.present("source.idler_linewidth");
    if (lines_given && !lifetimes_given) {
        src = with_lifetimes_from_lines(src);
    }
    r.quantity("source.signal_lifetime", Dimension::Time, src.signal_lifetime_s);
    r.quantity("source.idler_lifetime", Dimension::Time, src.idler_lifetime_s);
    r.quantity("source.noise_rate", Dimension::Frequency, src.noise_rate_per_channel_hz);
    checked("source", [&] { validate(src); });

    r.number("state.coherence", x.state.coherence);
    checked("state", [&] { validate(x.state); });

    auto& mem = x.memory;
    r.flag("memory.enabled", mem.enabled);
    double storage = 1936e-9;
    r.quantity("memory.storage_time", Dimension::Time, storage);
    mem.comb.tooth_spacing_hz = 1.0 / storage;
    mem.comb.peak_depth = 2.1;
    mem.comb.finesse = 2.5;
    r.number("memory.peak_depth", mem.comb.peak_depth);
    r.number("memory.background_depth", mem.comb.background_depth);
    r.number("memory.finesse", mem.comb.finesse);
    r.choice<ToothShape>("memory.tooth_shape",
                         {{"lorentzian", ToothShape::Lorentzian},
                          {"gaussian", ToothShape::Gaussian},
                          {"square", ToothShape::Square}},
                         mem.comb.tooth_shape);
    r.quantity("memory.envelope_fwhm", Dimension::Frequency, mem.comb.envelope_fwhm_hz);
    r.quantity("memory.magnet.field", Dimension::Field, mem.magnet.field_t);
    double angle_rad = mem.magnet.angle_deg * kPi / 180.0;
    r.quantity("memory.magnet.angle", Dimension::Angle, angle_rad);
    mem.magnet.angle_deg = angle_rad * 180.0 / kPi;
    r.quantity("memory.magnet.temperature", Dimension::Temperature, mem.magnet.temperature_k);
    checked("memory", [&] {
        if (!(storage > 0.0)) {
            throw InvalidParameter("storage time must be positive");
        }
        validate(mem.comb);
        validate(mem.magnet);
    });
    if (mem.enabled) {
        checked("memory", [&] { mem.action = memory_action_from_comb(mem.comb); });
    }
    if (r.present("memory.transmission_prob") || r.present("memory.echo_efficiency")) {
        cfg.memory_action_from_comb = false;
    }
    r.number("memory.transmission_prob", mem.action.transmission_prob);
    r.number("memory.echo_efficiency", mem.action.echo_efficiency);
    mem.action.storage_time_s = storage;
    if (mem.enabled) {
        checked("memory", [&] { validate(mem.action); });
    }

    auto& fr = x.franson;
    r.flag("franson.signal_enabled", fr.signal_enabled);
    r.flag("franson.idler_enabled", fr.idler_enabled);
    r.quantity("franson.delay_signal", Dimension::Time, fr.pair.delay_signal_s);
    r.quantity("franson.delay_idler", Dimension::Time, fr.pair.delay_idler_s);
    r.quantity("franson.phase_signal", Dimension::Angle, fr.pair.phase_signal_rad);
    r.quantity("franson.phase_idler", Dimension::Angle, fr.pair.phase_idler_rad);
    r.number("franson.loss_short", fr.pair.loss_short);
    r.number("franson.loss_long", fr.pair.loss_long);
    r.quantity("franson.phase_noise", Dimension::Angle, fr.phase_noise_sigma_rad);
    double pair_floor = std::min(src.signal_lifetime_s, src.idler_lifetime_s);
    r.quantity("franson.pair_coherence_floor", Dimension::Time, pair_floor);
    checked("franson", [&] {
        validate(fr.pair);
        if (!(fr.phase_noise_sigma_rad >= 0.0)) {
            throw InvalidParameter("phase noise must be non-negative");
        }
    });
    if (fr.signal_enabled || fr.idler_enabled) {
        DelayMatchInput dm;
        dm.delay_signal_s = fr.pair.delay_signal_s;
        dm.delay_idler_s = fr.pair.delay_idler_s;
        dm.single_photon_coherence_s = std::max(src.signal_lifetime_s, src.idler_lifetime_s);
        dm.pump_period_s = src.pump.period_s;
        dm.pair_coherence_floor_s = pair_floor;
        dm.period_tolerance_s = src.pump.pulse_width_s;
        checked("franson", [&] {
            for (const auto& why : delay_matching_check(dm).reasons) {
                cfg.warnings.push_back("franson: " + why);
            }
        });
    }

    for (auto [name, det] : {std::pair<const char*, DetectorModel*>{"signal", &x.signal_detector},
                             {"idler", &x.idler_detector}}) {
        const std::string base = std::string("detectors.") + name + ".";
        r.number(base + "efficiency", det->efficiency);
        r.quantity(base + "dark_rate", Dimension::Frequency, det->dark_rate_hz);
        r.quantity(base + "jitter", Dimension::Time, det->jitter_sigma_s);
        r.quantity(base + "dead_time", Dimension::Time, det->dead_time_s);
        checked(std::string("detectors.") + name, [&] { validate(*det); });
    }

    auto& sc = x.schedule;
    r.quantity("schedule.polarization_window", Dimension::Time, sc.polarization_window_s);
    r.quantity("schedule.afc_window", Dimension::Time, sc.afc_window_s);
    r.quantity("schedule.delay", Dimension::Time, sc.delay_s);
    r.quantity("schedule.memory_window", Dimension::Time, sc.memory_window_s);
    r.quantity("schedule.trailing_delay", Dimension::Time, sc.trailing_delay_s);
    checked("schedule", [&] { validate(sc); });

    r.integer("engine.chunk_pulses", x.chunk_pulses);
    r.integer("engine.workers", x.workers);
    if (x.chunk_pulses == 0) {
        throw ConfigError("engine.chunk_pulses: must be positive");
    }
    if (x.workers == 0) {
        throw ConfigError("engine.workers: must be positive");
    }

    auto& an = cfg.analysis;
    r.quantity("analysis.bin_width", Dimension::Time, an.bin_width_s);
    r.quantity("analysis.range_lo", Dimension::Time, an.range_lo_s);
    r.quantity("analysis.range_hi", Dimension::Time, an.range_hi_s);
    r.quantity("analysis.window", Dimension::Time, an.window_s);
    r.quantity("analysis.center_tau", Dimension::Time, an.center_tau_s);
    r.quantity_list("analysis.side_taus", Dimension::Time, an.side_taus_s);
    r.quantity("analysis.fit_half_range", Dimension::Time, an.fit_half_range_s);
    r.number("analysis.k_sigma", an.k_sigma);
    r.flag("analysis.subtract_background", an.subtract_background);
    if (!(an.bin_width_s > 0.0) || !(an.range_hi_s > an.range_lo_s) || !(an.window_s > 0.0)) {
        throw ConfigError("analysis: bin width, range and window must be positive and non-empty");
    }

    r.reject_unknown();
    checked("experiment", [&] { validate(x); });
    return cfg;
}

} // namespace

double parse_quantity(const std::string& text, Dimension dim)
{
    const std::string t = trim(text);
    std::size_t split = 0;
    while (split < t.size() && (std::isdigit(static_cast<unsigned char>(t[split])) ||
                                std::strchr("+-.eE", t[split]) != nullptr)) {
        ++split;
    }
    const auto value = parse_number(t.substr(0, split));
    const std::string unit = trim(t.substr(split));
    if (!value) {
        throw ConfigError("cannot read a number from '" + text + "'");
    }
    if (unit.empty()) {
        throw ConfigError("missing unit in '" + text + "'");
    }
    for (const auto& u : units_for(dim)) {
        if (unit == u.name) {
            return *value * u.scale;
        }
    }
    throw ConfigError("unit '" + unit + "' does not fit this quantity");
}

std::string env_name(const std::string& key_path)
{
    std::string out = "ECHOLAB_";
    for (char c : key_path) {
        out += c == '.' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    }
    return out;
}

std::string AppConfig::hash() const
{
    std::uint64_t h = 0xcbf29ce484222325ull;
    auto feed = [&h](const std::string& s) {
        for (unsigned char c : s) {
            h ^= c;
            h *= 0x100000001b3ull;
        }
    };
    for (const auto& [k, v] : resolved) {
        feed(k);
        feed("=");
        feed(v);
        feed("\n");
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

AppConfig load_config_text(const std::string& yaml_text)
{
    YAML::Node root;
    try {
        root = YAML::Load(yaml_text);
    } catch (const YAML::Exception& e) {
        throw ConfigError(std::string("malformed config: ") + e.what());
    }
    return build(root);
}

AppConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open config " + path.string());
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return load_config_text(ss.str());
}

} // namespace echolab::cli
