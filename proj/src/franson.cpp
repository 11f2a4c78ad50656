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

#include "echolab/franson.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <Eigen/Dense>

#include "echolab/error.hpp"

namespace echolab {

TimeBinState TimeBinState::ideal(double coherence)
{
    TimeBinState s;
    const double a = 1.0 / std::sqrt(2.0);
    s.amplitudes = {a, 0.0, 0.0, a};
    s.coherence = coherence;
    return s;
}

void validate(const TimeBinState& state)
{
    double norm = 0.0;
    for (const auto& a : state.amplitudes) {
        norm += std::norm(a);
    }
    if (std::abs(norm - 1.0) > 1e-9) {
        throw InvalidParameter("time-bin state amplitudes must be normalised");
    }
    if (!(state.coherence >= 0.0 && state.coherence <= 1.0)) {
        throw InvalidParameter("time-bin coherence must lie in [0, 1]");
    }
}

void validate(const FransonPair& pair)
{
    if (!(pair.delay_signal_s > 0.0) || !(pair.delay_idler_s > 0.0)) {
        throw InvalidParameter("interferometer delays must be positive");
    }
    auto prob = [](double p) { return p >= 0.0 && p <= 1.0; };
    if (!prob(pair.loss_short) || !prob(pair.loss_long)) {
        throw InvalidParameter("interferometer arm losses must lie in [0, 1]");
    }
}

std::string to_string(PeakLabel label)
{
    switch (label) {
    case PeakLabel::SideEl:
        return "side_el";
    case PeakLabel::Accidental:
        return "accidental";
    case PeakLabel::Central:
        return "central";
    case PeakLabel::SideLe:
        return "side_le";
    }
    return "unknown";
}

PeakStructure peak_structure(double storage_time_s, double delay_s, double rep_period_s)
{
    if (!(storage_time_s > 0.0) || !(delay_s >= 0.0) || !(rep_period_s > 0.0)) {
        throw InvalidParameter("peak structure needs t_M > 0, delay >= 0 and period > 0");
    }
    PeakStructure out;
    const double ratio = storage_time_s / rep_period_s;
    const double frac = ratio - std::floor(ratio);
    out.half_integer = std::abs(frac - 0.5) < 1e-9;

    out.peaks.push_back({storage_time_s - delay_s, PeakLabel::SideEl});
    out.peaks.push_back({storage_time_s, PeakLabel::Central});
    out.peaks.push_back({storage_time_s + delay_s, PeakLabel::SideLe});

    const double lo = std::floor(ratio + 1e-12) * rep_period_s;
    const double hi = std::ceil(ratio - 1e-12) * rep_period_s;
    out.peaks.push_back({lo, PeakLabel::Accidental});
    if (hi != lo) {
        out.peaks.push_back({hi, PeakLabel::Accidental});
    }
    std::stable_sort(out.peaks.begin(), out.peaks.end(),
                     [](const Peak& a, const Peak& b) { return a.time_s < b.time_s; });
    return out;
}

double central_peak_rate(double total_phase_rad, double visibility, int port)
{
    if (!(visibility >= 0.0 && visibility <= 1.0)) {
        throw InvalidParameter("visibility must lie in [0, 1]");
    }
    if (port != 1 && port != 2) {
        throw InvalidParameter("port must be 1 or 2");
    }
    const double sign = port == 1 ? 1.0 : -1.0;
    return 0.5 * (1.0 + sign * visibility * std::cos(total_phase_rad));
}

Visibility visibility_from_extrema(double max_count, double min_count)
{
    if (max_count < 0.0 || min_count < 0.0) {
        throw InvalidParameter("counts must be non-negative");
    }
    const double sum = max_count + min_count;
    if (!(sum > 0.0)) {
        throw UndefinedVisibility("visibility undefined for all-zero counts");
    }
    Visibility v;
    v.value = (max_count - min_count) / sum;
    v.sigma = 2.0 * std::sqrt(max_count * min_count * sum) / (sum * sum);
    v.amplitude = 0.5 * sum;
    return v;
}

Visibility visibility_from_fringe(const std::vector<FringePoint>& points)
{
    if (points.size() < 4) {
        throw InvalidParameter("fringe fit needs at least 4 phase points");
    }
    double total = 0.0;
    for (const auto& p : points) {
        if (p.count < 0.0) {
            throw InvalidParameter("counts must be non-negative");
        }
        total += p.count;
    }
    if (!(total > 0.0)) {
        throw UndefinedVisibility("visibility undefined for all-zero counts");
    }

    Eigen::Matrix3d normal = Eigen::Matrix3d::Zero();
    Eigen::Vector3d rhs = Eigen::Vector3d::Zero();
    for (const auto& p : points) {
        const Eigen::Vector3d x(1.0, std::cos(p.phase_rad), std::sin(p.phase_rad));
        const double w = 1.0 / std::max(p.count, 1.0);
        normal += w * x * x.transpose();
        rhs += w * p.count * x;
    }
    Eigen::FullPivLU<Eigen::Matrix3d> lu(normal);
    if (!lu.isInvertible()) {
        throw FitDegenerate("fringe phases do not determine a cosine fit");
    }
    const Eigen::Vector3d beta = lu.solve(rhs);
    const Eigen::Matrix3d cov = lu.inverse();

    const double a = beta(0);
    const double b = beta(1);
    const double c = beta(2);
    if (!(a > 0.0)) {
        throw UndefinedVisibility("fitted fringe offset is not positive");
    }
    const double r = std::hypot(b, c);
    Visibility v;
    v.value = r / a;
    v.amplitude = a;
    v.phase_offset_rad = std::atan2(-c, b);
    if (r > 0.0) {
        const Eigen::Vector3d g(-v.value / a, b / (a * r), c / (a * r));
        v.sigma = std::sqrt(std::max(0.0, g.dot(cov * g)));
    } else {
        v.sigma = std::sqrt(0.5 * (cov(1, 1) + cov(2, 2))) / a;
    }
    return v;
}

DelayMatchReport delay_matching_check(const DelayMatchInput& in)
{
    if (!(in.delay_signal_s > 0.0) || !(in.delay_idler_s > 0.0) ||
        !(in.single_photon_coherence_s > 0.0) || !(in.pump_period_s > 0.0) ||
        !(in.pair_coherence_floor_s > 0.0) || !(in.period_tolerance_s > 0.0)) {
        throw InvalidParameter("delay matching inputs must be positive");
    }
    DelayMatchReport r;
    auto fail = [&](std::string why) {
        r.pass = false;
        r.reasons.push_back(std::move(why));
    };
    if (std::abs(in.delay_signal_s - in.pump_period_s) >= in.period_tolerance_s ||
        std::abs(in.delay_idler_s - in.pump_period_s) >= in.period_tolerance_s) {
        fail("(a) interferometer delay does not match the pump period");
    }
    if (!(in.delay_signal_s > in.single_photon_coherence_s) ||
        !(in.delay_idler_s > in.single_photon_coherence_s)) {
        fail("(b) interferometer delay does not exceed the single-photon coherence time");
    }
    if (!(std::abs(in.delay_signal_s - in.delay_idler_s) < in.pair_coherence_floor_s)) {
        fail("(c) delay mismatch between the two interferometers exceeds the pair coherence");
    }
    return r;
}

void write_fringe_csv(std::ostream& os, const std::vector<FringeRow>& rows)
{
    os << "phase_deg,counts_port1,counts_port2\n";
    for (const auto& r : rows) {
        os << r.phase_deg << ',' << r.counts_port1 << ',' << r.counts_port2 << '\n';
    }
}

} // namespace echolab
