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

#include "echolab/source.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "echolab/constants.hpp"
#include "echolab/error.hpp"

namespace echolab {

void validate(const DetectorModel& det)
{
    if (!(det.efficiency >= 0.0 && det.efficiency <= 1.0)) {
        throw InvalidParameter("detector efficiency must lie in [0, 1]");
    }
    if (!(det.dark_rate_hz >= 0.0) || !(det.jitter_sigma_s >= 0.0) || !(det.dead_time_s >= 0.0)) {
        throw InvalidParameter("detector dark rate, jitter and dead time must be non-negative");
    }
}

void validate(const PumpTrain& pump)
{
    if (!(pump.period_s > 0.0)) {
        throw InvalidParameter("pump period must be positive");
    }
    if (!(pump.pulse_width_s > 0.0) || pump.pulse_width_s > pump.period_s) {
        throw InvalidParameter("pump pulse width must satisfy 0 < width <= period");
    }
    if (!(pump.mean_pairs_per_pulse >= 0.0) || !std::isfinite(pump.mean_pairs_per_pulse)) {
        throw InvalidParameter("mean pairs per pulse must be non-negative");
    }
}

void validate(const PairSource& src)
{
    validate(src.pump);
    validate(src.signal_line);
    validate(src.idler_line);
    if (!(src.signal_lifetime_s > 0.0) || !(src.idler_lifetime_s > 0.0)) {
        throw InvalidParameter("photon lifetimes must be positive");
    }
    if (!(src.noise_rate_per_channel_hz >= 0.0)) {
        throw InvalidParameter("noise rate must be non-negative");
    }
}

PairSource with_lifetimes_from_lines(PairSource src)
{
    src.signal_lifetime_s = lifetime_from_linewidth(src.signal_line.fwhm_hz);
    src.idler_lifetime_s = lifetime_from_linewidth(src.idler_line.fwhm_hz);
    return src;
}

double pair_number_pmf(double mu, std::uint64_t n, PairStatistics stats)
{
    if (!(mu >= 0.0) || !std::isfinite(mu)) {
        throw InvalidParameter("mean pair number must be non-negative, got " + std::to_string(mu));
    }
    const double k = static_cast<double>(n);
    if (mu == 0.0) {
        return n == 0 ? 1.0 : 0.0;
    }
    switch (stats) {
    case PairStatistics::Thermal:
        // mu^n / (1+mu)^(n+1), evaluated in log space for large n.
        return std::exp(k * std::log(mu) - (k + 1.0) * std::log1p(mu));
    case PairStatistics::Poissonian:
        return std::exp(k * std::log(mu) - mu - std::lgamma(k + 1.0));
    }
    return 0.0;
}

namespace {

void check_lifetimes(double ti, double ts)
{
    if (!(ti > 0.0) || !(ts > 0.0)) {
        throw InvalidParameter("coincidence profile lifetimes must be positive");
    }
}

// Probability generating function E[x^n] of the pair-number distribution.
double pair_pgf(double mu, PairStatistics stats, double x)
{
    switch (stats) {
    case PairStatistics::Thermal:
        return 1.0 / (1.0 + mu * (1.0 - x));
    case PairStatistics::Poissonian:
        return std::exp(-mu * (1.0 - x));
    }
    return 1.0;
}

// CDF of x_s - x_i for independent exponential emission delays.
double delay_difference_cdf(double ti, double ts, double y)
{
    if (y < 0.0) {
        return ti / (ti + ts) * std::exp(y / ti);
    }
    return 1.0 - ts / (ti + ts) * std::exp(-y / ts);
}

// P(|d + x_s - x_i| < half) with d the difference of two independent
// uniform creation times on [0, width] (triangular density).
double accidental_window_fraction(double ti, double ts, double pulse_width, double half)
{
    auto inside = [&](double d) {
        return delay_difference_cdf(ti, ts, half - d) - delay_difference_cdf(ti, ts, -half - d);
    };
    if (pulse_width <= 0.0) {
        return inside(0.0);
    }
    // Composite Simpson on the triangular density over [-w, w].
    constexpr int n = 2000;
    const double h = 2.0 * pulse_width / n;
    double acc = 0.0;
    for (int k = 0; k <= n; ++k) {
        const double d = -pulse_width + k * h;
        const double density = (pulse_width - std::abs(d)) / (pulse_width * pulse_width);
        const double w = (k == 0 || k == n) ? 1.0 : (k % 2 == 1 ? 4.0 : 2.0);
        acc += w * density * inside(d);
    }
    return acc * h / 3.0;
}

} // namespace

double coincidence_profile(double idler_lifetime_s, double signal_lifetime_s, double tau_s)
{
    check_lifetimes(idler_lifetime_s, signal_lifetime_s);
    if (tau_s >= 0.0) {
        return std::exp(-tau_s / signal_lifetime_s);
    }
    return std::exp(tau_s / idler_lifetime_s);
}

double profile_fwhm(double idler_lifetime_s, double signal_lifetime_s)
{
    check_lifetimes(idler_lifetime_s, signal_lifetime_s);
    return kLn2 * (idler_lifetime_s + signal_lifetime_s);
}

double profile_window_fraction(double idler_lifetime_s, double signal_lifetime_s, double window_s)
{
    check_lifetimes(idler_lifetime_s, signal_lifetime_s);
    if (!(window_s > 0.0)) {
        throw InvalidParameter("coincidence window must be positive");
    }
    const double h = 0.5 * window_s;
    const double ti = idler_lifetime_s;
    const double ts = signal_lifetime_s;
    return (ti * -std::expm1(-h / ti) + ts * -std::expm1(-h / ts)) / (ti + ts);
}

AnalyticRates analytic_rates(const PairSource& src, const DetectorModel& signal_det,
                             const DetectorModel& idler_det, double window_s)
{
    if (!(window_s > 0.0)) {
        throw InvalidParameter("coincidence window must be positive");
    }
    validate(src);
    validate(signal_det);
    validate(idler_det);

    const double mu = src.pump.mean_pairs_per_pulse;
    const double period = src.pump.period_s;
    const double es = signal_det.efficiency;
    const double ei = idler_det.efficiency;
    const double noise_s = src.noise_rate_per_channel_hz + signal_det.dark_rate_hz;
    const double noise_i = src.noise_rate_per_channel_hz + idler_det.dark_rate_hz;
    const double ft = profile_window_fraction(src.idler_lifetime_s, src.signal_lifetime_s, window_s);

    AnalyticRates out;
    if (src.pump.mode == PumpMode::CW) {
        // Pairs form a homogeneous Poisson process of rate mu / period.
        const double pair_rate = mu / period;
        const double singles_s = pair_rate * es + noise_s;
        const double singles_i = pair_rate * ei + noise_i;
        out.cc_rate_hz = pair_rate * es * ei * ft;
        out.accidental_rate_hz = singles_s * singles_i * window_s;
        out.p_signal = singles_s * window_s;
        out.p_idler = singles_i * window_s;
        out.p_joint = out.cc_rate_hz * window_s + out.p_signal * out.p_idler;
    } else {
        const auto stats = src.statistics;
        const double none_s = pair_pgf(mu, stats, 1.0 - es);
        const double none_i = pair_pgf(mu, stats, 1.0 - ei);
        const double none_both = pair_pgf(mu, stats, (1.0 - es) * (1.0 - ei));
        const double ps = 1.0 - none_s;
        const double pi = 1.0 - none_i;
        const double pj = 1.0 - none_s - none_i + none_both;
        const double fa = accidental_window_fraction(src.idler_lifetime_s, src.signal_lifetime_s,
                                                     src.pump.pulse_width_s, 0.5 * window_s);
        // Per pulse: photon-photon, photon-noise and noise-noise accidentals.
        const double acc = ps * pi * fa + ps * noise_i * window_s + pi * noise_s * window_s +
                           noise_s * noise_i * window_s * period;
        const double excess = pj - ps * pi;
        out.cc_rate_hz = excess * ft / period;
        out.accidental_rate_hz = acc / period;
        out.p_signal = ps;
        out.p_idler = pi;
        out.p_joint = pj;
    }
    out.car = out.accidental_rate_hz > 0.0
                  ? (out.cc_rate_hz + out.accidental_rate_hz) / out.accidental_rate_hz
                  : std::numeric_limits<double>::infinity();
    return out;
}

} // namespace echolab
