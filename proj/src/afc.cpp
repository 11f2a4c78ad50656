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

#include "echolab/afc.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <mutex>
#include <ostream>
#include <string>

#include <fftw3.h>

#include "echolab/constants.hpp"
#include "echolab/error.hpp"

namespace echolab {

namespace {

using cplx = std::complex<double>;

// Minimal owning wrapper around an in-place FFTW plan.
class FftPlan {
public:
    FftPlan(std::vector<cplx>& data, int sign)
    {
        static std::mutex planner_mutex; // the FFTW planner is not re-entrant
        std::lock_guard<std::mutex> lock(planner_mutex);
        auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
        plan_ = fftw_plan_dft_1d(static_cast<int>(data.size()), ptr, ptr, sign, FFTW_ESTIMATE);
        if (plan_ == nullptr) {
            throw Error("failed to create FFT plan");
        }
    }
    FftPlan(const FftPlan&) = delete;
    FftPlan& operator=(const FftPlan&) = delete;
    ~FftPlan()
    {
        static std::mutex destroy_mutex;
        std::lock_guard<std::mutex> lock(destroy_mutex);
        fftw_destroy_plan(plan_);
    }

    void execute() const { fftw_execute(plan_); }

private:
    fftw_plan plan_ = nullptr;
};

double gaussian_fwhm(double x, double fwhm)
{
    const double u = 2.0 * x / fwhm;
    return std::exp(-kLn2 * u * u);
}

// Fraction of [lo, hi] covered by the square tooth centred at 0 with full width w.
double square_overlap(double lo, double hi, double w)
{
    const double a = std::max(lo, -0.5 * w);
    const double b = std::min(hi, 0.5 * w);
    return b > a ? (b - a) / (hi - lo) : 0.0;
}

} // namespace

double AfcComb::envelope(double nu_hz) const
{
    if (std::isinf(envelope_fwhm_hz)) {
        return 1.0;
    }
    return gaussian_fwhm(nu_hz - center_hz, envelope_fwhm_hz);
}

double AfcComb::tooth(double offset_hz) const
{
    const double w = tooth_fwhm_hz();
    switch (tooth_shape) {
    case ToothShape::Lorentzian: {
        const double u = 2.0 * offset_hz / w;
        return 1.0 / (1.0 + u * u);
    }
    case ToothShape::Gaussian:
        return gaussian_fwhm(offset_hz, w);
    case ToothShape::Square: {
        const double a = std::abs(offset_hz);
        if (a < 0.5 * w) {
            return 1.0;
        }
        return a == 0.5 * w ? 0.5 : 0.0;
    }
    }
    return 0.0;
}

double AfcComb::comb_profile(double nu_hz) const
{
    const double x = (nu_hz - center_hz) / tooth_spacing_hz;
    switch (tooth_shape) {
    case ToothShape::Lorentzian: {
        // Closed-form periodic sum of unit-peak Lorentzians, half width g in units of Delta.
        const double g = 0.5 / finesse;
        const double s = 2.0 * kPi * g;
        return g * kPi * std::sinh(s) / (std::cosh(s) - std::cos(2.0 * kPi * x));
    }
    case ToothShape::Gaussian: {
        const double k0 = std::round(x);
        double sum = 0.0;
        for (int j = -8; j <= 8; ++j) {
            sum += tooth((x - (k0 + j)) * tooth_spacing_hz);
        }
        return sum;
    }
    case ToothShape::Square: {
        const double k0 = std::round(x);
        return tooth((x - k0) * tooth_spacing_hz);
    }
    }
    return 0.0;
}

double AfcComb::absorption(double nu_hz) const
{
    const double env = envelope(nu_hz);
    if (env < kEnvelopeCutoff) {
        return background_depth;
    }
    return background_depth + env * peak_depth * comb_profile(nu_hz);
}

void validate(const AfcComb& comb)
{
    if (!(comb.tooth_spacing_hz > 0.0) || !std::isfinite(comb.tooth_spacing_hz)) {
        throw InvalidParameter("comb tooth spacing must be positive");
    }
    if (!(comb.finesse > 1.0)) {
        throw InvalidParameter("comb finesse must exceed 1, got " + std::to_string(comb.finesse));
    }
    if (!(comb.peak_depth >= 0.0) || !(comb.background_depth >= 0.0)) {
        throw InvalidParameter("optical depths must be non-negative");
    }
    if (!(comb.envelope_fwhm_hz > 0.0)) {
        throw InvalidParameter("comb envelope width must be positive");
    }
}

AfcComb build_comb(double storage_time_s, double peak_depth, double background_depth,
                   double finesse, ToothShape shape, double envelope_fwhm_hz, double center_hz)
{
    if (!(storage_time_s > 0.0)) {
        throw InvalidParameter("storage time must be positive");
    }
    AfcComb comb;
    comb.tooth_spacing_hz = 1.0 / storage_time_s;
    comb.finesse = finesse;
    comb.peak_depth = peak_depth;
    comb.background_depth = background_depth;
    comb.tooth_shape = shape;
    comb.envelope_fwhm_hz = envelope_fwhm_hz;
    comb.center_hz = center_hz;
    validate(comb);
    return comb;
}

double efficiency_lorentzian(double peak_depth, double finesse, double background_depth)
{
    if (!(peak_depth >= 0.0) || !(finesse > 1.0) || !(background_depth >= 0.0)) {
        throw InvalidParameter("efficiency requires d >= 0, F > 1, d0 >= 0");
    }
    const double r = peak_depth / finesse;
    return r * r * std::exp(-r) * std::exp(-background_depth) *
           std::exp(-kPi * kPi / (2.0 * kLn2 * finesse * finesse));
}

double square_tooth_efficiency(double peak_depth, double gamma, double storage_time_s)
{
    if (!(peak_depth >= 0.0) || !(gamma >= 0.0) || !(storage_time_s > 0.0)) {
        throw InvalidParameter("square tooth efficiency requires d >= 0, gamma >= 0, t_M > 0");
    }
    const double gt = gamma * storage_time_s;
    const double s = std::sin(gt);
    const double r = peak_depth / kPi;
    return r * r * s * s * std::exp(-peak_depth * gt / kPi);
}

SquareOptimum optimal_square_params(double peak_depth, double background_depth,
                                    double storage_time_s)
{
    if (!(peak_depth > 0.0)) {
        throw InvalidParameter("optimal square comb requires d > 0");
    }
    if (!(storage_time_s > 0.0)) {
        throw InvalidParameter("storage time must be positive");
    }
    if (!(background_depth >= 0.0)) {
        throw InvalidParameter("background optical depth must be non-negative");
    }
    SquareOptimum out;
    out.gamma_t = std::atan(2.0 * kPi / peak_depth);
    out.gamma_opt = out.gamma_t / storage_time_s;
    out.tooth_width_hz = out.gamma_opt / kPi;
    out.finesse = kPi / out.gamma_t;
    out.eta_opt = square_tooth_efficiency(peak_depth, out.gamma_opt, storage_time_s);
    out.eta_with_background = out.eta_opt * std::exp(-background_depth);
    return out;
}

double coherence_time(const SpectralLine& line)
{
    validate(line);
    return 1.0 / (kPi * line.fwhm_hz);
}

EchoResult simulate_echo(const AfcComb& comb, const SpectralLine& input, const FrequencyGrid& grid)
{
    validate(comb);
    validate(input);
    if (!(grid.span_hz > 0.0) || grid.n_samples < 16) {
        throw InvalidParameter("frequency grid needs a positive span and at least 16 samples");
    }

    const std::size_t n = grid.n_samples;
    const double dnu = grid.resolution_hz();
    const double max_step = comb.tooth_fwhm_hz() / 10.0;
    if (!(dnu < max_step)) {
        const auto required = static_cast<std::size_t>(std::floor(grid.span_hz / max_step)) + 1;
        throw ResolutionError("frequency grid under-resolves the comb teeth: need at least " +
                                  std::to_string(required) + " samples for span " +
                                  std::to_string(grid.span_hz) + " Hz",
                              required);
    }
    const double cutoff = 1e-4;
    const double half_span = 0.5 * grid.span_hz;
    if (!(line_weight(input, input.center_hz + half_span) < cutoff)) {
        const double x = input.shape == LineShape::Lorentzian
                             ? 0.5 * input.fwhm_hz * std::sqrt(1.0 / cutoff - 1.0)
                             : 0.5 * input.fwhm_hz * std::sqrt(std::log(1.0 / cutoff) / kLn2);
        const auto required = static_cast<std::size_t>(std::ceil(2.0 * x / dnu)) + 1;
        throw ResolutionError("frequency grid does not cover the input line: need at least " +
                                  std::to_string(required) + " samples at the current resolution",
                              required);
    }

    auto freq = [&](std::size_t k) {
        const auto ks = static_cast<double>(k);
        return k < n / 2 ? ks * dnu : (ks - static_cast<double>(n)) * dnu;
    };

    // Half optical depth on the grid, cell-averaged for square teeth so that
    // the sampled tooth area is exact.
    std::vector<cplx> logh(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double nu = input.center_hz + freq(k);
        double alpha = 0.0;
        if (comb.tooth_shape == ToothShape::Square) {
            const double env = comb.envelope(nu);
            const double x = (nu - comb.center_hz) / comb.tooth_spacing_hz;
            const double k0 = std::round(x);
            const double off = (x - k0) * comb.tooth_spacing_hz;
            double cover = 0.0;
            for (int j = -1; j <= 1; ++j) {
                const double o = off - j * comb.tooth_spacing_hz;
                cover += square_overlap(o - 0.5 * dnu, o + 0.5 * dnu, comb.tooth_fwhm_hz());
            }
            alpha = comb.background_depth +
                    (env < kEnvelopeCutoff ? 0.0 : env * comb.peak_depth * cover);
        } else {
            alpha = comb.absorption(nu);
        }
        logh[k] = 0.5 * alpha;
    }

    // Causal log-response: fold the negative-time part of the cepstrum onto
    // positive times so that H = exp(-L) is minimum phase.
    {
        FftPlan inverse(logh, FFTW_BACKWARD);
        inverse.execute();
        const double inv_n = 1.0 / static_cast<double>(n);
        for (auto& v : logh) {
            v *= inv_n;
        }
        for (std::size_t t = 1; t < n / 2; ++t) {
            logh[t] *= 2.0;
        }
        for (std::size_t t = n / 2 + 1; t < n; ++t) {
            logh[t] = 0.0;
        }
        if (n % 2 == 1) {
            logh[n / 2] *= 2.0;
        }
        FftPlan forward(logh, FFTW_FORWARD);
        forward.execute();
    }

    std::vector<cplx> field(n);
    double input_energy = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double f = freq(k);
        cplx a;
        if (input.shape == LineShape::Lorentzian) {
            a = 1.0 / cplx(1.0, 2.0 * f / input.fwhm_hz);
        } else {
            a = std::sqrt(gaussian_fwhm(f, input.fwhm_hz));
        }
        input_energy += std::norm(a);
        field[k] = a * std::exp(-logh[k]);
    }
    {
        FftPlan inverse(field, FFTW_BACKWARD);
        inverse.execute();
    }
    // Unnormalised inverse transform: sum |e|^2 = n sum |A|^2.
    const double norm = 1.0 / (input_energy * static_cast<double>(n));

    EchoResult out;
    const double dt = 1.0 / grid.span_hz;
    const double t_m = comb.storage_time_s();
    const double w = 3.0 * coherence_time(input);
    out.lobe_half_width_s = w;
    out.time_grid_s.resize(n);
    out.output_intensity.resize(n);
    double best = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
        // fftshift ordering: index i corresponds to time sample (i - n/2).
        const std::size_t src = (i + n - n / 2) % n;
        const double t = (static_cast<double>(i) - static_cast<double>(n / 2)) * dt;
        const double intensity = std::norm(field[src]) * norm;
        out.time_grid_s[i] = t;
        out.output_intensity[i] = intensity;
        if (std::abs(t) <= w) {
            out.transmission_fraction += intensity;
        }
        if (std::abs(t - t_m) <= w) {
            out.first_echo_efficiency += intensity;
            if (intensity > best) {
                best = intensity;
                out.echo_time_s = t;
            }
        }
    }
    return out;
}

CountsEfficiency efficiency_from_counts(double cc_echo, double cc_trans, double sc_trans,
                                        double sc_input)
{
    if (cc_echo < 0.0 || cc_trans < 0.0 || sc_trans < 0.0 || sc_input < 0.0) {
        throw InvalidParameter("counts must be non-negative");
    }
    if (cc_trans == 0.0 || sc_input == 0.0) {
        throw DivisionDomainError("efficiency from counts needs non-zero transmission "
                                  "coincidences and input singles");
    }
    CountsEfficiency out;
    out.eta = cc_echo / cc_trans * sc_trans / sc_input;
    // d eta / d N_j times sqrt(N_j) for each count.
    const double d_ce = sc_trans / (cc_trans * sc_input);
    const double d_ct = out.eta / cc_trans;
    const double d_st = cc_echo / (cc_trans * sc_input);
    const double d_si = out.eta / sc_input;
    out.sigma = std::sqrt(d_ce * d_ce * cc_echo + d_ct * d_ct * cc_trans + d_st * d_st * sc_trans +
                          d_si * d_si * sc_input);
    return out;
}

void validate(const MagnetConfig& mag)
{
    if (!(mag.field_t >= 0.0)) {
        throw InvalidParameter("magnetic field must be non-negative");
    }
    if (!(mag.temperature_k > 0.0)) {
        throw InvalidParameter("temperature must be positive");
    }
}

SideHoleSplitting side_hole_splitting(const MagnetConfig& mag, double slope_hz_per_t)
{
    validate(mag);
    SideHoleSplitting out;
    out.splitting_hz = slope_hz_per_t * mag.field_t;
    if (out.splitting_hz > 0.0) {
        out.storage_period_s = 1.0 / out.splitting_hz;
    }
    return out;
}

std::vector<StorageTimeCandidate> optimize_storage_time(double rep_period_s, double side_period_s,
                                                        double range_lo_s, double range_hi_s)
{
    if (!(rep_period_s > 0.0) || !(side_period_s > 0.0)) {
        throw InvalidParameter("repetition and side-hole periods must be positive");
    }
    std::vector<StorageTimeCandidate> out;
    if (!(range_hi_s >= range_lo_s)) {
        return out;
    }
    // Relative slack so that range endpoints given in decimal survive rounding.
    const double eps = 1e-9;
    const auto first = static_cast<long long>(std::ceil(range_lo_s / rep_period_s - 0.5 - eps));
    const auto last = static_cast<long long>(std::floor(range_hi_s / rep_period_s - 0.5 + eps));
    for (long long k = std::max(first, 0LL); k <= last; ++k) {
        StorageTimeCandidate c;
        c.half_period_index = k;
        c.storage_time_s = (static_cast<double>(k) + 0.5) * rep_period_s;
        const double nearest = std::round(c.storage_time_s / side_period_s) * side_period_s;
        c.residual_s = std::abs(c.storage_time_s - nearest);
        const double ratio = c.storage_time_s / rep_period_s - 0.5;
        c.half_integer = std::abs(ratio - std::round(ratio)) < 1e-9;
        out.push_back(c);
    }
    std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        if (a.residual_s != b.residual_s) {
            return a.residual_s < b.residual_s;
        }
        return a.storage_time_s < b.storage_time_s;
    });
    return out;
}

MultiplexingMetrics multiplexing_metrics(double storage_time_s, double photon_width_s,
                                         double rep_period_s)
{
    if (!(storage_time_s > 0.0) || !(photon_width_s > 0.0) || !(rep_period_s > 0.0)) {
        throw InvalidParameter("multiplexing metrics need positive times");
    }
    return {storage_time_s / photon_width_s, storage_time_s / rep_period_s};
}

void write_absorption_csv(std::ostream& os, const AfcComb& comb, double span_hz,
                          std::size_t n_samples)
{
    validate(comb);
    os << "detuning_hz,optical_depth\n";
    if (n_samples == 0) {
        return;
    }
    const double step = n_samples > 1 ? span_hz / static_cast<double>(n_samples - 1) : 0.0;
    for (std::size_t i = 0; i < n_samples; ++i) {
        const double nu = comb.center_hz - 0.5 * span_hz + step * static_cast<double>(i);
        os << nu << ',' << comb.absorption(nu) << '\n';
    }
}

void write_echo_csv(std::ostream& os, const EchoResult& echo)
{
    os << "time_s,intensity\n";
    for (std::size_t i = 0; i < echo.time_grid_s.size(); ++i) {
        os << echo.time_grid_s[i] << ',' << echo.output_intensity[i] << '\n';
    }
}

} // namespace echolab
