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

#include "echolab/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>

#include "echolab/error.hpp"

namespace echolab {

namespace {

void require_sorted(const std::vector<Picoseconds>& v, const char* name)
{
    if (!std::is_sorted(v.begin(), v.end())) {
        throw InputOrderError(std::string(name) + " stream is not time ordered");
    }
}

void check_window(const CoincidenceHistogram& hist, double window_s)
{
    if (!(window_s >= hist.bin_width_s())) {
        throw InvalidParameter("coincidence window must be at least one bin wide");
    }
}

} // namespace

double CoincidenceHistogram::bin_center_s(std::size_t k) const
{
    return to_seconds(origin_ps) + (static_cast<double>(k) + 0.5) * to_seconds(bin_width_ps);
}

std::uint64_t CoincidenceHistogram::total() const
{
    std::uint64_t s = 0;
    for (auto c : counts) {
        s += c;
    }
    return s;
}

CoincidenceHistogram& CoincidenceHistogram::operator+=(const CoincidenceHistogram& other)
{
    if (other.bin_width_ps != bin_width_ps || other.origin_ps != origin_ps ||
        other.counts.size() != counts.size()) {
        throw InvalidParameter("histograms have different binning");
    }
    for (std::size_t k = 0; k < counts.size(); ++k) {
        counts[k] += other.counts[k];
    }
    integration_time_s += other.integration_time_s;
    return *this;
}

CoincidenceHistogram build_histogram(const std::vector<Picoseconds>& start,
                                     const std::vector<Picoseconds>& stop, double bin_width_s,
                                     double range_lo_s, double range_hi_s)
{
    const Picoseconds width = to_ps(bin_width_s);
    if (!(bin_width_s > 0.0) || width <= 0) {
        throw InvalidParameter("bin width must be at least 1 ps");
    }
    if (!(range_hi_s > range_lo_s)) {
        throw InvalidParameter("histogram range is empty");
    }
    require_sorted(start, "start");
    require_sorted(stop, "stop");

    CoincidenceHistogram h;
    h.bin_width_ps = width;
    h.origin_ps = to_ps(range_lo_s);
    const Picoseconds span = to_ps(range_hi_s) - h.origin_ps;
    const auto n_bins = static_cast<std::size_t>((span + width - 1) / width);
    h.counts.assign(n_bins, 0);
    const Picoseconds hi = h.origin_ps + static_cast<Picoseconds>(n_bins) * width;

    std::size_t first = 0;
    for (const Picoseconds s : start) {
        while (first < stop.size() && stop[first] - s < h.origin_ps) {
            ++first;
        }
        for (std::size_t j = first; j < stop.size(); ++j) {
            const Picoseconds d = stop[j] - s;
            if (d >= hi) {
                break;
            }
            ++h.counts[static_cast<std::size_t>((d - h.origin_ps) / width)];
        }
    }
    return h;
}

CoincidenceHistogram build_histogram(const std::vector<TimeTag>& tags, std::uint8_t start_channel,
                                     std::uint8_t stop_channel, double bin_width_s,
                                     double range_lo_s, double range_hi_s,
                                     double integration_time_s)
{
    auto h = build_histogram(channel_times(tags, start_channel), channel_times(tags, stop_channel),
                             bin_width_s, range_lo_s, range_hi_s);
    h.start_channel = start_channel;
    h.stop_channel = stop_channel;
    h.integration_time_s = integration_time_s;
    return h;
}

std::vector<double> coincidence_deltas(const std::vector<Picoseconds>& start,
                                       const std::vector<Picoseconds>& stop, double range_lo_s,
                                       double range_hi_s)
{
    require_sorted(start, "start");
    require_sorted(stop, "stop");
    const Picoseconds lo = to_ps(range_lo_s);
    const Picoseconds hi = to_ps(range_hi_s);
    std::vector<double> out;
    std::size_t first = 0;
    for (const Picoseconds s : start) {
        while (first < stop.size() && stop[first] - s < lo) {
            ++first;
        }
        for (std::size_t j = first; j < stop.size() && stop[j] - s < hi; ++j) {
            out.push_back(to_seconds(stop[j] - s));
        }
    }
    return out;
}

std::uint64_t window_counts(const CoincidenceHistogram& hist, double center_s, double window_s)
{
    const double lo = center_s - 0.5 * window_s;
    const double hi = center_s + 0.5 * window_s;
    std::uint64_t sum = 0;
    for (std::size_t k = 0; k < hist.counts.size(); ++k) {
        const double c = hist.bin_center_s(k);
        if (c >= lo && c < hi) {
            sum += hist.counts[k];
        }
    }
    return sum;
}

Estimate g2_from_histogram(const CoincidenceHistogram& hist, double center_tau_s,
                           const std::vector<double>& side_taus_s, double window_s)
{
    check_window(hist, window_s);
    if (side_taus_s.empty()) {
        throw InvalidParameter("at least one side window is required");
    }
    std::vector<double> centers = side_taus_s;
    centers.push_back(center_tau_s);
    std::sort(centers.begin(), centers.end());
    for (std::size_t k = 1; k < centers.size(); ++k) {
        if (centers[k] - centers[k - 1] < window_s) {
            throw InvalidParameter("coincidence windows overlap");
        }
    }
    const auto central = static_cast<double>(window_counts(hist, center_tau_s, window_s));
    double side_sum = 0.0;
    for (double tau : side_taus_s) {
        side_sum += static_cast<double>(window_counts(hist, tau, window_s));
    }
    if (side_sum <= 0.0) {
        throw UndefinedCorrelation("side windows hold no coincidences");
    }
    const double side_mean = side_sum / static_cast<double>(side_taus_s.size());
    const double g = central / side_mean;
    // var(C)/S^2 + C^2 var(S)/S^4 with Poisson variances.
    const double sigma = std::sqrt(central) / side_mean * std::sqrt(1.0 + central / side_sum);
    return {g, sigma};
}

double g2_from_stats(const CoincidenceStats& s)
{
    auto prob = [](double p) { return p >= 0.0 && p <= 1.0; };
    if (!prob(s.p_si) || !prob(s.p_s) || !prob(s.p_i) || s.p_si > std::min(s.p_s, s.p_i)) {
        throw InvalidParameter("coincidence probabilities are inconsistent");
    }
    if (s.p_s * s.p_i <= 0.0) {
        throw UndefinedCorrelation("singles probability is zero");
    }
    return s.p_si / (s.p_s * s.p_i);
}

Estimate car_from_histogram(const CoincidenceHistogram& hist, double window_s, double period_s,
                            double center_tau_s, bool subtract_accidentals)
{
    if (!(period_s > 0.0)) {
        throw InvalidParameter("pump period must be positive");
    }
    auto g = g2_from_histogram(hist, center_tau_s,
                               {center_tau_s - period_s, center_tau_s + period_s}, window_s);
    if (subtract_accidentals) {
        g.value -= 1.0;
    }
    return g;
}

BasisProjections basis_projections(double g2, double visibility)
{
    if (!(g2 >= 0.0) || !std::isfinite(g2)) {
        throw InvalidParameter("g2 must be finite and non-negative");
    }
    if (!(visibility >= 0.0 && visibility <= 1.0)) {
        throw InvalidParameter("visibility must lie in [0, 1]");
    }
    return {1.0 / (g2 + 2.0), (1.0 - visibility) / 4.0, (1.0 + visibility) / 4.0};
}

WitnessResult witness(Estimate g2, Estimate visibility, int port, double k_sigma)
{
    basis_projections(g2.value, visibility.value); // domain checks
    if (!(g2.sigma >= 0.0) || !(visibility.sigma >= 0.0)) {
        throw InvalidParameter("uncertainties must be non-negative");
    }
    if (port != 1 && port != 2) {
        throw InvalidParameter("port must be 1 or 2");
    }
    const double d = g2.value + 2.0;
    WitnessResult r;
    r.g2 = g2;
    r.visibility = visibility;
    r.port = port;
    r.w.value = 1.0 / d - visibility.value / 2.0;
    r.w.sigma = std::hypot(g2.sigma / (d * d), visibility.sigma / 2.0);
    r.entangled = r.w.value + k_sigma * r.w.sigma < 0.0;
    return r;
}

double splitting_energy_j(double splitting_hz) { return kPlanck * splitting_hz; }

namespace {

// Slope of y = s x through the origin and its standard error.
Estimate origin_slope(const std::vector<double>& x, const std::vector<double>& y)
{
    double sxx = 0.0;
    double sxy = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        sxx += x[k] * x[k];
        sxy += x[k] * y[k];
    }
    if (!(sxx > 0.0)) {
        throw FitDegenerate("all abscissae are zero");
    }
    const double s = sxy / sxx;
    double sigma = 0.0;
    if (x.size() > 1) {
        double rss = 0.0;
        for (std::size_t k = 0; k < x.size(); ++k) {
            const double r = y[k] - s * x[k];
            rss += r * r;
        }
        sigma = std::sqrt(rss / static_cast<double>(x.size() - 1) / sxx);
    }
    return {s, sigma};
}

} // namespace

Estimate boltzmann_temperature(const std::vector<BoltzmannPoint>& points)
{
    if (points.empty()) {
        throw InvalidParameter("no population points");
    }
    std::vector<double> x;
    std::vector<double> y;
    for (const auto& p : points) {
        if (!(p.population_ratio > 0.0 && p.population_ratio <= 1.0)) {
            throw InvalidParameter("population ratio must lie in (0, 1]");
        }
        if (!(p.splitting_j >= 0.0)) {
            throw InvalidParameter("splitting must be non-negative");
        }
        x.push_back(p.splitting_j);
        y.push_back(std::log(p.population_ratio));
    }
    const auto s = origin_slope(x, y);
    if (!(s.value < 0.0)) {
        throw FitDegenerate("populations show no thermal decay");
    }
    const double t = -1.0 / (kBoltzmann * s.value);
    return {t, t * s.sigma / -s.value};
}

Estimate fit_side_hole_slope(const std::vector<SideHolePoint>& points)
{
    if (points.empty()) {
        throw InvalidParameter("no side-hole points");
    }
    std::vector<double> x;
    std::vector<double> y;
    for (const auto& p : points) {
        x.push_back(p.field_t);
        y.push_back(p.splitting_hz);
    }
    return origin_slope(x, y);
}

std::vector<HistogramPeak> find_peaks(const CoincidenceHistogram& hist, double window_s,
                                      double min_separation_s, std::uint64_t min_counts)
{
    check_window(hist, window_s);
    const std::size_t n = hist.counts.size();
    const auto half = static_cast<std::size_t>(window_s / hist.bin_width_s() / 2.0);
    std::vector<std::uint64_t> summed(n, 0);
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t lo = k >= half ? k - half : 0;
        const std::size_t hi = std::min(n - 1, k + half);
        for (std::size_t j = lo; j <= hi; ++j) {
            summed[k] += hist.counts[j];
        }
    }
    std::vector<HistogramPeak> candidates;
    for (std::size_t k = 0; k < n; ++k) {
        const bool left = k == 0 || summed[k] > summed[k - 1];
        const bool right = k + 1 == n || summed[k] >= summed[k + 1];
        if (left && right && summed[k] >= min_counts && summed[k] > 0) {
            candidates.push_back({hist.bin_center_s(k), summed[k]});
        }
    }
    std::stable_sort(candidates.begin(), candidates.end(),
                     [](const HistogramPeak& a, const HistogramPeak& b) { return a.counts > b.counts; });
    std::vector<HistogramPeak> kept;
    for (const auto& c : candidates) {
        const bool clear = std::none_of(kept.begin(), kept.end(), [&](const HistogramPeak& k) {
            return std::abs(k.time_s - c.time_s) < min_separation_s;
        });
        if (clear) {
            kept.push_back(c);
        }
    }
    std::sort(kept.begin(), kept.end(),
              [](const HistogramPeak& a, const HistogramPeak& b) { return a.time_s < b.time_s; });
    return kept;
}

namespace {

// MLE of an exponential truncated to (0, L] from its sample mean.
Estimate truncated_exponential(double mean, double limit, std::size_t n)
{
    if (n < 2 || !(mean > 0.0) || !(mean < 0.5 * limit)) {
        throw FitDegenerate("not enough decay to fit a lifetime");
    }
    auto model_mean = [limit](double t) { return t - limit / std::expm1(limit / t); };
    double lo = 1e-6 * mean;
    double hi = 1e6 * limit;
    for (int it = 0; it < 200; ++it) {
        const double mid = std::sqrt(lo * hi);
        (model_mean(mid) < mean ? lo : hi) = mid;
    }
    const double t = std::sqrt(lo * hi);
    const double e = std::exp(-limit / t);
    const double info = 1.0 / (t * t) - limit * limit / std::pow(t, 4) * e / ((1 - e) * (1 - e));
    const double sigma = info > 0.0 ? 1.0 / std::sqrt(static_cast<double>(n) * info)
                                    : std::numeric_limits<double>::infinity();
    return {t, sigma};
}

} // namespace

ProfileFit fit_coincidence_profile(const std::vector<double>& deltas_s, double center_s,
                                   double half_range_s)
{
    if (!(half_range_s > 0.0)) {
        throw InvalidParameter("fit range must be positive");
    }
    double pos_sum = 0.0;
    double neg_sum = 0.0;
    ProfileFit f;
    for (double d : deltas_s) {
        const double y = d - center_s;
        if (y > 0.0 && y <= half_range_s) {
            pos_sum += y;
            ++f.positive;
        } else if (y < 0.0 && y >= -half_range_s) {
            neg_sum -= y;
            ++f.negative;
        }
    }
    if (f.positive == 0 || f.negative == 0) {
        throw FitDegenerate("both sides of the profile need counts");
    }
    f.signal_lifetime = truncated_exponential(pos_sum / static_cast<double>(f.positive),
                                              half_range_s, f.positive);
    f.idler_lifetime = truncated_exponential(neg_sum / static_cast<double>(f.negative),
                                             half_range_s, f.negative);
    f.fwhm.value = kLn2 * (f.signal_lifetime.value + f.idler_lifetime.value);
    f.fwhm.sigma = kLn2 * std::hypot(f.signal_lifetime.sigma, f.idler_lifetime.sigma);
    return f;
}

double histogram_fwhm(const CoincidenceHistogram& hist)
{
    const auto& c = hist.counts;
    if (c.empty()) {
        throw FitDegenerate("empty histogram");
    }
    const auto peak_it = std::max_element(c.begin(), c.end());
    if (*peak_it == 0) {
        throw FitDegenerate("empty histogram");
    }
    const auto peak = static_cast<std::size_t>(peak_it - c.begin());
    const double half = 0.5 * static_cast<double>(*peak_it);
    auto value = [&](std::size_t k) { return static_cast<double>(c[k]); };
    std::size_t l = peak;
    while (l > 0 && value(l - 1) > half) {
        --l;
    }
    std::size_t r = peak;
    while (r + 1 < c.size() && value(r + 1) > half) {
        ++r;
    }
    if (l == 0 || r + 1 == c.size()) {
        throw FitDegenerate("peak does not fall to half maximum inside the range");
    }
    const double left = hist.bin_center_s(l - 1) +
                        (half - value(l - 1)) / (value(l) - value(l - 1)) * hist.bin_width_s();
    const double right = hist.bin_center_s(r) +
                         (value(r) - half) / (value(r) - value(r + 1)) * hist.bin_width_s();
    return right - left;
}

void write_histogram_csv(std::ostream& out, const CoincidenceHistogram& hist)
{
    out << "tau_ps,counts\n";
    for (std::size_t k = 0; k < hist.counts.size(); ++k) {
        out << hist.origin_ps + static_cast<Picoseconds>(k) * hist.bin_width_ps +
                   hist.bin_width_ps / 2
            << ',' << hist.counts[k] << '\n';
    }
}

} // namespace echolab
