#include "transq/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/special_functions/gamma.hpp>

#include "transq/errors.hpp"

namespace transq {

double stable_sum(const std::vector<double>& v) {
    double sum = 0.0, comp = 0.0;
    for (double x : v) {
        const double t = sum + x;
        comp += std::abs(sum) >= std::abs(x) ? (sum - t) + x : (x - t) + sum;
        sum = t;
    }
    return sum + comp;
}

double sample_std(const std::vector<double>& samples) {
    if (samples.size() < 2) throw InvalidArgument("sample_std: need at least two samples");
    const double mean = stable_sum(samples) / static_cast<double>(samples.size());
    std::vector<double> sq;
    sq.reserve(samples.size());
    for (double x : samples) sq.push_back((x - mean) * (x - mean));
    return std::sqrt(stable_sum(sq) / static_cast<double>(samples.size() - 1));
}

McSummary mc_summary(const std::vector<double>& samples, std::size_t censored) {
    if (samples.size() < 2) throw InvalidArgument("mc_summary: need at least two samples");
    McSummary s;
    s.count = samples.size();
    s.mean = stable_sum(samples) / static_cast<double>(s.count);
    s.std_error = sample_std(samples) / std::sqrt(static_cast<double>(s.count));
    s.ci95_low = s.mean - 1.96 * s.std_error;
    s.ci95_high = s.mean + 1.96 * s.std_error;
    s.censored_count = censored;
    return s;
}

nlohmann::json to_json(const McSummary& s) {
    return {{"count", s.count},         {"mean", s.mean},         {"std_error", s.std_error},
            {"ci95_low", s.ci95_low},   {"ci95_high", s.ci95_high}, {"censored_count", s.censored_count}};
}

double quantile(std::vector<double> samples, double p) {
    if (samples.empty()) throw InvalidArgument("quantile: empty sample");
    std::sort(samples.begin(), samples.end());
    const double h = (static_cast<double>(samples.size()) - 1.0) * p;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, samples.size() - 1);
    return samples[lo] + (h - static_cast<double>(lo)) * (samples[hi] - samples[lo]);
}

double silverman_bandwidth(const std::vector<double>& samples) {
    const double sd = sample_std(samples);
    const double iqr = quantile(samples, 0.75) - quantile(samples, 0.25);
    const double spread = iqr > 0.0 ? std::min(sd, iqr / 1.34) : sd;
    return 0.9 * spread * std::pow(static_cast<double>(samples.size()), -0.2);
}

std::vector<double> gaussian_kde(const std::vector<double>& samples, double bandwidth,
                                 const std::vector<double>& grid) {
    if (samples.empty()) throw InvalidArgument("gaussian_kde: empty sample");
    if (!(bandwidth > 0.0)) throw InvalidArgument("gaussian_kde: bandwidth must be positive");
    std::vector<double> sorted(samples);
    std::sort(sorted.begin(), sorted.end());
    const double norm = 1.0 / (static_cast<double>(sorted.size()) * bandwidth * std::sqrt(2.0 * std::numbers::pi));
    // Kernels further than 40 bandwidths away contribute below exp(-800).
    const double reach = 40.0 * bandwidth;
    std::vector<double> out;
    out.reserve(grid.size());
    for (double g : grid) {
        auto it = std::lower_bound(sorted.begin(), sorted.end(), g - reach);
        double sum = 0.0;
        for (; it != sorted.end() && *it <= g + reach; ++it) {
            const double z = (g - *it) / bandwidth;
            sum += std::exp(-0.5 * z * z);
        }
        out.push_back(sum * norm);
    }
    return out;
}

std::vector<double> gaussian_kde(const std::vector<double>& samples, const std::vector<double>& grid) {
    return gaussian_kde(samples, silverman_bandwidth(samples), grid);
}

double ks_distance(std::vector<double> samples, const std::function<double(double)>& cdf) {
    if (samples.empty()) throw InvalidArgument("ks_distance: empty sample");
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double f = cdf(samples[i]);
        d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
    }
    return d;
}

double ks_two_sample_distance(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw InvalidArgument("ks_two_sample_distance: empty sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] == x) ++i;
        while (j < b.size() && b[j] == x) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return d;
}

double ks_pvalue(double distance, double n_eff) {
    const double rn = std::sqrt(n_eff);
    const double lambda = (rn + 0.12 + 0.11 / rn) * distance;
    if (lambda < 0.2) return 1.0;
    double sum = 0.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = std::exp(-2.0 * k * k * lambda * lambda);
        sum += (k % 2 ? 2.0 : -2.0) * term;
        if (term < 1e-16) break;
    }
    return std::clamp(sum, 0.0, 1.0);
}

double chi_square_pvalue(double stat, double dof) {
    if (!(dof > 0.0)) throw InvalidArgument("chi_square_pvalue: dof must be positive");
    if (stat <= 0.0) return 1.0;
    return boost::math::gamma_q(0.5 * dof, 0.5 * stat);
}

double relative_error(double estimate, double exact) {
    if (exact == 0.0) throw InvalidArgument("relative_error: exact value is zero");
    return std::abs(estimate - exact) / std::abs(exact);
}

Histogram histogram(const std::vector<double>& samples, double lo, double hi, std::size_t bins) {
    if (!(hi > lo) || bins == 0) throw InvalidArgument("histogram: need hi > lo and bins > 0");
    if (samples.empty()) throw InvalidArgument("histogram: empty sample");
    Histogram h{lo, hi, std::vector<double>(bins, 0.0)};
    const double w = h.width();
    for (double x : samples) {
        if (x < lo || x >= hi) continue;
        const auto i = std::min(bins - 1, static_cast<std::size_t>((x - lo) / w));
        h.density[i] += 1.0;
    }
    for (auto& d : h.density) d /= static_cast<double>(samples.size()) * w;
    return h;
}

}  // namespace transq
