#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include <nlohmann/json.hpp>

namespace transq {

struct McSummary {
    std::size_t count = 0;
    double mean = 0.0;
    double std_error = 0.0;
    double ci95_low = 0.0;
    double ci95_high = 0.0;
    std::size_t censored_count = 0;
};

// Unbiased mean and standard error of the uncensored samples.
McSummary mc_summary(const std::vector<double>& samples, std::size_t censored = 0);
nlohmann::json to_json(const McSummary& s);

// Neumaier-compensated sum in index order.
double stable_sum(const std::vector<double>& v);

double sample_std(const std::vector<double>& samples);
// Linear-interpolation quantile (type 7) of unsorted samples.
double quantile(std::vector<double> samples, double p);

// 0.9 min(std, IQR / 1.34) count^{-1/5}.
double silverman_bandwidth(const std::vector<double>& samples);

std::vector<double> gaussian_kde(const std::vector<double>& samples, double bandwidth, const std::vector<double>& grid);
std::vector<double> gaussian_kde(const std::vector<double>& samples, const std::vector<double>& grid);

// sup |F_n - F| over the sample points (both one-sided gaps).
double ks_distance(std::vector<double> samples, const std::function<double(double)>& cdf);
double ks_two_sample_distance(std::vector<double> a, std::vector<double> b);
// Asymptotic Kolmogorov tail with Stephens' small-sample correction; for two
// samples use n_eff = n m / (n + m).
double ks_pvalue(double distance, double n_eff);

// P(chi^2_dof > stat).
double chi_square_pvalue(double stat, double dof);

double relative_error(double estimate, double exact);

struct Histogram {
    double lo = 0.0;
    double hi = 0.0;
    std::vector<double> density;  // count / (total * width); total includes out-of-range samples
    double width() const { return (hi - lo) / static_cast<double>(density.size()); }
    double center(std::size_t i) const { return lo + (static_cast<double>(i) + 0.5) * width(); }
};

Histogram histogram(const std::vector<double>& samples, double lo, double hi, std::size_t bins);

}  // namespace transq
