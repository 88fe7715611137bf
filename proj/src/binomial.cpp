#include "transq/binomial.hpp"

#include <cmath>

#include "transq/errors.hpp"

namespace transq {

namespace {

std::int64_t btrs(Rng& rng, std::int64_t n, double p) {
    const double q = 1.0 - p;
    const double nd = static_cast<double>(n);
    const double spq = std::sqrt(nd * p * q);
    const double b = 1.15 + 2.53 * spq;
    const double a = -0.0873 + 0.0248 * b + 0.01 * p;
    const double c = nd * p + 0.5;
    const double vr = 0.92 - 4.2 / b;
    const double alpha = (2.83 + 5.1 / b) * spq;
    const double lpq = std::log(p / q);
    const double m = std::floor((nd + 1.0) * p);
    const double h = std::lgamma(m + 1.0) + std::lgamma(nd - m + 1.0);
    for (;;) {
        const double u = rng.uniform() - 0.5;
        double v = rng.uniform();
        const double us = 0.5 - std::abs(u);
        const double k = std::floor((2.0 * a / us + b) * u + c);
        if (k < 0.0 || k > nd) continue;
        if (us >= 0.07 && v <= vr) return static_cast<std::int64_t>(k);
        v = std::log(v * alpha / (a / (us * us) + b));
        if (v <= h - std::lgamma(k + 1.0) - std::lgamma(nd - k + 1.0) + (k - m) * lpq) {
            return static_cast<std::int64_t>(k);
        }
    }
}

}  // namespace

std::int64_t binomial_inverse(std::int64_t trials, double p, double u) {
    if (trials <= 0 || p <= 0.0) return 0;
    if (p >= 1.0) return trials;
    const double ratio = p / (1.0 - p);
    double pmf = std::exp(static_cast<double>(trials) * std::log1p(-p));
    double cdf = pmf;
    std::int64_t k = 0;
    while (cdf < u && k < trials) {
        pmf *= ratio * static_cast<double>(trials - k) / static_cast<double>(k + 1);
        ++k;
        cdf += pmf;
        if (pmf == 0.0 && cdf < u) break;  // rounding left a sliver of mass
    }
    return k;
}

std::int64_t sample_binomial(Rng& rng, std::int64_t trials, double p) {
    if (trials < 0 || !(p >= 0.0 && p <= 1.0)) {
        throw InvalidArgument("sample_binomial: need trials >= 0 and p in [0, 1]");
    }
    if (trials == 0 || p == 0.0) return 0;
    if (p == 1.0) return trials;
    if (p > 0.5) return trials - sample_binomial(rng, trials, 1.0 - p);
    if (static_cast<double>(trials) * p < 30.0) return binomial_inverse(trials, p, rng.uniform());
    return btrs(rng, trials, p);
}

}  // namespace transq
