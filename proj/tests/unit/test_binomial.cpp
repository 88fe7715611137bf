#include <doctest.h>

#include <cmath>
#include <vector>

#include "transq/binomial.hpp"
#include "transq/stats.hpp"

using namespace transq;

namespace {

std::vector<double> pmf(std::int64_t n, double p) {
    std::vector<double> out(static_cast<std::size_t>(n + 1));
    for (std::int64_t k = 0; k <= n; ++k) {
        out[static_cast<std::size_t>(k)] =
            std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0) + k * std::log(p) +
                     (n - k) * std::log1p(-p));
    }
    return out;
}

double gof_pvalue(std::int64_t n, double p, int draws, std::uint64_t seed) {
    Rng rng(seed);
    const auto probs = pmf(n, p);
    std::vector<double> counts(probs.size(), 0.0);
    for (int i = 0; i < draws; ++i) counts[static_cast<std::size_t>(sample_binomial(rng, n, p))] += 1.0;
    // Pool cells with expected count below 5 into their neighbours.
    double stat = 0.0, exp_acc = 0.0, obs_acc = 0.0;
    int cells = 0;
    for (std::size_t k = 0; k < probs.size(); ++k) {
        exp_acc += probs[k] * draws;
        obs_acc += counts[k];
        if (exp_acc >= 5.0 || k + 1 == probs.size()) {
            stat += (obs_acc - exp_acc) * (obs_acc - exp_acc) / std::max(exp_acc, 1e-300);
            ++cells;
            exp_acc = obs_acc = 0.0;
        }
    }
    return chi_square_pvalue(stat, cells - 1);
}

}  // namespace

TEST_CASE("binomial sampler matches the pmf in both regimes") {
    CHECK(gof_pvalue(20, 0.3, 100000, 1) > 0.001);     // inversion
    CHECK(gof_pvalue(1000, 0.2, 100000, 2) > 0.001);   // BTRS
    CHECK(gof_pvalue(1000, 0.9, 100000, 3) > 0.001);   // complement
    CHECK(gof_pvalue(100000, 1e-4, 100000, 4) > 0.001);
}

TEST_CASE("binomial edge cases") {
    Rng rng(1);
    CHECK(sample_binomial(rng, 0, 0.5) == 0);
    CHECK(sample_binomial(rng, 10, 0.0) == 0);
    CHECK(sample_binomial(rng, 10, 1.0) == 10);
}

TEST_CASE("binomial inversion is monotone in p") {
    Rng rng(9);
    for (int i = 0; i < 5000; ++i) {
        const double u = rng.uniform();
        const double p1 = rng.uniform() * 0.5;
        const double p2 = p1 + rng.uniform() * (1.0 - p1);
        CHECK(binomial_inverse(50, p1, u) <= binomial_inverse(50, p2, u));
    }
}
