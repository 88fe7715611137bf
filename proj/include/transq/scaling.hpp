#pragma once

#include <cstddef>
#include <cstdint>
#include <ostream>
#include <vector>

#include "transq/dist.hpp"
#include "transq/queue_sim.hpp"
#include "transq/rational.hpp"

namespace transq {

// alpha(l) = 2l / (2l + 1), exact.
Rational alpha(int ell);

// A raw trajectory viewed on the limit scales:
// values[i] = raw(floor(times[i] * n^time_exp)) * n^(-space_exp).
struct RescaledPath {
    std::vector<double> times;
    std::vector<double> values;
    std::size_t n = 0;
    Rational space_exp;
    Rational time_exp;
};

// {0, step, 2 step, ...} up to and including horizon (up to rounding).
std::vector<double> limit_grid(double horizon, double step = 0.05);

enum class EmbeddedSeries { N, Q };

// Embedded index k = floor(t n^alpha); space scale n^{alpha/2}. Index 0 is the
// initial level. Grid points past the recorded steps are rejected.
RescaledPath rescale_embedded(const EmbeddedPath& path, std::size_t n, int ell,
                              const std::vector<double>& grid, EmbeddedSeries series = EmbeddedSeries::N);

// Physical time t n^{alpha-1} (t n^{-1/3} for l = 1), space scale n^{alpha/2}.
// The level after the last recorded event is held, so the path must have been
// simulated at least up to the last grid time.
RescaledPath rescale_physical(const QueuePath& path, std::size_t n, const std::vector<double>& grid,
                              int ell = 1);

// Inverse relabelling for integer-valued embedded paths: (index, raw value) pairs.
std::vector<std::int64_t> raw_indices(const RescaledPath& path);
std::vector<std::int64_t> raw_values(const RescaledPath& path);

// rho_n = n f_T(0) E[D] with D = S (1 + beta n^{-alpha/2}) / n.
double load_factor(const ArrivalModel& arrival, const ServiceModel& service, std::size_t n, double beta,
                   int ell);

// rho_n - (1 + beta n^{-alpha/2}); zero up to rounding for a critical service law.
double criticality_residual(const ArrivalModel& arrival, const ServiceModel& service, std::size_t n,
                            double beta, int ell);

void write_csv(std::ostream& os, const RescaledPath& path);

}  // namespace transq
