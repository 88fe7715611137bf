#include "transq/scaling.hpp"

#include <algorithm>
#include <cmath>

#include "transq/csv.hpp"
#include "transq/errors.hpp"

namespace transq {

Rational alpha(int ell) {
    if (ell < 1) throw InvalidArgument("alpha: contact order must be >= 1, got " + std::to_string(ell));
    return Rational(2 * ell, 2 * ell + 1);
}

std::vector<double> limit_grid(double horizon, double step) {
    if (!(step > 0.0) || !(horizon >= 0.0)) throw InvalidArgument("limit_grid: need step > 0, horizon >= 0");
    std::vector<double> grid;
    const auto count = static_cast<std::size_t>(std::floor(horizon / step + 1e-9));
    for (std::size_t i = 0; i <= count; ++i) grid.push_back(static_cast<double>(i) * step);
    return grid;
}

RescaledPath rescale_embedded(const EmbeddedPath& path, std::size_t n, int ell,
                              const std::vector<double>& grid, EmbeddedSeries series) {
    const Rational a = alpha(ell);
    RescaledPath out{grid, {}, n, a / 2, a};
    const double time_scale = pow_rational(static_cast<double>(n), a);
    const double space_scale = pow_rational(static_cast<double>(n), a / 2);
    const auto& raw = series == EmbeddedSeries::N ? path.N : path.Q;
    out.values.reserve(grid.size());
    for (double t : grid) {
        const auto k = static_cast<std::size_t>(std::floor(t * time_scale));
        if (k > raw.size()) {
            throw InvalidArgument("rescale_embedded: grid time " + fmt(t) + " needs step " + std::to_string(k) +
                                  " but the path has " + std::to_string(raw.size()));
        }
        const std::int64_t v = k == 0 ? path.initial_level : raw[k - 1];
        out.values.push_back(static_cast<double>(v) / space_scale);
    }
    return out;
}

RescaledPath rescale_physical(const QueuePath& path, std::size_t n, const std::vector<double>& grid, int ell) {
    const Rational a = alpha(ell);
    RescaledPath out{grid, {}, n, a / 2, a - 1};
    const double time_scale = pow_rational(static_cast<double>(n), a - 1);
    const double space_scale = pow_rational(static_cast<double>(n), a / 2);
    out.values.reserve(grid.size());
    std::size_t e = 0;
    std::size_t level = 0;
    for (double t : grid) {
        const double phys = t * time_scale;
        while (e < path.events.size() && path.events[e].time <= phys) level = path.events[e++].level;
        out.values.push_back(static_cast<double>(level) / space_scale);
    }
    return out;
}

std::vector<std::int64_t> raw_indices(const RescaledPath& path) {
    const double time_scale = pow_rational(static_cast<double>(path.n), path.time_exp);
    std::vector<std::int64_t> out;
    for (double t : path.times) out.push_back(static_cast<std::int64_t>(std::floor(t * time_scale)));
    return out;
}

std::vector<std::int64_t> raw_values(const RescaledPath& path) {
    const double space_scale = pow_rational(static_cast<double>(path.n), path.space_exp);
    std::vector<std::int64_t> out;
    for (double v : path.values) out.push_back(std::llround(v * space_scale));
    return out;
}

double load_factor(const ArrivalModel& arrival, const ServiceModel& service, std::size_t n, double beta,
                   int ell) {
    HeavyTrafficConfig cfg{n, beta, ell, 0.0};
    const double mean_d = service.mean() * cfg.service_multiplier();
    return static_cast<double>(n) * arrival.density_at_zero().f0 * mean_d;
}

double criticality_residual(const ArrivalModel& arrival, const ServiceModel& service, std::size_t n,
                            double beta, int ell) {
    const double target = 1.0 + beta / pow_rational(static_cast<double>(n), alpha(ell) / 2);
    return load_factor(arrival, service, n, beta, ell) - target;
}

void write_csv(std::ostream& os, const RescaledPath& path) {
    os << "t,value,n,space_exp,time_exp\n";
    for (std::size_t i = 0; i < path.times.size(); ++i) {
        os << fmt(path.times[i]) << ',' << fmt(path.values[i]) << ',' << path.n << ',' << path.space_exp
           << ',' << path.time_exp << '\n';
    }
}

}  // namespace transq
