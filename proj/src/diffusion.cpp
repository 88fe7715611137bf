#include "transq/diffusion.hpp"

#include <algorithm>
#include <cmath>

#include "transq/csv.hpp"
#include "transq/errors.hpp"

namespace transq {

DriftSpec DriftSpec::exponential_arrivals(double q, double beta, double lambda, double service_second_moment) {
    DriftSpec s{q, beta * lambda, -0.5 * lambda * lambda, 2, std::pow(lambda, 1.5) * std::sqrt(service_second_moment)};
    s.validate();
    return s;
}

DriftSpec DriftSpec::general_arrivals(double q, double beta, const ArrivalModel& arrival,
                                      const ServiceModel& service) {
    const auto d = arrival.density_at_zero();
    if (!d.contact_order) throw InvalidArgument("general_arrivals: the clock law has no finite contact order");
    const int ell = *d.contact_order;
    double factorial = 1.0;
    for (int i = 2; i <= ell + 1; ++i) factorial *= i;
    DriftSpec s{q, beta * d.f0, arrival.contact_derivative() / factorial, ell + 1,
                std::pow(d.f0, 1.5) * std::sqrt(service.second_moment())};
    s.validate();
    return s;
}

DriftSpec DriftSpec::embedded_general(double beta, const ArrivalModel& arrival, const ServiceModel& service) {
    const auto d = arrival.density_at_zero();
    DriftSpec s{0.0, beta, d.f0_prime / (2.0 * d.f0 * d.f0), 2, d.f0 * std::sqrt(service.second_moment())};
    s.validate();
    return s;
}

double DriftSpec::drift(double t) const { return a * t + c * std::pow(t, m); }

void DriftSpec::validate() const {
    if (!(sigma > 0.0) || !std::isfinite(sigma)) throw InvalidArgument("DriftSpec: sigma must be positive");
    if (m < 2) throw InvalidArgument("DriftSpec: polynomial degree m must be >= 2");
    if (!std::isfinite(q) || !std::isfinite(a) || !std::isfinite(c)) {
        throw InvalidArgument("DriftSpec: coefficients must be finite");
    }
}

namespace {

std::size_t step_count(double horizon, double dt) {
    if (!(dt > 0.0)) throw InvalidArgument("diffusion: dt must be positive");
    if (!(horizon >= dt)) throw InvalidArgument("diffusion: horizon must be at least dt");
    return static_cast<std::size_t>(std::llround(horizon / dt));
}

}  // namespace

DiffusionPath simulate_w(const DriftSpec& spec, double horizon, double dt, Rng& rng) {
    spec.validate();
    const std::size_t steps = step_count(horizon, dt);
    DiffusionPath path{dt, {}};
    path.values.reserve(steps + 1);
    path.values.push_back(spec.q);
    const double scale = spec.sigma * std::sqrt(dt);
    double noise = 0.0;
    for (std::size_t k = 1; k <= steps; ++k) {
        noise += scale * rng.normal();
        path.values.push_back(spec.q + spec.drift(static_cast<double>(k) * dt) + noise);
    }
    return path;
}

std::vector<double> reflect(const std::vector<double>& values) {
    if (values.empty()) throw InvalidArgument("reflect: empty sequence");
    std::vector<double> out;
    out.reserve(values.size());
    double running_min = 0.0;
    for (double v : values) {
        running_min = std::min(running_min, v);
        out.push_back(v - running_min);
    }
    return out;
}

std::optional<double> hitting_time_zero(const DiffusionPath& path) {
    if (path.values.empty() || !(path.values.front() > 0.0)) {
        throw UndefinedBusyPeriod("hitting_time_zero: the path must start above 0");
    }
    for (std::size_t k = 1; k < path.values.size(); ++k) {
        if (path.values[k] <= 0.0) return static_cast<double>(k) * path.dt;
    }
    return std::nullopt;
}

std::optional<double> sample_hitting_time(const DriftSpec& spec, double horizon, double dt, Rng& rng) {
    spec.validate();
    if (!(spec.q > 0.0)) throw UndefinedBusyPeriod("sample_hitting_time: q must be positive");
    const std::size_t steps = step_count(horizon, dt);
    const double scale = spec.sigma * std::sqrt(dt);
    double noise = 0.0;
    for (std::size_t k = 1; k <= steps; ++k) {
        noise += scale * rng.normal();
        const double t = static_cast<double>(k) * dt;
        if (spec.q + spec.drift(t) + noise <= 0.0) return t;
    }
    return std::nullopt;
}

double default_horizon(const DriftSpec& spec) {
    spec.validate();
    if (!(spec.c < 0.0)) throw InvalidArgument("default_horizon: needs a negative polynomial coefficient c");
    const double ac = std::abs(spec.c);
    return 4.0 * std::pow(std::abs(spec.a) / ac, 1.0 / (spec.m - 1)) + 4.0 * std::pow(spec.q / ac, 1.0 / spec.m) +
           20.0 * spec.sigma;
}

void write_csv(std::ostream& os, const DiffusionPath& path) {
    const auto r = reflect(path.values);
    os << "t,W,reflected_W\n";
    for (std::size_t k = 0; k < path.values.size(); ++k) {
        os << fmt(static_cast<double>(k) * path.dt) << ',' << fmt(path.values[k]) << ',' << fmt(r[k]) << '\n';
    }
}

CheckList check_reflection_laws(Rng& rng, int cases) {
    bool nonneg = true, dominates = true, idempotent = true, shift = true;
    for (int i = 0; i < cases; ++i) {
        const std::size_t len = 1 + static_cast<std::size_t>(rng.uniform() * 200);
        std::vector<double> f(len);
        double level = 4.0 * (rng.uniform() - 0.5);
        for (auto& v : f) {
            level += rng.normal();
            v = level;
        }
        const auto r = reflect(f);
        for (std::size_t k = 0; k < len; ++k) {
            if (r[k] < 0.0) nonneg = false;
            if (r[k] < f[k]) dominates = false;
        }
        if (reflect(r) != r) idempotent = false;
        // Lift f until it is nonnegative; the map must then be the identity.
        const double c0 = -std::min(0.0, *std::min_element(f.begin(), f.end())) + rng.uniform();
        std::vector<double> lifted(f);
        for (auto& v : lifted) v += c0;
        if (reflect(lifted) != lifted) shift = false;
    }
    return {{"diffusion.reflection.nonnegative", nonneg, ""},
            {"diffusion.reflection.dominates_input", dominates, ""},
            {"diffusion.reflection.idempotent", idempotent, ""},
            {"diffusion.reflection.identity_on_nonnegative", shift, ""}};
}

}  // namespace transq
