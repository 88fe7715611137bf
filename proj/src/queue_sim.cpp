#include "transq/queue_sim.hpp"

#include <algorithm>
#include <cmath>

#include "transq/binomial.hpp"
#include "transq/csv.hpp"
#include "transq/errors.hpp"

namespace transq {

Rational HeavyTrafficConfig::alpha() const {
    if (ell < 1) throw InvalidArgument("contact order ell must be >= 1");
    return Rational(2 * ell, 2 * ell + 1);
}

double HeavyTrafficConfig::service_multiplier() const {
    const double nd = static_cast<double>(n);
    return (1.0 + beta / pow_rational(nd, alpha() / 2)) / nd;
}

std::size_t HeavyTrafficConfig::initial_queue() const {
    const double x = q * pow_rational(static_cast<double>(n), alpha() / 2);
    const double nearest = std::round(x);
    if (std::abs(x - nearest) <= 1e-9 * std::max(1.0, nearest)) return static_cast<std::size_t>(nearest);
    return static_cast<std::size_t>(std::ceil(x));
}

void HeavyTrafficConfig::validate() const {
    if (n < 1) throw InvalidArgument("population size n must be >= 1");
    if (ell < 1) throw InvalidArgument("contact order ell must be >= 1");
    if (!std::isfinite(beta)) throw InvalidArgument("beta must be finite");
    if (!(q >= 0.0) || !std::isfinite(q)) throw InvalidArgument("q must be a nonnegative real");
    if (!(service_multiplier() > 0.0)) {
        throw InvalidArgument("1 + beta n^{-alpha/2} must be positive");
    }
}

const char* to_string(EventKind kind) noexcept {
    switch (kind) {
        case EventKind::initial: return "initial";
        case EventKind::arrival: return "arrival";
        case EventKind::departure: return "departure";
    }
    return "?";
}

QueuePath simulate_delta_queue(const HeavyTrafficConfig& cfg, const ArrivalModel& arrival,
                               const ServiceModel& service, Rng& rng, const SimLimits& limits) {
    cfg.validate();
    if (!(limits.horizon > 0.0)) throw InvalidArgument("horizon must be positive");
    constexpr double inf = std::numeric_limits<double>::infinity();

    const std::size_t m = cfg.initial_queue();
    const double mult = cfg.service_multiplier();
    SortedClockStream clocks(arrival, cfg.n, rng);

    QueuePath path;
    path.initial_level = m;
    std::size_t level = m;
    double now = 0.0;
    double next_departure = inf;
    bool first_started = m > 0;
    double first_start = 0.0;
    if (m > 0) {
        if (limits.record_events) path.events.push_back({0.0, EventKind::initial, m});
        next_departure = mult * service.sample(rng);
    }

    for (;;) {
        const double next_arrival = clocks.exhausted() ? inf : clocks.peek();
        if (next_arrival == inf && next_departure == inf) break;
        const bool departs = next_departure <= next_arrival;
        const double te = departs ? next_departure : next_arrival;
        if (te > limits.horizon) {
            if (level == 0) path.total_idle += limits.horizon - now;
            now = limits.horizon;
            break;
        }
        if (departs) {
            --level;
            ++path.served_count;
            next_departure = level > 0 ? te + mult * service.sample(rng) : inf;
        } else {
            clocks.next();
            if (level == 0) {
                path.total_idle += te - now;
                if (!first_started) {
                    first_started = true;
                    first_start = te;
                }
                next_departure = te + mult * service.sample(rng);
            }
            ++level;
        }
        now = te;
        if (limits.record_events) {
            path.events.push_back({te, departs ? EventKind::departure : EventKind::arrival, level});
        }
        if (departs && level == 0 && !path.first_busy_period) {
            path.first_busy_period = te - first_start;
            if (limits.stop_at_first_empty) break;
        }
    }
    path.end_time = now;
    return path;
}

std::optional<double> first_busy_period(const QueuePath& path) {
    if (path.events.empty()) {
        if (path.initial_level == 0) {
            throw UndefinedBusyPeriod("first busy period needs a nonempty system at time 0");
        }
        return path.first_busy_period;
    }
    const auto& first = path.events.front();
    if (first.time != 0.0 || first.level == 0) {
        throw UndefinedBusyPeriod("first busy period needs a nonempty system at time 0");
    }
    for (const auto& e : path.events) {
        if (e.level == 0) return e.time;
    }
    return std::nullopt;
}

void write_csv(std::ostream& os, const QueuePath& path) {
    os << "time,kind,level\n";
    for (const auto& e : path.events) {
        os << fmt(e.time) << ',' << to_string(e.kind) << ',' << e.level << '\n';
    }
}

// ---------------------------------------------------------------------------
// Embedded process
// ---------------------------------------------------------------------------

std::int64_t embedded_initial_level(const HeavyTrafficConfig& cfg) {
    const auto m = static_cast<std::int64_t>(cfg.initial_queue());
    return m > 0 ? m - 1 : 0;
}

namespace {

// Shared bookkeeping of both embedded models.
class EmbeddedRecorder {
public:
    EmbeddedRecorder(const HeavyTrafficConfig& cfg, std::size_t steps) {
        path_.initial_level = embedded_initial_level(cfg);
        q_ = n_ = path_.initial_level;
        present_ = static_cast<std::int64_t>(cfg.initial_queue());
        path_.Q.reserve(steps);
        path_.N.reserve(steps);
        path_.A.reserve(steps);
        path_.busy_starts.reserve(steps);
        path_.virtual_idle_total.reserve(steps);
    }

    // True when the previous completion left nobody behind.
    bool needs_pull() const noexcept { return present_ == 0; }

    void add_idle(double t) { idle_ += t; }

    void step(std::int64_t arrivals) {
        present_ = q_ + arrivals;
        q_ = std::max<std::int64_t>(present_ - 1, 0);
        n_ += arrivals - 1;
        min_n_ = std::min(min_n_, n_);
        path_.Q.push_back(q_);
        path_.N.push_back(n_);
        path_.A.push_back(arrivals);
        path_.busy_starts.push_back(-min_n_);
        path_.virtual_idle_total.push_back(idle_);
    }

    EmbeddedPath take() { return std::move(path_); }

private:
    EmbeddedPath path_;
    std::int64_t q_ = 0;
    std::int64_t n_ = 0;
    std::int64_t min_n_ = 0;
    std::int64_t present_ = 0;
    double idle_ = 0.0;
};

[[noreturn]] void exhausted(std::size_t k) {
    throw PopulationExhausted("population exhausted at embedded step " + std::to_string(k) +
                              ": the system is empty and no customers remain");
}

}  // namespace

EmbeddedPath simulate_embedded_exponential(const HeavyTrafficConfig& cfg, double rate,
                                           const ServiceModel& service, std::size_t steps, Rng& rng) {
    cfg.validate();
    if (!(rate > 0.0)) throw InvalidArgument("arrival rate must be positive");
    const double mult = cfg.service_multiplier();
    EmbeddedRecorder rec(cfg, steps);
    auto remaining = static_cast<std::int64_t>(cfg.n);
    for (std::size_t k = 1; k <= steps; ++k) {
        if (rec.needs_pull()) {
            if (remaining == 0) exhausted(k);
            rec.add_idle(rng.exponential() / (rate * static_cast<double>(remaining)));
            --remaining;
        }
        const double d = mult * service.sample(rng);
        const auto a = sample_binomial(rng, remaining, -std::expm1(-rate * d));
        remaining -= a;
        rec.step(a);
    }
    return rec.take();
}

EmbeddedPath simulate_embedded_general(const HeavyTrafficConfig& cfg, const ArrivalModel& arrival,
                                       const ServiceModel& service, std::size_t steps, Rng& rng) {
    cfg.validate();
    const double mult = cfg.service_multiplier();
    EmbeddedRecorder rec(cfg, steps);
    SortedClockStream clocks(arrival, cfg.n, rng);
    double now = 0.0;
    for (std::size_t k = 1; k <= steps; ++k) {
        if (rec.needs_pull()) {
            if (clocks.exhausted()) exhausted(k);
            const double pulled = clocks.next();
            if (pulled > now) {
                rec.add_idle(pulled - now);
                now = pulled;
            }
        }
        const double end = now + mult * service.sample(rng);
        std::int64_t a = 0;
        while (!clocks.exhausted() && clocks.peek() <= end) {
            clocks.next();
            ++a;
        }
        now = end;
        rec.step(a);
    }
    return rec.take();
}

void write_csv(std::ostream& os, const EmbeddedPath& path) {
    os << "step,Q,N,A,beta_n\n";
    os << 0 << ',' << path.initial_level << ',' << path.initial_level << ",0,0\n";
    for (std::size_t k = 0; k < path.steps(); ++k) {
        os << k + 1 << ',' << path.Q[k] << ',' << path.N[k] << ',' << path.A[k] << ','
           << path.busy_starts[k] << '\n';
    }
}

CheckList check_embedded_identities(const EmbeddedPath& path) {
    bool lindley = true, reflection = true, busy = true, increments = true;
    std::int64_t q_prev = path.initial_level, n_prev = path.initial_level;
    std::int64_t running_min = std::min<std::int64_t>(path.initial_level, 0);
    for (std::size_t k = 0; k < path.steps(); ++k) {
        const std::int64_t q = path.Q[k], n = path.N[k], a = path.A[k];
        if (q != std::max<std::int64_t>(q_prev + a - 1, 0)) lindley = false;
        if (n != n_prev + a - 1) increments = false;
        running_min = std::min(running_min, std::min<std::int64_t>(n, 0));
        if (q != n - running_min) reflection = false;
        if (path.busy_starts[k] != -running_min) busy = false;
        q_prev = q;
        n_prev = n;
    }
    return {{"queue_sim.embedded.lindley_recursion", lindley, ""},
            {"queue_sim.embedded.free_process_increments", increments, ""},
            {"queue_sim.embedded.reflection", reflection, "Q = phi(N)"},
            {"queue_sim.embedded.busy_starts", busy, "beta_n = -min(N ^ 0)"}};
}

}  // namespace transq
