#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <ostream>
#include <vector>

#include "transq/dist.hpp"
#include "transq/rational.hpp"
#include "transq/rng.hpp"
#include "transq/validation.hpp"

namespace transq {

struct HeavyTrafficConfig {
    std::size_t n = 1;
    double beta = 0.0;
    int ell = 1;
    double q = 0.0;

    // alpha = ell / (ell + 1/2).
    Rational alpha() const;
    // (1 + beta n^{-alpha/2}) / n, the factor turning S into D.
    double service_multiplier() const;
    // ceil(q n^{alpha/2}); values within 1e-9 relative of an integer snap to it.
    std::size_t initial_queue() const;

    void validate() const;
};

// ---------------------------------------------------------------------------
// Physical queue
// ---------------------------------------------------------------------------

enum class EventKind { initial, arrival, departure };

const char* to_string(EventKind kind) noexcept;

struct QueueEvent {
    double time;
    EventKind kind;
    std::size_t level;  // number in system after the event
};

struct QueuePath {
    std::vector<QueueEvent> events;
    std::size_t initial_level = 0;
    // Length of the first busy period; empty when censored by the horizon.
    std::optional<double> first_busy_period;
    double total_idle = 0.0;
    std::size_t served_count = 0;
    // Physical time at which recording stopped.
    double end_time = 0.0;

    bool censored() const noexcept { return !first_busy_period.has_value(); }
};

struct SimLimits {
    double horizon = std::numeric_limits<double>::infinity();
    // Stop as soon as the first busy period ends.
    bool stop_at_first_empty = false;
    bool record_events = true;
};

// FIFO single server fed by n customers arriving at sorted clock times, plus
// cfg.initial_queue() customers present at time 0. `service` must already be
// critical; each requirement is multiplied by cfg.service_multiplier().
QueuePath simulate_delta_queue(const HeavyTrafficConfig& cfg, const ArrivalModel& arrival,
                               const ServiceModel& service, Rng& rng, const SimLimits& limits = {});

// Length of the first busy period of a path that starts nonempty; empty if censored.
std::optional<double> first_busy_period(const QueuePath& path);

void write_csv(std::ostream& os, const QueuePath& path);

// ---------------------------------------------------------------------------
// Embedded process (no idling)
// ---------------------------------------------------------------------------

/// Queue observed just after each service completion.
///
/// Q[k-1], N[k-1], A[k-1] and busy_starts[k-1] hold step k. Q counts waiting
/// customers, excluding the one who enters service next, so that
/// Q(k) = (Q(k-1) + A(k) - 1)^+ with Q(0) = N(0) = initial_level. When the
/// system is empty after a completion the earliest remaining customer is
/// pulled from the population and served at once.
struct EmbeddedPath {
    std::int64_t initial_level = 0;
    std::vector<std::int64_t> Q;
    std::vector<std::int64_t> N;
    std::vector<std::int64_t> A;
    std::vector<std::int64_t> busy_starts;
    // Cumulative virtual idle time after each step.
    std::vector<double> virtual_idle_total;

    std::size_t steps() const noexcept { return Q.size(); }
};

// Initial embedded level for an initial physical queue of m customers: one of
// them is in service, so m - 1 wait.
std::int64_t embedded_initial_level(const HeavyTrafficConfig& cfg);

// Arrivals per step are Binomial(R, 1 - exp(-rate D_k)) with R the number of
// customers still in the population; idle periods are Exp(rate R).
EmbeddedPath simulate_embedded_exponential(const HeavyTrafficConfig& cfg, double rate,
                                           const ServiceModel& service, std::size_t steps, Rng& rng);

// Fixed clocks. A step counts the remaining clocks inside its service window;
// after a pull the window starts at the pulled customer's clock.
EmbeddedPath simulate_embedded_general(const HeavyTrafficConfig& cfg, const ArrivalModel& arrival,
                                       const ServiceModel& service, std::size_t steps, Rng& rng);

void write_csv(std::ostream& os, const EmbeddedPath& path);

CheckList check_embedded_identities(const EmbeddedPath& path);

}  // namespace transq
