#pragma once

#include <optional>
#include <ostream>
#include <vector>

#include "transq/dist.hpp"
#include "transq/rng.hpp"
#include "transq/validation.hpp"

namespace transq {

// W(t) = q + a t + c t^m + sigma B(t).
struct DriftSpec {
    double q = 0.0;
    double a = 0.0;
    double c = -0.5;
    int m = 2;
    double sigma = 1.0;

    // Exponential(lambda) clocks: (q, beta lambda, -lambda^2/2, 2, lambda^{3/2} sqrt(E[S^2])).
    static DriftSpec exponential_arrivals(double q, double beta, double lambda, double service_second_moment);
    // Physical queue with general clocks and contact order l:
    // (q, beta f0, f^{(l)}(0)/(l+1)!, l+1, f0^{3/2} sqrt(E[S^2])). For l = 1 the
    // parabolic coefficient is f'(0)/2. `service` must be critical.
    static DriftSpec general_arrivals(double q, double beta, const ArrivalModel& arrival,
                                      const ServiceModel& service);
    // Embedded process with general clocks: (0, beta, f'(0)/(2 f0^2), 2, f0 sqrt(E[S^2])).
    static DriftSpec embedded_general(double beta, const ArrivalModel& arrival, const ServiceModel& service);

    // a t + c t^m
    double drift(double t) const;
    void validate() const;
};

struct DiffusionPath {
    double dt = 0.0;
    std::vector<double> values;  // W(0), W(dt), ...
};

// W on the grid k dt, k <= round(horizon / dt): the deterministic part is
// evaluated exactly and sigma times a Gaussian random walk is added.
DiffusionPath simulate_w(const DriftSpec& spec, double horizon, double dt, Rng& rng);

// phi(f) = f - running min of (f ^ 0).
std::vector<double> reflect(const std::vector<double>& values);

// First grid time with W <= 0; empty when the path never gets there.
std::optional<double> hitting_time_zero(const DiffusionPath& path);

// Same as hitting_time_zero(simulate_w(...)) with the same stream, without storing the path.
std::optional<double> sample_hitting_time(const DriftSpec& spec, double horizon, double dt, Rng& rng);

// 4 (|a|/|c|)^{1/(m-1)} + 4 (q/|c|)^{1/m} + 20 sigma; needs c < 0.
double default_horizon(const DriftSpec& spec);

void write_csv(std::ostream& os, const DiffusionPath& path);

// Reflection map laws on a batch of random sequences.
CheckList check_reflection_laws(Rng& rng, int cases = 200);

}  // namespace transq
