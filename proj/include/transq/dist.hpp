#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "transq/rng.hpp"
#include "transq/validation.hpp"

namespace transq {

// ---------------------------------------------------------------------------
// Arrival clocks
// ---------------------------------------------------------------------------

struct ExponentialArrival {
    double rate;
};

struct HyperexponentialArrival {
    std::vector<double> weights;
    std::vector<double> rates;
};

struct HalfNormalArrival {
    double scale;
};

// Uniform on [0, 1].
struct UniformArrival {};

using ArrivalParams =
    std::variant<ExponentialArrival, HyperexponentialArrival, HalfNormalArrival, UniformArrival>;

// Local behaviour of the clock density at the origin.
struct DensityAtZero {
    double f0;
    double f0_prime;
    // Order of contact of f_T(t)E[S] - 1 at 0 once critical; empty for the
    // uniform law, whose density is flat (infinite order).
    std::optional<int> contact_order;
};

/// Distribution of a customer's arrival clock T.
///
/// Besides the usual CDF/density pair, the model exposes the cumulative hazard
/// H(t) = -log(1 - F_T(t)) and its inverse. Order statistics are generated as
/// T_(i) = H^{-1}(E_(i)) from exponential order statistics, which avoids the
/// cancellation in 1 - exp(-E) for the tiny clock values the heavy-traffic
/// regime cares about.
class ArrivalModel {
public:
    static ArrivalModel exponential(double rate);
    static ArrivalModel hyperexponential(std::vector<double> weights, std::vector<double> rates);
    static ArrivalModel half_normal(double scale);
    static ArrivalModel uniform();

    const ArrivalParams& params() const noexcept { return params_; }
    std::string_view kind() const noexcept;

    double cdf(double t) const;
    double survival(double t) const;
    double density(double t) const;
    double cumulative_hazard(double t) const;
    // Solves H(t) = h; closed form where available, safeguarded Newton otherwise.
    double inverse_cumulative_hazard(double h) const;
    double inverse_cdf(double p) const;

    DensityAtZero density_at_zero() const;
    std::optional<int> contact_order() const { return density_at_zero().contact_order; }
    // f_T^{(l)}(0) for the declared contact order l.
    double contact_derivative() const;

    double sample(Rng& rng) const;

private:
    explicit ArrivalModel(ArrivalParams p) : params_(std::move(p)) {}
    ArrivalParams params_;
};

// Order statistics T_(1) <= ... <= T_(n) via exponential spacings.
std::vector<double> sample_sorted_clocks(const ArrivalModel& model, std::size_t n, Rng& rng);

// Lazily produces the same order statistics one at a time; the simulators
// only ever need the clocks that ring before the first busy period ends.
class SortedClockStream {
public:
    SortedClockStream(const ArrivalModel& model, std::size_t n, Rng& rng)
        : model_(&model), rng_(&rng), n_(n) {}

    std::size_t remaining() const noexcept { return n_ - drawn_ + (peeked_ ? 1 : 0); }
    bool exhausted() const noexcept { return remaining() == 0; }

    double peek() {
        if (!peeked_) {
            next_value_ = draw();
            peeked_ = true;
        }
        return next_value_;
    }

    double next() {
        const double v = peek();
        peeked_ = false;
        return v;
    }

private:
    double draw() {
        spacing_sum_ += rng_->exponential() / static_cast<double>(n_ - drawn_);
        ++drawn_;
        return model_->inverse_cumulative_hazard(spacing_sum_);
    }

    const ArrivalModel* model_;
    Rng* rng_;
    std::size_t n_;
    std::size_t drawn_ = 0;
    double spacing_sum_ = 0.0;
    double next_value_ = 0.0;
    bool peeked_ = false;
};

// ---------------------------------------------------------------------------
// Service requirements
// ---------------------------------------------------------------------------

struct DeterministicService {
    double value;
};

struct ExponentialService {
    double mean;
};

// User-supplied sampler with declared first two moments.
struct GeneralService {
    std::function<double(Rng&)> sampler;
    double mean;
    double second_moment;
    std::string label;
};

using ServiceParams = std::variant<DeterministicService, ExponentialService, GeneralService>;

class ServiceModel {
public:
    static ServiceModel deterministic(double value);
    static ServiceModel exponential(double mean);
    static ServiceModel general(std::function<double(Rng&)> sampler, double mean,
                                double second_moment, std::string label = "general");

    const ServiceParams& params() const noexcept { return params_; }
    std::string_view kind() const noexcept;

    double mean() const;
    double second_moment() const;
    double sample(Rng& rng) const;

    // The law of gamma * S.
    ServiceModel scaled(double gamma) const;

private:
    explicit ServiceModel(ServiceParams p) : params_(std::move(p)) {}
    ServiceParams params_;
};

struct CriticalScaling {
    double gamma;
    ServiceModel service;
};

// Multiplier gamma with f_T(0) * E[gamma S] = 1, and the rescaled service law.
CriticalScaling critical_service_scale(const ArrivalModel& arrival, const ServiceModel& service);

struct ModelPair {
    ArrivalModel arrival;
    ServiceModel service;
};

nlohmann::json to_json(const ArrivalModel& model);
nlohmann::json to_json(const ServiceModel& model);
nlohmann::json to_json(const ModelPair& models);
ArrivalModel arrival_from_json(const nlohmann::json& j, const std::string& path = "arrival");
ServiceModel service_from_json(const nlohmann::json& j, const std::string& path = "service");
ModelPair models_from_json(const nlohmann::json& j, const std::string& path = "model");

// Numerical checks of the analytic declarations (CDF shape, f0, f'(0),
// maximum at zero, contact order) and of the service moments.
CheckList validate_arrival(const ArrivalModel& model);
CheckList validate_service(const ServiceModel& model, std::uint64_t seed = 7,
                           std::size_t draws = 1'000'000);

}  // namespace transq
