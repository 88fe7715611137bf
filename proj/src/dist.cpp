#include "transq/dist.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>

#include "transq/errors.hpp"

namespace transq {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

constexpr double kInf = std::numeric_limits<double>::infinity();

// log(erfc(z)) without underflow for large z.
double log_erfc(double z) {
    if (z < 0.5) return std::log1p(-std::erf(z));
    if (z < 20.0) return std::log(std::erfc(z));
    const double z2 = z * z;
    const double series = 1.0 - 1.0 / (2.0 * z2) + 3.0 / (4.0 * z2 * z2);
    return -z2 - std::log(z * std::sqrt(std::numbers::pi)) + std::log(series);
}

// exp(-z^2) / erfc(z), the half-normal hazard up to a constant.
double mills_ratio_inverse(double z) {
    if (z < 20.0) return std::exp(-z * z) / std::erfc(z);
    const double z2 = z * z;
    return z * std::sqrt(std::numbers::pi) / (1.0 - 1.0 / (2.0 * z2) + 3.0 / (4.0 * z2 * z2));
}

double hyper_log_survival(const HyperexponentialArrival& h, double t) {
    const double fastest = *std::max_element(h.rates.begin(), h.rates.end());
    if (fastest * t < 1.0) {
        double s = 0.0;
        for (std::size_t i = 0; i < h.weights.size(); ++i) s += h.weights[i] * std::expm1(-h.rates[i] * t);
        return std::log1p(s);
    }
    double peak = -kInf;
    for (std::size_t i = 0; i < h.weights.size(); ++i) {
        peak = std::max(peak, std::log(h.weights[i]) - h.rates[i] * t);
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < h.weights.size(); ++i) {
        sum += std::exp(std::log(h.weights[i]) - h.rates[i] * t - peak);
    }
    return peak + std::log(sum);
}

void require_positive(double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v)) {
        throw InvalidArgument(std::string(what) + " must be positive and finite");
    }
}

}  // namespace

// ---------------------------------------------------------------------------
// ArrivalModel
// ---------------------------------------------------------------------------

ArrivalModel ArrivalModel::exponential(double rate) {
    require_positive(rate, "exponential rate");
    return ArrivalModel(ExponentialArrival{rate});
}

ArrivalModel ArrivalModel::hyperexponential(std::vector<double> weights, std::vector<double> rates) {
    if (weights.empty() || weights.size() != rates.size()) {
        throw InvalidArgument("hyperexponential: weights and rates must be nonempty and equal length");
    }
    for (double w : weights) require_positive(w, "hyperexponential weight");
    for (double r : rates) require_positive(r, "hyperexponential rate");
    const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
    if (std::abs(total - 1.0) > 1e-12) throw InvalidArgument("hyperexponential weights must sum to 1");
    return ArrivalModel(HyperexponentialArrival{std::move(weights), std::move(rates)});
}

ArrivalModel ArrivalModel::half_normal(double scale) {
    require_positive(scale, "half-normal scale");
    return ArrivalModel(HalfNormalArrival{scale});
}

ArrivalModel ArrivalModel::uniform() { return ArrivalModel(UniformArrival{}); }

std::string_view ArrivalModel::kind() const noexcept {
    return std::visit(overloaded{[](const ExponentialArrival&) { return "exponential"; },
                                 [](const HyperexponentialArrival&) { return "hyperexponential"; },
                                 [](const HalfNormalArrival&) { return "half_normal"; },
                                 [](const UniformArrival&) { return "uniform"; }},
                      params_);
}

double ArrivalModel::cdf(double t) const {
    if (t <= 0.0) return 0.0;
    return std::visit(
        overloaded{[&](const ExponentialArrival& e) { return -std::expm1(-e.rate * t); },
                   [&](const HyperexponentialArrival& h) {
                       double s = 0.0;
                       for (std::size_t i = 0; i < h.weights.size(); ++i) {
                           s += h.weights[i] * -std::expm1(-h.rates[i] * t);
                       }
                       return s;
                   },
                   [&](const HalfNormalArrival& h) {
                       return std::erf(t / (h.scale * std::numbers::sqrt2));
                   },
                   [&](const UniformArrival&) { return std::min(t, 1.0); }},
        params_);
}

double ArrivalModel::survival(double t) const {
    if (t <= 0.0) return 1.0;
    return std::visit(
        overloaded{[&](const ExponentialArrival& e) { return std::exp(-e.rate * t); },
                   [&](const HyperexponentialArrival& h) { return std::exp(hyper_log_survival(h, t)); },
                   [&](const HalfNormalArrival& h) {
                       return std::erfc(t / (h.scale * std::numbers::sqrt2));
                   },
                   [&](const UniformArrival&) { return std::max(1.0 - t, 0.0); }},
        params_);
}

double ArrivalModel::density(double t) const {
    if (t < 0.0) return 0.0;
    return std::visit(
        overloaded{[&](const ExponentialArrival& e) { return e.rate * std::exp(-e.rate * t); },
                   [&](const HyperexponentialArrival& h) {
                       double s = 0.0;
                       for (std::size_t i = 0; i < h.weights.size(); ++i) {
                           s += h.weights[i] * h.rates[i] * std::exp(-h.rates[i] * t);
                       }
                       return s;
                   },
                   [&](const HalfNormalArrival& h) {
                       const double z = t / h.scale;
                       return std::numbers::sqrt2 / (h.scale * std::sqrt(std::numbers::pi)) *
                              std::exp(-0.5 * z * z);
                   },
                   [&](const UniformArrival&) { return t <= 1.0 ? 1.0 : 0.0; }},
        params_);
}

double ArrivalModel::cumulative_hazard(double t) const {
    if (t <= 0.0) return 0.0;
    return std::visit(
        overloaded{[&](const ExponentialArrival& e) { return e.rate * t; },
                   [&](const HyperexponentialArrival& h) { return -hyper_log_survival(h, t); },
                   [&](const HalfNormalArrival& h) {
                       return -log_erfc(t / (h.scale * std::numbers::sqrt2));
                   },
                   [&](const UniformArrival&) { return t >= 1.0 ? kInf : -std::log1p(-t); }},
        params_);
}

double ArrivalModel::inverse_cumulative_hazard(double h) const {
    if (h < 0.0 || std::isnan(h)) throw InvalidArgument("cumulative hazard must be nonnegative");
    if (h == 0.0) return 0.0;

    if (const auto* e = std::get_if<ExponentialArrival>(&params_)) return h / e->rate;
    if (std::holds_alternative<UniformArrival>(params_)) return -std::expm1(-h);

    // Hazard rate H'(t) = f(t) / S(t).
    auto hazard = [&](double t) -> double {
        if (const auto* hn = std::get_if<HalfNormalArrival>(&params_)) {
            const double z = t / (hn->scale * std::numbers::sqrt2);
            return std::numbers::sqrt2 / (hn->scale * std::sqrt(std::numbers::pi)) *
                   mills_ratio_inverse(z);
        }
        const auto& hx = std::get<HyperexponentialArrival>(params_);
        const double log_s = hyper_log_survival(hx, t);
        double f = 0.0;
        for (std::size_t i = 0; i < hx.weights.size(); ++i) {
            f += hx.weights[i] * hx.rates[i] * std::exp(-hx.rates[i] * t - log_s);
        }
        return f;
    };

    // H is concave (hyperexponential) or convex (half-normal) with H'(0) = f0, so
    // Newton from h / f0 converges monotonically; the bracket only guards rounding.
    double lo = 0.0;
    double hi = kInf;
    double t = h / density(0.0);
    for (int iter = 0; iter < 200; ++iter) {
        const double residual = cumulative_hazard(t) - h;
        if (residual == 0.0) break;
        if (residual > 0.0) hi = t; else lo = t;
        double next = t - residual / hazard(t);
        if (!(next > lo && next < hi)) next = std::isfinite(hi) ? 0.5 * (lo + hi) : 2.0 * t;
        const double step = std::abs(next - t);
        t = next;
        if (step <= 1e-13 * t) break;
    }
    return t;
}

double ArrivalModel::inverse_cdf(double p) const {
    if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgument("inverse_cdf: p must lie in [0, 1]");
    if (p == 1.0) {
        return std::holds_alternative<UniformArrival>(params_) ? 1.0 : kInf;
    }
    return inverse_cumulative_hazard(-std::log1p(-p));
}

DensityAtZero ArrivalModel::density_at_zero() const {
    return std::visit(
        overloaded{[](const ExponentialArrival& e) {
                       return DensityAtZero{e.rate, -e.rate * e.rate, 1};
                   },
                   [](const HyperexponentialArrival& h) {
                       double f0 = 0.0, f1 = 0.0;
                       for (std::size_t i = 0; i < h.weights.size(); ++i) {
                           f0 += h.weights[i] * h.rates[i];
                           f1 -= h.weights[i] * h.rates[i] * h.rates[i];
                       }
                       return DensityAtZero{f0, f1, 1};
                   },
                   [](const HalfNormalArrival& h) {
                       return DensityAtZero{
                           std::numbers::sqrt2 / (h.scale * std::sqrt(std::numbers::pi)), 0.0, 2};
                   },
                   [](const UniformArrival&) {
                       return DensityAtZero{1.0, 0.0, std::nullopt};
                   }},
        params_);
}

double ArrivalModel::contact_derivative() const {
    const auto d = density_at_zero();
    if (!d.contact_order) {
        throw OutOfDomain("uniform clocks have no finite contact order");
    }
    if (*d.contact_order == 1) return d.f0_prime;
    // Half-normal: f''(0) = -f(0) / s^2.
    const auto& h = std::get<HalfNormalArrival>(params_);
    return -d.f0 / (h.scale * h.scale);
}

double ArrivalModel::sample(Rng& rng) const {
    return std::visit(
        overloaded{[&](const ExponentialArrival& e) { return rng.exponential() / e.rate; },
                   [&](const HyperexponentialArrival& h) {
                       const double u = rng.uniform();
                       double acc = 0.0;
                       std::size_t i = 0;
                       for (; i + 1 < h.weights.size(); ++i) {
                           acc += h.weights[i];
                           if (u < acc) break;
                       }
                       return rng.exponential() / h.rates[i];
                   },
                   [&](const HalfNormalArrival& h) { return std::abs(rng.normal()) * h.scale; },
                   [&](const UniformArrival&) { return rng.uniform(); }},
        params_);
}

std::vector<double> sample_sorted_clocks(const ArrivalModel& model, std::size_t n, Rng& rng) {
    if (n == 0) throw InvalidArgument("sample_sorted_clocks: empty sequence requested (n = 0)");
    SortedClockStream stream(model, n, rng);
    std::vector<double> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back(stream.next());
    return out;
}

// ---------------------------------------------------------------------------
// ServiceModel
// ---------------------------------------------------------------------------

ServiceModel ServiceModel::deterministic(double value) {
    require_positive(value, "deterministic service value");
    return ServiceModel(DeterministicService{value});
}

ServiceModel ServiceModel::exponential(double mean) {
    require_positive(mean, "exponential service mean");
    return ServiceModel(ExponentialService{mean});
}

ServiceModel ServiceModel::general(std::function<double(Rng&)> sampler, double mean,
                                   double second_moment, std::string label) {
    require_positive(mean, "service mean");
    if (!std::isfinite(second_moment)) {
        throw InvalidArgument("service second moment must be finite");
    }
    if (second_moment < mean * mean) {
        throw InvalidArgument("service second moment below mean^2");
    }
    if (!sampler) throw InvalidArgument("general service needs a sampler");
    return ServiceModel(GeneralService{std::move(sampler), mean, second_moment, std::move(label)});
}

std::string_view ServiceModel::kind() const noexcept {
    return std::visit(overloaded{[](const DeterministicService&) { return "deterministic"; },
                                 [](const ExponentialService&) { return "exponential"; },
                                 [](const GeneralService&) { return "general"; }},
                      params_);
}

double ServiceModel::mean() const {
    return std::visit(overloaded{[](const DeterministicService& d) { return d.value; },
                                 [](const ExponentialService& e) { return e.mean; },
                                 [](const GeneralService& g) { return g.mean; }},
                      params_);
}

double ServiceModel::second_moment() const {
    return std::visit(overloaded{[](const DeterministicService& d) { return d.value * d.value; },
                                 [](const ExponentialService& e) { return 2.0 * e.mean * e.mean; },
                                 [](const GeneralService& g) { return g.second_moment; }},
                      params_);
}

double ServiceModel::sample(Rng& rng) const {
    return std::visit(overloaded{[](const DeterministicService& d) { return d.value; },
                                 [&](const ExponentialService& e) { return e.mean * rng.exponential(); },
                                 [&](const GeneralService& g) { return g.sampler(rng); }},
                      params_);
}

ServiceModel ServiceModel::scaled(double gamma) const {
    require_positive(gamma, "service scale");
    return std::visit(
        overloaded{[&](const DeterministicService& d) { return deterministic(d.value * gamma); },
                   [&](const ExponentialService& e) { return exponential(e.mean * gamma); },
                   [&](const GeneralService& g) {
                       auto inner = g.sampler;
                       return general([inner, gamma](Rng& rng) { return gamma * inner(rng); },
                                      g.mean * gamma, g.second_moment * gamma * gamma, g.label);
                   }},
        params_);
}

CriticalScaling critical_service_scale(const ArrivalModel& arrival, const ServiceModel& service) {
    const double f0 = arrival.density_at_zero().f0;
    if (!(f0 > 0.0)) {
        throw CriticalityImpossible("f_T(0) = 0: the arrival law cannot be made critical");
    }
    const double gamma = 1.0 / (f0 * service.mean());
    // Exact for unit factors, so already-critical models come back unchanged.
    if (gamma == 1.0) return {1.0, service};
    return {gamma, service.scaled(gamma)};
}

// ---------------------------------------------------------------------------
// JSON
// ---------------------------------------------------------------------------

nlohmann::json to_json(const ArrivalModel& model) {
    return std::visit(
        overloaded{[](const ExponentialArrival& e) {
                       return nlohmann::json{{"kind", "exponential"}, {"rate", e.rate}};
                   },
                   [](const HyperexponentialArrival& h) {
                       return nlohmann::json{
                           {"kind", "hyperexponential"}, {"weights", h.weights}, {"rates", h.rates}};
                   },
                   [](const HalfNormalArrival& h) {
                       return nlohmann::json{{"kind", "half_normal"}, {"scale", h.scale}};
                   },
                   [](const UniformArrival&) { return nlohmann::json{{"kind", "uniform"}}; }},
        model.params());
}

nlohmann::json to_json(const ServiceModel& model) {
    return std::visit(
        overloaded{[](const DeterministicService& d) {
                       return nlohmann::json{{"kind", "deterministic"}, {"value", d.value}};
                   },
                   [](const ExponentialService& e) {
                       return nlohmann::json{{"kind", "exponential"}, {"mean", e.mean}};
                   },
                   [](const GeneralService& g) {
                       return nlohmann::json{{"kind", "general"},
                                             {"label", g.label},
                                             {"mean", g.mean},
                                             {"second_moment", g.second_moment}};
                   }},
        model.params());
}

nlohmann::json to_json(const ModelPair& models) {
    return {{"arrival", to_json(models.arrival)}, {"service", to_json(models.service)}};
}

namespace {

const nlohmann::json& field(const nlohmann::json& j, const std::string& path, const char* key) {
    if (!j.is_object() || !j.contains(key)) throw ConfigError(path + "." + key, "missing field");
    return j.at(key);
}

double number_field(const nlohmann::json& j, const std::string& path, const char* key) {
    const auto& v = field(j, path, key);
    if (!v.is_number()) throw ConfigError(path + "." + key, "expected a number");
    return v.get<double>();
}

std::vector<double> number_list(const nlohmann::json& j, const std::string& path, const char* key) {
    const auto& v = field(j, path, key);
    if (!v.is_array()) throw ConfigError(path + "." + key, "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!v[i].is_number()) {
            throw ConfigError(path + "." + key + "[" + std::to_string(i) + "]", "expected a number");
        }
        out.push_back(v[i].get<double>());
    }
    return out;
}

template <class Fn>
auto rethrow_as_config(const std::string& path, Fn&& fn) {
    try {
        return fn();
    } catch (const InvalidArgument& e) {
        throw ConfigError(path, e.what());
    }
}

}  // namespace

ArrivalModel arrival_from_json(const nlohmann::json& j, const std::string& path) {
    const auto& kind_json = field(j, path, "kind");
    if (!kind_json.is_string()) throw ConfigError(path + ".kind", "expected a string");
    const auto kind = kind_json.get<std::string>();
    return rethrow_as_config(path, [&] {
        if (kind == "exponential") return ArrivalModel::exponential(number_field(j, path, "rate"));
        if (kind == "hyperexponential") {
            return ArrivalModel::hyperexponential(number_list(j, path, "weights"),
                                                  number_list(j, path, "rates"));
        }
        if (kind == "half_normal") return ArrivalModel::half_normal(number_field(j, path, "scale"));
        if (kind == "uniform") return ArrivalModel::uniform();
        throw ConfigError(path + ".kind", "unknown arrival kind '" + kind + "'");
    });
}

ServiceModel service_from_json(const nlohmann::json& j, const std::string& path) {
    const auto& kind_json = field(j, path, "kind");
    if (!kind_json.is_string()) throw ConfigError(path + ".kind", "expected a string");
    const auto kind = kind_json.get<std::string>();
    return rethrow_as_config(path, [&] {
        if (kind == "deterministic") return ServiceModel::deterministic(number_field(j, path, "value"));
        if (kind == "exponential") return ServiceModel::exponential(number_field(j, path, "mean"));
        if (kind == "general") {
            throw ConfigError(path + ".kind", "general service laws need a sampler and cannot be read from JSON");
        }
        throw ConfigError(path + ".kind", "unknown service kind '" + kind + "'");
    });
}

ModelPair models_from_json(const nlohmann::json& j, const std::string& path) {
    return {arrival_from_json(field(j, path, "arrival"), path + ".arrival"),
            service_from_json(field(j, path, "service"), path + ".service")};
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

CheckList validate_arrival(const ArrivalModel& model) {
    CheckList out;
    const std::string prefix = "dist." + std::string(model.kind()) + ".";
    const auto d = model.density_at_zero();

    // CDF shape on a grid reaching far into the tail.
    {
        const double t_end = model.inverse_cdf(1.0 - 1e-12);
        double prev = model.cdf(0.0);
        bool monotone = true;
        for (int i = 1; i <= 4000; ++i) {
            const double v = model.cdf(t_end * i / 4000.0);
            if (v < prev) monotone = false;
            prev = v;
        }
        const bool ok = monotone && model.cdf(0.0) == 0.0 && std::abs(prev - 1.0) < 1e-9;
        out.push_back({prefix + "cdf_shape", ok,
                       "cdf(0)=" + std::to_string(model.cdf(0.0)) +
                           " cdf(end)=" + std::to_string(prev)});
    }

    // f0 against the one-sided second-order derivative of the CDF at 0.
    {
        const double h = 1e-4;
        const double est = (-3.0 * model.cdf(0.0) + 4.0 * model.cdf(h) - model.cdf(2.0 * h)) / (2.0 * h);
        const double rel = std::abs(est - d.f0) / d.f0;
        out.push_back({prefix + "f0_matches_cdf", rel < 1e-6, "relative gap " + std::to_string(rel)});
    }

    // f'(0+) from the CDF: one-sided four-point second derivative.
    {
        const double h = 1e-3;
        const double est = (2.0 * model.cdf(0.0) - 5.0 * model.cdf(h) + 4.0 * model.cdf(2.0 * h) -
                            model.cdf(3.0 * h)) /
                           (h * h);
        const double gap = std::abs(est - d.f0_prime);
        out.push_back({prefix + "f0_prime_matches_cdf", gap < 1e-4, "absolute gap " + std::to_string(gap)});
    }

    // The density is maximal at the origin.
    {
        const double t_end = model.inverse_cdf(0.999);
        bool ok = true;
        for (int i = 1; i <= 2000; ++i) {
            if (model.density(t_end * i / 2000.0) > d.f0 * (1.0 + 1e-12)) ok = false;
        }
        out.push_back({prefix + "density_max_at_zero", ok, ""});
    }

    // With E[S] = 1/f0, g(t) = f(t)/f0 - 1 must behave like C t^l on [1e-3, 1e-1].
    if (d.contact_order) {
        const int ell = *d.contact_order;
        double factorial = 1.0;
        for (int i = 2; i <= ell; ++i) factorial *= i;
        const double expected = std::abs(model.contact_derivative()) / (factorial * d.f0);
        double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
        for (int i = 0; i <= 40; ++i) {
            const double t = 1e-3 * std::pow(100.0, i / 40.0);
            const double ratio = std::abs(model.density(t) / d.f0 - 1.0) / std::pow(t, ell);
            lo = std::min(lo, ratio);
            hi = std::max(hi, ratio);
        }
        const bool ok = lo > 0.1 * expected && hi < 10.0 * expected;
        std::ostringstream msg;
        msg << "l=" << ell << " |g|/t^l in [" << lo << ", " << hi << "], leading coefficient " << expected;
        out.push_back({prefix + "contact_order", ok, msg.str()});
    }
    return out;
}

CheckList validate_service(const ServiceModel& model, std::uint64_t seed, std::size_t draws) {
    CheckList out;
    const std::string prefix = "dist.service." + std::string(model.kind()) + ".";
    const double m = model.mean(), m2 = model.second_moment();
    const bool deterministic = std::holds_alternative<DeterministicService>(model.params());
    const bool jensen = deterministic ? m2 >= m * m * (1.0 - 1e-15) : m2 > m * m;
    out.push_back({prefix + "jensen", jensen,
                   "E[S^2]=" + std::to_string(m2) + " E[S]^2=" + std::to_string(m * m)});

    Rng rng(seed);
    double sum = 0.0;
    for (std::size_t i = 0; i < draws; ++i) sum += model.sample(rng);
    const double sample_mean = sum / static_cast<double>(draws);
    const double se = std::sqrt(std::max(m2 - m * m, 0.0) / static_cast<double>(draws));
    const double gap = std::abs(sample_mean - m);
    const bool ok = se == 0.0 ? gap <= 1e-12 * m : gap <= 5.0 * se;
    out.push_back({prefix + "sample_mean", ok,
                   "sample mean " + std::to_string(sample_mean) + " vs " + std::to_string(m)});
    return out;
}

}  // namespace transq
