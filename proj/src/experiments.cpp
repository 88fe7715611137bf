#include "transq/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "transq/csv.hpp"
#include "transq/diffusion.hpp"
#include "transq/errors.hpp"
#include "transq/passage.hpp"
#include "transq/queue_sim.hpp"
#include "transq/replicate.hpp"
#include "transq/scaling.hpp"

namespace transq {

const char* to_string(Experiment e) noexcept {
    switch (e) {
        case Experiment::table2: return "table2";
        case Experiment::table3: return "table3";
        case Experiment::table4: return "table4";
        case Experiment::density: return "density";
        case Experiment::paths: return "paths";
        case Experiment::validate: return "validate";
    }
    return "?";
}

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

ExperimentConfig default_config(Experiment e) {
    ExperimentConfig c;
    c.seed = 20240601;
    switch (e) {
        case Experiment::table2:
            c.n_values = {100, 1000, 10000};
            c.q_values = {1.0, 2.0};
            c.outputs = "out/table2";
            break;
        case Experiment::table3:
            c.model.arrival = ArrivalModel::hyperexponential({0.2, 0.8}, {2.0, 0.75});
            c.n_values = {1000, 10000, 100000};
            c.q_values = {1.0, 2.0};
            c.outputs = "out/table3";
            break;
        case Experiment::table4:
            c.model.arrival = ArrivalModel::half_normal(std::sqrt(std::numbers::pi / 2.0));
            c.ell = 2;
            c.n_values = {1000, 10000};
            c.q_values = {1.0, 2.0};
            c.outputs = "out/table4";
            break;
        case Experiment::density:
            c.replications = 100000;
            c.n_values = {10000};
            c.outputs = "out/density";
            break;
        case Experiment::paths:
            c.model.service = ServiceModel::deterministic(1.0);
            c.n_values = {1000, 10000, 100000};
            c.q_values = {0.0};
            c.outputs = "out/paths";
            break;
        case Experiment::validate:
            c.replications = 20000;
            c.n_values = {1000};
            c.outputs = "out/validate";
            break;
    }
    return c;
}

namespace {

template <class T>
T get_or(const nlohmann::json& j, const char* key, T fallback, const char* what,
         bool (nlohmann::json::*is)() const noexcept) {
    if (!j.contains(key)) return fallback;
    const auto& v = j.at(key);
    if (!(v.*is)()) throw ConfigError(key, std::string("expected ") + what);
    return v.get<T>();
}

double number(const nlohmann::json& v, const std::string& path) {
    if (!v.is_number()) throw ConfigError(path, "expected a number");
    return v.get<double>();
}

std::size_t count(const nlohmann::json& v, const std::string& path, std::size_t min) {
    if (!v.is_number()) throw ConfigError(path, "expected a positive integer");
    const double d = v.get<double>();
    if (!(d >= static_cast<double>(min)) || d != std::floor(d) || d > 9.0e15) {
        throw ConfigError(path, "expected an integer >= " + std::to_string(min));
    }
    return static_cast<std::size_t>(d);
}

std::vector<double> numbers(const nlohmann::json& v, const std::string& path) {
    if (v.is_number()) return {v.get<double>()};
    if (!v.is_array() || v.empty()) throw ConfigError(path, "expected a number or a nonempty array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(number(v[i], path + "[" + std::to_string(i) + "]"));
    return out;
}

void check_config(const ExperimentConfig& c) {
    if (c.replications < 2) throw ConfigError("replications", "must be >= 2");
    if (c.n_values.empty()) throw ConfigError("n_values", "must be nonempty");
    if (c.ell < 1) throw ConfigError("ell", "must be >= 1");
    if (!std::isfinite(c.beta)) throw ConfigError("beta", "must be finite");
    for (std::size_t i = 0; i < c.q_values.size(); ++i) {
        if (!(c.q_values[i] >= 0.0) || !std::isfinite(c.q_values[i])) {
            throw ConfigError("q[" + std::to_string(i) + "]", "must be a nonnegative real");
        }
    }
    if (c.q_values.empty()) throw ConfigError("q", "must be nonempty");
    if (!(c.horizon >= 0.0) || !std::isfinite(c.horizon)) throw ConfigError("horizon", "must be >= 0");
    if (!(c.dt > 0.0) || c.dt > 0.1) throw ConfigError("dt", "must lie in (0, 0.1]");
    for (std::size_t i = 0; i < c.times.size(); ++i) {
        if (!(c.times[i] >= 0.0) || !std::isfinite(c.times[i])) {
            throw ConfigError("times[" + std::to_string(i) + "]", "must be a nonnegative real");
        }
    }
    if (c.times.empty()) throw ConfigError("times", "must be nonempty");
    if (c.grid_points < 2) throw ConfigError("grid_points", "must be >= 2");
    const auto contact = c.model.arrival.contact_order();
    if (!contact) throw ConfigError("model.arrival.kind", "clock law has no finite contact order at 0");
    if (*contact != c.ell) {
        throw ConfigError("ell", "clock law has contact order " + std::to_string(*contact) + ", config says " +
                                     std::to_string(c.ell));
    }
    if (c.airy_branch_point && !(*c.airy_branch_point > 0.0)) {
        throw ConfigError("debug.airy_branch_point", "must be positive");
    }
}

}  // namespace

ExperimentConfig config_from_json(const nlohmann::json& j, Experiment e) {
    if (!j.is_object()) throw ConfigError("<root>", "expected a JSON object");
    ExperimentConfig c = default_config(e);
    static const char* known[] = {"seed",  "replications", "n_values", "model", "critical_scaling",
                                  "beta",  "q",            "ell",      "outputs", "threads",
                                  "horizon", "dt",         "times",    "grid_points", "debug"};
    for (const auto& [key, _] : j.items()) {
        if (std::find_if(std::begin(known), std::end(known), [&](const char* k) { return key == k; }) ==
            std::end(known)) {
            throw ConfigError(key, "unknown field");
        }
    }
    if (j.contains("seed")) {
        const auto& v = j.at("seed");
        if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
            throw ConfigError("seed", "expected an unsigned 64-bit integer");
        }
        c.seed = v.get<std::uint64_t>();
    }
    if (j.contains("replications")) c.replications = count(j.at("replications"), "replications", 2);
    if (j.contains("n_values")) {
        const auto& v = j.at("n_values");
        if (!v.is_array()) throw ConfigError("n_values", "expected an array of positive integers");
        c.n_values.clear();
        for (std::size_t i = 0; i < v.size(); ++i) {
            c.n_values.push_back(count(v[i], "n_values[" + std::to_string(i) + "]", 1));
        }
    }
    if (j.contains("model")) c.model = models_from_json(j.at("model"), "model");
    c.critical_scaling = get_or<bool>(j, "critical_scaling", c.critical_scaling, "a boolean",
                                      &nlohmann::json::is_boolean);
    if (j.contains("beta")) c.beta = number(j.at("beta"), "beta");
    if (j.contains("q")) c.q_values = numbers(j.at("q"), "q");
    if (j.contains("ell")) c.ell = static_cast<int>(count(j.at("ell"), "ell", 1));
    c.outputs = get_or<std::string>(j, "outputs", c.outputs, "a string", &nlohmann::json::is_string);
    if (j.contains("threads")) c.threads = static_cast<unsigned>(count(j.at("threads"), "threads", 0));
    if (j.contains("horizon")) c.horizon = number(j.at("horizon"), "horizon");
    if (j.contains("dt")) c.dt = number(j.at("dt"), "dt");
    if (j.contains("times")) c.times = numbers(j.at("times"), "times");
    if (j.contains("grid_points")) c.grid_points = count(j.at("grid_points"), "grid_points", 2);
    if (j.contains("debug")) {
        const auto& d = j.at("debug");
        if (!d.is_object()) throw ConfigError("debug", "expected an object");
        for (const auto& [key, v] : d.items()) {
            if (key != "airy_branch_point") throw ConfigError("debug." + key, "unknown field");
            c.airy_branch_point = number(v, "debug.airy_branch_point");
        }
    }
    check_config(c);
    return c;
}

nlohmann::json to_json(const ExperimentConfig& c) {
    nlohmann::json j{{"seed", c.seed},
                     {"replications", c.replications},
                     {"n_values", c.n_values},
                     {"model", to_json(c.model)},
                     {"critical_scaling", c.critical_scaling},
                     {"beta", c.beta},
                     {"q", c.q_values},
                     {"ell", c.ell},
                     {"outputs", c.outputs},
                     {"threads", c.threads},
                     {"horizon", c.horizon},
                     {"dt", c.dt},
                     {"times", c.times},
                     {"grid_points", c.grid_points}};
    if (c.airy_branch_point) j["debug"] = {{"airy_branch_point", *c.airy_branch_point}};
    return j;
}

std::uint64_t config_hash(const ExperimentConfig& cfg) {
    // Thread count and output directory do not change results.
    auto j = to_json(cfg);
    j.erase("threads");
    j.erase("outputs");
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : j.dump()) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string header_line(const ExperimentConfig& cfg) {
    char buf[80];
    std::snprintf(buf, sizeof buf, "# transq %s config_hash=%016llx", kToolVersion,
                  static_cast<unsigned long long>(config_hash(cfg)));
    return buf;
}

// ---------------------------------------------------------------------------
// Shared pieces
// ---------------------------------------------------------------------------

namespace {

ServiceModel simulated_service(const ExperimentConfig& cfg) {
    if (!cfg.critical_scaling) return cfg.model.service;
    return critical_service_scale(cfg.model.arrival, cfg.model.service).service;
}

DriftSpec limit_drift(const ExperimentConfig& cfg, double q) {
    const auto service = critical_service_scale(cfg.model.arrival, cfg.model.service).service;
    return DriftSpec::general_arrivals(q, cfg.beta, cfg.model.arrival, service);
}

double limit_horizon(const ExperimentConfig& cfg, double q) {
    return cfg.horizon > 0.0 ? cfg.horizon : default_horizon(limit_drift(cfg, q));
}

// n^{1 - alpha}: physical time = limit time / this.
double time_scale(std::size_t n, int ell) {
    return pow_rational(static_cast<double>(n), Rational(1) - alpha(ell));
}

double variance(const std::vector<double>& v) {
    const double s = sample_std(v);
    return s * s;
}

}  // namespace

std::vector<std::optional<double>> simulate_scaled_busy_periods(const ExperimentConfig& cfg, std::size_t n,
                                                                double q) {
    const HeavyTrafficConfig ht{n, cfg.beta, cfg.ell, q};
    ht.validate();
    if (ht.initial_queue() == 0) throw ConfigError("q", "the initial queue is empty, so no busy period starts at 0");
    const double scale = time_scale(n, cfg.ell);
    SimLimits limits;
    limits.horizon = limit_horizon(cfg, q) / scale;
    limits.stop_at_first_empty = true;
    limits.record_events = false;
    const auto service = simulated_service(cfg);
    const auto& arrival = cfg.model.arrival;
    return replicate<std::optional<double>>(cfg.replications, cfg.seed, cfg.threads,
                                            [&](Rng& rng, std::size_t) -> std::optional<double> {
                                                const auto path = simulate_delta_queue(ht, arrival, service, rng, limits);
                                                if (!path.first_busy_period) return std::nullopt;
                                                return *path.first_busy_period * scale;
                                            });
}

std::optional<double> limit_mean(const ExperimentConfig& cfg, double q) {
    if (cfg.ell != 1) return std::nullopt;
    const auto d = limit_drift(cfg, q);
    return fpt_general({d.q, d.a, -2.0 * d.c, d.sigma}).mean.value;
}

namespace {

McSummary summarize(const std::vector<std::optional<double>>& draws) {
    std::vector<double> ok;
    ok.reserve(draws.size());
    for (const auto& d : draws) {
        if (d) ok.push_back(*d);
    }
    return mc_summary(ok, draws.size() - ok.size());
}

}  // namespace

// ---------------------------------------------------------------------------
// Tables
// ---------------------------------------------------------------------------

TableReport run_table(const ExperimentConfig& cfg, Experiment which) {
    TableReport report;
    report.which = which;
    for (double q : cfg.q_values) {
        const auto exact = limit_mean(cfg, q);
        for (std::size_t n : cfg.n_values) {
            TableRow row;
            row.n = n;
            row.q = q;
            row.initial_queue = HeavyTrafficConfig{n, cfg.beta, cfg.ell, q}.initial_queue();
            row.summary = summarize(simulate_scaled_busy_periods(cfg, n, q));
            row.value = row.summary->mean;
            if (exact) row.rel_error = relative_error(row.value, *exact);
            report.rows.push_back(row);
        }
        if (exact) {
            TableRow row;
            row.q = q;
            row.value = *exact;
            report.rows.push_back(row);
        }
    }
    return report;
}

void write_csv(std::ostream& os, const TableReport& report) {
    os << "q,n,initial_queue,value,std_error,ci95_low,ci95_high,replications,censored,rel_error\n";
    for (const auto& r : report.rows) {
        os << fmt(r.q) << ',' << (r.n ? std::to_string(*r.n) : "inf") << ',';
        if (r.n) {
            os << r.initial_queue;
        }
        os << ',' << fmt(r.value) << ',';
        if (r.summary) {
            os << fmt(r.summary->std_error) << ',' << fmt(r.summary->ci95_low) << ',' << fmt(r.summary->ci95_high)
               << ',' << r.summary->count + r.summary->censored_count << ',' << r.summary->censored_count;
        } else {
            os << ",,,,";
        }
        os << ',' << (r.rel_error ? fmt(*r.rel_error) : "") << '\n';
    }
}

nlohmann::json to_json(const TableReport& report) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : report.rows) {
        nlohmann::json row{{"q", r.q}, {"value", r.value}};
        row["n"] = r.n ? nlohmann::json(*r.n) : nlohmann::json("inf");
        if (r.n) row["initial_queue"] = r.initial_queue;
        if (r.summary) row["summary"] = to_json(*r.summary);
        if (r.rel_error) row["rel_error"] = *r.rel_error;
        rows.push_back(row);
    }
    return {{"experiment", to_string(report.which)}, {"rows", rows}};
}

// ---------------------------------------------------------------------------
// Density
// ---------------------------------------------------------------------------

DensityReport run_density(const ExperimentConfig& cfg) {
    if (cfg.ell != 1) throw ConfigError("ell", "the analytic density needs contact order 1");
    if (cfg.n_values.size() != 1) throw ConfigError("n_values", "density runs take exactly one population size");
    if (cfg.q_values.size() != 1) throw ConfigError("q", "density runs take exactly one q");
    const double q = cfg.q_values.front();
    const auto d = limit_drift(cfg, q);
    const auto analytic = fpt_general({d.q, d.a, -2.0 * d.c, d.sigma});

    DensityReport out;
    out.analytic_mass = fpt_mass(analytic.standard).value;
    const auto draws = simulate_scaled_busy_periods(cfg, cfg.n_values.front(), q);
    out.summary = summarize(draws);
    std::vector<double> samples;
    for (const auto& x : draws) {
        if (x) samples.push_back(*x);
    }

    const auto [t_min, t_max] = fpt_support(analytic.standard);
    const double lo = t_min * analytic.time_scale;
    const double hi = t_max * analytic.time_scale;
    for (std::size_t i = 0; i < cfg.grid_points; ++i) {
        out.grid.push_back(hi * static_cast<double>(i) / static_cast<double>(cfg.grid_points - 1));
    }
    out.bandwidth = silverman_bandwidth(samples);
    out.kde = gaussian_kde(samples, out.bandwidth, out.grid);
    for (double t : out.grid) out.analytic.push_back(t > lo ? analytic.density(t) : 0.0);
    for (std::size_t i = 0; i < out.grid.size(); ++i) {
        out.sup_distance = std::max(out.sup_distance, std::abs(out.kde[i] - out.analytic[i]));
    }
    return out;
}

void write_csv(std::ostream& os, const DensityReport& r) {
    os << "grid,kde_value,analytic_value\n";
    for (std::size_t i = 0; i < r.grid.size(); ++i) {
        os << fmt(r.grid[i]) << ',' << fmt(r.kde[i]) << ',' << fmt(r.analytic[i]) << '\n';
    }
}

nlohmann::json to_json(const DensityReport& r) {
    return {{"bandwidth", r.bandwidth},
            {"sup_distance", r.sup_distance},
            {"analytic_mass", r.analytic_mass},
            {"summary", to_json(r.summary)}};
}

// ---------------------------------------------------------------------------
// Paths
// ---------------------------------------------------------------------------

double PathPoint::gap() const { return std::abs(queue_mean - diffusion_mean); }

double PathPoint::joint_se() const {
    return std::sqrt((queue_var + diffusion_var) / static_cast<double>(replications));
}

PathsReport run_paths(const ExperimentConfig& cfg) {
    if (cfg.q_values.size() != 1) throw ConfigError("q", "path runs take exactly one q");
    const double q = cfg.q_values.front();
    const auto spec = limit_drift(cfg, q);
    const auto& times = cfg.times;
    const double t_end = *std::max_element(times.begin(), times.end());
    const std::size_t reps = cfg.replications;

    // Reflected diffusion, shared by every n, on its own family of streams.
    const auto diff = replicate<std::vector<double>>(
        reps, family_seed(cfg.seed, 0), cfg.threads, [&](Rng& rng, std::size_t) {
            const auto path = simulate_w(spec, t_end, cfg.dt, rng);
            const auto refl = reflect(path.values);
            std::vector<double> v;
            for (double t : times) {
                const auto k = std::min(refl.size() - 1, static_cast<std::size_t>(std::llround(t / cfg.dt)));
                v.push_back(refl[k]);
            }
            return v;
        });

    auto column = [&](const std::vector<std::vector<double>>& rows, std::size_t j) {
        std::vector<double> c;
        c.reserve(rows.size());
        for (const auto& r : rows) c.push_back(r[j]);
        return c;
    };

    PathsReport report;
    const auto service = simulated_service(cfg);
    for (std::size_t n : cfg.n_values) {
        const HeavyTrafficConfig ht{n, cfg.beta, cfg.ell, q};
        ht.validate();
        SimLimits limits;
        // A hair past the last grid time so the held level is the right one.
        limits.horizon = t_end / time_scale(n, cfg.ell) * (1.0 + 1e-9);
        const auto queue = replicate<std::vector<double>>(
            reps, cfg.seed, cfg.threads, [&](Rng& rng, std::size_t) {
                const auto path = simulate_delta_queue(ht, cfg.model.arrival, service, rng, limits);
                return rescale_physical(path, n, times, cfg.ell).values;
            });
        for (std::size_t j = 0; j < times.size(); ++j) {
            const auto qc = column(queue, j);
            const auto dc = column(diff, j);
            PathPoint p;
            p.n = n;
            p.t = times[j];
            p.replications = reps;
            p.queue_mean = stable_sum(qc) / static_cast<double>(reps);
            p.diffusion_mean = stable_sum(dc) / static_cast<double>(reps);
            p.queue_var = reps > 1 ? variance(qc) : 0.0;
            p.diffusion_var = reps > 1 ? variance(dc) : 0.0;
            report.points.push_back(p);
        }
    }
    return report;
}

void write_csv(std::ostream& os, const PathsReport& r) {
    os << "n,t,queue_mean,queue_var,diffusion_mean,diffusion_var,gap,joint_se\n";
    for (const auto& p : r.points) {
        os << p.n << ',' << fmt(p.t) << ',' << fmt(p.queue_mean) << ',' << fmt(p.queue_var) << ','
           << fmt(p.diffusion_mean) << ',' << fmt(p.diffusion_var) << ',' << fmt(p.gap()) << ','
           << fmt(p.joint_se()) << '\n';
    }
}

nlohmann::json to_json(const PathsReport& r) {
    nlohmann::json pts = nlohmann::json::array();
    for (const auto& p : r.points) {
        pts.push_back({{"n", p.n},
                       {"t", p.t},
                       {"queue_mean", p.queue_mean},
                       {"queue_var", p.queue_var},
                       {"diffusion_mean", p.diffusion_mean},
                       {"diffusion_var", p.diffusion_var},
                       {"gap", p.gap()},
                       {"joint_se", p.joint_se()},
                       {"replications", p.replications}});
    }
    return {{"points", pts}};
}

}  // namespace transq
