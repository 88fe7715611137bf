#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "transq/airy.hpp"
#include "transq/binomial.hpp"
#include "transq/diffusion.hpp"
#include "transq/errors.hpp"
#include "transq/experiments.hpp"
#include "transq/passage.hpp"
#include "transq/queue_sim.hpp"
#include "transq/replicate.hpp"
#include "transq/scaling.hpp"

namespace transq {

namespace {

template <class... Args>
std::string str(const Args&... args) {
    std::ostringstream os;
    os.precision(6);
    (os << ... << args);
    return os.str();
}

std::vector<ArrivalModel> builtin_arrivals() {
    return {ArrivalModel::exponential(1.0), ArrivalModel::hyperexponential({0.2, 0.8}, {2.0, 0.75}),
            ArrivalModel::half_normal(std::sqrt(std::numbers::pi / 2.0)), ArrivalModel::uniform()};
}

void append(CheckList& to, const CheckList& from) { to.insert(to.end(), from.begin(), from.end()); }

// ---------------------------------------------------------------------------

CheckList dist_suite(const ExperimentConfig& cfg) {
    CheckList out;
    for (const auto& m : builtin_arrivals()) append(out, validate_arrival(m));
    append(out, validate_service(cfg.model.service, cfg.seed));

    bool sorted = true;
    for (const auto& m : builtin_arrivals()) {
        for (std::uint64_t s = 0; s < 20; ++s) {
            Rng rng(stream_seed(cfg.seed, s));
            const auto v = sample_sorted_clocks(m, 2000, rng);
            sorted = sorted && std::is_sorted(v.begin(), v.end());
        }
    }
    out.push_back({"dist.sorted_clocks_nondecreasing", sorted, "4 laws x 20 seeds x 2000 clocks"});

    const double gamma = critical_service_scale(cfg.model.arrival, cfg.model.service).gamma;
    out.push_back({"dist.critical_scale_positive", gamma > 0.0 && std::isfinite(gamma), str("gamma=", gamma)});
    return out;
}

// ---------------------------------------------------------------------------

CheckList queue_suite(const ExperimentConfig& cfg) {
    CheckList out;
    const auto service = critical_service_scale(cfg.model.arrival, cfg.model.service).service;
    const auto exp_arrival = ArrivalModel::exponential(1.0);
    const auto exp_service = ServiceModel::exponential(1.0);

    // Reflection identities on random configurations.
    {
        std::size_t failures = 0, paths = 0;
        std::string first;
        Rng pick(family_seed(cfg.seed, 10));
        for (int i = 0; i < 200; ++i) {
            const std::size_t n = 5 + static_cast<std::size_t>(pick.uniform() * 2000);
            const double beta = 4.0 * pick.uniform() - 2.0;
            const double q = 3.0 * pick.uniform();
            const HeavyTrafficConfig ht{n, beta, 1, q};
            Rng rng(stream_seed(cfg.seed, i));
            const std::size_t steps = std::max<std::size_t>(1, n / 2);
            const auto path = (i % 2 == 0) ? simulate_embedded_exponential(ht, 1.0, exp_service, steps, rng)
                                           : simulate_embedded_general(ht, cfg.model.arrival, service, steps, rng);
            ++paths;
            for (const auto& c : check_embedded_identities(path)) {
                if (!c.passed) {
                    ++failures;
                    if (first.empty()) first = c.name + ": " + c.detail;
                }
            }
        }
        out.push_back({"queue_sim.embedded_identities", failures == 0,
                       str(paths, " paths, ", failures, " failed checks", first.empty() ? "" : "; ", first)});
    }

    // Physical paths: unit steps, nonnegative levels.
    {
        bool ok = true;
        for (std::uint64_t s = 0; s < 50; ++s) {
            Rng rng(stream_seed(cfg.seed, s));
            const auto path =
                simulate_delta_queue({1000, cfg.beta, 1, 1.0}, exp_arrival, exp_service, rng, SimLimits{});
            std::size_t level = path.initial_level;
            for (const auto& e : path.events) {
                if (e.kind == EventKind::initial) continue;
                const long diff = static_cast<long>(e.level) - static_cast<long>(level);
                if (std::abs(diff) != 1) ok = false;
                level = e.level;
            }
            ok = ok && path.served_count == 1000 + path.initial_level;
        }
        out.push_back({"queue_sim.physical_unit_steps", ok, "50 paths, n=1000"});
    }

    // Exponential-clock and general-clock simulators agree in law.
    {
        const std::size_t reps = 10000, n = 1000, k = 50;
        const HeavyTrafficConfig ht{n, cfg.beta, 1, 0.0};
        const auto a = replicate<double>(reps, family_seed(cfg.seed, 11), cfg.threads, [&](Rng& rng, std::size_t) {
            return static_cast<double>(simulate_embedded_exponential(ht, 1.0, exp_service, k, rng).Q.back());
        });
        const auto b = replicate<double>(reps, family_seed(cfg.seed, 12), cfg.threads, [&](Rng& rng, std::size_t) {
            return static_cast<double>(simulate_embedded_general(ht, exp_arrival, exp_service, k, rng).Q.back());
        });
        const double d = ks_two_sample_distance(a, b);
        const double p = ks_pvalue(d, static_cast<double>(reps) / 2.0);
        out.push_back({"queue_sim.exponential_general_equivalence", p > 0.01, str("KS D=", d, " p=", p)});
    }

    // Inverse-transform coupling: a larger beta never yields fewer arrivals in
    // a step drawn from the same state and the same uniform.
    {
        bool ok = true;
        Rng rng(family_seed(cfg.seed, 13));
        const std::size_t n = 1000;
        for (int i = 0; i < 20000 && ok; ++i) {
            const auto remaining = static_cast<std::int64_t>(1 + rng.uniform() * n);
            const double b1 = 4.0 * rng.uniform() - 2.0;
            const double b2 = b1 + 2.0 * rng.uniform();
            const double s = rng.exponential();
            const double u = rng.uniform();
            const double d1 = s * HeavyTrafficConfig{n, b1, 1, 0.0}.service_multiplier();
            const double d2 = s * HeavyTrafficConfig{n, b2, 1, 0.0}.service_multiplier();
            ok = binomial_inverse(remaining, -std::expm1(-d1), u) <= binomial_inverse(remaining, -std::expm1(-d2), u);
        }
        out.push_back({"queue_sim.monotone_coupling", ok, "20000 coupled draws"});
    }

    // Cumulative virtual idle time n^{1/3} I(T n^{2/3}) shrinks with n.
    {
        const double horizon = 2.0;
        double means[2];
        const std::size_t ns[2] = {1000, 100000};
        for (int j = 0; j < 2; ++j) {
            const std::size_t n = ns[j];
            const HeavyTrafficConfig ht{n, cfg.beta, 1, 0.0};
            const auto steps = static_cast<std::size_t>(std::floor(horizon * std::pow(static_cast<double>(n), 2.0 / 3.0)));
            const auto v = replicate<double>(1000, family_seed(cfg.seed, 14 + j), cfg.threads, [&](Rng& rng, std::size_t) {
                const auto path = simulate_embedded_exponential(ht, 1.0, exp_service, steps, rng);
                return path.virtual_idle_total.back() * std::cbrt(static_cast<double>(n));
            });
            means[j] = stable_sum(v) / static_cast<double>(v.size());
        }
        out.push_back({"queue_sim.idle_time_vanishes", means[1] < means[0],
                       str("mean scaled idle ", means[0], " at n=1e3, ", means[1], " at n=1e5")});
    }

    // Determinism.
    {
        Rng r1(cfg.seed), r2(cfg.seed);
        const HeavyTrafficConfig ht{2000, cfg.beta, 1, 1.0};
        const auto p1 = simulate_embedded_general(ht, cfg.model.arrival, service, 300, r1);
        const auto p2 = simulate_embedded_general(ht, cfg.model.arrival, service, 300, r2);
        Rng r3(cfg.seed), r4(cfg.seed);
        const auto q1 = simulate_delta_queue(ht, cfg.model.arrival, service, r3);
        const auto q2 = simulate_delta_queue(ht, cfg.model.arrival, service, r4);
        bool same = p1.Q == p2.Q && p1.A == p2.A && p1.virtual_idle_total == p2.virtual_idle_total &&
                    q1.events.size() == q2.events.size() && q1.total_idle == q2.total_idle;
        for (std::size_t i = 0; same && i < q1.events.size(); ++i) {
            same = q1.events[i].time == q2.events[i].time && q1.events[i].level == q2.events[i].level;
        }
        out.push_back({"queue_sim.determinism", same, "same seed, same path"});
    }
    return out;
}

// ---------------------------------------------------------------------------

CheckList scaling_suite(const ExperimentConfig& cfg) {
    CheckList out;
    out.push_back({"scaling.alpha_exact", alpha(1) * Rational(3) == Rational(2) && alpha(2) == Rational(4, 5),
                   str("alpha(1)=", alpha(1))});

    {
        bool ok = true;
        for (std::uint64_t s = 0; s < 20 && ok; ++s) {
            const std::size_t n = 1000 + 500 * s;
            Rng rng(stream_seed(cfg.seed, s));
            const auto path = simulate_embedded_exponential({n, cfg.beta, 1, 1.0}, 1.0, ServiceModel::exponential(1.0),
                                                            static_cast<std::size_t>(3.0 * std::pow(n, 2.0 / 3.0)), rng);
            const auto grid = limit_grid(2.5, 0.01);
            for (auto series : {EmbeddedSeries::N, EmbeddedSeries::Q}) {
                const auto r = rescale_embedded(path, n, 1, grid, series);
                const auto idx = raw_indices(r);
                const auto val = raw_values(r);
                const auto& raw = series == EmbeddedSeries::N ? path.N : path.Q;
                for (std::size_t i = 0; i < idx.size(); ++i) {
                    const auto k = idx[i];
                    const auto expect = k == 0 ? path.initial_level : raw[static_cast<std::size_t>(k - 1)];
                    if (val[i] != expect) ok = false;
                }
            }
        }
        out.push_back({"scaling.round_trip", ok, "20 embedded paths, N and Q"});
    }

    const auto service = cfg.critical_scaling ? critical_service_scale(cfg.model.arrival, cfg.model.service).service
                                              : cfg.model.service;
    const double f0 = cfg.model.arrival.density_at_zero().f0;
    for (std::size_t n : cfg.n_values) {
        const double res = criticality_residual(cfg.model.arrival, service, n, cfg.beta, cfg.ell);
        const double expected =
            (f0 * service.mean() - 1.0) * (1.0 + cfg.beta / pow_rational(static_cast<double>(n), alpha(cfg.ell) / 2));
        out.push_back({str("scaling.criticality_residual.n=", n), std::abs(res) < 1e-12,
                       str("residual ", res, ", expected ", expected)});
    }
    return out;
}

// ---------------------------------------------------------------------------

CheckList diffusion_suite(const ExperimentConfig& cfg) {
    CheckList out;
    {
        Rng rng(family_seed(cfg.seed, 20));
        append(out, check_reflection_laws(rng, 500));
    }

    // Depletion: with q = 0 the reflected process at t = 2 sits lower for a stronger parabola.
    {
        const double cs[3] = {-0.25, -0.5, -1.0};
        double means[3];
        for (int j = 0; j < 3; ++j) {
            const DriftSpec spec{0.0, 0.0, cs[j], 2, 1.0};
            // Common random numbers across c.
            const auto v = replicate<double>(4000, family_seed(cfg.seed, 21), cfg.threads, [&](Rng& rng, std::size_t) {
                const auto path = simulate_w(spec, 2.0, 1e-3, rng);
                return reflect(path.values).back();
            });
            means[j] = stable_sum(v) / static_cast<double>(v.size());
        }
        const bool ok = means[0] > 0.0 && means[0] > means[1] && means[1] > means[2] && means[2] > 0.0;
        out.push_back({"diffusion.depletion_direction", ok,
                       str("E phi(W)(2) = ", means[0], ", ", means[1], ", ", means[2], " for c = -0.25, -0.5, -1")});
    }

    // Grid refinement with common random numbers: the fine path's increments
    // are summed pairwise to build the coarser ones.
    {
        const DriftSpec spec{1.0, 1.0, -0.5, 2, 1.0};
        const double dt0 = 1e-3;
        const double horizon = default_horizon(spec);
        const int levels = 4;  // dt0, 2 dt0, 4 dt0, 8 dt0
        const auto draws = replicate<std::vector<double>>(
            20000, family_seed(cfg.seed, 22), cfg.threads, [&](Rng& rng, std::size_t) {
                const auto steps = static_cast<std::size_t>(std::llround(horizon / dt0));
                std::vector<double> b(steps + 1, 0.0);
                const double sd = std::sqrt(dt0);
                for (std::size_t k = 1; k <= steps; ++k) b[k] = b[k - 1] + sd * rng.normal();
                std::vector<double> hit(levels, horizon);
                for (int l = 0; l < levels; ++l) {
                    const std::size_t stride = std::size_t{1} << l;
                    for (std::size_t k = 0; k <= steps; k += stride) {
                        const double t = static_cast<double>(k) * dt0;
                        if (spec.q + spec.drift(t) + spec.sigma * b[k] <= 0.0) {
                            hit[l] = t;
                            break;
                        }
                    }
                }
                return hit;
            });
        std::vector<double> mean(levels);
        for (int l = 0; l < levels; ++l) {
            std::vector<double> col;
            for (const auto& d : draws) col.push_back(d[l]);
            mean[l] = stable_sum(col) / static_cast<double>(col.size());
        }
        const double d1 = mean[3] - mean[2], d2 = mean[2] - mean[1], d3 = mean[1] - mean[0];
        const double order = std::log2(d1 / d2);
        const bool ok = d1 > d2 && d2 > d3 && d3 > 0.0;
        out.push_back({"diffusion.grid_refinement", ok,
                       str("mean hitting time at dt=8e-3..1e-3: ", mean[3], ", ", mean[2], ", ", mean[1], ", ",
                           mean[0], "; observed order ", order)});
    }
    return out;
}

// ---------------------------------------------------------------------------

CheckList airy_suite(const ExperimentConfig& cfg) {
    AiryOptions opts;
    if (cfg.airy_branch_point) opts.branch_point = *cfg.airy_branch_point;
    return validate_airy(opts);
}

// ---------------------------------------------------------------------------

CheckList passage_suite(const ExperimentConfig& cfg) {
    CheckList out;
    PassageOptions opts;
    if (cfg.airy_branch_point) opts.airy.branch_point = *cfg.airy_branch_point;

    // Mass and positivity for the parameter sets behind the tables.
    const std::pair<double, double> table_sets[] = {{1.0, 1.0}, {2.0, 1.0}};
    const ArrivalModel arrivals[] = {ArrivalModel::exponential(1.0),
                                     ArrivalModel::hyperexponential({0.2, 0.8}, {2.0, 0.75})};
    for (const auto& arrival : arrivals) {
        const auto service = critical_service_scale(arrival, ServiceModel::exponential(1.0)).service;
        for (const auto& [q, beta] : table_sets) {
            const auto d = DriftSpec::general_arrivals(q, beta, arrival, service);
            const auto g = fpt_general({d.q, d.a, -2.0 * d.c, d.sigma}, opts);
            const auto mass = fpt_mass(g.standard, opts);
            bool nonneg = true;
            for (int i = 1; i <= 100; ++i) {
                nonneg = nonneg && fpt_density(g.standard, mass.t_max * i / 100.0, opts) >= 0.0;
            }
            const std::string tag = str(arrival.kind(), ".q=", q);
            out.push_back({"passage.mass." + tag, std::abs(mass.value - 1.0) <= 1e-3, str("mass ", mass.value)});
            out.push_back({"passage.nonnegative." + tag, nonneg, "100 grid points"});
        }
    }

    // k = 1 reduction is the identity.
    {
        const StdFptParams p(1.0, 1.0, 1.0);
        const auto g = fpt_general({1.0, 1.0, 1.0, 1.0}, opts);
        bool same = g.time_scale == 1.0 && g.mean.value == fpt_mean(p, opts).value;
        for (double t : {0.5, 1.0, 3.0}) same = same && g.density(t) == fpt_density(p, t, opts);
        out.push_back({"passage.scaling_k1_identity", same, "bit-identical at t = 0.5, 1, 3"});
    }

    // Scaling reduction against direct simulation of q + a t - (k/2) t^2 + B.
    for (double k : {0.5, 1.25, 2.0}) {
        const GeneralFptParams gp{1.0, 1.0, k, 1.0};
        const double exact = fpt_general(gp, opts).mean.value;
        const DriftSpec spec{gp.q, gp.a, -0.5 * k, 2, gp.sigma};
        const double horizon = default_horizon(spec);
        const auto draws = replicate<std::optional<double>>(
            cfg.replications, family_seed(cfg.seed, 30), cfg.threads,
            [&](Rng& rng, std::size_t) { return sample_hitting_time(spec, horizon, cfg.dt, rng); });
        std::vector<double> v;
        for (const auto& d : draws) {
            if (d) v.push_back(*d);
        }
        const auto s = mc_summary(v, draws.size() - v.size());
        const double rel = relative_error(s.mean, exact);
        out.push_back({str("passage.scaling_reduction.k=", k), rel < 0.01,
                       str("reduced mean ", exact, ", simulated ", s.mean, " +- ", s.std_error, " (rel ", rel,
                           ", censored ", s.censored_count, ")")});
    }
    return out;
}

// ---------------------------------------------------------------------------

CheckList stats_suite(const ExperimentConfig& cfg) {
    CheckList out;
    Rng rng(family_seed(cfg.seed, 40));
    std::vector<double> x(5000);
    for (auto& v : x) v = rng.exponential();
    const auto s = mc_summary(x);

    auto shuffled = x;
    for (std::size_t i = shuffled.size() - 1; i > 0; --i) {
        std::swap(shuffled[i], shuffled[static_cast<std::size_t>(rng.uniform() * static_cast<double>(i + 1))]);
    }
    const auto sp = mc_summary(shuffled);
    out.push_back({"stats.permutation_invariance",
                   std::abs(sp.mean - s.mean) <= 1e-14 * s.mean && std::abs(sp.std_error - s.std_error) <= 1e-12 * s.std_error,
                   str("mean ", s.mean, " vs ", sp.mean)});

    auto scaled = x;
    for (auto& v : scaled) v *= 3.5;
    const auto ss = mc_summary(scaled);
    out.push_back({"stats.scale_equivariance",
                   std::abs(ss.mean - 3.5 * s.mean) <= 1e-13 * ss.mean &&
                       std::abs(ss.std_error - 3.5 * s.std_error) <= 1e-12 * ss.std_error,
                   str("mean ratio ", ss.mean / s.mean, ", se ratio ", ss.std_error / s.std_error)});

    std::vector<double> grid;
    for (int i = 0; i <= 4000; ++i) grid.push_back(-5.0 + 25.0 * i / 4000.0);
    const auto kde = gaussian_kde(x, grid);
    double mass = 0.0;
    bool nonneg = true;
    for (std::size_t i = 0; i < kde.size(); ++i) {
        nonneg = nonneg && kde[i] >= 0.0;
        if (i > 0) mass += 0.5 * (kde[i] + kde[i - 1]) * (grid[i] - grid[i - 1]);
    }
    out.push_back({"stats.kde_nonnegative", nonneg, ""});
    out.push_back({"stats.kde_mass", std::abs(mass - 1.0) < 1e-3, str("mass ", mass)});
    return out;
}

}  // namespace

bool ValidateReport::passed() const {
    return std::all_of(suites.begin(), suites.end(), [](const auto& kv) { return all_passed(kv.second); });
}

ValidateReport run_validate(const ExperimentConfig& cfg) {
    ValidateReport r;
    const std::pair<const char*, CheckList (*)(const ExperimentConfig&)> suites[] = {
        {"dist", dist_suite},         {"queue_sim", queue_suite}, {"scaling", scaling_suite},
        {"diffusion", diffusion_suite}, {"airy", airy_suite},     {"passage", passage_suite},
        {"stats", stats_suite}};
    for (const auto& [name, fn] : suites) {
        try {
            r.suites[name] = fn(cfg);
        } catch (const std::exception& e) {
            r.suites[name].push_back({std::string(name) + ".completed", false, e.what()});
        }
    }
    return r;
}

nlohmann::json to_json(const ValidateReport& r) {
    nlohmann::json suites = nlohmann::json::object();
    std::vector<std::string> failures;
    for (const auto& [name, checks] : r.suites) {
        suites[name] = to_json(checks);
        for (const auto& c : checks) {
            if (!c.passed) failures.push_back(c.name);
        }
    }
    return {{"passed", r.passed()}, {"failures", failures}, {"suites", suites}};
}

}  // namespace transq
