#include <doctest.h>

#include <cmath>
#include <sstream>

#include "transq/errors.hpp"
#include "transq/queue_sim.hpp"
#include "transq/replicate.hpp"
#include "transq/scaling.hpp"
#include "transq/stats.hpp"

using namespace transq;

namespace {
const ArrivalModel expo = ArrivalModel::exponential(1.0);
const ServiceModel unit_det = ServiceModel::deterministic(1.0);
}  // namespace

TEST_CASE("heavy-traffic bookkeeping") {
    HeavyTrafficConfig c{1000, 1.0, 1, 1.0};
    CHECK(c.alpha() == Rational(2, 3));
    CHECK(c.service_multiplier() == doctest::Approx(1.1 / 1000.0).epsilon(1e-15));
    CHECK(c.initial_queue() == 10);
    c.q = 2.0;
    CHECK(c.initial_queue() == 20);
    c.n = 100000;
    c.ell = 2;
    c.q = 1.0;
    CHECK(c.initial_queue() == 100);  // 1e5^{2/5}
    CHECK_THROWS_AS((HeavyTrafficConfig{0, 0.0, 1, 0.0}.validate()), InvalidArgument);
    CHECK_THROWS_AS((HeavyTrafficConfig{10, 0.0, 0, 0.0}.validate()), InvalidArgument);
    CHECK_THROWS_AS((HeavyTrafficConfig{10, 0.0, 1, -1.0}.validate()), InvalidArgument);
}

TEST_CASE("single customer") {
    Rng rng(5);
    Rng probe(5);
    const double t1 = expo.sample(probe);
    const auto p = simulate_delta_queue({1, 0.0, 1, 0.0}, expo, unit_det, rng);
    REQUIRE(p.events.size() == 2);
    CHECK(p.events[0].kind == EventKind::arrival);
    CHECK(p.events[0].time == doctest::Approx(t1));
    CHECK(p.events[0].level == 1);
    CHECK(p.events[1].kind == EventKind::departure);
    CHECK(p.events[1].time == doctest::Approx(t1 + 1.0));
    CHECK(p.events[1].level == 0);
    REQUIRE(p.first_busy_period.has_value());
    CHECK(*p.first_busy_period == doctest::Approx(1.0));
    CHECK_THROWS_AS(first_busy_period(p), UndefinedBusyPeriod);
}

TEST_CASE("first busy period from an event list") {
    QueuePath p;
    p.events = {{0.0, EventKind::initial, 1}, {3.0, EventKind::departure, 0}};
    CHECK(first_busy_period(p) == 3.0);

    QueuePath one;
    one.events = {{0.0, EventKind::initial, 0}, {1.0, EventKind::arrival, 1}};
    CHECK_THROWS_AS(first_busy_period(one), UndefinedBusyPeriod);

    Rng rng(1);
    // A single initial customer with n = 1 and a late clock: busy period D.
    HeavyTrafficConfig cfg{1, 0.0, 1, 1.0};
    const auto path = simulate_delta_queue(cfg, ArrivalModel::exponential(1e-9), unit_det, rng);
    CHECK(*path.first_busy_period == doctest::Approx(cfg.service_multiplier()));
}

TEST_CASE("physical path invariants") {
    Rng rng(3);
    for (int rep = 0; rep < 20; ++rep) {
        const std::size_t n = 200 + 50 * rep;
        HeavyTrafficConfig cfg{n, 1.0, 1, rep % 3 * 0.5};
        const auto p = simulate_delta_queue(cfg, expo, ServiceModel::exponential(1.0), rng);
        std::size_t arrivals = 0;
        for (std::size_t i = 0; i < p.events.size(); ++i) {
            if (p.events[i].kind == EventKind::arrival) ++arrivals;
            if (i == 0) continue;
            const long d = static_cast<long>(p.events[i].level) - static_cast<long>(p.events[i - 1].level);
            CHECK(std::abs(d) == 1);
            CHECK(p.events[i].time >= p.events[i - 1].time);
        }
        CHECK(arrivals == n);
        CHECK(p.served_count == n + cfg.initial_queue());
        CHECK(p.events.back().level == 0);
        if (cfg.initial_queue() > 0) {
            double first_zero = 0.0;
            for (const auto& e : p.events) {
                if (e.level == 0) {
                    first_zero = e.time;
                    break;
                }
            }
            CHECK(*p.first_busy_period == first_zero);
            CHECK(first_busy_period(p) == p.first_busy_period);
        }
    }
}

TEST_CASE("horizon censoring and early stop") {
    Rng a(9), b(9);
    HeavyTrafficConfig cfg{1000, 1.0, 1, 1.0};
    const auto full = simulate_delta_queue(cfg, expo, ServiceModel::exponential(1.0), a);
    const auto stopped =
        simulate_delta_queue(cfg, expo, ServiceModel::exponential(1.0), b, {1e300, true, false});
    CHECK(stopped.first_busy_period == full.first_busy_period);
    CHECK(stopped.events.empty());

    Rng c(9);
    const auto cut = simulate_delta_queue(cfg, expo, ServiceModel::exponential(1.0), c,
                                          {*full.first_busy_period / 2.0, false, true});
    CHECK(cut.censored());
}

TEST_CASE("empty embedded horizon") {
    Rng rng(1);
    const auto e = simulate_embedded_exponential({100, 0.0, 1, 0.0}, 1.0, unit_det, 0, rng);
    CHECK(e.Q.empty());
    CHECK(e.N.empty());
    CHECK(e.busy_starts.empty());
    const auto g = simulate_embedded_general({100, 0.0, 1, 0.0}, expo, unit_det, 0, rng);
    CHECK(g.steps() == 0);
}

TEST_CASE("five-customer enumeration") {
    // model_oracle.py: A(1) ~ Bin(4, 1 - e^{-0.2}), E[(A - 1)^+] = 0.17440595.
    const double p = -std::expm1(-0.2);
    CHECK(p == doctest::Approx(0.18126924692201818));
    HeavyTrafficConfig cfg{5, 0.0, 1, 0.0};
    const auto svc = ServiceModel::deterministic(1.0);
    Rng a(100), b(200);
    std::vector<double> qe, qg;
    for (int i = 0; i < 100000; ++i) {
        qe.push_back(static_cast<double>(simulate_embedded_exponential(cfg, 1.0, svc, 1, a).Q[0]));
        qg.push_back(static_cast<double>(simulate_embedded_general(cfg, expo, svc, 1, b).Q[0]));
    }
    const auto se = mc_summary(qe), sg = mc_summary(qg);
    CHECK(std::abs(se.mean - 0.1744059518052942) < 3.5 * se.std_error);
    CHECK(std::abs(sg.mean - 0.1744059518052942) < 3.5 * sg.std_error);
}

TEST_CASE("first-step arrivals are binomial") {
    const std::size_t n = 1000;
    HeavyTrafficConfig cfg{n, 0.0, 1, 0.0};
    const double d1 = cfg.service_multiplier();
    const double p = -std::expm1(-d1);
    Rng rng(31);
    // Cells 0..5 and a pooled tail 6+; every expected count is above 5.
    constexpr int kCells = 7;
    std::vector<double> counts(kCells, 0.0);
    const int reps = 100000;
    for (int i = 0; i < reps; ++i) {
        const auto a = simulate_embedded_general(cfg, expo, unit_det, 1, rng).A[0];
        counts[std::min<std::size_t>(static_cast<std::size_t>(a), kCells - 1)] += 1.0;
    }
    double stat = 0.0, tail = 1.0;
    int cells = 0;
    for (int k = 0; k < kCells; ++k) {
        double prob = tail;
        if (k + 1 < kCells) {
            prob = std::exp(std::lgamma(n) - std::lgamma(k + 1.0) - std::lgamma(n - k + 0.0) + k * std::log(p) +
                            (n - 1.0 - k) * std::log1p(-p));
            tail -= prob;
        }
        const double e = prob * reps;
        CHECK(e > 5.0);
        stat += (counts[static_cast<std::size_t>(k)] - e) * (counts[static_cast<std::size_t>(k)] - e) / e;
        ++cells;
    }
    CHECK(cells >= 3);
    CHECK(chi_square_pvalue(stat, cells - 1) > 0.01);
}

TEST_CASE("no arrivals when every clock is late") {
    // Tiny services and a large initial queue: no clock lands in the window.
    HeavyTrafficConfig cfg{1000000, 0.0, 1, 5.0};
    const auto svc = ServiceModel::deterministic(1e-9);
    Rng rng(2);
    const auto p = simulate_embedded_general(cfg, expo, svc, 400, rng);
    for (std::size_t k = 0; k < p.steps(); ++k) {
        CHECK(p.A[k] == 0);
        CHECK(p.N[k] - p.initial_level == -static_cast<std::int64_t>(k + 1));
    }
}

TEST_CASE("embedded identities on random configurations") {
    Rng meta(123);
    for (int i = 0; i < 100; ++i) {
        const std::size_t n = 10 + static_cast<std::size_t>(meta.uniform() * 2000);
        const double q = meta.uniform() * 2.0;
        const double beta = meta.uniform() * 3.0 - 1.0;
        HeavyTrafficConfig cfg{n, beta, 1, q};
        Rng rng(1000 + i);
        const auto steps = n / 2;
        const auto p = (i % 2 == 0) ? simulate_embedded_exponential(cfg, 1.0, ServiceModel::exponential(1.0), steps, rng)
                                    : simulate_embedded_general(cfg, expo, ServiceModel::exponential(1.0), steps, rng);
        for (const auto& c : check_embedded_identities(p)) {
            INFO(c.name << ": " << c.detail);
            CHECK(c.passed);
        }
    }
}

TEST_CASE("rescaled embedded path follows the parabola") {
    const std::size_t n = 10000;
    HeavyTrafficConfig cfg{n, 0.0, 1, 0.0};
    const std::vector<double> grid{0.5, 1.0, 2.0};
    const std::size_t steps = static_cast<std::size_t>(2.0 * pow_rational(n, Rational(2, 3))) + 1;
    const auto vals = replicate<std::vector<double>>(10000, 55, 1, [&](Rng& rng, std::size_t) {
        const auto p = simulate_embedded_exponential(cfg, 1.0, ServiceModel::exponential(1.0), steps, rng);
        return rescale_embedded(p, n, 1, grid).values;
    });
    for (std::size_t j = 0; j < grid.size(); ++j) {
        std::vector<double> x;
        for (const auto& v : vals) x.push_back(v[j]);
        const auto s = mc_summary(x);
        CAPTURE(grid[j]);
        CHECK(std::abs(s.mean + grid[j] * grid[j] / 2.0) < 3.0 * s.std_error + 0.01);
    }
}

TEST_CASE("determinism and thread independence") {
    auto run = [](unsigned threads) {
        return replicate<double>(64, 77, threads, [](Rng& rng, std::size_t) {
            return *simulate_delta_queue({2000, 1.0, 1, 1.0}, expo, ServiceModel::exponential(1.0), rng,
                                         {1e300, true, false})
                        .first_busy_period;
        });
    };
    const auto a = run(1);
    CHECK(a == run(1));
    CHECK(a == run(3));
}

TEST_CASE("csv output") {
    Rng rng(1);
    std::ostringstream os;
    write_csv(os, simulate_delta_queue({3, 0.0, 1, 0.0}, expo, unit_det, rng));
    CHECK(os.str().rfind("time,kind,level\n", 0) == 0);
}
