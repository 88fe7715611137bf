#include <doctest.h>

#include <cmath>
#include <numbers>

#include "transq/diffusion.hpp"
#include "transq/queue_sim.hpp"
#include "transq/scaling.hpp"
#include "transq/stats.hpp"

using namespace transq;

TEST_CASE("alpha") {
    CHECK(alpha(1) == Rational(2, 3));
    CHECK(alpha(2) == Rational(4, 5));
    CHECK(alpha(1) * Rational(3) == Rational(2));
    const double half100 = (alpha(100) / Rational(2)).value();
    CHECK(half100 > 0.497);
    CHECK(half100 < 0.5);
    Rational prev(0);
    for (int l = 1; l < 50; ++l) {
        CHECK(alpha(l) > prev);
        prev = alpha(l);
    }
    CHECK_THROWS_AS(alpha(0), InvalidArgument);
}

TEST_CASE("exact powers") {
    CHECK(pow_rational(1e6, Rational(2, 3)) == 1e4);
    CHECK(pow_rational(1e6, Rational(1, 3)) == 100.0);
    CHECK(pow_rational(1e5, Rational(2, 5)) == 100.0);
    CHECK(pow_rational(1000.0, Rational(-1, 3)) == doctest::Approx(0.1).epsilon(1e-15));
}

TEST_CASE("embedded rescaling") {
    const std::size_t n = 1000000;
    EmbeddedPath path;
    path.initial_level = 0;
    for (std::int64_t k = 1; k <= 30000; ++k) {
        path.N.push_back(-k);
        path.Q.push_back(0);
        path.A.push_back(0);
        path.busy_starts.push_back(0);
        path.virtual_idle_total.push_back(0.0);
    }
    const auto grid = limit_grid(2.0);
    const auto r = rescale_embedded(path, n, 1, grid);
    CHECK(r.space_exp == Rational(1, 3));
    CHECK(r.time_exp == Rational(2, 3));
    for (std::size_t i = 0; i < grid.size(); ++i) {
        CHECK(r.values[i] == doctest::Approx(-std::floor(grid[i] * 1e4) / 100.0));
    }
    CHECK(r.values[20] == doctest::Approx(-100.0));  // t = 1

    const auto idx = raw_indices(r);
    const auto vals = raw_values(r);
    for (std::size_t i = 0; i < idx.size(); ++i) {
        const auto k = idx[i];
        CHECK(vals[i] == (k == 0 ? 0 : path.N[static_cast<std::size_t>(k - 1)]));
    }

    CHECK_THROWS_AS(rescale_embedded(path, n, 1, limit_grid(5.0)), InvalidArgument);

    EmbeddedPath zero = path;
    std::fill(zero.N.begin(), zero.N.end(), 0);
    for (double v : rescale_embedded(zero, n, 1, grid).values) CHECK(v == 0.0);
}

TEST_CASE("physical rescaling") {
    QueuePath empty;
    empty.events.push_back({0.0, EventKind::initial, 0});
    for (double v : rescale_physical(empty, 1000, limit_grid(1.0)).values) CHECK(v == 0.0);

    for (std::size_t n : {1000, 10000, 100000}) {
        HeavyTrafficConfig cfg{n, 1.0, 1, 1.0};
        Rng rng(1);
        const auto path = simulate_delta_queue(cfg, ArrivalModel::exponential(1.0), ServiceModel::exponential(1.0), rng,
                                               {0.5, false, true});
        const auto r = rescale_physical(path, n, {0.0});
        const double scale = std::cbrt(static_cast<double>(n));
        CHECK(r.values[0] == doctest::Approx(std::ceil(scale - 1e-9) / scale));
        CHECK(std::abs(r.values[0] - 1.0) <= 2.0 / scale);
    }
}

TEST_CASE("rescaled embedded mean follows the parabola") {
    const std::size_t n = 10000;
    HeavyTrafficConfig cfg{n, 0.0, 1, 0.0};
    const auto grid = std::vector<double>{1.0};
    Rng rng(77);
    std::vector<double> v;
    for (int i = 0; i < 4000; ++i) {
        const auto p = simulate_embedded_exponential(cfg, 1.0, ServiceModel::exponential(1.0), 500, rng);
        v.push_back(rescale_embedded(p, n, 1, grid).values[0]);
    }
    const auto s = mc_summary(v);
    CHECK(std::abs(s.mean + 0.5) < 3 * s.std_error + 0.02);
}

TEST_CASE("criticality residual") {
    const auto e = ArrivalModel::exponential(1.0);
    const auto half = ArrivalModel::half_normal(std::sqrt(std::numbers::pi / 2.0));
    const auto unit = ServiceModel::exponential(1.0);

    for (std::size_t n : {10, 1000, 100000}) {
        CHECK(std::abs(criticality_residual(e, unit, n, 1.0, 1)) < 1e-12);
        const auto hs = critical_service_scale(half, unit).service;
        CHECK(std::abs(criticality_residual(half, hs, n, 0.7, 2)) < 1e-12);
    }
    CHECK(criticality_residual(half, unit, 1000, 0.0, 2) == doctest::Approx(2.0 / std::numbers::pi - 1.0));
    CHECK(criticality_residual(half, unit, 1000, 0.0, 2) == doctest::Approx(-0.3634).epsilon(1e-3));
    // Pre-beta gap: rho_n - 1 = beta n^{-1/3}.
    CHECK(load_factor(e, unit, 1000, 1.0, 1) - 1.0 == doctest::Approx(0.1).epsilon(1e-12));
}

TEST_CASE("grid") {
    const auto g = limit_grid(1.0);
    CHECK(g.size() == 21);
    CHECK(g.front() == 0.0);
    CHECK(g.back() == doctest::Approx(1.0));
    CHECK_THROWS_AS(limit_grid(1.0, 0.0), InvalidArgument);
}
