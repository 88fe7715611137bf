#include <doctest.h>

#include <cmath>

#include "transq/diffusion.hpp"
#include "transq/errors.hpp"
#include "transq/stats.hpp"

using namespace transq;

TEST_CASE("deterministic skeleton") {
    Rng rng(1);
    const DriftSpec s{0.7, 1.0, -0.5, 2, 1e-12};
    const auto p = simulate_w(s, 3.0, 0.01, rng);
    REQUIRE(p.values.size() == 301);
    CHECK(p.values[0] == 0.7);
    for (std::size_t k = 0; k < p.values.size(); ++k) {
        const double t = k * 0.01;
        CHECK(std::abs(p.values[k] - (0.7 + t - 0.5 * t * t)) < 1e-9);
    }
}

TEST_CASE("moments of W(1)") {
    Rng rng(42);
    const DriftSpec s{0.0, 1.0, -0.5, 2, 1.0};
    std::vector<double> w;
    for (int i = 0; i < 100000; ++i) w.push_back(simulate_w(s, 1.0, 0.05, rng).values.back());
    const auto m = mc_summary(w);
    CHECK(std::abs(m.mean - 0.5) < 3 * m.std_error);
    const double var = sample_std(w) * sample_std(w);
    // SE of the sample variance of a normal is sqrt(2/(N-1)) sigma^2.
    CHECK(std::abs(var - 1.0) < 3 * std::sqrt(2.0 / (w.size() - 1)));
}

TEST_CASE("reflection map") {
    CHECK(reflect({1, -1, 2}) == std::vector<double>{1, 0, 3});
    CHECK(reflect({0, 3, 0.5}) == std::vector<double>{0, 3, 0.5});
    std::vector<double> down;
    for (int i = 0; i < 50; ++i) down.push_back(-0.1 * i);
    for (double v : reflect(down)) CHECK(v == doctest::Approx(0.0).epsilon(1e-15));

    Rng rng(4);
    for (const auto& c : check_reflection_laws(rng, 300)) {
        INFO(c.name << ": " << c.detail);
        CHECK(c.passed);
    }
}

TEST_CASE("deterministic hitting times") {
    Rng rng(1);
    const double dt = 1e-4;
    auto a = hitting_time_zero(simulate_w({1.0, 0.0, -0.5, 2, 1e-12}, 5.0, dt, rng));
    REQUIRE(a.has_value());
    CHECK(std::abs(*a - std::sqrt(2.0)) <= dt);
    auto b = hitting_time_zero(simulate_w({1.0, 1.0, -0.5, 2, 1e-12}, 5.0, dt, rng));
    REQUIRE(b.has_value());
    CHECK(std::abs(*b - (1.0 + std::sqrt(3.0))) <= dt);
}

TEST_CASE("censoring and undefined starts") {
    Rng rng(1);
    CHECK_FALSE(hitting_time_zero(simulate_w({5.0, 0.0, -0.5, 2, 1e-12}, 1.0, 0.01, rng)).has_value());
    CHECK_THROWS_AS(hitting_time_zero(simulate_w({0.0, 0.0, -0.5, 2, 1.0}, 1.0, 0.01, rng)), UndefinedBusyPeriod);
}

TEST_CASE("streaming sampler reproduces the stored path") {
    const DriftSpec s{1.0, 1.0, -0.5, 2, 1.0};
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        Rng a(seed), b(seed);
        CHECK(sample_hitting_time(s, 30.0, 1e-3, a) == hitting_time_zero(simulate_w(s, 30.0, 1e-3, b)));
    }
}

TEST_CASE("factories") {
    const auto e = DriftSpec::exponential_arrivals(1.0, 1.0, 1.0, 2.0);
    CHECK(e.a == 1.0);
    CHECK(e.c == -0.5);
    CHECK(e.sigma == doctest::Approx(std::sqrt(2.0)));

    const auto hyper = ArrivalModel::hyperexponential({0.2, 0.8}, {2.0, 0.75});
    const auto svc = critical_service_scale(hyper, ServiceModel::exponential(1.0)).service;
    const auto g = DriftSpec::general_arrivals(2.0, 1.0, hyper, svc);
    CHECK(g.q == 2.0);
    CHECK(g.c == doctest::Approx(-0.625));
    CHECK(g.m == 2);
    const auto emb = DriftSpec::embedded_general(0.0, hyper, svc);
    CHECK(emb.c == doctest::Approx(-0.625));
    CHECK(emb.sigma == doctest::Approx(std::sqrt(2.0)));

    const auto half = ArrivalModel::half_normal(std::sqrt(std::acos(-1.0) / 2.0));
    const auto hs = critical_service_scale(half, ServiceModel::exponential(1.0)).service;
    const auto h = DriftSpec::general_arrivals(0.0, 1.0, half, hs);
    // f''(0)/3! and sigma from model_oracle.py
    CHECK(h.m == 3);
    CHECK(h.c == doctest::Approx(-0.06754745576155852).epsilon(1e-12));
    CHECK(h.sigma == doctest::Approx(1.1283791670955126).epsilon(1e-12));
    CHECK(h.a == doctest::Approx(0.6366197723675814));
}

TEST_CASE("default horizon") {
    const DriftSpec s{1.0, 1.0, -0.5, 2, 1.0};
    CHECK(default_horizon(s) == doctest::Approx(4.0 * 2.0 + 4.0 * std::sqrt(2.0) + 20.0));
    CHECK_THROWS_AS(default_horizon(DriftSpec{1.0, 1.0, 0.5, 2, 1.0}), InvalidArgument);
}

TEST_CASE("invalid specs") {
    Rng rng(1);
    CHECK_THROWS_AS(simulate_w({1.0, 0.0, -0.5, 2, 1.0}, 1.0, 0.0, rng), InvalidArgument);
    CHECK_THROWS_AS(simulate_w({1.0, 0.0, -0.5, 1, 1.0}, 1.0, 0.1, rng), InvalidArgument);
    CHECK_THROWS_AS(simulate_w({1.0, 0.0, -0.5, 2, 0.0}, 1.0, 0.1, rng), InvalidArgument);
}
