#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "transq/dist.hpp"
#include "transq/errors.hpp"
#include "transq/stats.hpp"

using namespace transq;

namespace {
const ArrivalModel hyper = ArrivalModel::hyperexponential({0.2, 0.8}, {2.0, 0.75});
const ArrivalModel half = ArrivalModel::half_normal(std::sqrt(std::numbers::pi / 2.0));
}  // namespace

TEST_CASE("cdf at the origin and in the tail") {
    const auto e = ArrivalModel::exponential(1.0);
    CHECK(e.cdf(0.0) == 0.0);
    CHECK(e.cdf(800.0) == doctest::Approx(1.0));
    CHECK(e.cdf(std::numeric_limits<double>::infinity()) == 1.0);
}

TEST_CASE("hyperexponential closed forms") {
    // model_oracle.py
    CHECK(hyper.cdf(1.0) == doctest::Approx(0.5950397011598657).epsilon(1e-14));
    CHECK(hyper.density(1.0) == doctest::Approx(0.3375540449392539).epsilon(1e-14));
    CHECK(hyper.cumulative_hazard(1.0) == doctest::Approx(0.9039662442358367).epsilon(1e-13));
    CHECK(hyper.cdf(1.0) + hyper.survival(1.0) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("density at zero") {
    auto e = ArrivalModel::exponential(1.0).density_at_zero();
    CHECK(e.f0 == 1.0);
    CHECK(e.f0_prime == -1.0);
    CHECK(e.contact_order == 1);

    auto h = hyper.density_at_zero();
    CHECK(h.f0 == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(h.f0_prime == doctest::Approx(-1.25).epsilon(1e-15));
    CHECK(h.contact_order == 1);

    auto hn = half.density_at_zero();
    CHECK(hn.f0 == doctest::Approx(2.0 / std::numbers::pi).epsilon(1e-15));
    CHECK(hn.f0_prime == 0.0);
    CHECK(hn.contact_order == 2);
    // f''(0) = -f0 / s^2, model_oracle.py
    CHECK(half.contact_derivative() == doctest::Approx(-0.4052847345693511).epsilon(1e-14));

    CHECK_FALSE(ArrivalModel::uniform().contact_order().has_value());
}

TEST_CASE("exponential rates scale the local constants") {
    const auto d = ArrivalModel::exponential(2.5).density_at_zero();
    CHECK(d.f0 == doctest::Approx(2.5));
    CHECK(d.f0_prime == doctest::Approx(-6.25));
}

TEST_CASE("inverse cumulative hazard inverts the hazard") {
    for (const auto& m : {ArrivalModel::exponential(1.3), hyper, half, ArrivalModel::uniform()}) {
        for (double h : {1e-12, 1e-6, 1e-3, 0.1, 1.0, 5.0, 20.0}) {
            const double t = m.inverse_cumulative_hazard(h);
            // Conditioning: one ulp in t moves H by t * hazard(t) * eps.
            const double slack = 4.0 * 2.2e-16 * t * m.density(t) / m.survival(t);
            CHECK(std::abs(m.cumulative_hazard(t) - h) <= 1e-11 * h + slack);
        }
    }
}

TEST_CASE("inverse cdf inverts the cdf") {
    for (const auto& m : {ArrivalModel::exponential(1.0), hyper, half, ArrivalModel::uniform()}) {
        for (double p : {1e-9, 0.01, 0.3, 0.5, 0.9, 0.999}) CHECK(m.cdf(m.inverse_cdf(p)) == doctest::Approx(p).epsilon(1e-11));
    }
    CHECK_THROWS_AS(hyper.inverse_cdf(1.5), InvalidArgument);
}

TEST_CASE("built-in laws pass their declaration checks") {
    for (const auto& m : {ArrivalModel::exponential(1.0), ArrivalModel::exponential(3.0), hyper, half,
                          ArrivalModel::uniform()}) {
        for (const auto& c : validate_arrival(m)) {
            INFO(c.name << ": " << c.detail);
            CHECK(c.passed);
        }
    }
}

TEST_CASE("service moments") {
    for (const auto& s : {ServiceModel::exponential(1.0), ServiceModel::deterministic(2.0)}) {
        for (const auto& c : validate_service(s, 11, 200000)) {
            INFO(c.name << ": " << c.detail);
            CHECK(c.passed);
        }
    }
    const auto sc = ServiceModel::exponential(1.0).scaled(3.0);
    CHECK(sc.mean() == doctest::Approx(3.0));
    CHECK(sc.second_moment() == doctest::Approx(18.0));
}

TEST_CASE("critical service scale") {
    CHECK(critical_service_scale(ArrivalModel::exponential(1.0), ServiceModel::exponential(1.0)).gamma == 1.0);
    CHECK(critical_service_scale(half, ServiceModel::exponential(1.0)).gamma ==
          doctest::Approx(std::numbers::pi / 2.0).epsilon(1e-15));
    CHECK(critical_service_scale(hyper, ServiceModel::exponential(1.0)).gamma == doctest::Approx(1.0).epsilon(1e-15));
    const auto c = critical_service_scale(half, ServiceModel::deterministic(1.0));
    CHECK(c.service.mean() == doctest::Approx(std::numbers::pi / 2.0));
    CHECK(c.service.second_moment() == doctest::Approx(std::numbers::pi * std::numbers::pi / 4.0));
}

TEST_CASE("sorted clocks") {
    Rng rng(3);
    SUBCASE("n = 1 is a plain exponential draw") {
        std::vector<double> v;
        for (int i = 0; i < 20000; ++i) v.push_back(sample_sorted_clocks(ArrivalModel::exponential(1.0), 1, rng)[0]);
        CHECK(ks_distance(v, [](double t) { return -std::expm1(-t); }) < 0.02);
    }
    SUBCASE("n = 1e4 matches the parent cdf") {
        const auto v = sample_sorted_clocks(ArrivalModel::exponential(1.0), 10000, rng);
        CHECK(std::is_sorted(v.begin(), v.end()));
        // 99% quantile of D_n at n = 1e4 is 0.01626 (model_oracle.py).
        CHECK(ks_distance(v, [](double t) { return -std::expm1(-t); }) < 0.02);
    }
    SUBCASE("uniform median") {
        const auto v = sample_sorted_clocks(ArrivalModel::uniform(), 10000, rng);
        CHECK(std::abs(v[4999] - 0.5) < 0.02);
    }
    SUBCASE("stream and batch agree") {
        Rng a(17), b(17);
        const auto batch = sample_sorted_clocks(hyper, 500, a);
        SortedClockStream s(hyper, 500, b);
        CHECK(s.remaining() == 500);
        CHECK(s.peek() == batch[0]);
        CHECK(s.remaining() == 500);
        for (double x : batch) CHECK(s.next() == x);
        CHECK(s.exhausted());
    }
    CHECK_THROWS_AS(sample_sorted_clocks(half, 0, rng), InvalidArgument);
}

TEST_CASE("model json round trip and field paths") {
    const ModelPair m{hyper, ServiceModel::deterministic(1.5)};
    const auto back = models_from_json(to_json(m));
    CHECK(to_json(back) == to_json(m));

    nlohmann::json bad = {{"arrival", {{"kind", "half_normal"}}}, {"service", {{"kind", "exponential"}, {"mean", 1}}}};
    try {
        models_from_json(bad);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.path() == "model.arrival.scale");
    }
    bad["arrival"] = {{"kind", "exponential"}, {"rate", -1}};
    CHECK_THROWS_AS(models_from_json(bad), ConfigError);
}

TEST_CASE("invalid parameters") {
    CHECK_THROWS_AS(ArrivalModel::exponential(0.0), InvalidArgument);
    CHECK_THROWS_AS(ArrivalModel::hyperexponential({0.5, 0.6}, {1.0, 2.0}), InvalidArgument);
    CHECK_THROWS_AS(ServiceModel::exponential(-1.0), InvalidArgument);
}
