#include <doctest.h>

#include <cmath>
#include <numbers>

#include "transq/airy.hpp"
#include "transq/errors.hpp"

using namespace transq;

namespace {
#include "airy_table.inc"

double rel(double got, double want, double scale) { return std::abs(got - want) / scale; }
}  // namespace

TEST_CASE("values at the origin") {
    const auto a = airy(0.0);
    CHECK(a.ai == doctest::Approx(0.3550280539).epsilon(1e-10));
    CHECK(a.bi == doctest::Approx(0.6149266274).epsilon(1e-10));
}

TEST_CASE("agreement with the high-precision table") {
    for (const auto& r : kAiryTable) {
        CAPTURE(r.x);
        const auto a = airy(r.x);
        // Oscillatory side: compare against the modulus.
        const double m = r.x < 0 ? std::hypot(r.ai, r.bi) : 1.0;
        const double mp = r.x < 0 ? std::hypot(r.aip, r.bip) : 1.0;
        CHECK(rel(a.ai, r.ai, r.x < 0 ? m : std::abs(r.ai)) < 1e-11);
        CHECK(rel(a.bi, r.bi, r.x < 0 ? m : std::abs(r.bi)) < 1e-11);
        CHECK(rel(a.ai_prime, r.aip, r.x < 0 ? mp : std::abs(r.aip)) < 1e-11);
        CHECK(rel(a.bi_prime, r.bip, r.x < 0 ? mp : std::abs(r.bip)) < 1e-11);
    }
}

TEST_CASE("growth and decay bounds") {
    const auto a = airy(20.0);
    CHECK(a.ai > 0.0);
    CHECK(a.ai < 1e-25);
    CHECK(a.bi > 1e20);
}

TEST_CASE("oscillation on the negative axis") {
    const auto a5 = airy(-5.0), a4 = airy(-4.0);
    CHECK(std::abs(a5.ai) < 1.0);
    CHECK(std::abs(a5.bi) < 1.0);
    CHECK(a5.ai * a4.ai < 0.0);
    // First zero of Ai is -2.3381 (mpmath); the sign flips across it.
    CHECK(airy(kAiryFirstZero - 1e-6).ai < 0.0);
    CHECK(airy(kAiryFirstZero + 1e-6).ai > 0.0);
}

TEST_CASE("wronskian on [-8, 8]") {
    for (int i = 0; i < 200; ++i) {
        const double x = -8.0 + 16.0 * i / 199.0;
        const auto a = airy(x);
        CHECK(std::abs((a.ai * a.bi_prime - a.ai_prime * a.bi) * std::numbers::pi - 1.0) < 1e-10);
    }
}

TEST_CASE("branches agree in the overlap window") {
    for (double x : {-8.5, -7.0, -6.5, 6.5, 7.0, 8.5}) {
        CAPTURE(x);
        CHECK(airy_branch_gap(x) < 1e-9);
    }
}

TEST_CASE("scaled values") {
    for (double x : {0.5, 3.0, 7.5, 40.0}) {
        const auto s = airy_scaled(x);
        const auto a = airy(x);
        const double z = airy_zeta(x);
        CHECK(s.ai == doctest::Approx(a.ai * std::exp(z)).epsilon(1e-12));
        CHECK(s.bi == doctest::Approx(a.bi * std::exp(-z)).epsilon(1e-12));
    }
    CHECK(std::isfinite(airy_scaled(1e4).ai));
}

TEST_CASE("domain limits") {
    CHECK_THROWS_AS(airy(100.5), OutOfDomain);
    try {
        airy(150.0);
    } catch (const OutOfDomain& e) {
        CHECK(std::string(e.what()).find("100") != std::string::npos);
    }
    CHECK_NOTHROW(airy(-100.0));
}

TEST_CASE("built-in validation suite") {
    for (const auto& c : validate_airy()) {
        INFO(c.name << ": " << c.detail);
        CHECK(c.passed);
    }
}

TEST_CASE("a misplaced branch point breaks the wronskian") {
    bool any_failed = false;
    for (const auto& c : validate_airy(AiryOptions{2.0})) any_failed = any_failed || !c.passed;
    CHECK(any_failed);
}
