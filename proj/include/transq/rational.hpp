#pragma once

#include <cmath>
#include <compare>
#include <cstdint>
#include <numeric>
#include <ostream>

#include "transq/errors.hpp"

namespace transq {

// Exact rational with a positive, reduced denominator.
class Rational {
public:
    constexpr Rational(std::int64_t num = 0, std::int64_t den = 1) : num_(num), den_(den) {
        if (den_ == 0) throw InvalidArgument("Rational: zero denominator");
        if (den_ < 0) {
            num_ = -num_;
            den_ = -den_;
        }
        const std::int64_t g = std::gcd(num_ < 0 ? -num_ : num_, den_);
        if (g > 1) {
            num_ /= g;
            den_ /= g;
        }
    }

    constexpr std::int64_t num() const noexcept { return num_; }
    constexpr std::int64_t den() const noexcept { return den_; }
    constexpr double value() const noexcept {
        return static_cast<double>(num_) / static_cast<double>(den_);
    }

    friend constexpr Rational operator+(Rational a, Rational b) {
        return {a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_};
    }
    friend constexpr Rational operator-(Rational a, Rational b) {
        return {a.num_ * b.den_ - b.num_ * a.den_, a.den_ * b.den_};
    }
    friend constexpr Rational operator*(Rational a, Rational b) {
        return {a.num_ * b.num_, a.den_ * b.den_};
    }
    friend constexpr Rational operator/(Rational a, Rational b) {
        return {a.num_ * b.den_, a.den_ * b.num_};
    }
    friend constexpr bool operator==(Rational a, Rational b) noexcept {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend constexpr std::strong_ordering operator<=>(Rational a, Rational b) noexcept {
        return a.num_ * b.den_ <=> b.num_ * a.den_;
    }
    friend std::ostream& operator<<(std::ostream& os, Rational r) {
        return os << r.num_ << '/' << r.den_;
    }

private:
    std::int64_t num_;
    std::int64_t den_;
};

// n^e for an exact exponent. Exact when n is an integral perfect power of
// the exponent's denominator (e.g. 1e6^(2/3) = 1e4); otherwise exp(e ln n),
// accurate to a few ulp.
inline double pow_rational(double n, Rational e) {
    if (e.num() == 0) return 1.0;
    if (n > 0.0 && n <= 0x1.0p53 && n == std::floor(n) && e.den() <= 64) {
        const double root = std::round(std::pow(n, 1.0 / static_cast<double>(e.den())));
        double back = 1.0;
        for (std::int64_t i = 0; i < e.den() && back <= n; ++i) back *= root;
        if (back == n) {
            double r = 1.0;
            const std::int64_t k = e.num() < 0 ? -e.num() : e.num();
            for (std::int64_t i = 0; i < k; ++i) r *= root;
            return e.num() < 0 ? 1.0 / r : r;
        }
    }
    return std::exp(e.value() * std::log(n));
}

}  // namespace transq
