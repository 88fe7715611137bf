#include "transq/airy.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "transq/errors.hpp"

namespace transq {

namespace {

// Unevaluated sum hi + lo with |lo| <= ulp(hi) / 2.
struct dd {
    double hi;
    double lo;
};

dd quick_two_sum(double a, double b) {
    const double s = a + b;
    return {s, b - (s - a)};
}

dd two_sum(double a, double b) {
    const double s = a + b;
    const double bb = s - a;
    return {s, (a - (s - bb)) + (b - bb)};
}

dd operator+(dd a, dd b) {
    dd s = two_sum(a.hi, b.hi);
    const dd t = two_sum(a.lo, b.lo);
    s.lo += t.hi;
    s = quick_two_sum(s.hi, s.lo);
    s.lo += t.lo;
    return quick_two_sum(s.hi, s.lo);
}

dd operator-(dd a) { return {-a.hi, -a.lo}; }
dd operator-(dd a, dd b) { return a + (-b); }

dd operator*(dd a, dd b) {
    const double p = a.hi * b.hi;
    double e = std::fma(a.hi, b.hi, -p);
    e += a.hi * b.lo + a.lo * b.hi;
    return quick_two_sum(p, e);
}

dd operator*(dd a, double b) {
    const double p = a.hi * b;
    double e = std::fma(a.hi, b, -p);
    e += a.lo * b;
    return quick_two_sum(p, e);
}

dd operator/(dd a, double b) {
    const double q1 = a.hi / b;
    const double p = q1 * b;
    const double pe = std::fma(q1, b, -p);
    double r = a.hi - p;
    r -= pe;
    r += a.lo;
    return quick_two_sum(q1, r / b);
}

double abs_hi(dd a) { return std::abs(a.hi); }

// Ai(0), -Ai'(0) and sqrt(3) to double-double precision.
constexpr dd kC1{0.3550280538878172, 2.05233632436212e-17};
constexpr dd kC2{0.2588194037928068, -2.522243111610832e-17};
constexpr dd kSqrt3{1.7320508075688772, 1.0035084221806903e-16};

constexpr double kSeriesRelTol = 1e-32;
constexpr int kSeriesMaxTerms = 200;

// Sums first + first*r_1 + first*r_1*r_2 + ... with r_k = x^3 / den(k).
template <class Den>
dd power_series(dd first, dd x3, Den den, int k0) {
    dd sum = first;
    dd term = first;
    for (int k = k0; k < k0 + kSeriesMaxTerms; ++k) {
        term = (term * x3) / den(k);
        sum = sum + term;
        if (abs_hi(term) <= kSeriesRelTol * abs_hi(sum)) break;
    }
    return sum;
}

struct AsymptoticSums {
    double u_even, u_odd, v_even, v_odd;  // alternating within parity, as in the x < 0 formulas
    double u_alt, u_all, v_alt, v_all;    // (-1)^k and all-plus sums, for x > 0
};

// Poincare sums in 1/zeta, each stopped before its terms start growing.
AsymptoticSums asymptotic_sums(double zeta) {
    constexpr int kMax = 120;
    double u[kMax + 1], v[kMax + 1];
    u[0] = v[0] = 1.0;
    for (int k = 1; k <= kMax; ++k) {
        const double kk = k;
        u[k] = u[k - 1] * (6 * kk - 5) * (6 * kk - 3) * (6 * kk - 1) / ((2 * kk - 1) * 216 * kk);
        v[k] = -(6 * kk + 1) / (6 * kk - 1) * u[k];
    }
    // Term k has magnitude c_k / zeta^k.
    auto sum = [&](const double* c, int start, int stride, bool alternate, bool alternate_within) {
        double s = 0.0;
        double prev = std::numeric_limits<double>::infinity();
        int sign = 1;
        for (int k = start; k <= kMax; k += stride) {
            const double mag = std::abs(c[k]) / std::pow(zeta, k);
            if (mag > prev) break;
            const double term = c[k] / std::pow(zeta, k);
            const int s_k = alternate ? ((k % 2) ? -1 : 1) : (alternate_within ? sign : 1);
            s += s_k * term;
            sign = -sign;
            prev = mag;
            if (mag < 1e-18 * std::abs(s)) break;
        }
        return s;
    };
    AsymptoticSums r{};
    r.u_even = sum(u, 0, 2, false, true);
    r.u_odd = sum(u, 1, 2, false, true);
    r.v_even = sum(v, 0, 2, false, true);
    r.v_odd = sum(v, 1, 2, false, true);
    r.u_alt = sum(u, 0, 1, true, false);
    r.u_all = sum(u, 0, 1, false, false);
    r.v_alt = sum(v, 0, 1, true, false);
    r.v_all = sum(v, 0, 1, false, false);
    return r;
}

// Asymptotic branch; for x > 0 the exponential factors are left out.
AiryPair asymptotic_unscaled_parts(double x) {
    const double zeta = airy_zeta(x);
    const AsymptoticSums s = asymptotic_sums(zeta);
    const double rpi = 1.0 / std::sqrt(std::numbers::pi);
    const double x14 = std::pow(std::abs(x), 0.25);
    if (x > 0.0) {
        return {0.5 * rpi / x14 * s.u_alt, rpi / x14 * s.u_all, -0.5 * rpi * x14 * s.v_alt, rpi * x14 * s.v_all};
    }
    // cos(zeta - pi/4) and sin(zeta - pi/4) without forming the shifted angle.
    const double c = std::cos(zeta), sn = std::sin(zeta);
    const double cm = (c + sn) / std::numbers::sqrt2;
    const double sm = (sn - c) / std::numbers::sqrt2;
    return {rpi / x14 * (cm * s.u_even + sm * s.u_odd), rpi / x14 * (-sm * s.u_even + cm * s.u_odd),
            rpi * x14 * (sm * s.v_even - cm * s.v_odd), rpi * x14 * (cm * s.v_even + sm * s.v_odd)};
}

void check_argument(double x) {
    if (std::isnan(x)) throw InvalidArgument("airy: NaN argument");
}

}  // namespace

double airy_zeta(double x) {
    const double ax = std::abs(x);
    return 2.0 / 3.0 * ax * std::sqrt(ax);
}

AiryPair airy_series(double x) {
    check_argument(x);
    const dd xd{x, 0.0};
    const dd x2{x * x, std::fma(x, x, -x * x)};
    const dd x3 = x2 * x;
    const dd f = power_series({1.0, 0.0}, x3, [](int k) { return (3.0 * k - 1) * (3.0 * k); }, 1);
    const dd g = power_series(xd, x3, [](int k) { return (3.0 * k) * (3.0 * k + 1); }, 1);
    const dd fp = x == 0.0 ? dd{0.0, 0.0}
                           : power_series(x2 / 2.0, x3, [](int k) { return (3.0 * k - 1) * (3.0 * k - 3); }, 2);
    const dd gp = power_series({1.0, 0.0}, x3, [](int k) { return (3.0 * k - 2) * (3.0 * k); }, 1);
    const dd c1f = kC1 * f, c2g = kC2 * g, c1fp = kC1 * fp, c2gp = kC2 * gp;
    return {(c1f - c2g).hi, (kSqrt3 * (c1f + c2g)).hi, (c1fp - c2gp).hi, (kSqrt3 * (c1fp + c2gp)).hi};
}

AiryPair airy_asymptotic(double x) {
    check_argument(x);
    if (x == 0.0) throw InvalidArgument("airy_asymptotic: undefined at 0");
    AiryPair p = asymptotic_unscaled_parts(x);
    if (x > 0.0) {
        const double zeta = airy_zeta(x);
        const double em = std::exp(-zeta), ep = std::exp(zeta);
        p.ai *= em;
        p.ai_prime *= em;
        p.bi *= ep;
        p.bi_prime *= ep;
    }
    return p;
}

AiryPair airy(double x, const AiryOptions& opts) {
    check_argument(x);
    if (x > kAiryMaxArgument) {
        std::ostringstream msg;
        msg << "airy: argument " << x << " exceeds " << kAiryMaxArgument << " (Bi overflows)";
        throw OutOfDomain(msg.str());
    }
    if (std::abs(x) <= opts.branch_point) return airy_series(x);
    return airy_asymptotic(x);
}

AiryPair airy_scaled(double x, const AiryOptions& opts) {
    check_argument(x);
    if (x <= 0.0) return airy(x, opts);
    if (x > opts.branch_point) return asymptotic_unscaled_parts(x);
    AiryPair p = airy_series(x);
    const double zeta = airy_zeta(x);
    const double ep = std::exp(zeta), em = std::exp(-zeta);
    p.ai *= ep;
    p.ai_prime *= ep;
    p.bi *= em;
    p.bi_prime *= em;
    return p;
}

double airy_branch_gap(double x) {
    const AiryPair s = airy_series(x), a = airy_asymptotic(x);
    if (x > 0.0) {
        return std::max({std::abs(s.ai - a.ai) / std::abs(a.ai), std::abs(s.bi - a.bi) / std::abs(a.bi),
                         std::abs(s.ai_prime - a.ai_prime) / std::abs(a.ai_prime),
                         std::abs(s.bi_prime - a.bi_prime) / std::abs(a.bi_prime)});
    }
    const double mod = std::hypot(a.ai, a.bi), dmod = std::hypot(a.ai_prime, a.bi_prime);
    return std::max({std::abs(s.ai - a.ai) / mod, std::abs(s.bi - a.bi) / mod,
                     std::abs(s.ai_prime - a.ai_prime) / dmod, std::abs(s.bi_prime - a.bi_prime) / dmod});
}

CheckList validate_airy(const AiryOptions& opts) {
    CheckList out;
    {
        double worst = 0.0, at = 0.0;
        for (int i = 0; i < 200; ++i) {
            const double x = -8.0 + 16.0 * i / 199.0;
            const AiryPair p = airy(x, opts);
            const double w = p.ai * p.bi_prime - p.ai_prime * p.bi;
            const double rel = std::abs(w * std::numbers::pi - 1.0);
            if (rel > worst) {
                worst = rel;
                at = x;
            }
        }
        std::ostringstream msg;
        msg << "max relative deviation from 1/pi " << worst << " at x=" << at;
        out.push_back({"airy.wronskian", worst <= 1e-10, msg.str()});
    }
    {
        const double h = 1e-4;
        double worst = 0.0;
        for (int i = 0; i <= 100; ++i) {
            const double x = -5.0 + 10.0 * i / 100.0;
            const AiryPair m = airy(x - h, opts), c = airy(x, opts), p = airy(x + h, opts);
            worst = std::max(worst, std::abs((p.ai - 2 * c.ai + m.ai) / (h * h) - x * c.ai));
            worst = std::max(worst, std::abs((p.bi - 2 * c.bi + m.bi) / (h * h) - x * c.bi));
        }
        std::ostringstream msg;
        msg << "max |y'' - x y| " << worst;
        out.push_back({"airy.ode_residual", worst < 1e-4, msg.str()});
    }
    {
        double worst = 0.0, at = 0.0;
        for (int i = 0; i <= 40; ++i) {
            const double ax = 6.5 + 2.0 * i / 40.0;
            for (double x : {ax, -ax}) {
                const double gap = airy_branch_gap(x);
                if (gap > worst) {
                    worst = gap;
                    at = x;
                }
            }
        }
        std::ostringstream msg;
        msg << "max branch gap " << worst << " at x=" << at << " over |x| in [6.5, 8.5]";
        out.push_back({"airy.branch_overlap", worst <= 1e-9, msg.str()});
    }
    return out;
}

}  // namespace transq
