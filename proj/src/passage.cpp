#include "transq/passage.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "transq/errors.hpp"

namespace transq {

StdFptParams::StdFptParams(double q, double beta, double sigma) : q_(q), beta_(beta), sigma_(sigma) {
    if (!(q > 0.0) || !std::isfinite(q)) throw InvalidArgument("first passage: q must be positive");
    if (!std::isfinite(beta)) throw InvalidArgument("first passage: beta must be finite");
    if (!(sigma > 0.0) || !std::isfinite(sigma)) throw InvalidArgument("first passage: sigma must be positive");
    c_ = std::cbrt(2.0 * sigma * sigma);
    x_ = q / (sigma * sigma);
}

namespace {

double zeta_pos(double z) { return z > 0.0 ? airy_zeta(z) : 0.0; }

// Below -kPhaseSwitch the kernel is evaluated in modulus-phase form: with
// Ai(-y) = M cos(theta), Bi(-y) = M sin(theta) the numerator is
// M(y1) M(y2) sin(theta1 - theta2), and the phase difference is formed
// directly instead of from two large, separately rounded phases.
constexpr double kPhaseSwitch = 30.0;

// theta(-y2) - theta(-y1) for y2 > y1 >= kPhaseSwitch, negated:
// theta(-y) = pi/4 - zeta (1 - 5/32 y^-3 + 1105/6144 y^-6 - ...).
double phase_gap(double y1, double y2) {
    auto correction = [](double y) {
        const double w = 1.0 / (y * y * y);
        return airy_zeta(-y) * w * (-5.0 / 32.0 + w * (1105.0 / 6144.0 + w * (-82825.0 / 65536.0 + w * (1282031525.0 / 58720256.0))));
    };
    const double r1 = std::sqrt(y1), r2 = std::sqrt(y2);
    const double zeta_gap = 2.0 / 3.0 * (y2 - y1) * (y2 * y2 + y2 * y1 + y1 * y1) / (y2 * r2 + y1 * r1);
    return zeta_gap + correction(y2) - correction(y1);
}

// Everything the u-integral needs at a fixed t.
struct Integrand {
    const StdFptParams& p;
    double t;
    double prefactor;  // log of the exp(...) factor in front of the integral
    AiryOptions airy_opts;

    // Log-envelope of the dominant term; concave in u.
    double log_envelope(double u) const {
        const double c = p.c_const();
        return prefactor + t * u - zeta_pos(c * u) - zeta_pos(c * (u - p.x()));
    }

    double slope(double u) const {
        const double c15 = std::pow(p.c_const(), 1.5);
        return t - c15 * std::sqrt(std::max(u, 0.0)) - c15 * std::sqrt(std::max(u - p.x(), 0.0));
    }

    double operator()(double u) const {
        const double c = p.c_const();
        const double z1 = c * u, z2 = c * (u - p.x());
        if (z1 < -kPhaseSwitch) {
            const AiryPair a1 = airy(z1, airy_opts), a2 = airy(z2, airy_opts);
            const double m1 = std::hypot(a1.ai, a1.bi), m2 = std::hypot(a2.ai, a2.bi);
            return std::exp(prefactor + t * u) * m2 * std::sin(phase_gap(-z1, -z2)) / (std::numbers::pi * m1);
        }
        const double s1 = zeta_pos(z1), s2 = zeta_pos(z2);
        const AiryPair a1 = airy_scaled(z1, airy_opts), a2 = airy_scaled(z2, airy_opts);
        const double damp = s1 > 0.0 ? std::exp(-4.0 * s1) : 1.0;
        const double denom = std::numbers::pi * (a1.ai * a1.ai * damp + a1.bi * a1.bi);
        const double base = prefactor + t * u;
        const double term1 = a1.bi * a2.ai / denom * std::exp(base - s1 - s2);
        const double term2 = a1.ai * a2.bi / denom * std::exp(base - 3.0 * s1 + s2);
        return term1 - term2;
    }
};

double density_impl(const StdFptParams& p, double t, const PassageOptions& opts, QuadResult* diag) {
    if (!(t > 0.0) || !std::isfinite(t)) throw InvalidArgument("fpt_density: t must be positive and finite");
    const double s2 = p.sigma() * p.sigma();
    const double b = p.beta();
    const double prefactor = -(std::pow(t - b, 3) + b * b * b) / (6.0 * s2) - b * p.x();
    const Integrand g{p, t, prefactor, opts.airy};

    // Peak of the concave envelope on u > 0 (slope(0) = t > 0).
    double lo = 0.0, hi = 1.0;
    while (g.slope(hi) > 0.0) hi *= 2.0;
    for (int i = 0; i < 200 && hi - lo > 1e-12 * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        (g.slope(mid) > 0.0 ? lo : hi) = mid;
    }
    const double u_peak = 0.5 * (lo + hi);
    const double log_peak = g.log_envelope(u_peak);
    const double scale = std::exp(std::max(log_peak, prefactor)) / std::numbers::pi;

    // Right end: envelope 50 e-folds below the peak.
    double u_right = u_peak + 1.0;
    while (g.log_envelope(u_right) > log_peak - 50.0) u_right = u_peak + 2.0 * (u_right - u_peak);

    // Left end: |kernel| <= 1/pi for u < 0, so the tail is below e^{prefactor + t u} / (pi t).
    const double abs_tol = opts.inner.abs_tol * scale;
    const double u_left = std::min(-1.0, (std::log(1e-2 * abs_tol * std::numbers::pi * t) - prefactor) / t);

    // The kernel oscillates on u < 0 with phase ~ c^{3/2} x sqrt(|u|);
    // quarter periods in sqrt(|u|).
    const double h = 0.5 * std::numbers::pi / (std::pow(p.c_const(), 1.5) * p.x());
    std::vector<double> bp;
    const double root = std::sqrt(-u_left);
    const auto pieces = static_cast<std::size_t>(std::ceil(root / h));
    for (std::size_t j = pieces; j > 0; --j) {
        const double r = std::min(root, static_cast<double>(j) * h);
        bp.push_back(-r * r);
    }
    bp.push_back(0.0);
    for (int j = 1; j <= 8; ++j) bp.push_back(u_right * j / 8.0);
    bp.push_back(p.x());
    bp.push_back(u_peak);
    std::sort(bp.begin(), bp.end());
    bp.erase(std::unique(bp.begin(), bp.end(), [](double x, double y) { return std::abs(x - y) < 1e-12 * (1 + std::abs(x)); }),
             bp.end());
    bp.erase(std::remove_if(bp.begin(), bp.end(), [&](double u) { return u > u_right; }), bp.end());
    if (bp.back() < u_right) bp.push_back(u_right);

    QuadOptions q = opts.inner;
    q.abs_tol = abs_tol;
    const QuadResult r = integrate(std::cref(g), bp, q);
    if (diag) *diag = r;
    if (r.value < 0.0) {
        if (-r.value > 10.0 * (r.error + abs_tol)) {
            throw QuadratureError("fpt_density: negative value " + std::to_string(r.value), r.error, abs_tol);
        }
        return 0.0;
    }
    return r.value;
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

// Before this time the process has reached 0 with probability below 1e-16:
// W >= q - |beta| t - t^2/2 + sigma B on [0, t].
double small_time_limit(const StdFptParams& p) {
    const double ab = std::abs(p.beta());
    auto margin = [&](double t) { return p.q() - ab * t - 0.5 * t * t; };
    auto bound = [&](double t) {
        const double m = margin(t);
        return m <= 0.0 ? 1.0 : 2.0 * normal_cdf(-m / (p.sigma() * std::sqrt(t)));
    };
    double lo = 0.0, hi = -ab + std::sqrt(ab * ab + 2.0 * p.q());  // margin(hi) = 0
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (bound(mid) < 1e-16 ? lo : hi) = mid;
    }
    return lo;
}

}  // namespace

double fpt_density(const StdFptParams& p, double t, const PassageOptions& opts) {
    if (!(t > 0.0) || !std::isfinite(t)) throw InvalidArgument("fpt_density: t must be positive and finite");
    if (t < small_time_limit(p)) {
        // The u-integral cancels to below double precision here; use the
        // small-time limit, the passage density of q + beta t + sigma B.
        const double s = p.sigma();
        const double z = p.q() + p.beta() * t;
        return p.q() / (s * std::sqrt(2.0 * std::numbers::pi * t * t * t)) * std::exp(-z * z / (2.0 * s * s * t));
    }
    return density_impl(p, t, opts, nullptr);
}

std::pair<double, double> fpt_support(const StdFptParams& p, const PassageOptions& opts) {
    const double t_min = small_time_limit(p);

    // Beyond t_max the density (and t times it) is negligible. Start where the
    // tail approximation drops below 1e-14 and confirm with the density.
    double t_max = std::max(1.0, p.beta() + 1.0);
    while (f3_prime(t_max, p.q(), p.beta()) <= 0.0 ||
           t_max * tail_probability(p.q(), p.beta(), p.sigma(), t_max) > 1e-14) {
        t_max += 0.25;
    }
    while (t_max * fpt_density(p, t_max, opts) > 1e-15) t_max += 0.5;
    return {t_min, t_max};
}

namespace {

FptResult moment(const StdFptParams& p, int power, double from, const PassageOptions& opts) {
    auto [t_min, t_max] = fpt_support(p, opts);
    t_min = std::max(t_min, from);
    FptResult res;
    res.t_min = t_min;
    res.t_max = t_max;
    if (!(t_min < t_max)) return res;
    std::size_t evals = 0;
    auto f = [&](double t) {
        ++evals;
        const double d = fpt_density(p, t, opts);
        return power == 1 ? t * d : d;
    };
    std::vector<double> bp;
    for (int j = 0; j <= 16; ++j) bp.push_back(t_min + (t_max - t_min) * j / 16.0);
    const QuadResult r = integrate(f, bp, opts.outer);
    res.value = r.value;
    res.error = r.error;
    res.evaluations = evals;
    return res;
}

}  // namespace

FptResult fpt_mass(const StdFptParams& p, const PassageOptions& opts) { return moment(p, 0, 0.0, opts); }

FptResult fpt_mean(const StdFptParams& p, const PassageOptions& opts) { return moment(p, 1, 0.0, opts); }

FptResult fpt_tail(const StdFptParams& p, double x, const PassageOptions& opts) {
    PassageOptions o = opts;
    o.outer.abs_tol = 0.0;  // the tail can be far below any fixed absolute tolerance
    o.outer.rel_tol = 1e-8;
    // Past the support's end the density is continued until it is negligible relative to the tail.
    FptResult r = moment(p, 0, x, o);
    if (x >= r.t_max) {
        const double hi = x + 10.0;
        std::vector<double> bp;
        for (int j = 0; j <= 16; ++j) bp.push_back(x + (hi - x) * j / 16.0);
        const QuadResult q = integrate([&](double t) { return fpt_density(p, t, o); }, bp, o.outer);
        r.value = q.value;
        r.error = q.error;
        r.t_min = x;
        r.t_max = hi;
    }
    return r;
}

FptGeneral fpt_general(const GeneralFptParams& p, const PassageOptions& opts) {
    if (!(p.k > 0.0) || !std::isfinite(p.k)) {
        throw InvalidArgument("fpt_general: parabolic coefficient k must be positive (needs f_T'(0) < 0)");
    }
    const double k13 = std::cbrt(p.k);
    const double time_scale = 1.0 / (k13 * k13);
    StdFptParams standard(p.q * k13, p.a / k13, p.sigma);
    FptResult mean = fpt_mean(standard, opts);
    mean.value *= time_scale;
    mean.error *= time_scale;
    mean.t_min *= time_scale;
    mean.t_max *= time_scale;
    auto density = [standard, time_scale, opts](double t) {
        return fpt_density(standard, t / time_scale, opts) / time_scale;
    };
    return {standard, time_scale, density, mean};
}

double f3(double x, double q, double beta) {
    const double d = x - beta;
    return d * d * d - 0.25 * x * x * x - 3.0 * q * x + beta * beta * beta + 6.0 * beta * q;
}

double f3_prime(double x, double q, double beta) {
    const double d = x - beta;
    return 3.0 * d * d - 0.75 * x * x - 3.0 * q;
}

double tail_probability(double q, double beta, double sigma, double x) {
    const double fp = f3_prime(x, q, beta);
    if (!(fp > 0.0)) {
        throw OutsideAsymptoticRegime("tail_probability: F3'(" + std::to_string(x) +
                                      ") <= 0, outside the asymptotic regime");
    }
    return 3.0 * sigma * std::sqrt(x) / std::sqrt(2.0 * std::numbers::pi) *
           std::exp(-f3(x, q, beta) / (6.0 * sigma * sigma)) / fp;
}

}  // namespace transq
