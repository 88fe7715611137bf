#include "transq/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <tuple>

#include "transq/errors.hpp"

namespace transq {

namespace {

// Kronrod abscissae on [0, 1]; odd indices are the 7-point Gauss nodes.
constexpr double xgk[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                           0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                           0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                           0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double wgk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                           0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                           0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                           0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double wg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                          0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
    double a, b, value, error, abs_mass;
    bool operator<(const Panel& o) const { return error < o.error; }
};

// QUADPACK's qk15 error model: the raw Kronrod-Gauss difference is damped for
// smooth panels and floored at the rounding level of the panel's |f| mass.
Panel gk15(const std::function<double(double)>& f, double a, double b) {
    constexpr double eps = std::numeric_limits<double>::epsilon();
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double fv1[7], fv2[7];
    const double fc = f(center);
    double kronrod = fc * wgk[7];
    double gauss = fc * wg[3];
    double resabs = std::abs(kronrod);
    for (int j = 0; j < 7; ++j) {
        const double dx = half * xgk[j];
        fv1[j] = f(center - dx);
        fv2[j] = f(center + dx);
        const double fsum = fv1[j] + fv2[j];
        kronrod += wgk[j] * fsum;
        resabs += wgk[j] * (std::abs(fv1[j]) + std::abs(fv2[j]));
        if (j % 2 == 1) gauss += wg[j / 2] * fsum;
    }
    if (!std::isfinite(kronrod)) {
        throw QuadratureError("non-finite integrand on [" + std::to_string(a) + ", " + std::to_string(b) + "]",
                              HUGE_VAL, 0.0);
    }
    const double mean = kronrod * 0.5;
    double resasc = wgk[7] * std::abs(fc - mean);
    for (int j = 0; j < 7; ++j) resasc += wgk[j] * (std::abs(fv1[j] - mean) + std::abs(fv2[j] - mean));
    const double abs_half = std::abs(half);
    resabs *= abs_half;
    resasc *= abs_half;
    double err = std::abs((kronrod - gauss) * half);
    if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    if (resabs > std::numeric_limits<double>::min() / (50.0 * eps)) err = std::max(50.0 * eps * resabs, err);
    return {a, b, kronrod * half, err, resabs};
}

}  // namespace

QuadResult integrate(const std::function<double(double)>& f, const std::vector<double>& breakpoints,
                     const QuadOptions& opts) {
    if (breakpoints.size() < 2) throw InvalidArgument("integrate: need at least two breakpoints");
    std::priority_queue<Panel> heap;
    QuadResult res;
    for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
        if (!(breakpoints[i] < breakpoints[i + 1])) {
            throw InvalidArgument("integrate: breakpoints must be strictly increasing");
        }
        heap.push(gk15(f, breakpoints[i], breakpoints[i + 1]));
        res.evaluations += 15;
    }

    auto totals = [&] {
        // Copy-and-drain keeps the summation order deterministic.
        auto copy = heap;
        double v = 0.0, e = 0.0, m = 0.0;
        while (!copy.empty()) {
            v += copy.top().value;
            e += copy.top().error;
            m += copy.top().abs_mass;
            copy.pop();
        }
        return std::tuple{v, e, m};
    };

    constexpr double eps = std::numeric_limits<double>::epsilon();
    double value = 0.0, error = 0.0, mass = 0.0;
    for (auto [v, e, m] = totals();; std::tie(v, e, m) = totals()) {
        value = v;
        error = e;
        mass = m;
        // Below ~100 eps of the |f| mass the estimate measures rounding, not truncation.
        const double target = std::max({opts.abs_tol, opts.rel_tol * std::abs(value), 100.0 * eps * mass});
        if (error <= target) break;
        if (heap.size() >= opts.max_panels) {
            throw QuadratureError("integrate: panel budget exhausted", error, target);
        }
        // Split a batch of the worst panels before re-summing.
        const std::size_t batch = std::max<std::size_t>(1, heap.size() / 8);
        for (std::size_t i = 0; i < batch && error > target; ++i) {
            const Panel worst = heap.top();
            heap.pop();
            const double mid = 0.5 * (worst.a + worst.b);
            if (!(mid > worst.a && mid < worst.b)) {
                throw QuadratureError("integrate: panel width underflow", error, target);
            }
            const Panel left = gk15(f, worst.a, mid);
            const Panel right = gk15(f, mid, worst.b);
            res.evaluations += 30;
            error += left.error + right.error - worst.error;
            heap.push(left);
            heap.push(right);
        }
    }
    res.value = value;
    res.error = error;
    res.panels = heap.size();
    return res;
}

QuadResult integrate(const std::function<double(double)>& f, double a, double b, const QuadOptions& opts) {
    return integrate(f, std::vector<double>{a, b}, opts);
}

}  // namespace transq
