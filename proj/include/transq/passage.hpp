#pragma once

#include <cstddef>
#include <functional>

#include "transq/airy.hpp"
#include "transq/quadrature.hpp"

namespace transq {

// Standard form q + beta t - t^2/2 + sigma B(t).
class StdFptParams {
public:
    StdFptParams(double q, double beta, double sigma);

    double q() const noexcept { return q_; }
    double beta() const noexcept { return beta_; }
    double sigma() const noexcept { return sigma_; }
    // (2 sigma^2)^{1/3}
    double c_const() const noexcept { return c_; }
    // q / sigma^2
    double x() const noexcept { return x_; }

private:
    double q_, beta_, sigma_, c_, x_;
};

// q + a t - (k/2) t^2 + sigma B(t), k > 0.
struct GeneralFptParams {
    double q;
    double a;
    double k;
    double sigma;
};

struct PassageOptions {
    // Inner u-integral: abs_tol is taken relative to the peak of the integrand.
    QuadOptions inner{1e-12, 1e-10, 20000};
    // Outer t-integrals (mean, mass, tail).
    QuadOptions outer{1e-9, 1e-9, 4000};
    AiryOptions airy{};
};

struct FptResult {
    double value = 0.0;
    double error = 0.0;           // outer quadrature estimate
    std::size_t evaluations = 0;  // density evaluations
    double t_min = 0.0;           // integration support
    double t_max = 0.0;
};

/// Density of the first time q + beta t - t^2/2 + sigma B(t) reaches 0:
///
///   f(t) = exp(-((t-beta)^3 + beta^3)/(6 sigma^2) - beta x)
///          * int e^{tu} [B(u)A(u-x) - A(u)B(u-x)] / (pi (A(u)^2 + B(u)^2)) du
///
/// with A(u) = Ai(cu), B(u) = Bi(cu). The integrand is assembled from
/// exponentially scaled Airy values so that the growth of e^{tu} and of Bi
/// cancel analytically. Below the first support point (where the passage
/// probability is under 1e-16) the small-time limit
/// q / (sigma sqrt(2 pi t^3)) exp(-(q + beta t)^2 / (2 sigma^2 t)) is returned.
double fpt_density(const StdFptParams& p, double t, const PassageOptions& opts = {});

// Support [t_min, t_max] outside of which the density carries negligible mass.
std::pair<double, double> fpt_support(const StdFptParams& p, const PassageOptions& opts = {});

FptResult fpt_mass(const StdFptParams& p, const PassageOptions& opts = {});
FptResult fpt_mean(const StdFptParams& p, const PassageOptions& opts = {});
// P(T > x) by quadrature of the density.
FptResult fpt_tail(const StdFptParams& p, double x, const PassageOptions& opts = {});

struct FptGeneral {
    StdFptParams standard;
    double time_scale;  // k^{-2/3}
    std::function<double(double)> density;
    FptResult mean;
};

// Reduction to standard form: (q k^{1/3}, a k^{-1/3}, sigma), time multiplied by k^{-2/3}.
FptGeneral fpt_general(const GeneralFptParams& p, const PassageOptions& opts = {});

// F3(x) = (x - beta)^3 - x^3/4 - 3 q x + beta^3 + 6 beta q.
double f3(double x, double q, double beta);
double f3_prime(double x, double q, double beta);

// Large-x approximation of P(T > x):
// 3 sigma sqrt(x) / sqrt(2 pi) * exp(-F3(x) / (6 sigma^2)) / F3'(x).
double tail_probability(double q, double beta, double sigma, double x);

}  // namespace transq
