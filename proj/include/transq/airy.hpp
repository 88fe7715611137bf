#pragma once

#include "transq/validation.hpp"

namespace transq {

struct AiryPair {
    double ai;
    double bi;
    double ai_prime;
    double bi_prime;
};

struct AiryOptions {
    // |x| at which evaluation switches from the power series to the
    // asymptotic expansions.
    double branch_point = 7.0;
};

// Bi(x) overflows a double shortly after this argument.
inline constexpr double kAiryMaxArgument = 100.0;

// zeta = (2/3) |x|^{3/2}.
double airy_zeta(double x);

/// Ai, Bi, Ai', Bi' of a real argument.
///
/// |x| <= branch_point: Maclaurin series of the auxiliary functions f and g,
/// summed in double-double arithmetic because for large |x| the terms exceed
/// the result by a factor close to exp(2 zeta). Beyond the branch point the
/// Poincare expansions in 1/zeta, truncated at their smallest term.
/// Throws OutOfDomain for x > kAiryMaxArgument.
AiryPair airy(double x, const AiryOptions& opts = {});

// Both branches, unconditionally (the asymptotic one needs |x| > 0).
AiryPair airy_series(double x);
AiryPair airy_asymptotic(double x);

// For x > 0: {Ai e^zeta, Bi e^-zeta, Ai' e^zeta, Bi' e^-zeta}; equal to
// airy(x) for x <= 0. Defined for every finite x.
AiryPair airy_scaled(double x, const AiryOptions& opts = {});

// Largest relative gap between the two branches over the four functions.
// For x < 0 the gaps are measured against the moduli sqrt(Ai^2 + Bi^2) and
// sqrt(Ai'^2 + Bi'^2), since the functions themselves pass through zero.
double airy_branch_gap(double x);

// Wronskian, ODE residual and branch-overlap suites.
CheckList validate_airy(const AiryOptions& opts = {});

}  // namespace transq
