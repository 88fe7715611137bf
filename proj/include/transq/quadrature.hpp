#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace transq {

struct QuadOptions {
    double abs_tol = 1e-10;
    double rel_tol = 1e-10;
    std::size_t max_panels = 20000;
};

struct QuadResult {
    double value = 0.0;
    double error = 0.0;  // summed Kronrod-Gauss differences
    std::size_t panels = 0;
    std::size_t evaluations = 0;
};

/// Globally adaptive 15-point Gauss-Kronrod quadrature.
///
/// `breakpoints` (sorted, at least two) define the initial panels; the panel
/// with the largest error estimate is bisected until the summed estimate is
/// below max(abs_tol, rel_tol * |value|). Throws QuadratureError when the
/// panel budget runs out first.
QuadResult integrate(const std::function<double(double)>& f, const std::vector<double>& breakpoints,
                     const QuadOptions& opts = {});

QuadResult integrate(const std::function<double(double)>& f, double a, double b, const QuadOptions& opts = {});

}  // namespace transq
