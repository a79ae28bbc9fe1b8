#pragma once

#include <cstddef>
#include <functional>

namespace flatlab {

struct QuadratureResult {
    double value;
    double error;  ///< sum of the local Kronrod error estimates
    std::size_t intervals;
};

/// Globally adaptive 7/15-point Gauss-Kronrod integration on [a, b]. The
/// interval with the largest local error is bisected until the total error
/// estimate is below abs_tol. Throws QuadratureFailure on a non-finite
/// integrand value or when max_intervals is exhausted.
QuadratureResult integrate(const std::function<double(double)>& f, double a, double b, double abs_tol = 1e-12,
                           std::size_t max_intervals = 4000);

}  // namespace flatlab
