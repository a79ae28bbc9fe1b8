#pragma once

#include "flatlab/geometry.hpp"
#include "flatlab/harmonic.hpp"

#include <vector>

namespace flatlab {

struct CatenoidSpec {
    int n = 3;
    double c = 1.0;
    int branch = 1;
};

/// Where the additive constant of a catenoid end is fixed.
enum class CatenoidAnchor {
    innermost,  ///< f = 0 at the innermost grid radius
    waist,      ///< f = 0 at the waist radius c^{1/(n-2)}
};

/// Graph of the affine function whose zero set is {e.x = b}, x = (y, f).
SampledGraph make_plane(const Direction& e, double b, const GraphGrid& grid);

/// f = c arccosh(|y| / c); base dimension 2. Radii below c are rejected.
SampledGraph make_catenoid3(double c, const GraphGrid& grid);

/// Rotationally symmetric minimal graph with flux c in R^n (3 <= n <= 7):
/// rho^{n-2} f' / sqrt(1 + f'^2) = c, integrated by adaptive quadrature.
/// Base dimension n - 1. Grid radii must exceed the waist by 1e-6 of it.
SampledGraph make_catenoid_n(const CatenoidSpec& spec, const GraphGrid& grid,
                             CatenoidAnchor anchor = CatenoidAnchor::innermost);

double catenoid_waist(int n, double c);

/// Integral of c / sqrt(s^{2(n-2)} - c^2) from the waist to rho.
double catenoid_rise(int n, double c, double rho);

/// Integral of c / sqrt(s^{2(n-2)} - c^2) from rho to infinity; n >= 4.
double catenoid_tail(int n, double c, double rho);

/// Sum of harmonic modes; every mode must have base dimension grid.base_dim().
SampledGraph make_harmonic_graph(const std::vector<HarmonicMode>& modes, const GraphGrid& grid);

}  // namespace flatlab
