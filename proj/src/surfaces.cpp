#include "flatlab/surfaces.hpp"

#include "flatlab/errors.hpp"
#include "flatlab/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace flatlab {

namespace {

constexpr double quad_tol = 1e-12;

void check_dimension(int n)
{
    if (n < 3 || n > 7) {
        throw InvalidArgument("catenoid dimension must lie in [3, 7], got " + std::to_string(n));
    }
}

// Integrand after s = w + t^2; regular at the waist.
double substituted(double t, int k, double c, double w)
{
    const double s = w + t * t;
    const double gap = c * std::expm1(k * std::log1p(t * t / w));
    return 2.0 * t * c / std::sqrt(gap * (std::pow(s, k) + c));
}

double rise_between(int k, double c, double w, double rho_a, double rho_b)
{
    const double ta = std::sqrt(std::max(0.0, rho_a - w));
    const double tb = std::sqrt(std::max(0.0, rho_b - w));
    return integrate([&](double t) { return substituted(t, k, c, w); }, ta, tb, quad_tol).value;
}

}  // namespace

SampledGraph make_plane(const Direction& e, double b, const GraphGrid& grid)
{
    const int m = grid.base_dim();
    if (e.dim() != m + 1) {
        throw DimensionMismatch("plane normal must have dimension " + std::to_string(m + 1));
    }
    const double en = e[static_cast<std::size_t>(m)];
    if (std::abs(en) < 1e-14) {
        throw DegenerateDirection("plane normal is orthogonal to the graph axis");
    }
    std::vector<double> v(grid.node_count());
    for (std::size_t i = 0; i < grid.radial_count(); ++i) {
        for (std::size_t j = 0; j < grid.angular_count(); ++j) {
            auto w = grid.direction(j);
            double s = 0.0;
            for (std::size_t a = 0; a < static_cast<std::size_t>(m); ++a) {
                s += e[a] * grid.radius(i) * w[a];
            }
            v[grid.index(i, j)] = (b - s) / en;
        }
    }
    return SampledGraph(grid, std::move(v));
}

SampledGraph make_catenoid3(double c, const GraphGrid& grid)
{
    if (grid.base_dim() != 2) {
        throw DimensionMismatch("make_catenoid3 needs a base dimension 2 grid");
    }
    if (!(c > 0.0)) {
        throw InvalidArgument("catenoid flux must be positive");
    }
    if (!(grid.radius(0) >= c)) {
        throw DomainViolation("grid radius " + std::to_string(grid.radius(0)) + " is inside the waist " +
                              std::to_string(c));
    }
    std::vector<double> v(grid.node_count());
    for (std::size_t i = 0; i < grid.radial_count(); ++i) {
        const double f = c * std::acosh(grid.radius(i) / c);
        for (std::size_t j = 0; j < grid.angular_count(); ++j) {
            v[grid.index(i, j)] = f;
        }
    }
    return SampledGraph(grid, std::move(v));
}

double catenoid_waist(int n, double c)
{
    check_dimension(n);
    return std::pow(c, 1.0 / (n - 2));
}

double catenoid_rise(int n, double c, double rho)
{
    check_dimension(n);
    if (!(c > 0.0)) {
        throw InvalidArgument("catenoid flux must be positive");
    }
    const double w = catenoid_waist(n, c);
    if (rho < w) {
        throw DomainViolation("radius below the waist");
    }
    return rise_between(n - 2, c, w, w, rho);
}

double catenoid_tail(int n, double c, double rho)
{
    check_dimension(n);
    if (n == 3) {
        throw InvalidArgument("the n = 3 catenoid grows logarithmically; no finite tail");
    }
    if (!(c > 0.0)) {
        throw InvalidArgument("catenoid flux must be positive");
    }
    const int k = n - 2;
    const double w = catenoid_waist(n, c);
    if (!(rho > w)) {
        throw DomainViolation("radius must exceed the waist");
    }
    if (rho < 2.0 * w) {
        return rise_between(k, c, w, rho, 2.0 * w) + catenoid_tail(n, c, 2.0 * w);
    }
    // s = rho / u
    const double scale = c * std::pow(rho, 1 - k);
    auto g = [&](double u) {
        const double q = c * std::pow(u / rho, k);
        return scale * std::pow(u, k - 2) / std::sqrt((1.0 - q) * (1.0 + q));
    };
    return integrate(g, 0.0, 1.0, quad_tol).value;
}

SampledGraph make_catenoid_n(const CatenoidSpec& spec, const GraphGrid& grid, CatenoidAnchor anchor)
{
    check_dimension(spec.n);
    if (grid.base_dim() != spec.n - 1) {
        throw DimensionMismatch("catenoid in R^" + std::to_string(spec.n) + " needs base dimension " +
                                std::to_string(spec.n - 1));
    }
    if (spec.branch != 1 && spec.branch != -1) {
        throw InvalidArgument("branch sign must be +1 or -1");
    }
    if (spec.c < 0.0) {
        throw InvalidArgument("catenoid flux must be nonnegative");
    }
    std::vector<double> v(grid.node_count(), 0.0);
    if (spec.c == 0.0) {
        return SampledGraph(grid, std::move(v));
    }
    const int k = spec.n - 2;
    const double w = catenoid_waist(spec.n, spec.c);
    if (grid.radius(0) < w * (1.0 + 1e-6)) {
        throw DomainViolation("innermost radius " + std::to_string(grid.radius(0)) +
                              " is within 1e-6 relative of the waist " + std::to_string(w));
    }
    double G = anchor == CatenoidAnchor::waist ? rise_between(k, spec.c, w, w, grid.radius(0)) : 0.0;
    for (std::size_t i = 0; i < grid.radial_count(); ++i) {
        if (i > 0) {
            G += rise_between(k, spec.c, w, grid.radius(i - 1), grid.radius(i));
        }
        for (std::size_t j = 0; j < grid.angular_count(); ++j) {
            v[grid.index(i, j)] = spec.branch * G;
        }
    }
    return SampledGraph(grid, std::move(v));
}

SampledGraph make_harmonic_graph(const std::vector<HarmonicMode>& modes, const GraphGrid& grid)
{
    for (const auto& mode : modes) {
        if (mode.m != grid.base_dim()) {
            throw DimensionMismatch("mode base dimension " + std::to_string(mode.m) + " differs from grid " +
                                    std::to_string(grid.base_dim()));
        }
    }
    return synthesize(modes, grid);
}

}  // namespace flatlab
