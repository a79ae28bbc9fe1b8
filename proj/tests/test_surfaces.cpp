#include "flatlab/errors.hpp"
#include "flatlab/minimal.hpp"
#include "flatlab/quadrature.hpp"
#include "flatlab/surfaces.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace flatlab;

TEST(Quadrature, PolynomialAndSmooth)
{
    const auto p = integrate([](double x) { return x * x * x - 2.0 * x; }, 0.0, 2.0);
    EXPECT_NEAR(p.value, 0.0, 1e-14);
    const auto e = integrate([](double x) { return std::exp(-x); }, 0.0, 30.0);
    EXPECT_NEAR(e.value, 1.0 - std::exp(-30.0), 1e-13);
}

TEST(Quadrature, EndpointSingularity)
{
    // integral of 1/sqrt(x) on (0, 1)
    const auto r = integrate([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0, 1e-10, 10000);
    EXPECT_NEAR(r.value, 2.0, 1e-8);
}

TEST(Quadrature, NonFiniteIntegrandFails)
{
    EXPECT_THROW(integrate([](double) { return NAN; }, 0.0, 1.0), QuadratureFailure);
}

TEST(Plane, AxisAndOffset)
{
    const auto grid = GraphGrid::polar(1.0, 10.0, 9, 8);
    for (double v : make_plane(Direction::axis(3, 2), 0.0, grid).values) {
        EXPECT_EQ(v, 0.0);
    }
    for (double v : make_plane(Direction::axis(3, 2), 2.0, grid).values) {
        EXPECT_DOUBLE_EQ(v, 2.0);
    }
    EXPECT_THROW(make_plane(Direction::axis(3, 0), 0.0, grid), DegenerateDirection);
}

TEST(Plane, TiltedIsFlat)
{
    const double t = std::numbers::pi / 6.0;
    const auto grid = GraphGrid::polar(0.5, 20.0, 65, 32);
    const auto g = make_plane(Direction({-std::sin(t), 0.0, std::cos(t)}), 0.0, grid);
    const auto y = grid.node(10, 3);
    EXPECT_NEAR(g.value(10, 3), std::tan(t) * y[0], 1e-13);
    const auto cloud = graph_to_cloud(g);
    for (double r : {1.0, 2.0, 4.0}) {
        EXPECT_LT(flatness(cloud, AnnularWindow(r), HeightMode::shifted).H, 1e-10);
    }
}

TEST(Catenoid3, ValuesAndDomain)
{
    const auto grid = GraphGrid::polar(1.0, 100.0, 3, 4);
    const auto g = make_catenoid3(1.0, grid);
    EXPECT_EQ(g.value(0, 0), 0.0);
    EXPECT_NEAR(g.value(2, 1), 5.298292365610484, 1e-12);
    EXPECT_THROW(make_catenoid3(1.0, GraphGrid::polar(0.9, 4.0, 5, 4)), DomainViolation);
}

TEST(Catenoid3, LogTail)
{
    const auto grid = GraphGrid::polar(10.0, 1000.0, 3, 4);
    const auto g = make_catenoid3(1.0, grid);
    for (std::size_t i = 0; i < 3; ++i) {
        const double rho = grid.radius(i);
        const double gap = g.value(i, 0) - std::log(2.0 * rho);
        EXPECT_NEAR(gap, -1.0 / (4.0 * rho * rho), 0.1 / std::pow(rho, 4.0) + 1e-14);
    }
}

TEST(CatenoidN, FourDimensionalConstant)
{
    // reference value of the integral of 1/sqrt(s^4 - 1) over (1, infinity)
    const double total = catenoid_rise(4, 1.0, 3.0) + catenoid_tail(4, 1.0, 3.0);
    EXPECT_NEAR(total, 1.3110287771461, 1e-10);
    const auto grid = GraphGrid::spherical(3, 2.0, 512.0, 33, 8);
    const auto g = make_catenoid_n({4, 1.0, 1}, grid, CatenoidAnchor::waist);
    for (std::size_t i = 0; i < grid.radial_count(); ++i) {
        const double rho = grid.radius(i);
        EXPECT_NEAR(g.value(i, 0), total - catenoid_tail(4, 1.0, rho), 1e-11);
    }
}

TEST(CatenoidN, TailIsReciprocal)
{
    for (double rho : {10.0, 100.0}) {
        const double t = catenoid_tail(4, 1.0, rho);
        EXPECT_NEAR(t, 1.0 / rho, 1.0 / std::pow(rho, 5.0));
    }
}

TEST(CatenoidN, InnermostAnchorAndRadial)
{
    const auto grid = GraphGrid::spherical(4, 1.5, 40.0, 17, 10);
    const auto g = make_catenoid_n({5, 1.0, 1}, grid);
    for (std::size_t j = 0; j < grid.angular_count(); ++j) {
        EXPECT_EQ(g.value(0, j), 0.0);
        EXPECT_EQ(g.value(9, j), g.value(9, 0));
    }
    const auto neg = make_catenoid_n({5, 1.0, -1}, grid);
    EXPECT_EQ(neg.value(9, 0), -g.value(9, 0));
}

TEST(CatenoidN, ZeroFluxIsPlane)
{
    const auto grid = GraphGrid::spherical(3, 1.0, 10.0, 9, 8);
    for (double v : make_catenoid_n({4, 0.0, 1}, grid).values) {
        EXPECT_EQ(v, 0.0);
    }
}

TEST(CatenoidN, ThreeAgreesWithClosedForm)
{
    const auto grid = GraphGrid::polar(1.5, 60.0, 33, 8);
    const auto a = make_catenoid_n({3, 1.0, 1}, grid);
    const auto b = make_catenoid3(1.0, grid);
    const double shift = b.value(0, 0);
    for (std::size_t k = 0; k < a.values.size(); ++k) {
        EXPECT_NEAR(a.values[k], b.values[k] - shift, 1e-11);
    }
}

TEST(CatenoidN, DomainChecks)
{
    const auto grid = GraphGrid::spherical(3, 1.0, 10.0, 9, 8);
    EXPECT_THROW(make_catenoid_n({4, 1.0, 1}, grid), DomainViolation);
    EXPECT_THROW(make_catenoid_n({8, 1.0, 1}, GraphGrid::spherical(7, 2.0, 10.0, 9, 16)), InvalidArgument);
}

TEST(HarmonicGraph, ConstantLogAndMismatch)
{
    const auto grid = GraphGrid::polar(1.0, std::exp(2.0), 3, 8);
    const auto c = make_harmonic_graph({{2, 0, ModeKind::growing, {}, 5.0}}, grid);
    for (double v : c.values) {
        EXPECT_EQ(v, 5.0);
    }
    const auto l = make_harmonic_graph({{2, 0, ModeKind::log, {}, 1.0}}, grid);
    EXPECT_NEAR(l.value(1, 3), 1.0, 1e-15);
    EXPECT_THROW(make_harmonic_graph({{3, 0, ModeKind::growing, {}, 1.0}}, grid), DimensionMismatch);
}

TEST(Generators, CatenoidResidualSecondOrder)
{
    double prev = 0.0;
    for (std::size_t nr : {129, 257, 513}) {
        const auto grid = GraphGrid::polar(2.0, 64.0, nr, 16);
        const double res = sup_norm(ms_residual_div(make_catenoid3(1.0, grid)));
        if (prev > 0.0) {
            EXPECT_NEAR(std::log2(prev / res), 2.0, 0.3);
        }
        prev = res;
    }
}
