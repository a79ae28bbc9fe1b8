#include "flatlab/derivatives.hpp"
#include "flatlab/errors.hpp"
#include "flatlab/harmonic.hpp"
#include "flatlab/minimal.hpp"
#include "flatlab/random.hpp"
#include "flatlab/serialize.hpp"
#include "flatlab/surfaces.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace flatlab;

namespace {

constexpr double pi = std::numbers::pi;

SampledGraph from_function(const GraphGrid& grid, auto&& f)
{
    std::vector<double> v;
    for (std::size_t i = 0; i < grid.radial_count(); ++i) {
        for (std::size_t j = 0; j < grid.angular_count(); ++j) {
            const auto y = grid.node(i, j);
            v.push_back(f(y[0], y[1]));
        }
    }
    return SampledGraph(grid, v);
}

std::vector<double> ring(const SampledGraph& g, std::size_t i)
{
    const std::size_t na = g.grid.angular_count();
    return std::vector<double>(g.values.begin() + static_cast<std::ptrdiff_t>(i * na),
                               g.values.begin() + static_cast<std::ptrdiff_t>((i + 1) * na));
}

}  // namespace

TEST(Residual, PlaneVanishes)
{
    const auto grid = GraphGrid::polar(1.0, 20.0, 33, 24);
    const auto g = make_plane(Direction({0.3, -0.2, 1.0}), 0.7, grid);
    EXPECT_LT(sup_norm(ms_residual_div(g)), 1e-12);
    EXPECT_LT(sup_norm(ms_residual_nondiv(g)), 1e-12);
}

TEST(Residual, ParaboloidSpotValues)
{
    const auto grid = GraphGrid::polar(0.5, 4.0, 513, 64);
    const auto g = from_function(grid, [](double x, double y) { return x * x + y * y; });
    const auto r = ms_residual_div(g);
    for (std::size_t i : {10, 200, 400}) {
        const double rho = r.grid.radius(i);
        const double s = 1.0 + 4.0 * rho * rho;
        const double exact = 2.0 / std::pow(s, 1.5) + 2.0 / std::sqrt(s);
        EXPECT_NEAR(r.value(i, 5), exact, 1e-4);
    }
}

TEST(Coefficients, PlaneAndConstantSlope)
{
    const auto grid = GraphGrid::polar(1.0, 8.0, 17, 16);
    const auto flat = ms_coefficients(make_plane(Direction::axis(3, 2), 3.0, grid));
    EXPECT_EQ(flat.deviation, 0.0);
    EXPECT_EQ(flat.entries[0], 1.0);
    EXPECT_EQ(flat.entries[1], 0.0);
    const double s = 0.6;
    const auto tilted = ms_coefficients(make_plane(Direction({-s, 0.0, 1.0}), 0.0, grid));
    EXPECT_NEAR(tilted.deviation, s * s / (1.0 + s * s), 1e-13);
}

TEST(Coefficients, CatenoidAtRadiusTwo)
{
    // node at rho = 2 in the interior rows
    const auto grid = GraphGrid::polar(std::sqrt(2.0), 2.0 * std::sqrt(2.0), 1025, 32);
    const auto cf = ms_coefficients(make_catenoid3(1.0, grid));
    std::size_t at = 0;
    for (std::size_t i = 0; i < cf.grid.radial_count(); ++i) {
        if (std::abs(cf.grid.radius(i) - 2.0) < std::abs(cf.grid.radius(at) - 2.0)) {
            at = i;
        }
    }
    ASSERT_NEAR(cf.grid.radius(at), 2.0, 1e-9);
    const std::size_t m = 2;
    const std::size_t base = cf.grid.index(at, 0) * m * m;
    // direction 0 is the x axis, so A = diag(1 - f'^2/(1 + f'^2), 1)
    EXPECT_NEAR(1.0 - cf.entries[base], 0.25, 1e-5);
    EXPECT_NEAR(cf.entries[base + 3], 1.0, 1e-9);
}

TEST(Coefficients, SymmetricWithUnitBoundedSpectrum)
{
    const auto grid = GraphGrid::polar(1.0, 8.0, 33, 32);
    const auto g = from_function(grid, [](double x, double y) { return 0.4 * x * y + std::sin(x); });
    const auto cf = ms_coefficients(g);
    for (std::size_t k = 0; k < cf.entries.size(); k += 4) {
        const double a = cf.entries[k], b = cf.entries[k + 1], c = cf.entries[k + 2], d = cf.entries[k + 3];
        EXPECT_EQ(b, c);
        const double tr = a + d, det = a * d - b * c;
        const double disc = std::sqrt(std::max(0.0, tr * tr / 4.0 - det));
        EXPECT_LE(tr / 2.0 + disc, 1.0 + 1e-12);
        EXPECT_GT(tr / 2.0 - disc, 0.0);
    }
}

TEST(Residual, DivergenceTimesWEqualsNondivergence)
{
    Rng rng(41);
    for (int t = 0; t < 5; ++t) {
        const double a = rng.uniform(-0.5, 0.5), b = rng.uniform(-0.5, 0.5), c = rng.uniform(0.5, 1.5);
        auto f = [&](double x, double y) { return a * std::sin(c * x) * std::cos(y) + b * x * y / (1.0 + x * x); };
        double prev = 0.0;
        for (std::size_t k : {2, 4, 8}) {
            const auto grid = GraphGrid::polar(1.0, 4.0, 32 * k + 1, 128 * k);
            const auto g = from_function(grid, f);
            const auto div = ms_residual_div(g);
            const auto nd = ms_residual_nondiv(g);
            const auto jets = graph_jets(g);
            double err = 0.0;
            for (std::size_t q = 0; q < jets.size(); ++q) {
                const double w = std::sqrt(1.0 + jets[q].gradient[0] * jets[q].gradient[0] +
                                           jets[q].gradient[1] * jets[q].gradient[1]);
                err = std::max(err, std::abs(w * div.values[q] - nd.values[q]));
            }
            if (prev > 0.0) {
                EXPECT_NEAR(std::log2(prev / err), 2.0, 0.3);
            }
            prev = err;
        }
    }
}

TEST(Residual, HarmonicNondivergenceIsCubic)
{
    const auto grid = GraphGrid::polar(1.0, 4.0, 65, 64);
    const auto u = synthesize({{2, 2, ModeKind::growing, {1.0, 0.0}, 1.0}, {2, 1, ModeKind::decaying, {0.0, 1.0}, 1.0}},
                              grid);
    std::vector<double> err;
    for (double eta : {1e-1, 1e-2, 1e-3}) {
        std::vector<double> v(u.values);
        for (double& x : v) {
            x *= eta;
        }
        const auto nd = ms_residual_nondiv(SampledGraph(grid, v));
        const auto jets = graph_jets(u);
        double e = 0.0;
        for (std::size_t q = 0; q < jets.size(); ++q) {
            e = std::max(e, std::abs(nd.values[q] - eta * (jets[q].hess(0, 0) + jets[q].hess(1, 1))));
        }
        err.push_back(e);
    }
    EXPECT_NEAR(std::log10(err[0] / err[1]), 3.0, 0.3);
    EXPECT_NEAR(std::log10(err[1] / err[2]), 3.0, 0.3);
}

TEST(Solver, ZeroDataGivesZero)
{
    const auto grid = GraphGrid::polar(2.0, 64.0, 33, 16);
    const std::vector<double> z(16, 0.0);
    const auto sol = solve_dirichlet(z, z, grid);
    EXPECT_LE(sup_norm(sol.graph), 1e-12);
}

TEST(Solver, CatenoidRecoverySecondOrder)
{
    std::vector<double> errs;
    for (std::size_t nr : {33, 65, 129}) {
        const auto grid = GraphGrid::polar(2.0, 64.0, nr, 16);
        const auto exact = make_catenoid3(1.0, grid);
        const auto sol = solve_dirichlet(ring(exact, 0), ring(exact, nr - 1), grid);
        double e = 0.0;
        for (std::size_t k = 0; k < exact.values.size(); ++k) {
            e = std::max(e, std::abs(sol.graph.values[k] - exact.values[k]));
        }
        errs.push_back(e);
        EXPECT_LE(sol.report.residuals.back(), sol.report.tolerance);
        EXPECT_EQ(static_cast<std::size_t>(sol.report.iters) + 1, sol.report.residuals.size());
    }
    EXPECT_NEAR(std::log2(errs[0] / errs[1]), 2.0, 0.3);
    EXPECT_NEAR(std::log2(errs[1] / errs[2]), 2.0, 0.3);
}

TEST(Solver, NewtonConvergesQuadratically)
{
    const auto grid = GraphGrid::polar(2.0, 64.0, 65, 16);
    const auto exact = make_catenoid3(1.0, grid);
    SolverConfig cfg;
    cfg.residual_tol = 1e-14;
    const auto sol = solve_dirichlet(ring(exact, 0), ring(exact, 64), grid, cfg);
    const auto& r = sol.report.residuals;
    ASSERT_GE(r.size(), 3u);
    for (std::size_t k = 0; k + 1 < r.size(); ++k) {
        if (r[k] < 1e-2 && r[k + 1] > 1e3 * sol.report.tolerance) {
            EXPECT_LT(r[k + 1] / (r[k] * r[k]), 1e3);
        }
    }
}

TEST(Solver, RadialDataStaysRadial)
{
    const auto grid = GraphGrid::polar(1.0, 8.0, 33, 16);
    const auto sol = solve_dirichlet(std::vector<double>(16, 0.0), std::vector<double>(16, 0.5), grid);
    for (std::size_t i = 0; i < grid.radial_count(); ++i) {
        for (std::size_t j = 1; j < 16; ++j) {
            EXPECT_NEAR(sol.graph.value(i, j), sol.graph.value(i, 0), 1e-12);
        }
    }
}

TEST(Solver, ReflectionSymmetry)
{
    const auto grid = GraphGrid::polar(1.0, 8.0, 33, 16);
    std::vector<double> out(16);
    for (std::size_t j = 0; j < 16; ++j) {
        out[j] = 0.3 * std::cos(2.0 * pi * static_cast<double>(j) / 16.0) +
                 0.1 * std::cos(4.0 * pi * static_cast<double>(j) / 16.0);
    }
    const auto sol = solve_dirichlet(std::vector<double>(16, 0.0), out, grid);
    for (std::size_t i = 0; i < grid.radial_count(); ++i) {
        for (std::size_t j = 1; j < 16; ++j) {
            EXPECT_NEAR(sol.graph.value(i, j), sol.graph.value(i, 16 - j), 1e-11);
        }
    }
}

TEST(Solver, VerticalTranslation)
{
    const auto grid = GraphGrid::polar(1.0, 8.0, 33, 16);
    std::vector<double> in(16), out(16);
    for (std::size_t j = 0; j < 16; ++j) {
        in[j] = 0.05 * std::sin(2.0 * pi * static_cast<double>(j) / 16.0);
        out[j] = 0.2 * std::cos(4.0 * pi * static_cast<double>(j) / 16.0);
    }
    const auto a = solve_dirichlet(in, out, grid);
    for (auto& x : in) {
        x += 3.0;
    }
    for (auto& x : out) {
        x += 3.0;
    }
    const auto b = solve_dirichlet(in, out, grid);
    for (std::size_t k = 0; k < a.graph.values.size(); ++k) {
        EXPECT_NEAR(b.graph.values[k], a.graph.values[k] + 3.0, 1e-12);
    }
}

TEST(Solver, SteepDataLosesGraphicality)
{
    const auto grid = GraphGrid::polar(1.0, 1.5, 17, 16);
    std::vector<double> out(16);
    for (std::size_t j = 0; j < 16; ++j) {
        out[j] = 20.0 * std::cos(2.0 * pi * static_cast<double>(j) / 16.0);
    }
    EXPECT_THROW(solve_dirichlet(std::vector<double>(16, 0.0), out, grid), Error);
}

TEST(Solver, TraceLengthChecked)
{
    const auto grid = GraphGrid::polar(1.0, 8.0, 33, 16);
    EXPECT_THROW(solve_dirichlet(std::vector<double>(15, 0.0), std::vector<double>(16, 0.0), grid), DimensionMismatch);
}

TEST(Solver, HarmonicExtensionIsDiscretelyHarmonic)
{
    const auto grid = GraphGrid::polar(1.0, 8.0, 33, 16);
    std::vector<double> out(16);
    for (std::size_t j = 0; j < 16; ++j) {
        out[j] = std::cos(2.0 * pi * 3.0 * static_cast<double>(j) / 16.0);
    }
    const auto h = harmonic_extension(std::vector<double>(16, 1.0), out, grid);
    EXPECT_LT(laplace_residual(h), 1e-10);
}

TEST(Solver, ReportJson)
{
    const auto grid = GraphGrid::polar(2.0, 64.0, 33, 16);
    const auto exact = make_catenoid3(1.0, grid);
    const auto sol = solve_dirichlet(ring(exact, 0), ring(exact, 32), grid);
    const auto text = solver_report_to_json(sol.report);
    EXPECT_NE(text.find("\"iters\""), std::string::npos);
    EXPECT_NE(text.find("\"residuals\""), std::string::npos);
    EXPECT_NE(text.find("\"deviation\""), std::string::npos);
    EXPECT_NE(text.find("\"h\""), std::string::npos);
}
