#include "flatlab/analysis.hpp"
#include "flatlab/errors.hpp"
#include "flatlab/harmonic.hpp"
#include "flatlab/random.hpp"
#include "flatlab/surfaces.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace flatlab;

namespace {

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y)
{
    double mx = 0.0, my = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        mx += std::log(x[k]);
        my += std::log(y[k]);
    }
    mx /= static_cast<double>(x.size());
    my /= static_cast<double>(x.size());
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        sxy += (std::log(x[k]) - mx) * (std::log(y[k]) - my);
        sxx += (std::log(x[k]) - mx) * (std::log(x[k]) - mx);
    }
    return sxy / sxx;
}

PointCloud planes(std::initializer_list<double> levels, double slope, double density, Rng& rng)
{
    std::vector<double> c;
    const int steps = static_cast<int>(std::ceil(2.0 / density));
    for (double z : levels) {
        for (int p = -steps; p <= steps; ++p) {
            for (int q = -steps; q <= steps; ++q) {
                const double x = p * density + rng.uniform(-0.25, 0.25) * density;
                const double y = q * density + rng.uniform(-0.25, 0.25) * density;
                const double r = std::hypot(x, y);
                if (r > 1.0 && r < 2.0) {
                    c.insert(c.end(), {x, y, z + slope * x});
                }
            }
        }
    }
    return PointCloud(3, std::move(c));
}

}  // namespace

TEST(Profile, DyadicScales)
{
    const auto s = dyadic_scales(4.0, 64.0);
    EXPECT_EQ(s, (std::vector<double>{4.0, 8.0, 16.0, 32.0, 64.0}));
}

TEST(Profile, PlaneIsFlatEverywhere)
{
    const auto grid = GraphGrid::polar(1.0, 256.0, 65, 32);
    const auto cloud = graph_to_cloud(make_plane(Direction::axis(3, 2), 0.0, grid));
    const auto p = height_profile(cloud, dyadic_scales(4.0, 64.0), HeightMode::shifted);
    for (const auto& r : p.records) {
        EXPECT_LT(r.H, 1e-12);
    }
    EXPECT_LT(p.eta_certificate, 1e-12);
    EXPECT_THROW(height_profile(cloud, {1000.0}, HeightMode::shifted), EmptyWindow);
}

TEST(Profile, DecayingModeSlopeMinusOne)
{
    const auto grid = GraphGrid::spherical(3, 1.0, 1024.0, 161, 26);
    const auto g = make_harmonic_graph({{3, 0, ModeKind::decaying, {}, 1.0}}, grid);
    const auto p = height_profile(graph_to_cloud(g), dyadic_scales(4.0, 256.0), HeightMode::shifted);
    std::vector<double> r, H;
    for (const auto& rec : p.records) {
        r.push_back(rec.r);
        H.push_back(rec.H);
    }
    EXPECT_NEAR(loglog_slope(r, H), -1.0, 0.05);
}

TEST(Profile, CatenoidHeightTendsToLogTwo)
{
    const auto grid = GraphGrid::polar(2.0, 8192.0, 1025, 64);
    const auto p = height_profile(graph_to_cloud(make_catenoid3(1.0, grid)), dyadic_scales(16.0, 2048.0),
                                  HeightMode::shifted);
    std::vector<double> r, Hr;
    for (const auto& rec : p.records) {
        r.push_back(rec.r);
        Hr.push_back(rec.H / rec.r);
    }
    EXPECT_NEAR(p.records.back().H, std::log(2.0), 1e-2);
    EXPECT_NEAR(loglog_slope(r, Hr), -1.0, 0.05);
}

TEST(Profile, ScalingCovariance)
{
    Rng rng(7);
    std::vector<double> c;
    for (int k = 0; k < 3000; ++k) {
        c.push_back(rng.uniform(-40.0, 40.0));
        c.push_back(rng.uniform(-40.0, 40.0));
        c.push_back(rng.uniform(-1.0, 1.0));
    }
    const PointCloud cloud(3, c);
    const double rho = 4.0;
    const auto small = rescale_cloud(cloud, rho);
    const auto a = height_profile(cloud, {4.0, 8.0, 16.0}, HeightMode::shifted);
    const auto b = height_profile(small, {1.0, 2.0, 4.0}, HeightMode::shifted);
    for (std::size_t k = 0; k < 3; ++k) {
        EXPECT_NEAR(a.records[k].H, rho * b.records[k].H, 1e-12 * a.records[k].H);
        EXPECT_NEAR(a.records[k].b, rho * b.records[k].b, 1e-12 * a.records[k].H);
    }
}

TEST(Decay, PlaneHasZeroConstant)
{
    const auto grid = GraphGrid::polar(1.0, 256.0, 65, 32);
    auto p = height_profile(graph_to_cloud(make_plane(Direction::axis(3, 2), 0.0, grid)), dyadic_scales(4.0, 32.0),
                            HeightMode::shifted, 128.0, 1e-3);
    for (auto& rec : p.records) {
        rec.H = 0.0;
    }
    EXPECT_EQ(verify_decay_bound(p, 0.5).C_min, 0.0);
}

TEST(Decay, DecayingModeBindsInnermost)
{
    const auto grid = GraphGrid::spherical(3, 1.0, 1024.0, 161, 26);
    const auto g = make_harmonic_graph({{3, 0, ModeKind::decaying, {}, 1e-3}}, grid);
    const auto p = height_profile(graph_to_cloud(g), dyadic_scales(4.0, 128.0), HeightMode::shifted, 512.0, 1e-3);
    const auto v = verify_decay_bound(p, 0.5);
    EXPECT_TRUE(std::isfinite(v.C_min));
    EXPECT_GT(v.C_min, 0.0);
    EXPECT_EQ(v.binding, 0u);
    EXPECT_NEAR(v.slack[v.binding], 1.0, 1e-9);
    for (double s : v.slack) {
        EXPECT_LE(s, 1.0 + 1e-12);
    }
}

TEST(Decay, LargerOuterScaleNeverRaisesOuterTerm)
{
    HeightProfile p;
    p.n = 3;
    p.eta = 1e-3;
    for (double r : {4.0, 8.0, 16.0}) {
        p.records.push_back({r, 1e-3 * r, Direction::axis(3, 2), 0.0, HeightMode::shifted});
    }
    p.R = 256.0;
    const double c1 = verify_decay_bound(p, 0.5).C_min;
    p.R = 512.0;
    const double c2 = verify_decay_bound(p, 0.5).C_min;
    EXPECT_GE(c2, c1);
}

TEST(Mesoscale, BetaFormula)
{
    EXPECT_NEAR(mesoscale_beta(7, 0.5), 0.9, 1e-15);
    EXPECT_NEAR(mesoscale_power_law(3, 4096.0, 0.5), std::pow(4096.0, 0.5 / 1.0), 1e-9);
}

TEST(Mesoscale, TwoModeMixture)
{
    const double R = 4096.0, eta = 1e-3, sigma = 2.0;
    const std::vector<HarmonicMode> modes{{2, 2, ModeKind::growing, {1.0, 0.0}, eta / R},
                                          {2, 1, ModeKind::decaying, {1.0, 0.0}, eta * sigma}};
    EXPECT_NEAR(mode_balance_scale(modes, 1.0, R), std::cbrt(2.0 * sigma * R), 1e-6 * std::cbrt(2.0 * sigma * R));
    const auto grid = GraphGrid::polar(1.5, R, 193, 32);
    const auto p =
        height_profile(graph_to_cloud(make_harmonic_graph(modes, grid)), dyadic_scales(4.0, R / 4.0), HeightMode::shifted,
                       R, eta);
    const auto m = locate_mesoscale(p, 0.5, modes);
    EXPECT_NEAR(m.r_star_analytic, 25.398, 1e-3);
    EXPECT_GE(m.ratio, 0.5);
    EXPECT_LE(m.ratio, 2.0);
}

TEST(Mesoscale, PureOuterModeHasNoReversal)
{
    const double R = 4096.0, eta = 1e-3;
    const std::vector<HarmonicMode> modes{{2, 2, ModeKind::growing, {1.0, 0.0}, eta / R}};
    const auto grid = GraphGrid::polar(1.5, R, 193, 32);
    const auto p =
        height_profile(graph_to_cloud(make_harmonic_graph(modes, grid)), dyadic_scales(4.0, R / 4.0), HeightMode::shifted,
                       R, eta);
    for (std::size_t k = 0; k + 1 < p.records.size(); ++k) {
        EXPECT_LT(p.records[k].H / p.records[k].r, p.records[k + 1].H / p.records[k + 1].r);
    }
    EXPECT_THROW(locate_mesoscale(p, 0.5, modes), NoReversal);
}

TEST(TiltDrift, PlanesDoNotDrift)
{
    const auto grid = GraphGrid::polar(1.0, 256.0, 65, 32);
    for (const Direction& e : {Direction::axis(3, 2), Direction({0.2, -0.1, 1.0})}) {
        const auto p = height_profile(graph_to_cloud(make_plane(e, 0.4, grid)), dyadic_scales(4.0, 64.0),
                                      HeightMode::shifted);
        const auto d = tilt_drift_check(p);
        for (double x : d.drift) {
            EXPECT_LT(x, 1e-8);
        }
        for (const auto& rec : p.records) {
            EXPECT_LT(distance(rec.e.canonical(), e.canonical()), 1e-8);
        }
    }
}

TEST(TiltDrift, CatenoidNormalIsVertical)
{
    const auto grid = GraphGrid::polar(2.0, 4096.0, 353, 64);
    const auto p = height_profile(graph_to_cloud(make_catenoid3(1.0, grid)), dyadic_scales(8.0, 1024.0),
                                  HeightMode::shifted);
    const auto d = tilt_drift_check(p);
    EXPECT_TRUE(std::isfinite(d.C_drift));
    EXPECT_LT(d.tail.front(), 1e-6);
    for (const auto& rec : p.records) {
        EXPECT_NEAR(std::abs(rec.e[2]), 1.0, 1e-9);
    }
}

TEST(TiltDrift, RequiresShiftedDoublingProfile)
{
    HeightProfile p;
    p.records.push_back({4.0, 1.0, Direction::axis(3, 2), 0.0, HeightMode::centered});
    p.records.push_back({8.0, 1.0, Direction::axis(3, 2), 0.0, HeightMode::centered});
    EXPECT_THROW(tilt_drift_check(p), InvalidArgument);
    p.records[0].mode = p.records[1].mode = HeightMode::shifted;
    p.records[1].r = 12.0;
    EXPECT_THROW(tilt_drift_check(p), InvalidArgument);
}

TEST(Sheets, TwoParallelPlanes)
{
    Rng rng(1);
    const auto d = sheet_decompose(planes({-0.1, 0.1}, 0.0, 0.04, rng), 0.2, 0.04);
    EXPECT_EQ(d.N, 2u);
    EXPECT_TRUE(d.ordered);
    EXPECT_FALSE(d.connected);
    EXPECT_LT(d.sheets[0].point(0)[2], d.sheets[1].point(0)[2]);
}

TEST(Sheets, SinglePlane)
{
    Rng rng(2);
    const auto d = sheet_decompose(planes({0.05}, 0.01, 0.04, rng), 0.2, 0.04);
    EXPECT_EQ(d.N, 1u);
    EXPECT_TRUE(d.connected);
}

TEST(Sheets, NearParallelTiltedGraphs)
{
    Rng rng(3);
    std::vector<double> c;
    std::vector<int> label;
    const double h = 0.01;
    for (int s = 0; s < 2; ++s) {
        for (int p = -200; p <= 200; ++p) {
            for (int q = -200; q <= 200; ++q) {
                const double x = p * h + rng.uniform(-0.25, 0.25) * h;
                const double y = q * h + rng.uniform(-0.25, 0.25) * h;
                const double r = std::hypot(x, y);
                if (r <= 1.0 || r >= 2.0) {
                    continue;
                }
                // gap 0.07 - 0.01 x, smallest 0.05 at x = 2
                const double z = s == 0 ? -0.04 + 0.005 * x : 0.03 - 0.005 * x;
                c.insert(c.end(), {x, y, z});
                label.push_back(s);
            }
        }
    }
    const auto d = sheet_decompose(PointCloud(3, c), 0.1, h);
    ASSERT_EQ(d.N, 2u);
    const auto n0 = static_cast<std::size_t>(std::count(label.begin(), label.end(), 0));
    EXPECT_EQ(d.sheets[0].size(), n0);
    EXPECT_EQ(d.sheets[1].size(), label.size() - n0);
    EXPECT_TRUE(d.ordered);
}

TEST(Sheets, SlabAndAmbiguity)
{
    Rng rng(4);
    EXPECT_THROW(sheet_decompose(planes({0.3}, 0.0, 0.05, rng), 0.2, 0.05), SlabViolation);
    // sheets closer than the resolvable gap
    EXPECT_THROW(sheet_decompose(planes({0.0, 0.06}, 0.0, 0.04, rng), 0.2, 0.04), AmbiguousSheets);
}

TEST(Fit, Catenoid3Expansion)
{
    const auto grid = GraphGrid::polar(8.0, 2048.0, 129, 32);
    const auto f = fit_asymptotics(make_catenoid3(1.0, grid));
    EXPECT_NEAR(f.b, std::log(2.0), 1e-3);
    EXPECT_NEAR(f.c, 1.0, 1e-3);
    EXPECT_NEAR(f.d[0], 0.0, 1e-3);
    EXPECT_NEAR(f.d[1], 0.0, 1e-3);
    EXPECT_GE(f.residual_exponent, 1.9);
    EXPECT_LE(f.residual_exponent, 2.1);
    EXPECT_GE(f.residual_sups.size(), 4u);
    for (double s : f.residual_sups) {
        EXPECT_GE(s, 0.0);
    }
}

TEST(Fit, CatenoidFourWaistAnchor)
{
    const auto grid = GraphGrid::spherical(3, 2.0, 512.0, 129, 14);
    const auto f = fit_asymptotics(make_catenoid_n({4, 1.0, 1}, grid, CatenoidAnchor::waist));
    EXPECT_NEAR(f.b, 1.31103, 1e-3);
    EXPECT_NEAR(f.c, -1.0, 5e-3);
    for (double x : f.d) {
        EXPECT_NEAR(x, 0.0, 1e-3);
    }
}

TEST(Fit, ShiftedPlaneIsExact)
{
    const auto grid = GraphGrid::polar(1.0, 1024.0, 81, 16);
    const auto f = fit_asymptotics(make_plane(Direction::axis(3, 2), 2.5, grid));
    EXPECT_NEAR(f.b, 2.5, 1e-12);
    EXPECT_NEAR(f.c, 0.0, 1e-12);
    for (double s : f.residual_sups) {
        EXPECT_LT(s, 1e-12);
    }
}

TEST(Fit, ExactOnBasisSpan)
{
    const auto grid = GraphGrid::spherical(4, 4.0, 4096.0, 81, 16);
    const std::vector<double> d{0.1, -0.2, 0.3, 0.05};
    const auto g = make_harmonic_graph(
        {{4, 0, ModeKind::growing, {}, 0.7}, {4, 0, ModeKind::decaying, {}, -0.4}, {4, 1, ModeKind::decaying, d, 1.0}}, grid);
    // n = 5: |y|^{3-n} = |y|^{-2} and y/|y|^{n-1} = y/|y|^4
    const auto f = fit_asymptotics(g);
    EXPECT_NEAR(f.b, 0.7, 1e-12);
    EXPECT_NEAR(f.c, -0.4, 1e-10);
    const double dn = std::sqrt(0.01 + 0.04 + 0.09 + 0.0025);
    for (std::size_t a = 0; a < 4; ++a) {
        EXPECT_NEAR(f.d[a], d[a] / dn, 1e-9);
    }
    for (double s : f.residual_sups) {
        EXPECT_LT(s, 1e-12);
    }
}

TEST(Fit, Errors)
{
    EXPECT_THROW(fit_asymptotics(make_catenoid3(1.0, GraphGrid::polar(8.0, 64.0, 33, 16))), InsufficientAnnuli);
    EXPECT_THROW(fit_asymptotics(make_catenoid3(1.0, GraphGrid::polar(1.01, 1024.0, 129, 16))), DomainViolation);
}

TEST(Fit, KelvinConsistency)
{
    for (int n : {4, 5}) {
        const auto grid = GraphGrid::spherical(n - 1, 2.0, 2048.0, 161, 2 * (n - 1) + 8);
        const auto g = make_catenoid_n({n, 1.0, 1}, grid, CatenoidAnchor::waist);
        const auto fit = fit_asymptotics(g);
        std::vector<double> v(g.values);
        for (double& x : v) {
            x -= fit.b;
        }
        const auto jet = origin_jet(kelvin_transform(ScalarField(g.grid, v)));
        EXPECT_NEAR(jet.value, fit.c, 0.02 * std::abs(fit.c));
    }
}
