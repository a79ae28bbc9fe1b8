#include "flatlab/harmonic.hpp"

#include "flatlab/derivatives.hpp"
#include "flatlab/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <string>

namespace flatlab {

namespace {

double norm_of(std::span<const double> x)
{
    double s = 0.0;
    for (double v : x) {
        s += v * v;
    }
    return std::sqrt(s);
}

double value_scale(const ScalarField& f)
{
    double s = 1.0;
    for (double v : f.values) {
        s = std::max(s, std::abs(v));
    }
    return s;
}

// Inverted radii, same directions, v = rho^power u.
ScalarField invert(const ScalarField& u, double power, const std::vector<double>& values)
{
    const auto& g = u.grid;
    const std::size_t nr = g.radial_count();
    const std::size_t nd = g.angular_count();
    std::vector<double> radii(nr);
    for (std::size_t i = 0; i < nr; ++i) {
        radii[i] = 1.0 / g.radius(nr - 1 - i);
    }
    GraphGrid inv = GraphGrid::from_nodes(g.base_dim(), std::move(radii), g.directions());
    std::vector<double> v(g.node_count());
    for (std::size_t i = 0; i < nr; ++i) {
        const std::size_t src = nr - 1 - i;
        const double factor = power == 0.0 ? 1.0 : std::pow(g.radius(src), power);
        for (std::size_t j = 0; j < nd; ++j) {
            v[inv.index(i, j)] = factor * values[g.index(src, j)];
        }
    }
    return ScalarField(std::move(inv), std::move(v));
}

}  // namespace

std::string_view to_string(ModeKind kind)
{
    switch (kind) {
    case ModeKind::growing:
        return "growing";
    case ModeKind::decaying:
        return "decaying";
    case ModeKind::log:
        return "log";
    }
    return "growing";
}

ModeKind mode_kind_from_string(std::string_view s)
{
    if (s == "growing") {
        return ModeKind::growing;
    }
    if (s == "decaying") {
        return ModeKind::decaying;
    }
    if (s == "log") {
        return ModeKind::log;
    }
    throw InvalidArgument("unknown mode kind '" + std::string(s) + "'");
}

double HarmonicMode::homogeneity() const
{
    switch (kind) {
    case ModeKind::growing:
        return k;
    case ModeKind::decaying:
        return 2 - m - k;
    case ModeKind::log:
        return 0.0;
    }
    return 0.0;
}

void validate_mode(const HarmonicMode& mode)
{
    if (mode.m < 2) {
        throw InvalidArgument("mode base dimension must be at least 2");
    }
    if (mode.k < 0) {
        throw InvalidArgument("mode degree must be nonnegative");
    }
    if (!std::isfinite(mode.coefficient)) {
        throw InvalidArgument("mode coefficient must be finite");
    }
    if (mode.kind == ModeKind::log && (mode.m != 2 || mode.k != 0)) {
        throw InvalidArgument("the log mode exists only for m = 2, k = 0");
    }
    if (mode.kind == ModeKind::decaying && mode.m == 2 && mode.k == 0) {
        throw InvalidArgument("m = 2 has no decaying k = 0 power; use the log mode");
    }
    if (mode.m >= 3 && mode.k >= 2) {
        throw InvalidArgument("degrees k >= 2 are implemented for m = 2 only");
    }
    if (mode.k >= 1) {
        if (mode.axis.size() != static_cast<std::size_t>(mode.m)) {
            throw InvalidArgument("mode axis must have length m");
        }
        const double n = norm_of(mode.axis);
        if (!(n > 0.0) || !std::isfinite(n)) {
            throw InvalidArgument("mode axis must be a nonzero finite vector");
        }
    }
}

double evaluate_mode(const HarmonicMode& mode, std::span<const double> y)
{
    validate_mode(mode);
    if (y.size() != static_cast<std::size_t>(mode.m)) {
        throw DimensionMismatch("point dimension differs from mode base dimension");
    }
    const double r = norm_of(y);
    if (r == 0.0 && mode.kind != ModeKind::growing) {
        throw OriginSingularity("decaying and log modes are singular at the origin");
    }
    if (mode.kind == ModeKind::log) {
        return mode.coefficient * std::log(r);
    }
    double angular = 1.0;
    double radial = 1.0;
    if (mode.k == 0) {
        radial = mode.kind == ModeKind::growing ? 1.0 : std::pow(r, 2 - mode.m);
        return mode.coefficient * radial * angular;
    }
    const double an = norm_of(mode.axis);
    if (mode.k == 1) {
        double dot = 0.0;
        for (std::size_t a = 0; a < y.size(); ++a) {
            dot += mode.axis[a] * y[a];
        }
        dot /= an;
        // r * (axis.w) = axis.y
        if (mode.kind == ModeKind::growing) {
            return mode.coefficient * dot;
        }
        return mode.coefficient * dot * std::pow(r, -mode.m);
    }
    const double phi = std::atan2(mode.axis[1], mode.axis[0]);
    const double theta = std::atan2(y[1], y[0]);
    angular = std::cos(mode.k * (theta - phi));
    radial = mode.kind == ModeKind::growing ? std::pow(r, mode.k) : std::pow(r, -mode.k);
    return mode.coefficient * radial * angular;
}

ScalarField synthesize(const std::vector<HarmonicMode>& modes, const GraphGrid& grid)
{
    for (const auto& mode : modes) {
        validate_mode(mode);
        if (mode.m != grid.base_dim()) {
            throw DimensionMismatch("mode base dimension differs from grid");
        }
    }
    std::vector<double> v(grid.node_count(), 0.0);
    for (std::size_t i = 0; i < grid.radial_count(); ++i) {
        for (std::size_t j = 0; j < grid.angular_count(); ++j) {
            const auto y = grid.node(i, j);
            double s = 0.0;
            for (const auto& mode : modes) {
                s += evaluate_mode(mode, y);
            }
            v[grid.index(i, j)] = s;
        }
    }
    return ScalarField(grid, std::move(v));
}

std::vector<double> laplace_nodes(const ScalarField& field)
{
    const auto& g = field.grid;
    const std::size_t nr = g.radial_count();
    const std::size_t nd = g.angular_count();
    if (nr < 3) {
        throw InsufficientResolution("the Laplacian needs at least 3 radial nodes");
    }
    const double h = g.log_step();
    std::vector<double> out;
    out.reserve((nr - 2) * nd);
    if (g.base_dim() == 2) {
        if (nd < 3) {
            throw InsufficientResolution("the Laplacian needs at least 3 angular nodes");
        }
        const double sh = std::sinh(0.5 * h);
        const double st = std::sin(0.5 * g.angle_step());
        const double cs = 1.0 / (4.0 * sh * sh);
        const double ct = 1.0 / (4.0 * st * st);
        for (std::size_t i = 1; i + 1 < nr; ++i) {
            const double e2 = 1.0 / (g.radius(i) * g.radius(i));
            for (std::size_t j = 0; j < nd; ++j) {
                const std::size_t jp = (j + 1) % nd;
                const std::size_t jm = (j + nd - 1) % nd;
                const double f = field.value(i, j);
                const double rad = field.value(i + 1, j) - 2.0 * f + field.value(i - 1, j);
                const double ang = field.value(i, jp) - 2.0 * f + field.value(i, jm);
                out.push_back(e2 * (cs * rad + ct * ang));
            }
        }
        return out;
    }
    const int m = g.base_dim();
    const auto parts = project_low_degree(field);
    if (parts.max_residual > 1e-9 * value_scale(field)) {
        throw InsufficientResolution("m >= 3 Laplacian needs a field of the form a(rho) + c(rho).w");
    }
    const auto w0 = fitted_stencil(0.0, 2.0 - m, h);
    const auto w1 = fitted_stencil(1.0, 1.0 - m, h);
    const std::size_t mm = static_cast<std::size_t>(m);
    std::vector<double> lc(mm);
    for (std::size_t i = 1; i + 1 < nr; ++i) {
        const double e2 = 1.0 / (g.radius(i) * g.radius(i));
        const double la = w0[0] * parts.radial[i - 1] + w0[1] * parts.radial[i] + w0[2] * parts.radial[i + 1];
        for (std::size_t k = 0; k < mm; ++k) {
            lc[k] = w1[0] * parts.linear[(i - 1) * mm + k] + w1[1] * parts.linear[i * mm + k] +
                    w1[2] * parts.linear[(i + 1) * mm + k];
        }
        for (std::size_t j = 0; j < nd; ++j) {
            auto w = g.direction(j);
            double s = la;
            for (std::size_t k = 0; k < mm; ++k) {
                s += lc[k] * w[k];
            }
            out.push_back(e2 * s);
        }
    }
    return out;
}

double laplace_residual(const ScalarField& field)
{
    double sup = 0.0;
    for (double v : laplace_nodes(field)) {
        sup = std::max(sup, std::abs(v));
    }
    return sup;
}

AffineApproximation affine_approximation_check(const ScalarField& field, bool check_psi, double alpha)
{
    const auto& g = field.grid;
    const int m = g.base_dim();
    const int n = m + 1;
    if (check_psi) {
        if (!(alpha > 0.0 && alpha < 1.0)) {
            throw InvalidArgument("alpha must lie in (0, 1)");
        }
        for (std::size_t i = 0; i < g.radial_count(); ++i) {
            const double t = g.radius(i);
            const double bound = std::max(std::pow(t, 4.0 - n - alpha), std::pow(t, 1.0 + alpha));
            for (std::size_t j = 0; j < g.angular_count(); ++j) {
                const double v = field.value(i, j);
                if (std::abs(v) > (1.0 + 1e-9) * bound) {
                    throw PsiViolation(t, v, bound);
                }
            }
        }
    }
    const double lo = 0.25 * (1.0 - 1e-12);
    const double hi = 4.0 * (1.0 + 1e-12);
    std::vector<std::pair<std::size_t, std::size_t>> used;
    for (std::size_t i = 0; i < g.radial_count(); ++i) {
        if (g.radius(i) >= lo && g.radius(i) <= hi) {
            for (std::size_t j = 0; j < g.angular_count(); ++j) {
                used.emplace_back(i, j);
            }
        }
    }
    if (used.size() < static_cast<std::size_t>(m + 1)) {
        throw InsufficientResolution("too few nodes on 1/4 <= |y| <= 4 for an affine fit");
    }
    Eigen::MatrixXd A(static_cast<Eigen::Index>(used.size()), m + 1);
    Eigen::VectorXd rhs(static_cast<Eigen::Index>(used.size()));
    for (std::size_t r = 0; r < used.size(); ++r) {
        const auto y = g.node(used[r].first, used[r].second);
        const auto row = static_cast<Eigen::Index>(r);
        A(row, 0) = 1.0;
        for (int a = 0; a < m; ++a) {
            A(row, a + 1) = y[static_cast<std::size_t>(a)];
        }
        rhs(row) = field.value(used[r].first, used[r].second);
    }
    const Eigen::VectorXd x = A.colPivHouseholderQr().solve(rhs);
    const Eigen::VectorXd res = rhs - A * x;
    AffineApproximation out;
    out.b = x(0);
    out.a.resize(static_cast<std::size_t>(m));
    double asum = 0.0;
    for (int a = 0; a < m; ++a) {
        out.a[static_cast<std::size_t>(a)] = x(a + 1);
        asum += x(a + 1) * x(a + 1);
    }
    out.sup_err = res.cwiseAbs().maxCoeff();
    out.coef_size = std::sqrt(asum) + std::abs(out.b);
    out.nodes = used.size();
    return out;
}

ScalarField kelvin_transform(const ScalarField& u)
{
    const int m = u.grid.base_dim();
    if (m < 3) {
        throw InvalidArgument("kelvin_transform needs m >= 3; use kelvin_transform_log for m = 2");
    }
    return invert(u, m - 2.0, u.values);
}

LogKelvin kelvin_transform_log(const ScalarField& u)
{
    const auto& g = u.grid;
    if (g.base_dim() != 2) {
        throw InvalidArgument("the logarithmic Kelvin branch is for m = 2");
    }
    const std::size_t nr = g.radial_count();
    const std::size_t nd = g.angular_count();
    auto ring_average = [&](std::size_t i) {
        double s = 0.0;
        for (std::size_t j = 0; j < nd; ++j) {
            s += u.value(i, j);
        }
        return s / static_cast<double>(nd);
    };
    const std::size_t ia = nr - 1;
    const double target = std::log(g.radius(ia)) - std::log(2.0);
    std::size_t ib = 0;
    for (std::size_t i = 0; i < nr; ++i) {
        if (std::abs(std::log(g.radius(i)) - target) < std::abs(std::log(g.radius(ib)) - target)) {
            ib = i;
        }
    }
    if (ib == ia) {
        throw InsufficientResolution("the grid does not span two distinct radii for the log estimate");
    }
    const double c = (ring_average(ia) - ring_average(ib)) / (std::log(g.radius(ia)) - std::log(g.radius(ib)));
    std::vector<double> w(u.values);
    for (std::size_t i = 0; i < nr; ++i) {
        const double l = c * std::log(g.radius(i));
        for (std::size_t j = 0; j < nd; ++j) {
            w[g.index(i, j)] -= l;
        }
    }
    return {invert(u, 0.0, w), c};
}

OriginJet origin_jet(const ScalarField& v, std::size_t rings)
{
    const auto& g = v.grid;
    const std::size_t m = static_cast<std::size_t>(g.base_dim());
    rings = std::min(rings, g.radial_count());
    if (rings < 3) {
        throw InsufficientResolution("origin fit needs at least 3 rings");
    }
    const auto parts = project_low_degree(v);
    const auto count = static_cast<Eigen::Index>(rings);
    Eigen::MatrixXd Ar(count, 3);
    Eigen::MatrixXd Al(count, 2);
    Eigen::VectorXd br(count);
    Eigen::MatrixXd bl(count, static_cast<Eigen::Index>(m));
    for (std::size_t i = 0; i < rings; ++i) {
        const double r = g.radius(i);
        const auto row = static_cast<Eigen::Index>(i);
        Ar(row, 0) = 1.0;
        Ar(row, 1) = r * r;
        Ar(row, 2) = r * r * r * r;
        Al(row, 0) = r;
        Al(row, 1) = r * r * r;
        br(row) = parts.radial[i];
        for (std::size_t k = 0; k < m; ++k) {
            bl(row, static_cast<Eigen::Index>(k)) = parts.linear[i * m + k];
        }
    }
    const Eigen::VectorXd xr = Ar.colPivHouseholderQr().solve(br);
    const Eigen::MatrixXd xl = Al.colPivHouseholderQr().solve(bl);
    OriginJet jet;
    jet.value = xr(0);
    jet.gradient.resize(m);
    for (std::size_t k = 0; k < m; ++k) {
        jet.gradient[k] = xl(0, static_cast<Eigen::Index>(k));
    }
    return jet;
}

}  // namespace flatlab
