#include "flatlab/geometry.hpp"

#include "flatlab/derivatives.hpp"
#include "flatlab/errors.hpp"
#include "flatlab/random.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <string>

namespace flatlab {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

double norm_of(std::span<const double> x)
{
    double s = 0.0;
    for (double v : x) {
        s += v * v;
    }
    return std::sqrt(s);
}

std::vector<double> log_spaced(double rho_in, double rho_out, std::size_t count)
{
    if (!(rho_in > 0.0) || !(rho_out > rho_in) || count < 2) {
        throw InvalidArgument("radial grid needs 0 < rho_in < rho_out and at least 2 nodes");
    }
    const double h = std::log(rho_out / rho_in) / static_cast<double>(count - 1);
    std::vector<double> r(count);
    for (std::size_t i = 0; i < count; ++i) {
        r[i] = rho_in * std::exp(h * static_cast<double>(i));
    }
    return r;
}

// Antipodal pairs; upper-hemisphere Fibonacci lattice for m = 3, axes plus
// seeded Gaussian directions otherwise.
std::vector<double> sphere_points(int m, std::size_t count)
{
    if (count < static_cast<std::size_t>(2 * m) || count % 2 != 0) {
        throw InvalidArgument("spherical grid needs an even number >= 2m of directions");
    }
    const std::size_t half = count / 2;
    std::vector<double> pts;
    pts.reserve(count * static_cast<std::size_t>(m));
    auto push_pair = [&](const std::vector<double>& p) {
        pts.insert(pts.end(), p.begin(), p.end());
        for (double v : p) {
            pts.push_back(-v);
        }
    };
    if (m == 3) {
        const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
        for (std::size_t k = 0; k < half; ++k) {
            const double z = (static_cast<double>(k) + 0.5) / static_cast<double>(half);
            const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
            const double phi = golden * static_cast<double>(k);
            push_pair({rho * std::cos(phi), rho * std::sin(phi), z});
        }
        return pts;
    }
    for (int a = 0; a < m; ++a) {
        std::vector<double> e(static_cast<std::size_t>(m), 0.0);
        e[static_cast<std::size_t>(a)] = 1.0;
        push_pair(e);
    }
    Rng rng(0x5eed0000ULL + static_cast<std::uint64_t>(m));
    for (std::size_t k = static_cast<std::size_t>(m); k < half; ++k) {
        std::vector<double> p(static_cast<std::size_t>(m));
        double n2 = 0.0;
        do {
            n2 = 0.0;
            for (auto& v : p) {
                v = rng.normal();
                n2 += v * v;
            }
        } while (n2 < 1e-6);
        const double inv = 1.0 / std::sqrt(n2);
        for (auto& v : p) {
            v *= inv;
        }
        push_pair(p);
    }
    return pts;
}

void check_log_spaced(const std::vector<double>& r)
{
    if (r.size() < 2) {
        throw InvalidArgument("graph grid needs at least 2 radial nodes");
    }
    const double q0 = r[1] / r[0];
    for (std::size_t i = 0; i + 1 < r.size(); ++i) {
        if (!(r[i] > 0.0) || !(r[i + 1] > r[i]) || !std::isfinite(r[i + 1])) {
            throw InvalidArgument("radial nodes must be positive and strictly increasing");
        }
        if (std::abs(r[i + 1] / r[i] - q0) > 1e-12 * q0) {
            throw InvalidArgument("radial nodes are not log-spaced (ratio varies by more than 1e-12)");
        }
    }
}

}  // namespace

// ---------------------------------------------------------------- Direction

Direction::Direction(std::vector<double> components) : c_(std::move(components))
{
    if (c_.empty()) {
        throw DegenerateDirection("empty direction");
    }
    const double n = norm_of(c_);
    if (!std::isfinite(n) || n == 0.0) {
        throw DegenerateDirection("direction has zero or non-finite norm");
    }
    for (auto& v : c_) {
        v /= n;
    }
}

Direction Direction::axis(int dim, int index)
{
    if (index < 0 || index >= dim) {
        throw InvalidArgument("axis index out of range");
    }
    std::vector<double> c(static_cast<std::size_t>(dim), 0.0);
    c[static_cast<std::size_t>(index)] = 1.0;
    return Direction(std::move(c));
}

double Direction::dot(std::span<const double> x) const
{
    double s = 0.0;
    for (std::size_t i = 0; i < c_.size(); ++i) {
        s += c_[i] * x[i];
    }
    return s;
}

Direction Direction::canonical() const
{
    for (std::size_t k = c_.size(); k-- > 0;) {
        if (std::abs(c_[k]) > 1e-14) {
            if (c_[k] > 0.0) {
                return *this;
            }
            std::vector<double> flipped(c_);
            for (auto& v : flipped) {
                v = -v;
            }
            return Direction(std::move(flipped));
        }
    }
    return *this;
}

double distance(const Direction& a, const Direction& b)
{
    if (a.dim() != b.dim()) {
        throw DimensionMismatch("directions of different dimension");
    }
    double s = 0.0;
    for (int i = 0; i < a.dim(); ++i) {
        const double d = a[static_cast<std::size_t>(i)] - b[static_cast<std::size_t>(i)];
        s += d * d;
    }
    return std::sqrt(s);
}

// ------------------------------------------------------------ AnnularWindow

AnnularWindow::AnnularWindow(double scale) : r(scale)
{
    if (!(scale > 0.0) || !std::isfinite(scale)) {
        throw InvalidArgument("window scale must be positive and finite");
    }
}

// --------------------------------------------------------------- PointCloud

PointCloud::PointCloud(int ambient_dim, std::vector<double> coords) : dim_(ambient_dim), coords_(std::move(coords))
{
    if (dim_ < 1) {
        throw InvalidArgument("ambient dimension must be positive");
    }
    if (coords_.size() % static_cast<std::size_t>(dim_) != 0) {
        throw DimensionMismatch("coordinate count is not a multiple of the ambient dimension");
    }
    for (double v : coords_) {
        if (!std::isfinite(v)) {
            throw InvalidArgument("point cloud contains a non-finite coordinate");
        }
    }
}

PointCloud PointCloud::restrict_to(const AnnularWindow& w) const
{
    std::vector<double> kept;
    for (std::size_t i = 0; i < size(); ++i) {
        auto p = point(i);
        if (w.contains_norm(norm_of(p))) {
            kept.insert(kept.end(), p.begin(), p.end());
        }
    }
    return PointCloud(dim_, std::move(kept));
}

// ---------------------------------------------------------------- GraphGrid

GraphGrid::GraphGrid(int m, std::vector<double> radii, std::vector<double> dirs)
    : m_(m), radii_(std::move(radii)), dirs_(std::move(dirs))
{
    if (m_ < 2) {
        throw InvalidArgument("base dimension must be at least 2");
    }
    check_log_spaced(radii_);
    if (dirs_.empty() || dirs_.size() % static_cast<std::size_t>(m_) != 0) {
        throw DimensionMismatch("direction list does not match the base dimension");
    }
    for (std::size_t j = 0; j < angular_count(); ++j) {
        if (std::abs(norm_of(direction(j)) - 1.0) > 1e-12) {
            throw InvalidArgument("grid direction is not a unit vector");
        }
    }
    log_step_ = std::log(radii_.back() / radii_.front()) / static_cast<double>(radii_.size() - 1);
}

GraphGrid GraphGrid::polar(double rho_in, double rho_out, std::size_t radial, std::size_t angular)
{
    if (angular < 3) {
        throw InvalidArgument("polar grid needs at least 3 angles");
    }
    std::vector<double> dirs;
    dirs.reserve(2 * angular);
    for (std::size_t j = 0; j < angular; ++j) {
        const double t = two_pi * static_cast<double>(j) / static_cast<double>(angular);
        dirs.push_back(std::cos(t));
        dirs.push_back(std::sin(t));
    }
    return GraphGrid(2, log_spaced(rho_in, rho_out, radial), std::move(dirs));
}

GraphGrid GraphGrid::spherical(int base_dim, double rho_in, double rho_out, std::size_t radial,
                               std::size_t directions)
{
    if (base_dim == 2) {
        return polar(rho_in, rho_out, radial, directions);
    }
    if (base_dim < 2) {
        throw InvalidArgument("base dimension must be at least 2");
    }
    return GraphGrid(base_dim, log_spaced(rho_in, rho_out, radial), sphere_points(base_dim, directions));
}

GraphGrid GraphGrid::from_nodes(int base_dim, std::vector<double> radii, std::vector<double> directions)
{
    GraphGrid g(base_dim, std::move(radii), std::move(directions));
    if (base_dim == 2) {
        const std::size_t n = g.angular_count();
        for (std::size_t j = 0; j < n; ++j) {
            const double t = two_pi * static_cast<double>(j) / static_cast<double>(n);
            auto d = g.direction(j);
            if (std::abs(d[0] - std::cos(t)) > 1e-12 || std::abs(d[1] - std::sin(t)) > 1e-12) {
                throw InvalidArgument("m = 2 grids need uniform angles 2*pi*j/N");
            }
        }
    }
    return g;
}

double GraphGrid::angle_step() const
{
    if (m_ != 2) {
        throw InvalidArgument("angle_step is defined for m = 2 grids only");
    }
    return two_pi / static_cast<double>(angular_count());
}

double GraphGrid::angle(std::size_t j) const
{
    if (m_ != 2) {
        throw InvalidArgument("angle is defined for m = 2 grids only");
    }
    return two_pi * static_cast<double>(j) / static_cast<double>(angular_count());
}

std::vector<double> GraphGrid::node(std::size_t i, std::size_t j) const
{
    auto d = direction(j);
    std::vector<double> y(d.begin(), d.end());
    for (auto& v : y) {
        v *= radii_[i];
    }
    return y;
}

GraphGrid GraphGrid::scaled(double factor) const
{
    if (!(factor > 0.0)) {
        throw InvalidArgument("scale factor must be positive");
    }
    std::vector<double> r(radii_);
    for (auto& v : r) {
        v *= factor;
    }
    return GraphGrid(m_, std::move(r), dirs_);
}

// ------------------------------------------------------------- SampledGraph

SampledGraph::SampledGraph(GraphGrid g, std::vector<double> v) : grid(std::move(g)), values(std::move(v))
{
    if (values.size() != grid.node_count()) {
        throw DimensionMismatch("value count " + std::to_string(values.size()) + " does not match " +
                                std::to_string(grid.node_count()) + " grid nodes");
    }
    for (double x : values) {
        if (!std::isfinite(x)) {
            throw InvalidArgument("sampled graph contains a non-finite value");
        }
    }
}

PointCloud graph_to_cloud(const SampledGraph& graph)
{
    const auto& g = graph.grid;
    const std::size_t m = static_cast<std::size_t>(g.base_dim());
    std::vector<double> coords;
    coords.reserve(g.node_count() * (m + 1));
    for (std::size_t i = 0; i < g.radial_count(); ++i) {
        for (std::size_t j = 0; j < g.angular_count(); ++j) {
            auto d = g.direction(j);
            for (std::size_t a = 0; a < m; ++a) {
                coords.push_back(g.radius(i) * d[a]);
            }
            coords.push_back(graph.value(i, j));
        }
    }
    return PointCloud(static_cast<int>(m + 1), std::move(coords));
}

std::string_view to_string(HeightMode mode)
{
    return mode == HeightMode::centered ? "centered" : "shifted";
}

HeightMode height_mode_from_string(std::string_view s)
{
    if (s == "centered") {
        return HeightMode::centered;
    }
    if (s == "shifted") {
        return HeightMode::shifted;
    }
    throw InvalidArgument("unknown height mode '" + std::string(s) + "'");
}

// ---------------------------------------------------------- height queries

double annular_height(const PointCloud& cloud, const AnnularWindow& w, const Direction& e, double b)
{
    if (e.dim() != cloud.ambient_dim()) {
        throw DimensionMismatch("direction and cloud dimensions differ");
    }
    bool any = false;
    double h = 0.0;
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        auto p = cloud.point(i);
        if (!w.contains_norm(norm_of(p))) {
            continue;
        }
        any = true;
        h = std::max(h, std::abs(e.dot(p) - b));
    }
    if (!any) {
        throw EmptyWindow("no cloud point in the annulus of scale " + std::to_string(w.r));
    }
    return h;
}

ShiftHeight best_shift_height(const PointCloud& cloud, const AnnularWindow& w, const Direction& e)
{
    if (e.dim() != cloud.ambient_dim()) {
        throw DimensionMismatch("direction and cloud dimensions differ");
    }
    bool any = false;
    double lo = 0.0;
    double hi = 0.0;
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        auto p = cloud.point(i);
        if (!w.contains_norm(norm_of(p))) {
            continue;
        }
        const double t = e.dot(p);
        if (!any) {
            lo = hi = t;
            any = true;
        } else {
            lo = std::min(lo, t);
            hi = std::max(hi, t);
        }
    }
    if (!any) {
        throw EmptyWindow("no cloud point in the annulus of scale " + std::to_string(w.r));
    }
    return {0.5 * (hi - lo), 0.5 * (hi + lo)};
}

PointCloud rescale_cloud(const PointCloud& cloud, double rho)
{
    if (!(rho > 0.0) || !std::isfinite(rho)) {
        throw InvalidArgument("rescale factor must be positive");
    }
    std::vector<double> c(cloud.coords());
    for (auto& v : c) {
        v /= rho;
    }
    return PointCloud(cloud.ambient_dim(), std::move(c));
}

// ------------------------------------------------------------- curvature

double curvature_sup(const SampledGraph& graph, const AnnularWindow& w)
{
    const auto jets = graph_jets(graph);
    const std::size_t m = static_cast<std::size_t>(graph.base_dim());
    std::set<std::size_t> rows;
    double sup = 0.0;
    std::vector<double> G(m * m);
    std::vector<double> GH(m * m);
    for (const auto& jet : jets) {
        const double rho = graph.grid.radius(jet.i);
        const double ambient = std::hypot(rho, jet.value);
        if (!w.contains_norm(ambient)) {
            continue;
        }
        rows.insert(jet.i);
        double p2 = 0.0;
        for (double g : jet.gradient) {
            p2 += g * g;
        }
        const double W2 = 1.0 + p2;
        for (std::size_t a = 0; a < m; ++a) {
            for (std::size_t b = 0; b < m; ++b) {
                G[a * m + b] = (a == b ? 1.0 : 0.0) - jet.gradient[a] * jet.gradient[b] / W2;
            }
        }
        for (std::size_t a = 0; a < m; ++a) {
            for (std::size_t b = 0; b < m; ++b) {
                double s = 0.0;
                for (std::size_t k = 0; k < m; ++k) {
                    s += G[a * m + k] * jet.hess(k, b);
                }
                GH[a * m + b] = s;
            }
        }
        // |II|^2 = tr(G H G H) / W^2
        double tr = 0.0;
        for (std::size_t a = 0; a < m; ++a) {
            for (std::size_t b = 0; b < m; ++b) {
                tr += GH[a * m + b] * GH[b * m + a];
            }
        }
        sup = std::max(sup, std::sqrt(std::max(tr, 0.0) / W2));
    }
    if (rows.size() < 3) {
        throw InsufficientResolution("curvature needs at least 3 radial rows with full stencils in the window");
    }
    return sup;
}

}  // namespace flatlab
