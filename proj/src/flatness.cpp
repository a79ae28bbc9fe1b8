// Direction search for the annular heights H(Sigma, r) and H_0(Sigma, r).
//
// Pipeline per window: smallest principal axis plus the best few directions
// of a coarse quasi-uniform hemisphere grid seed a neighbourhood search on the
// sphere (3^{n-1} stencil, radius halved on failure). Each result is then
// polished in a gnomonic chart, where the slab width numerator is convex in
// the chart coordinates; a log-sum-exp smoothing with decreasing temperature
// is minimized by damped Newton and the chart is recentred until the step
// vanishes.

#include "flatlab/errors.hpp"
#include "flatlab/geometry.hpp"
#include "flatlab/random.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace flatlab {

namespace {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

struct WindowPoints {
    int n = 0;
    std::size_t count = 0;
    Mat x;  // n x count
    double max_norm = 0.0;
};

WindowPoints gather(const PointCloud& cloud, const AnnularWindow& w)
{
    const PointCloud inside = cloud.restrict_to(w);
    if (inside.empty()) {
        throw EmptyWindow("no cloud point in the annulus of scale " + std::to_string(w.r));
    }
    WindowPoints P;
    P.n = cloud.ambient_dim();
    P.count = inside.size();
    P.x.resize(P.n, static_cast<Eigen::Index>(P.count));
    for (std::size_t i = 0; i < P.count; ++i) {
        auto p = inside.point(i);
        for (int a = 0; a < P.n; ++a) {
            P.x(a, static_cast<Eigen::Index>(i)) = p[static_cast<std::size_t>(a)];
        }
        P.max_norm = std::max(P.max_norm, P.x.col(static_cast<Eigen::Index>(i)).norm());
    }
    return P;
}

double height_along(const WindowPoints& P, const Vec& e, HeightMode mode)
{
    const Eigen::RowVectorXd t = e.transpose() * P.x;
    if (mode == HeightMode::centered) {
        return t.cwiseAbs().maxCoeff();
    }
    return 0.5 * (t.maxCoeff() - t.minCoeff());
}

// Orthonormal basis of the tangent space at e (columns).
Mat tangent_basis(const Vec& e)
{
    const Eigen::Index n = e.size();
    Mat full = Mat::Identity(n, n);
    full.col(0) = e;
    Eigen::HouseholderQR<Mat> qr(full);
    Mat Q = qr.householderQ() * Mat::Identity(n, n);
    return Q.rightCols(n - 1);
}

bool lex_less(const Vec& a, const Vec& b)
{
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        if (a(i) != b(i)) {
            return a(i) < b(i);
        }
    }
    return false;
}

Vec canonical(Vec e)
{
    e.normalize();
    for (Eigen::Index k = e.size(); k-- > 0;) {
        if (std::abs(e(k)) > 1e-14) {
            if (e(k) < 0.0) {
                e = -e;
            }
            break;
        }
    }
    return e;
}

std::size_t default_coarse_size(int n)
{
    if (n == 3) {
        return 2000;
    }
    if (n == 4) {
        return 20000;
    }
    return static_cast<std::size_t>(1500 * (n - 1));
}

// Quasi-uniform directions on the upper hemisphere.
Mat hemisphere_grid(int n, std::size_t count)
{
    Mat dirs(n, static_cast<Eigen::Index>(count));
    if (n == 2) {
        for (std::size_t k = 0; k < count; ++k) {
            const double t = std::numbers::pi * (static_cast<double>(k) + 0.5) / static_cast<double>(count);
            dirs(0, static_cast<Eigen::Index>(k)) = std::cos(t);
            dirs(1, static_cast<Eigen::Index>(k)) = std::sin(t);
        }
        return dirs;
    }
    if (n == 3) {
        const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
        for (std::size_t k = 0; k < count; ++k) {
            const double z = (static_cast<double>(k) + 0.5) / static_cast<double>(count);
            const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
            const double phi = golden * static_cast<double>(k);
            dirs(0, static_cast<Eigen::Index>(k)) = rho * std::cos(phi);
            dirs(1, static_cast<Eigen::Index>(k)) = rho * std::sin(phi);
            dirs(2, static_cast<Eigen::Index>(k)) = z;
        }
        return dirs;
    }
    Rng rng(0xd1ec7105ULL + static_cast<std::uint64_t>(n));
    for (std::size_t k = 0; k < count; ++k) {
        Vec v(n);
        do {
            for (int a = 0; a < n; ++a) {
                v(a) = rng.normal();
            }
        } while (v.norm() < 1e-6);
        v.normalize();
        if (v(n - 1) < 0.0) {
            v = -v;
        }
        dirs.col(static_cast<Eigen::Index>(k)) = v;
    }
    return dirs;
}

// Largest angle from a probe direction to the nearest grid line, over a
// fixed probe set.
double covering_radius(const Mat& grid)
{
    const int n = static_cast<int>(grid.rows());
    Rng rng(0xc0ffeeULL + static_cast<std::uint64_t>(n));
    double worst = 0.0;
    for (int k = 0; k < 2000; ++k) {
        Vec v(n);
        for (int a = 0; a < n; ++a) {
            v(a) = rng.normal();
        }
        v.normalize();
        const double best = (grid.transpose() * v).cwiseAbs().maxCoeff();
        worst = std::max(worst, std::acos(std::min(1.0, best)));
    }
    return worst;
}

struct CoarseGrid {
    Mat dirs;
    double radius;
};

CoarseGrid build_grid(int n)
{
    Mat d = hemisphere_grid(n, default_coarse_size(n));
    const double r = covering_radius(d);
    return {std::move(d), r};
}

template <int N>
const CoarseGrid& grid_for()
{
    static const CoarseGrid g = build_grid(N);
    return g;
}

const CoarseGrid& default_grid(int n)
{
    switch (n) {
    case 2:
        return grid_for<2>();
    case 3:
        return grid_for<3>();
    case 4:
        return grid_for<4>();
    case 5:
        return grid_for<5>();
    case 6:
        return grid_for<6>();
    case 7:
        return grid_for<7>();
    default:
        return grid_for<8>();
    }
}

// ------------------------------------------------------- stencil search

struct SearchResult {
    Vec e;
    double H;
};

SearchResult stencil_search(const WindowPoints& P, Vec e, HeightMode mode, double radius,
                            const FlatnessOptions& opt)
{
    const int n = P.n;
    const int dims = n - 1;
    int stencil = 1;
    for (int k = 0; k < dims; ++k) {
        stencil *= 3;
    }
    double H = height_along(P, e, mode);
    const double floor_radius = 1e-12;
    const double max_radius = radius;
    std::size_t steps = 0;
    std::vector<int> digits(static_cast<std::size_t>(dims));
    while (true) {
        const double resolution =
            std::max(floor_radius, std::min(opt.angular_tol, opt.relative_tol * H / std::max(P.max_norm, 1e-300)));
        if (radius < resolution) {
            break;
        }
        if (++steps > 200000) {
            throw NoConvergence("direction search did not reach its angular resolution");
        }
        const Mat T = tangent_basis(e);
        Vec best_e = e;
        double best_H = H;
        for (int code = 0; code < stencil; ++code) {
            int c = code;
            bool centre = true;
            Vec offset = Vec::Zero(dims);
            for (int k = 0; k < dims; ++k) {
                const int d = c % 3 - 1;
                c /= 3;
                offset(k) = d;
                centre = centre && d == 0;
            }
            if (centre) {
                continue;
            }
            Vec cand = (e + radius * (T * offset)).normalized();
            const double Hc = height_along(P, cand, mode);
            if (Hc < best_H || (Hc == best_H && lex_less(canonical(cand), canonical(best_e)))) {
                best_H = Hc;
                best_e = cand;
            }
        }
        // sufficient decrease; slow creeping along a kink is left to the polish
        if (best_H < H - std::max(4.0 * std::numeric_limits<double>::epsilon() * H, 1e-2 * P.max_norm * radius * radius)) {
            e = best_e;
            H = best_H;
            radius = std::min(2.0 * radius, max_radius);
        } else {
            radius *= 0.5;
        }
    }
    return {e, H};
}

// ------------------------------------------------------- chart polish

struct Smoothed {
    double value;
    Vec grad;
    Mat hess;
};

// tau * log sum exp(q / tau) over q in {sign * p_i}, with gradient and
// Hessian in a; terms more than 40 tau below the maximum are dropped.
void add_lse(Smoothed& out, const Vec& p, const Mat& Y, double tau, bool plus, bool minus, bool derivs)
{
    double qmax = -std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < p.size(); ++i) {
        if (plus) {
            qmax = std::max(qmax, p(i));
        }
        if (minus) {
            qmax = std::max(qmax, -p(i));
        }
    }
    const Eigen::Index dims = Y.rows();
    const double cut = qmax - 40.0 * tau;
    double sum = 0.0;
    Vec g = Vec::Zero(dims);
    Mat H = Mat::Zero(dims, dims);
    auto term = [&](Eigen::Index i, double sign) {
        const double q = sign * p(i);
        if (q < cut) {
            return;
        }
        const double w = std::exp((q - qmax) / tau);
        sum += w;
        if (derivs) {
            const auto y = Y.col(i);
            g.noalias() += (sign * w) * y;
            H.noalias() += w * (y * y.transpose());
        }
    };
    for (Eigen::Index i = 0; i < p.size(); ++i) {
        if (plus) {
            term(i, 1.0);
        }
        if (minus) {
            term(i, -1.0);
        }
    }
    out.value += qmax + tau * std::log(sum);
    if (derivs) {
        g /= sum;
        out.grad += g;
        out.hess += (H / sum - g * g.transpose()) / tau;
    }
}

// Log-sum-exp smoothing of the chart numerator g(a); p = z + Y^T a.
Smoothed smoothed_numerator(const Vec& z, const Mat& Y, const Vec& a, double tau, HeightMode mode, bool derivs)
{
    const Vec p = z + Y.transpose() * a;
    const Eigen::Index dims = Y.rows();
    Smoothed out{0.0, Vec::Zero(dims), Mat::Zero(dims, dims)};
    if (mode == HeightMode::shifted) {
        add_lse(out, p, Y, tau, true, false, derivs);
        add_lse(out, p, Y, tau, false, true, derivs);
    } else {
        add_lse(out, p, Y, tau, true, true, derivs);
    }
    return out;
}

Vec chart_minimizer(const WindowPoints& P, const Vec& e0, const Mat& T, HeightMode mode, double tau_start)
{
    const Vec z = P.x.transpose() * e0;
    const Mat Y = T.transpose() * P.x;
    const Eigen::Index dims = T.cols();
    Vec a = Vec::Zero(dims);
    const double g0 = mode == HeightMode::shifted ? z.maxCoeff() - z.minCoeff() : z.cwiseAbs().maxCoeff();
    if (!(g0 > 1e-15 * std::max(P.max_norm, 1e-300))) {
        return a;
    }
    const double log_count = std::log(2.0 * static_cast<double>(P.count));
    const double tau_min = 1e-8 * g0 / (1.0 + log_count);
    for (double tau = tau_start * g0; tau > tau_min; tau *= 0.1) {
        for (int it = 0; it < 60; ++it) {
            const Smoothed s = smoothed_numerator(z, Y, a, tau, mode, true);
            Mat H = s.hess;
            const double shift = 1e-12 * (H.trace() + 1e-300);
            H.diagonal().array() += shift;
            Vec step = H.ldlt().solve(-s.grad);
            if (!step.allFinite()) {
                throw NoConvergence("chart polish produced a non-finite Newton step");
            }
            const double slope = s.grad.dot(step);
            if (slope > 0.0) {
                step = -s.grad;
            }
            double t = 1.0;
            bool moved = false;
            for (int ls = 0; ls < 50; ++ls) {
                const Vec trial = a + t * step;
                const double v = smoothed_numerator(z, Y, trial, tau, mode, false).value;
                if (v <= s.value + 1e-4 * t * std::min(slope, 0.0)) {
                    moved = v < s.value || t * step.norm() > 0.0;
                    a = trial;
                    break;
                }
                t *= 0.5;
            }
            if (!moved || std::abs(slope) < 1e-4 * tau || t * step.norm() < 1e-16) {
                break;
            }
        }
    }
    return a;
}

SearchResult polish(const WindowPoints& P, Vec e, HeightMode mode)
{
    double H = height_along(P, e, mode);
    for (int outer = 0; outer < 40; ++outer) {
        const Mat T = tangent_basis(e);
        const Vec a = chart_minimizer(P, e, T, mode, outer == 0 ? 0.05 : 1e-6);
        if (a.norm() < 1e-15) {
            break;
        }
        const Vec cand = (e + T * a).normalized();
        const double Hc = height_along(P, cand, mode);
        if (!(Hc < H)) {
            break;
        }
        e = cand;
        H = Hc;
    }
    return {e, H};
}

Vec principal_axis(const WindowPoints& P, HeightMode mode)
{
    Mat second;
    if (mode == HeightMode::shifted) {
        const Vec mean = P.x.rowwise().mean();
        const Mat c = P.x.colwise() - mean;
        second = c * c.transpose();
    } else {
        second = P.x * P.x.transpose();
    }
    Eigen::SelfAdjointEigenSolver<Mat> eig(second);
    return eig.eigenvectors().col(0);
}

}  // namespace

HeightRecord flatness(const PointCloud& cloud, const AnnularWindow& w, HeightMode mode, const FlatnessOptions& opt)
{
    const int n = cloud.ambient_dim();
    if (n < 2 || n > 8) {
        throw InvalidArgument("flatness supports ambient dimensions 2..8");
    }
    const WindowPoints P = gather(cloud, w);

    Mat owned;
    double cover = 0.0;
    const Mat* grid = nullptr;
    if (opt.coarse_directions == 0) {
        const auto& g = default_grid(n);
        grid = &g.dirs;
        cover = g.radius;
    } else {
        owned = hemisphere_grid(n, opt.coarse_directions);
        cover = covering_radius(owned);
        grid = &owned;
    }

    // Seeds: principal axis, then the best coarse directions separated by
    // more than the covering radius.
    std::vector<Vec> seeds{principal_axis(P, mode)};
    {
        const Eigen::Index count = grid->cols();
        std::vector<std::pair<double, Eigen::Index>> scored;
        scored.reserve(static_cast<std::size_t>(count));
        for (Eigen::Index k = 0; k < count; ++k) {
            scored.emplace_back(height_along(P, grid->col(k), mode), k);
        }
        std::sort(scored.begin(), scored.end());
        const double sep = std::cos(2.0 * cover);
        for (const auto& [h, k] : scored) {
            if (seeds.size() >= 8) {
                break;
            }
            const Vec cand = grid->col(k);
            bool distinct = true;
            for (std::size_t s = 1; s < seeds.size(); ++s) {
                if (std::abs(seeds[s].dot(cand)) > sep) {
                    distinct = false;
                    break;
                }
            }
            if (distinct) {
                seeds.push_back(cand);
            }
        }
    }

    const double start_radius = std::max(2.0 * cover, 1e-3);
    std::vector<SearchResult> found;
    double best_found = std::numeric_limits<double>::infinity();
    for (const auto& seed : seeds) {
        found.push_back(stencil_search(P, seed, mode, start_radius, opt));
        best_found = std::min(best_found, found.back().H);
    }
    SearchResult best{Vec(), std::numeric_limits<double>::infinity()};
    for (auto r : found) {
        if (r.H <= best_found * (1.0 + 1e-2) + 1e-300) {
            SearchResult p = polish(P, r.e, mode);
            if (p.H < r.H) {
                r = p;
            }
        }
        r.e = canonical(r.e);
        r.H = height_along(P, r.e, mode);
        if (r.H < best.H || (r.H == best.H && lex_less(r.e, best.e))) {
            best = r;
        }
    }

    std::vector<double> comps(best.e.data(), best.e.data() + best.e.size());
    Direction e(std::move(comps));
    double b = 0.0;
    double H = best.H;
    if (mode == HeightMode::shifted) {
        const auto sh = best_shift_height(cloud, w, e);
        H = sh.height;
        b = sh.shift;
    } else {
        H = annular_height(cloud, w, e, 0.0);
    }
    HeightRecord rec{w.r, H, std::move(e), b, mode};
    rec.sampling_error = opt.lipschitz * opt.sampling_spacing;
    rec.certificate_radius = cover;
    return rec;
}

}  // namespace flatlab
