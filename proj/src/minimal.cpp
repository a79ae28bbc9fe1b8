#include "flatlab/minimal.hpp"

#include "flatlab/derivatives.hpp"
#include "flatlab/errors.hpp"
#include "flatlab/fourier.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <string>

namespace flatlab {

namespace {

struct Dual {
    double v = 0.0;
    double d = 0.0;

    Dual() = default;
    Dual(double value, double deriv = 0.0) : v(value), d(deriv) {}
};

Dual operator+(Dual a, Dual b) { return {a.v + b.v, a.d + b.d}; }
Dual operator-(Dual a, Dual b) { return {a.v - b.v, a.d - b.d}; }
Dual operator*(Dual a, Dual b) { return {a.v * b.v, a.d * b.v + a.v * b.d}; }
Dual operator*(double s, Dual a) { return {s * a.v, s * a.d}; }
Dual operator/(Dual a, Dual b) { return {a.v / b.v, (a.d * b.v - a.v * b.d) / (b.v * b.v)}; }
double sqrt(double a) { return std::sqrt(a); }
Dual sqrt(Dual a)
{
    const double r = std::sqrt(a.v);
    return {r, 0.5 * a.d / r};
}

struct Stencil {
    std::size_t nr;
    std::size_t nd;
    std::vector<double> e2;       // 1/rho^2 at nodes
    std::vector<double> e2_half;  // 1/rho^2 at i + 1/2
    double ks;                    // 1 / (2 sinh(h/2))
    double kt;                    // 1 / (2 sin(dt/2))
    double s1;                    // 1 / (2 sinh h)
    double t1;                    // 1 / (2 sin dt)
    double ch;                    // cosh(h/2)
    double ct;                    // cos(dt/2)

    explicit Stencil(const GraphGrid& g)
        : nr(g.radial_count()), nd(g.angular_count())
    {
        if (g.base_dim() != 2) {
            throw InvalidArgument("the minimal graph operator is implemented for m = 2");
        }
        if (nr < 4 || nd < 4) {
            throw InsufficientResolution("need at least 4 radial and 4 angular nodes");
        }
        const double h = g.log_step();
        const double dt = g.angle_step();
        e2.resize(nr);
        e2_half.resize(nr - 1);
        for (std::size_t i = 0; i < nr; ++i) {
            e2[i] = 1.0 / (g.radius(i) * g.radius(i));
        }
        for (std::size_t i = 0; i + 1 < nr; ++i) {
            e2_half[i] = 1.0 / (g.radius(i) * g.radius(i + 1));
        }
        ks = 1.0 / (2.0 * std::sinh(0.5 * h));
        kt = 1.0 / (2.0 * std::sin(0.5 * dt));
        s1 = 1.0 / (2.0 * std::sinh(h));
        t1 = 1.0 / (2.0 * std::sin(dt));
        ch = std::cosh(0.5 * h);
        ct = std::cos(0.5 * dt);
    }

    std::size_t at(std::size_t i, std::size_t j) const { return i * nd + j; }
    std::size_t jp(std::size_t j) const { return (j + 1) % nd; }
    std::size_t jm(std::size_t j) const { return (j + nd - 1) % nd; }
};

// Radial flux at (i + 1/2, j).
template <class T>
T radial_flux(const Stencil& st, const T* f, std::size_t i, std::size_t j)
{
    const T ds = st.ks * (f[st.at(i + 1, j)] - f[st.at(i, j)]);
    const T ta = st.t1 * (f[st.at(i, st.jp(j))] - f[st.at(i, st.jm(j))]);
    const T tb = st.t1 * (f[st.at(i + 1, st.jp(j))] - f[st.at(i + 1, st.jm(j))]);
    const T ft = (0.5 / st.ch) * (ta + tb);
    const T W = sqrt(T{1.0} + st.e2_half[i] * (ds * ds + ft * ft));
    return ds / W;
}

// Angular flux at (i, j + 1/2).
template <class T>
T angular_flux(const Stencil& st, const T* f, std::size_t i, std::size_t j)
{
    const std::size_t j1 = st.jp(j);
    const T dt = st.kt * (f[st.at(i, j1)] - f[st.at(i, j)]);
    const T sa = st.s1 * (f[st.at(i + 1, j)] - f[st.at(i - 1, j)]);
    const T sb = st.s1 * (f[st.at(i + 1, j1)] - f[st.at(i - 1, j1)]);
    const T fs = (0.5 / st.ct) * (sa + sb);
    const T W = sqrt(T{1.0} + st.e2[i] * (fs * fs + dt * dt));
    return dt / W;
}

// Residual on interior rows, stored as (nr - 2) x nd.
template <class T>
void residual(const Stencil& st, const T* f, T* out)
{
    std::vector<T> Fs((st.nr - 1) * st.nd);
    for (std::size_t i = 0; i + 1 < st.nr; ++i) {
        for (std::size_t j = 0; j < st.nd; ++j) {
            Fs[i * st.nd + j] = radial_flux(st, f, i, j);
        }
    }
    std::vector<T> Ft(st.nd);
    for (std::size_t i = 1; i + 1 < st.nr; ++i) {
        for (std::size_t j = 0; j < st.nd; ++j) {
            Ft[j] = angular_flux(st, f, i, j);
        }
        for (std::size_t j = 0; j < st.nd; ++j) {
            const T rad = st.ks * (Fs[i * st.nd + j] - Fs[(i - 1) * st.nd + j]);
            const T ang = st.kt * (Ft[j] - Ft[st.jm(j)]);
            out[(i - 1) * st.nd + j] = st.e2[i] * (rad + ang);
        }
    }
}

double sup_abs(const std::vector<double>& v)
{
    double s = 0.0;
    for (double x : v) {
        s = std::max(s, std::abs(x));
    }
    return s;
}

GraphGrid interior_grid(const GraphGrid& g)
{
    std::vector<double> r(g.radii().begin() + 1, g.radii().end() - 1);
    return GraphGrid::from_nodes(g.base_dim(), std::move(r), g.directions());
}

// Frozen-coefficient principal part, diagonalized by the angular DFT.
class Preconditioner {
public:
    Preconditioner(const Stencil& st, std::vector<double> a, std::vector<double> b)
        : st_(st), a_(std::move(a)), b_(std::move(b))
    {
    }

    static Preconditioner laplacian(const Stencil& st)
    {
        return Preconditioner(st, std::vector<double>(st.nr - 1, 1.0), std::vector<double>(st.nr, 1.0));
    }

    static Preconditioner frozen(const Stencil& st, const std::vector<double>& f)
    {
        std::vector<double> a(st.nr - 1, 0.0);
        std::vector<double> b(st.nr, 1.0);
        for (std::size_t i = 0; i + 1 < st.nr; ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j < st.nd; ++j) {
                const double ds = st.ks * (f[st.at(i + 1, j)] - f[st.at(i, j)]);
                const double ta = st.t1 * (f[st.at(i, st.jp(j))] - f[st.at(i, st.jm(j))]);
                const double tb = st.t1 * (f[st.at(i + 1, st.jp(j))] - f[st.at(i + 1, st.jm(j))]);
                const double ft = (0.5 / st.ch) * (ta + tb);
                const double W = std::sqrt(1.0 + st.e2_half[i] * (ds * ds + ft * ft));
                s += 1.0 / W - ds * ds * st.e2_half[i] / (W * W * W);
            }
            a[i] = s / static_cast<double>(st.nd);
        }
        for (std::size_t i = 1; i + 1 < st.nr; ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j < st.nd; ++j) {
                const std::size_t j1 = st.jp(j);
                const double dt = st.kt * (f[st.at(i, j1)] - f[st.at(i, j)]);
                const double sa = st.s1 * (f[st.at(i + 1, j)] - f[st.at(i - 1, j)]);
                const double sb = st.s1 * (f[st.at(i + 1, j1)] - f[st.at(i - 1, j1)]);
                const double fs = (0.5 / st.ct) * (sa + sb);
                const double W = std::sqrt(1.0 + st.e2[i] * (fs * fs + dt * dt));
                s += 1.0 / W - dt * dt * st.e2[i] / (W * W * W);
            }
            b[i] = s / static_cast<double>(st.nd);
        }
        return Preconditioner(st, std::move(a), std::move(b));
    }

    // rhs and result on interior rows, (nr - 2) x nd.
    std::vector<double> solve(const std::vector<double>& rhs) const
    {
        const std::size_t ni = st_.nr - 2;
        const std::size_t nd = st_.nd;
        std::vector<std::vector<std::complex<double>>> rows(ni, std::vector<std::complex<double>>(nd));
        for (std::size_t r = 0; r < ni; ++r) {
            for (std::size_t j = 0; j < nd; ++j) {
                rows[r][j] = rhs[r * nd + j];
            }
            fft(rows[r]);
        }
        const double cs2 = st_.ks * st_.ks;
        const double ct2 = st_.kt * st_.kt;
        std::vector<double> lower(ni), diag(ni), upper(ni);
        std::vector<std::complex<double>> x(ni), cp(ni);
        for (std::size_t k = 0; k < nd; ++k) {
            const double sk = std::sin(std::numbers::pi * static_cast<double>(k) / static_cast<double>(nd));
            const double symbol = -4.0 * sk * sk;
            for (std::size_t r = 0; r < ni; ++r) {
                const std::size_t i = r + 1;
                const double e2 = st_.e2[i];
                lower[r] = e2 * cs2 * a_[i - 1];
                upper[r] = e2 * cs2 * a_[i];
                diag[r] = -e2 * cs2 * (a_[i - 1] + a_[i]) + e2 * ct2 * b_[i] * symbol;
            }
            // Thomas algorithm
            std::vector<double> c(ni);
            double denom = diag[0];
            c[0] = upper[0] / denom;
            cp[0] = rows[0][k] / denom;
            for (std::size_t r = 1; r < ni; ++r) {
                denom = diag[r] - lower[r] * c[r - 1];
                c[r] = upper[r] / denom;
                cp[r] = (rows[r][k] - lower[r] * cp[r - 1]) / denom;
            }
            x[ni - 1] = cp[ni - 1];
            for (std::size_t r = ni - 1; r-- > 0;) {
                x[r] = cp[r] - c[r] * x[r + 1];
            }
            for (std::size_t r = 0; r < ni; ++r) {
                rows[r][k] = x[r];
            }
        }
        std::vector<double> out(ni * nd);
        for (std::size_t r = 0; r < ni; ++r) {
            fft(rows[r], true);
            for (std::size_t j = 0; j < nd; ++j) {
                out[r * nd + j] = rows[r][j].real();
            }
        }
        return out;
    }

private:
    const Stencil& st_;
    std::vector<double> a_;
    std::vector<double> b_;
};

std::vector<double> eval_residual(const Stencil& st, const std::vector<double>& f)
{
    std::vector<double> out((st.nr - 2) * st.nd);
    residual(st, f.data(), out.data());
    return out;
}

// J v for an interior direction v.
std::vector<double> jacobian_apply(const Stencil& st, const std::vector<double>& f, const std::vector<double>& v)
{
    std::vector<Dual> fd(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) {
        fd[i] = {f[i], 0.0};
    }
    for (std::size_t r = 0; r + 2 < st.nr; ++r) {
        for (std::size_t j = 0; j < st.nd; ++j) {
            fd[st.at(r + 1, j)].d = v[r * st.nd + j];
        }
    }
    std::vector<Dual> out((st.nr - 2) * st.nd);
    residual(st, fd.data(), out.data());
    std::vector<double> jv(out.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        jv[i] = out[i].d;
    }
    return jv;
}

std::vector<double> newton_direction(const Stencil& st, const std::vector<double>& f, const std::vector<double>& rhs,
                                     const SolverConfig& cfg)
{
    const Preconditioner pc = Preconditioner::frozen(st, f);
    const double scale = std::max(sup_abs(rhs), std::numeric_limits<double>::min());
    std::vector<double> delta(rhs.size(), 0.0);
    std::vector<double> r = rhs;
    double rn = sup_abs(r);
    for (int it = 0; it < cfg.max_linear_iters; ++it) {
        if (rn <= cfg.linear_tol * scale) {
            return delta;
        }
        const auto corr = pc.solve(r);
        for (std::size_t i = 0; i < delta.size(); ++i) {
            delta[i] += corr[i];
        }
        const auto jd = jacobian_apply(st, f, delta);
        for (std::size_t i = 0; i < r.size(); ++i) {
            r[i] = rhs[i] - jd[i];
        }
        const double next = sup_abs(r);
        if (!(next < 0.9 * rn)) {
            // rounding level reached
            if (next <= 1e-9 * scale) {
                return delta;
            }
            if (!(next < rn)) {
                throw NonConvergence("linear correction stagnated at relative residual " +
                                     std::to_string(next / scale));
            }
        }
        rn = next;
    }
    if (rn <= 1e-9 * scale) {
        return delta;
    }
    throw NonConvergence("linear correction did not converge");
}

double max_slope2(const Stencil& st, const std::vector<double>& f)
{
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < st.nr; ++i) {
        for (std::size_t j = 0; j < st.nd; ++j) {
            const double ds = st.ks * (f[st.at(i + 1, j)] - f[st.at(i, j)]);
            const double ta = st.t1 * (f[st.at(i, st.jp(j))] - f[st.at(i, st.jm(j))]);
            const double tb = st.t1 * (f[st.at(i + 1, st.jp(j))] - f[st.at(i + 1, st.jm(j))]);
            const double ft = (0.5 / st.ch) * (ta + tb);
            s = std::max(s, st.e2_half[i] * (ds * ds + ft * ft));
        }
    }
    return s;
}

void check_traces(const GraphGrid& grid, const std::vector<double>& g_in, const std::vector<double>& g_out)
{
    if (g_in.size() != grid.angular_count() || g_out.size() != grid.angular_count()) {
        throw DimensionMismatch("boundary traces need one value per angular node");
    }
    for (double v : g_in) {
        if (!std::isfinite(v)) {
            throw InvalidArgument("inner trace is not finite");
        }
    }
    for (double v : g_out) {
        if (!std::isfinite(v)) {
            throw InvalidArgument("outer trace is not finite");
        }
    }
}

std::vector<double> with_traces(const GraphGrid& grid, const std::vector<double>& g_in,
                                const std::vector<double>& g_out)
{
    const std::size_t nr = grid.radial_count();
    const std::size_t nd = grid.angular_count();
    std::vector<double> f(nr * nd, 0.0);
    for (std::size_t j = 0; j < nd; ++j) {
        f[j] = g_in[j];
        f[(nr - 1) * nd + j] = g_out[j];
    }
    return f;
}

}  // namespace

ScalarField ms_residual_div(const SampledGraph& graph)
{
    const Stencil st(graph.grid);
    return ScalarField(interior_grid(graph.grid), eval_residual(st, graph.values));
}

CoefficientField ms_coefficients(const SampledGraph& graph)
{
    const auto jets = graph_jets(graph);
    const std::size_t m = static_cast<std::size_t>(graph.base_dim());
    std::vector<double> entries;
    entries.reserve(jets.size() * m * m);
    double dev = 0.0;
    for (const auto& jet : jets) {
        double p2 = 0.0;
        for (double g : jet.gradient) {
            p2 += g * g;
        }
        const double W2 = 1.0 + p2;
        for (std::size_t a = 0; a < m; ++a) {
            for (std::size_t b = 0; b < m; ++b) {
                entries.push_back((a == b ? 1.0 : 0.0) - jet.gradient[a] * jet.gradient[b] / W2);
            }
        }
        dev = std::max(dev, p2 / W2);
    }
    return {interior_grid(graph.grid), std::move(entries), dev};
}

ScalarField ms_residual_nondiv(const SampledGraph& graph)
{
    const auto jets = graph_jets(graph);
    const std::size_t m = static_cast<std::size_t>(graph.base_dim());
    std::vector<double> out;
    out.reserve(jets.size());
    for (const auto& jet : jets) {
        double p2 = 0.0;
        for (double g : jet.gradient) {
            p2 += g * g;
        }
        const double W2 = 1.0 + p2;
        double tr = 0.0;
        for (std::size_t a = 0; a < m; ++a) {
            for (std::size_t b = 0; b < m; ++b) {
                const double A = (a == b ? 1.0 : 0.0) - jet.gradient[a] * jet.gradient[b] / W2;
                tr += A * jet.hess(b, a);
            }
        }
        out.push_back(tr);
    }
    return ScalarField(interior_grid(graph.grid), std::move(out));
}

double sup_norm(const ScalarField& field)
{
    return sup_abs(field.values);
}

SampledGraph harmonic_extension(const std::vector<double>& g_in, const std::vector<double>& g_out,
                                const GraphGrid& grid)
{
    const Stencil st(grid);
    check_traces(grid, g_in, g_out);
    std::vector<double> f = with_traces(grid, g_in, g_out);
    const double cs2 = st.ks * st.ks;
    std::vector<double> rhs((st.nr - 2) * st.nd, 0.0);
    for (std::size_t j = 0; j < st.nd; ++j) {
        rhs[j] -= st.e2[1] * cs2 * g_in[j];
        rhs[(st.nr - 3) * st.nd + j] -= st.e2[st.nr - 2] * cs2 * g_out[j];
    }
    const auto interior = Preconditioner::laplacian(st).solve(rhs);
    for (std::size_t r2 = 0; r2 + 2 < st.nr; ++r2) {
        for (std::size_t j = 0; j < st.nd; ++j) {
            f[st.at(r2 + 1, j)] = interior[r2 * st.nd + j];
        }
    }
    return SampledGraph(grid, std::move(f));
}

DirichletSolution solve_dirichlet(const std::vector<double>& g_in, const std::vector<double>& g_out,
                                  const GraphGrid& grid, const SolverConfig& cfg)
{
    if (!(cfg.residual_tol > 0.0) || cfg.max_newton_iters < 1) {
        throw InvalidArgument("solver config needs residual_tol > 0 and max_newton_iters >= 1");
    }
    const Stencil st(grid);
    std::vector<double> f = harmonic_extension(g_in, g_out, grid).values;

    double fmax = 1.0;
    for (double v : f) {
        fmax = std::max(fmax, std::abs(v));
    }
    const double e2max = *std::max_element(st.e2.begin(), st.e2.end());
    const double floor =
        16.0 * std::numeric_limits<double>::epsilon() * fmax * e2max * (st.ks * st.ks + st.kt * st.kt);
    const double tol = std::max(cfg.residual_tol, floor);

    SolverReport rep;
    rep.h = grid.log_step();
    rep.tolerance = tol;
    if (max_slope2(st, f) > 1.0) {
        throw GraphicalityLoss("initial harmonic extension has slope above 1");
    }
    auto R = eval_residual(st, f);
    double res = sup_abs(R);
    rep.residuals.push_back(res);
    while (res > tol) {
        if (rep.iters >= cfg.max_newton_iters) {
            throw NonConvergence("Newton iteration limit reached at residual " + std::to_string(res));
        }
        std::vector<double> rhs(R.size());
        for (std::size_t i = 0; i < R.size(); ++i) {
            rhs[i] = -R[i];
        }
        const auto delta = newton_direction(st, f, rhs, cfg);
        double t = 1.0;
        bool accepted = false;
        std::vector<double> trial(f.size());
        std::vector<double> Rt;
        double rt = 0.0;
        for (int ls = 0; ls < 30; ++ls) {
            trial = f;
            for (std::size_t r = 0; r + 2 < st.nr; ++r) {
                for (std::size_t j = 0; j < st.nd; ++j) {
                    trial[st.at(r + 1, j)] += t * delta[r * st.nd + j];
                }
            }
            if (max_slope2(st, trial) <= 1.0) {
                Rt = eval_residual(st, trial);
                rt = sup_abs(Rt);
                if (rt <= (1.0 - cfg.armijo * t) * res) {
                    accepted = true;
                    break;
                }
            }
            t *= 0.5;
        }
        ++rep.iters;
        if (!accepted) {
            if (max_slope2(st, trial) > 1.0) {
                throw GraphicalityLoss("every damped Newton step leaves the slope <= 1 regime");
            }
            throw NonConvergence("residual stagnated at " + std::to_string(res));
        }
        f = std::move(trial);
        R = std::move(Rt);
        res = rt;
        rep.residuals.push_back(res);
    }
    SampledGraph out(grid, std::move(f));
    rep.deviation = ms_coefficients(out).deviation;
    return {std::move(out), std::move(rep)};
}

}  // namespace flatlab
