#include "flatlab/derivatives.hpp"

#include "flatlab/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

namespace flatlab {

namespace {

// Log-radial difference weights, exact on 1 and exp(+-s).
struct RadialWeights {
    double first;   // multiplies (g+ - g-)
    double second;  // multiplies (g+ - 2g + g-)
};

RadialWeights radial_weights(double h)
{
    const double sh = std::sinh(0.5 * h);
    return {1.0 / (2.0 * std::sinh(h)), 1.0 / (4.0 * sh * sh)};
}

std::vector<NodeJet> polar_jets(const SampledGraph& graph)
{
    const auto& g = graph.grid;
    const std::size_t nr = g.radial_count();
    const std::size_t nt = g.angular_count();
    const double h = g.log_step();
    const double dt = g.angle_step();
    const auto rw = radial_weights(h);
    const double st = std::sin(0.5 * dt);
    const double wt1 = 1.0 / (2.0 * std::sin(dt));
    const double wt2 = 1.0 / (4.0 * st * st);
    const double wst = 1.0 / (4.0 * std::sinh(h) * std::sin(dt));

    std::vector<NodeJet> out;
    out.reserve((nr - 2) * nt);
    for (std::size_t i = 1; i + 1 < nr; ++i) {
        const double rho = g.radius(i);
        const double inv2 = 1.0 / (rho * rho);
        for (std::size_t j = 0; j < nt; ++j) {
            const std::size_t jp = (j + 1) % nt;
            const std::size_t jm = (j + nt - 1) % nt;
            const double f = graph.value(i, j);
            const double fs = rw.first * (graph.value(i + 1, j) - graph.value(i - 1, j));
            const double fss = rw.second * (graph.value(i + 1, j) - 2.0 * f + graph.value(i - 1, j));
            const double ft = wt1 * (graph.value(i, jp) - graph.value(i, jm));
            const double ftt = wt2 * (graph.value(i, jp) - 2.0 * f + graph.value(i, jm));
            const double fst = wst * (graph.value(i + 1, jp) - graph.value(i + 1, jm) - graph.value(i - 1, jp) +
                                      graph.value(i - 1, jm));

            // orthonormal frame (e_rho, e_theta)
            const double gr = fs / rho;
            const double gt = ft / rho;
            const double hrr = (fss - fs) * inv2;
            const double hrt = (fst - ft) * inv2;
            const double htt = (fs + ftt) * inv2;

            auto d = g.direction(j);
            const double c = d[0];
            const double s = d[1];
            NodeJet jet;
            jet.i = i;
            jet.j = j;
            jet.y = {rho * c, rho * s};
            jet.value = f;
            jet.gradient = {c * gr - s * gt, s * gr + c * gt};
            // R * Hframe * R^T with R = [[c, -s], [s, c]]
            const double xx = c * c * hrr - 2.0 * c * s * hrt + s * s * htt;
            const double yy = s * s * hrr + 2.0 * c * s * hrt + c * c * htt;
            const double xy = c * s * (hrr - htt) + (c * c - s * s) * hrt;
            jet.hessian = {xx, xy, xy, yy};
            out.push_back(std::move(jet));
        }
    }
    return out;
}

std::vector<NodeJet> low_degree_jets(const SampledGraph& graph)
{
    const auto& g = graph.grid;
    const std::size_t nr = g.radial_count();
    const std::size_t nd = g.angular_count();
    const std::size_t m = static_cast<std::size_t>(g.base_dim());
    const auto parts = project_low_degree(graph);
    double scale = 1.0;
    for (double v : graph.values) {
        scale = std::max(scale, std::abs(v));
    }
    if (parts.max_residual > 1e-9 * scale) {
        throw InsufficientResolution("m >= 3 derivatives need a field of the form a(rho) + c(rho).w");
    }
    const double h = g.log_step();
    const auto rw = radial_weights(h);
    auto lin = [&](std::size_t i, std::size_t k) { return parts.linear[i * m + k]; };

    std::vector<NodeJet> out;
    out.reserve((nr - 2) * nd);
    std::vector<double> c(m), c1(m), c2(m);
    for (std::size_t i = 1; i + 1 < nr; ++i) {
        const double rho = g.radius(i);
        const double a_s = rw.first * (parts.radial[i + 1] - parts.radial[i - 1]);
        const double a_ss = rw.second * (parts.radial[i + 1] - 2.0 * parts.radial[i] + parts.radial[i - 1]);
        const double a1 = a_s / rho;
        const double a2 = (a_ss - a_s) / (rho * rho);
        for (std::size_t k = 0; k < m; ++k) {
            const double cs = rw.first * (lin(i + 1, k) - lin(i - 1, k));
            const double css = rw.second * (lin(i + 1, k) - 2.0 * lin(i, k) + lin(i - 1, k));
            c[k] = lin(i, k);
            c1[k] = cs / rho;
            c2[k] = (css - cs) / (rho * rho);
        }
        for (std::size_t j = 0; j < nd; ++j) {
            auto w = g.direction(j);
            double cw = 0.0, c1w = 0.0, c2w = 0.0;
            for (std::size_t k = 0; k < m; ++k) {
                cw += c[k] * w[k];
                c1w += c1[k] * w[k];
                c2w += c2[k] * w[k];
            }
            // f = a(rho) + c(rho).w ; grad f = P w + c / rho
            const double P = a1 + c1w - cw / rho;
            const double Q = a2 + c2w - 2.0 * c1w / rho + 2.0 * cw / (rho * rho);
            NodeJet jet;
            jet.i = i;
            jet.j = j;
            jet.y.resize(m);
            jet.gradient.resize(m);
            jet.hessian.resize(m * m);
            jet.value = graph.value(i, j);
            for (std::size_t a = 0; a < m; ++a) {
                jet.y[a] = rho * w[a];
                jet.gradient[a] = P * w[a] + c[a] / rho;
            }
            for (std::size_t a = 0; a < m; ++a) {
                const double ua = c1[a] / rho - c[a] / (rho * rho);
                for (std::size_t b = 0; b < m; ++b) {
                    const double ub = c1[b] / rho - c[b] / (rho * rho);
                    const double delta = a == b ? 1.0 : 0.0;
                    jet.hessian[a * m + b] =
                        w[a] * w[b] * Q + w[a] * ub + w[b] * ua + P * (delta - w[a] * w[b]) / rho;
                }
            }
            out.push_back(std::move(jet));
        }
    }
    return out;
}

}  // namespace

LowDegreeParts project_low_degree(const SampledGraph& graph)
{
    const auto& g = graph.grid;
    const std::size_t nr = g.radial_count();
    const std::size_t nd = g.angular_count();
    const std::size_t m = static_cast<std::size_t>(g.base_dim());
    if (nd < m + 1) {
        throw InsufficientResolution("too few directions for a degree-1 split");
    }
    Eigen::MatrixXd D(nd, m + 1);
    for (std::size_t j = 0; j < nd; ++j) {
        D(static_cast<Eigen::Index>(j), 0) = 1.0;
        auto w = g.direction(j);
        for (std::size_t k = 0; k < m; ++k) {
            D(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k + 1)) = w[k];
        }
    }
    const Eigen::MatrixXd pinv = D.completeOrthogonalDecomposition().pseudoInverse();

    LowDegreeParts parts;
    parts.radial.resize(nr);
    parts.linear.resize(nr * m);
    Eigen::VectorXd ring(nd);
    for (std::size_t i = 0; i < nr; ++i) {
        for (std::size_t j = 0; j < nd; ++j) {
            ring(static_cast<Eigen::Index>(j)) = graph.value(i, j);
        }
        const Eigen::VectorXd coef = pinv * ring;
        parts.radial[i] = coef(0);
        for (std::size_t k = 0; k < m; ++k) {
            parts.linear[i * m + k] = coef(static_cast<Eigen::Index>(k + 1));
        }
        const Eigen::VectorXd r = ring - D * coef;
        parts.max_residual = std::max(parts.max_residual, r.cwiseAbs().maxCoeff());
    }
    return parts;
}

std::vector<NodeJet> graph_jets(const SampledGraph& graph)
{
    if (graph.grid.radial_count() < 3) {
        throw InsufficientResolution("derivatives need at least 3 radial nodes");
    }
    if (graph.base_dim() == 2) {
        if (graph.grid.angular_count() < 3) {
            throw InsufficientResolution("derivatives need at least 3 angular nodes");
        }
        return polar_jets(graph);
    }
    return low_degree_jets(graph);
}

std::array<double, 3> fitted_stencil(double lambda1, double lambda2, double h)
{
    const double gap = (lambda1 - lambda2) * h;
    if (std::abs(gap) < 1e-12) {
        throw InvalidArgument("fitted stencil needs distinct exponents");
    }
    const double em = std::expm1(gap);
    const double A = std::exp(lambda2 * h) * em;
    const double C = std::exp(-lambda1 * h) * em;
    const double t = (2.0 / (h * h)) / (A + C);
    const double plus = t * C;
    const double minus = t * A;
    const double centre = -plus * std::exp(lambda1 * h) - minus * std::exp(-lambda1 * h);
    return {minus, centre, plus};
}

}  // namespace flatlab
