#include "flatlab/analysis.hpp"

#include "flatlab/derivatives.hpp"
#include "flatlab/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace flatlab {

AsymptoticFit fit_asymptotics(const SampledGraph& graph, double beta, double rho_start, std::size_t annuli)
{
    const auto& g = graph.grid;
    const int m = g.base_dim();
    const int n = m + 1;
    if (n < 3 || n > 7) {
        throw InvalidArgument("asymptotic fits need 3 <= n <= 7");
    }
    if (!(beta > 0.0 && beta < 1.0)) {
        throw InvalidArgument("beta must lie in (0, 1)");
    }
    const double rho0 = rho_start > 0.0 ? rho_start : g.radius(0);
    const double rho_max = g.radius(g.radial_count() - 1);
    const double slack = 1.0 + 1e-12;
    std::size_t K = 0;
    while (rho0 * std::pow(2.0, static_cast<double>(K + 1)) <= rho_max * slack) {
        ++K;
    }
    if (annuli > 0) {
        K = std::min(K, annuli);
    }
    if (K < 5) {
        throw InsufficientAnnuli("the graph covers " + std::to_string(K) + " dyadic annuli from rho = " +
                                 std::to_string(rho0) + "; at least 5 are needed");
    }
    const double lo = rho0 / slack;
    const double hi = rho0 * std::pow(2.0, static_cast<double>(K)) * slack;

    try {
        double dev = 0.0;
        for (const auto& jet : graph_jets(graph)) {
            const double rho = g.radius(jet.i);
            if (rho < lo || rho > hi) {
                continue;
            }
            double p2 = 0.0;
            for (double v : jet.gradient) {
                p2 += v * v;
            }
            dev = std::max(dev, p2 / (1.0 + p2));
        }
        if (dev > 0.1) {
            throw DomainViolation("slope deviation " + std::to_string(dev) + " exceeds 0.1 on the fit region");
        }
    } catch (const InsufficientResolution&) {
        // derivatives unavailable for this field; the slope condition is the caller's
    }

    std::vector<std::pair<std::size_t, std::size_t>> nodes;
    for (std::size_t i = 0; i < g.radial_count(); ++i) {
        if (g.radius(i) >= lo && g.radius(i) <= hi) {
            for (std::size_t j = 0; j < g.angular_count(); ++j) {
                nodes.emplace_back(i, j);
            }
        }
    }
    const Eigen::Index cols = 2 + m;
    const auto rows = static_cast<Eigen::Index>(nodes.size());
    if (rows < cols) {
        throw InsufficientAnnuli("too few nodes for the fit");
    }
    Eigen::MatrixXd A(rows, cols);
    Eigen::VectorXd rhs(rows);
    Eigen::MatrixXd B(rows, cols);  // unweighted design
    Eigen::VectorXd values(rows);
    for (Eigen::Index r = 0; r < rows; ++r) {
        const auto [i, j] = nodes[static_cast<std::size_t>(r)];
        const double rho = g.radius(i);
        const auto w = g.direction(j);
        const double wt = std::pow(rho, n - 2 + beta);
        B(r, 0) = 1.0;
        B(r, 1) = n == 3 ? std::log(rho) : std::pow(rho, 3 - n);
        const double dip = std::pow(rho, 2 - n);
        for (int a = 0; a < m; ++a) {
            B(r, 2 + a) = w[static_cast<std::size_t>(a)] * dip;
        }
        A.row(r) = wt * B.row(r);
        values(r) = graph.value(i, j);
        rhs(r) = wt * values(r);
    }
    Eigen::VectorXd scale(cols);
    for (Eigen::Index c = 0; c < cols; ++c) {
        scale(c) = A.col(c).norm();
        if (!(scale(c) > 0.0)) {
            throw IllConditioned("basis column " + std::to_string(c) + " vanishes on the fit region");
        }
    }
    const Eigen::MatrixXd As = A * scale.cwiseInverse().asDiagonal();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(As);
    const auto sv = svd.singularValues();
    const double smin = sv(sv.size() - 1);
    const double cond = smin > 0.0 ? (sv(0) / smin) * (sv(0) / smin) : std::numeric_limits<double>::infinity();
    if (cond > 1e8) {
        throw IllConditioned("Gram condition number " + std::to_string(cond) + " exceeds 1e8");
    }
    Eigen::VectorXd x = As.colPivHouseholderQr().solve(rhs).cwiseQuotient(scale);
    // data in the basis span: weighted and unweighted minimizers coincide, and the
    // unweighted solve is free of the rounding amplified by the weights
    const Eigen::VectorXd plain = B.colPivHouseholderQr().solve(values);
    const double tol = 64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, values.cwiseAbs().maxCoeff());
    if ((values - B * plain).cwiseAbs().maxCoeff() <= tol) {
        x = plain;
    }

    AsymptoticFit fit;
    fit.b = x(0);
    fit.c = x(1);
    for (int a = 0; a < m; ++a) {
        fit.d.push_back(x(2 + a));
    }
    fit.condition = cond;
    fit.residual_sups.assign(K, 0.0);
    const Eigen::VectorXd model = B * x;
    for (Eigen::Index r = 0; r < rows; ++r) {
        const auto [i, j] = nodes[static_cast<std::size_t>(r)];
        const double rho = g.radius(i);
        auto k = static_cast<std::size_t>(std::floor(std::log2(rho / rho0) + 1e-12));
        k = std::min(k, K - 1);
        fit.residual_sups[k] = std::max(fit.residual_sups[k], std::abs(graph.value(i, j) - model(r)));
    }
    std::vector<double> lx, ly;
    for (std::size_t k = 0; k < K; ++k) {
        const double mid = rho0 * std::pow(2.0, static_cast<double>(k) + 0.5);
        fit.annulus_radii.push_back(mid);
        if (fit.residual_sups[k] > 0.0) {
            lx.push_back(std::log(mid));
            ly.push_back(std::log(fit.residual_sups[k]));
        }
    }
    if (lx.size() < 2) {
        fit.residual_exponent = std::numeric_limits<double>::infinity();
    } else {
        double mx = 0.0, my = 0.0;
        for (std::size_t k = 0; k < lx.size(); ++k) {
            mx += lx[k];
            my += ly[k];
        }
        mx /= static_cast<double>(lx.size());
        my /= static_cast<double>(lx.size());
        double sxy = 0.0, sxx = 0.0;
        for (std::size_t k = 0; k < lx.size(); ++k) {
            sxy += (lx[k] - mx) * (ly[k] - my);
            sxx += (lx[k] - mx) * (lx[k] - mx);
        }
        fit.residual_exponent = -sxy / sxx;
    }
    return fit;
}

}  // namespace flatlab
