#pragma once

#include "flatlab/geometry.hpp"

#include <vector>

namespace flatlab {

struct SolverConfig {
    double residual_tol = 1e-11;
    int max_newton_iters = 50;
    /// Sufficient-decrease factor of the step-halving line search.
    double armijo = 0.5;
    double linear_tol = 1e-13;
    int max_linear_iters = 400;
};

/// Per-node m x m matrices A = Id - grad f grad f^T / (1 + |grad f|^2).
struct CoefficientField {
    GraphGrid grid;               ///< nodes where the gradient is available
    std::vector<double> entries;  ///< row-major m x m per node
    double deviation;             ///< sup |A - Id|_2 = sup |grad f|^2 / (1 + |grad f|^2)
};

/// Discrete div(grad f / sqrt(1 + |grad f|^2)) on the interior radial rows
/// (m = 2). Flux form on the log-polar grid, exact on planes.
ScalarField ms_residual_div(const SampledGraph& graph);

CoefficientField ms_coefficients(const SampledGraph& graph);

/// Tr(A D^2 f) with finite-difference derivatives, interior rows.
ScalarField ms_residual_nondiv(const SampledGraph& graph);

double sup_norm(const ScalarField& field);

struct SolverReport {
    int iters = 0;
    std::vector<double> residuals;
    double deviation = 0.0;
    double h = 0.0;          ///< log-radial step
    double tolerance = 0.0;  ///< tolerance actually enforced
};

struct DirichletSolution {
    SampledGraph graph;
    SolverReport report;
};

/// Discrete harmonic function with the given traces on the inner and outer
/// circles (one value per angular node).
SampledGraph harmonic_extension(const std::vector<double>& g_in, const std::vector<double>& g_out,
                                const GraphGrid& grid);

/// Damped Newton iteration for ms_residual_div = 0 with Dirichlet traces,
/// started from the harmonic extension.
///
/// The enforced tolerance is max(residual_tol, a rounding floor proportional
/// to the stencil weights and the size of the data); it is reported.
DirichletSolution solve_dirichlet(const std::vector<double>& g_in, const std::vector<double>& g_out,
                                  const GraphGrid& grid, const SolverConfig& config = {});

}  // namespace flatlab
