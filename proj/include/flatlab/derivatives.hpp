#pragma once

#include "flatlab/geometry.hpp"

#include <array>
#include <cstddef>
#include <vector>

namespace flatlab {

/// First and second derivatives of a sampled function at one node, in
/// Cartesian coordinates of the base space.
struct NodeJet {
    std::size_t i;
    std::size_t j;
    std::vector<double> y;
    double value;
    std::vector<double> gradient;
    std::vector<double> hessian;  ///< row-major m x m

    double hess(std::size_t a, std::size_t b) const { return hessian[a * gradient.size() + b]; }
};

/// Jets on all nodes with a full radial stencil (radial rows 1 .. N-2).
///
/// m = 2 uses log-polar differences whose weights are fitted so that
/// constants and affine functions are differentiated exactly. m >= 3 accepts
/// only fields of the form a(rho) + c(rho).y/|y| and throws
/// InsufficientResolution otherwise.
std::vector<NodeJet> graph_jets(const SampledGraph& graph);

/// Per-radius least-squares split f(rho w) = a(rho) + c(rho).w.
struct LowDegreeParts {
    std::vector<double> radial;  ///< a, one per radius
    std::vector<double> linear;  ///< c, row-major radial_count x m
    double max_residual = 0.0;   ///< sup of the part not captured
};

LowDegreeParts project_low_degree(const SampledGraph& graph);

/// Weights (minus, centre, plus) of the 3-point stencil for
/// g'' - (l1 + l2) g' + l1 l2 g on a uniform grid of step h that annihilates
/// exp(l1 s) and exp(l2 s) exactly; second-order consistent. Requires l1 != l2.
std::array<double, 3> fitted_stencil(double lambda1, double lambda2, double h);

}  // namespace flatlab
