#pragma once

#include "flatlab/geometry.hpp"

#include <span>
#include <string_view>
#include <vector>

namespace flatlab {

enum class ModeKind { growing, decaying, log };

std::string_view to_string(ModeKind kind);
ModeKind mode_kind_from_string(std::string_view s);

/// Homogeneous harmonic function on R^m minus the origin.
///
/// growing: r^k A(w), decaying: r^{2-m-k} A(w), log: log r (m = 2, k = 0).
/// A = 1 for k = 0 and A = axis.w for k = 1; for m = 2 and k >= 2,
/// A = cos(k(theta - phi)) where phi is the polar angle of the axis.
struct HarmonicMode {
    int m = 2;
    int k = 0;
    ModeKind kind = ModeKind::growing;
    std::vector<double> axis;
    double coefficient = 1.0;

    /// Degree of homogeneity; 0 for the log mode.
    double homogeneity() const;
};

/// Throws InvalidArgument on an unsupported (m, k, kind) or a bad axis.
void validate_mode(const HarmonicMode& mode);

double evaluate_mode(const HarmonicMode& mode, std::span<const double> y);

/// Sum of mode evaluations on every grid node.
ScalarField synthesize(const std::vector<HarmonicMode>& modes, const GraphGrid& grid);

/// Discrete Laplacian on the interior radial rows.
///
/// m = 2: log-polar 5-point stencil with fitted weights (exact on 1, log r,
/// r cos, r sin, cos/r, sin/r). m >= 3: the field is split into a radial and a
/// degree-1 part and each radial profile uses a stencil that is exact on the
/// two harmonic powers of its degree.
std::vector<double> laplace_nodes(const ScalarField& field);

/// Sup norm of laplace_nodes.
double laplace_residual(const ScalarField& field);

struct AffineApproximation {
    std::vector<double> a;
    double b;
    double sup_err;      ///< sup |v - a.y - b| over nodes with 1/4 <= |y| <= 4
    double coef_size;    ///< |a| + |b|
    std::size_t nodes;   ///< nodes used in the fit
};

/// Least-squares affine fit of v on the fixed annulus 1/4 <= |y| <= 4.
/// With check_psi set, first verifies |v| <= (1 + 1e-9) max(t^{4-n-alpha}, t^{1+alpha})
/// at every node (n = m + 1) and throws PsiViolation otherwise.
AffineApproximation affine_approximation_check(const ScalarField& field, bool check_psi, double alpha = 0.5);

/// v(x) = |x|^{2-m} u(x / |x|^2) on the grid with inverted radii and the same
/// directions. m >= 3; m = 2 goes through kelvin_transform_log.
ScalarField kelvin_transform(const ScalarField& u);

struct LogKelvin {
    ScalarField field;       ///< transform of u - c log|y|
    double log_coefficient;  ///< c
};

/// m = 2 branch: c is estimated from the ring averages at the outermost
/// radius and the radius nearest to half of it; u - c log|y| is inverted.
LogKelvin kelvin_transform_log(const ScalarField& u);

struct OriginJet {
    double value;
    std::vector<double> gradient;
};

/// Value and gradient at 0 of a field sampled on a punctured ball, from a
/// polynomial fit of its radial and degree-1 parts on the innermost rings.
OriginJet origin_jet(const ScalarField& v, std::size_t rings = 8);

}  // namespace flatlab
