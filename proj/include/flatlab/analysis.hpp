#pragma once

#include "flatlab/geometry.hpp"
#include "flatlab/harmonic.hpp"

#include <optional>
#include <vector>

namespace flatlab {

struct HeightProfile {
    std::vector<HeightRecord> records;
    int n = 3;
    double R = 0.0;
    double eta = 0.0;
    /// max over scales of H_0(r) / r
    double eta_certificate = 0.0;
};

/// r0, 2 r0, 4 r0, ... while <= r1 (with a 1e-12 relative allowance).
std::vector<double> dyadic_scales(double r0, double r1);

/// flatness() at every scale. The eta certificate always uses centered
/// heights; in shifted mode they are computed in addition.
HeightProfile height_profile(const PointCloud& cloud, const std::vector<double>& scales, HeightMode mode,
                             double R = 0.0, double eta = 0.0, const FlatnessOptions& options = {});

struct DecayVerdict {
    double C_min;
    double alpha;
    std::vector<double> slack;  ///< H / (C_min eta r [r^{3-n-alpha} + (r/R)^alpha]) per scale
    std::size_t binding;        ///< scale index where the slack is 1
};

/// Smallest C with H(r) <= C eta r [r^{3-n-alpha} + (r/R)^alpha] on the profile.
DecayVerdict verify_decay_bound(const HeightProfile& profile, double alpha);

struct Mesoscale {
    double r_star_empirical;
    double r_star_analytic;
    double ratio;  ///< empirical / analytic
};

/// Minimizer over r of sum |coefficient| r^{hom - 1}, skipping affine modes.
double mode_balance_scale(const std::vector<HarmonicMode>& modes, double r_lo, double r_hi);

/// r* = R^{alpha / (n + 2 alpha - 3)}.
double mesoscale_power_law(int n, double R, double alpha);

/// (n + alpha - 3) / (n + 2 alpha - 3).
double mesoscale_beta(int n, double alpha);

/// Empirical argmin of H(r)/r with a parabolic refinement in log r; throws
/// NoReversal when the minimum sits at either end of the profile. The
/// analytic scale comes from the declared modes if given, else from the
/// power law with the profile's n and R.
Mesoscale locate_mesoscale(const HeightProfile& profile, double alpha = 0.5,
                           const std::optional<std::vector<HarmonicMode>>& declared = std::nullopt);

struct TiltDrift {
    std::vector<double> drift;  ///< t |e_2t - e_t| + |b_2t - b_t|
    std::vector<double> ratio;  ///< drift / (H_t + H_2t)
    std::vector<bool> pass;     ///< ratio <= C_drift (always true for the fitted C_drift)
    double C_drift;
    std::vector<double> tail;   ///< sum over j >= k of |e_{j+1} - e_j|
};

/// Consecutive-scale drift of the optimal planes; the profile must be in
/// shifted mode with scales doubling. A bound may be imposed through limit.
TiltDrift tilt_drift_check(const HeightProfile& profile, std::optional<double> limit = std::nullopt);

struct SheetDecomposition {
    std::size_t N;
    std::vector<PointCloud> sheets;  ///< ordered bottom to top
    bool ordered;
    bool connected;
    double density;
};

/// Splits a cloud confined to |x_n| <= eps into ordered graph sheets. Points
/// are linked when their base distance is at most 2 density and the vertical
/// gap, corrected by the local slope, is below eps/4.
SheetDecomposition sheet_decompose(const PointCloud& cloud, double eps, double density);

struct AsymptoticFit {
    double b;
    double c;
    std::vector<double> d;
    double residual_exponent;
    std::vector<double> annulus_radii;  ///< geometric centre of each fit annulus
    std::vector<double> residual_sups;
    double condition;                   ///< of the column-scaled Gram matrix
};

/// Weighted least squares against {1, log|y| or |y|^{3-n}, y/|y|^{n-1}} on
/// the dyadic annuli [rho_0 2^k, rho_0 2^{k+1}], with node weights
/// |y|^{n-2+beta}. rho_0 defaults to the innermost radius and all annuli
/// inside the grid are used unless `annuli` is set; at least 5 are needed.
/// Throws DomainViolation when the slope deviation |grad f|^2/(1+|grad f|^2)
/// exceeds 0.1 on the fit region.
AsymptoticFit fit_asymptotics(const SampledGraph& graph, double beta = 0.5, double rho_start = 0.0,
                              std::size_t annuli = 0);

}  // namespace flatlab
