#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace flatlab {

/// Unit vector in R^n.
class Direction {
public:
    /// Normalizes `components`; throws DegenerateDirection on a zero or
    /// non-finite vector.
    explicit Direction(std::vector<double> components);

    static Direction axis(int dim, int index);

    int dim() const noexcept { return static_cast<int>(c_.size()); }
    std::span<const double> components() const noexcept { return c_; }
    double operator[](std::size_t i) const { return c_[i]; }
    double dot(std::span<const double> x) const;

    /// The same line with the sign fixed: the last non-negligible component
    /// is made positive, so e and -e compare equal.
    Direction canonical() const;

private:
    std::vector<double> c_;
};

double distance(const Direction& a, const Direction& b);

/// Dyadic annulus B_{2r} minus the closed ball B_{r/2}.
struct AnnularWindow {
    double r;

    explicit AnnularWindow(double scale);
    double inner() const noexcept { return 0.5 * r; }
    double outer() const noexcept { return 2.0 * r; }
    bool contains_norm(double norm) const noexcept { return norm > inner() && norm < outer(); }
};

/// Finite set of points in R^n, row-major.
class PointCloud {
public:
    PointCloud(int ambient_dim, std::vector<double> coords);

    int ambient_dim() const noexcept { return dim_; }
    std::size_t size() const noexcept { return coords_.size() / static_cast<std::size_t>(dim_); }
    bool empty() const noexcept { return coords_.empty(); }
    std::span<const double> point(std::size_t i) const
    {
        return {coords_.data() + i * static_cast<std::size_t>(dim_), static_cast<std::size_t>(dim_)};
    }
    const std::vector<double>& coords() const noexcept { return coords_; }

    /// Points whose norm lies in the open annulus of `w`.
    PointCloud restrict_to(const AnnularWindow& w) const;

private:
    int dim_;
    std::vector<double> coords_;
};

/// Node layout of a graph over an annulus of R^m: log-spaced radii times a
/// set of unit directions. For m = 2 the directions are the uniform angles
/// 2*pi*j/N; for m >= 3 they are an antipodally symmetric spherical point set.
class GraphGrid {
public:
    static GraphGrid polar(double rho_in, double rho_out, std::size_t radial, std::size_t angular);
    static GraphGrid spherical(int base_dim, double rho_in, double rho_out, std::size_t radial,
                               std::size_t directions);
    /// Rebuild from stored nodes (deserialization); validates invariants.
    static GraphGrid from_nodes(int base_dim, std::vector<double> radii, std::vector<double> directions);

    int base_dim() const noexcept { return m_; }
    std::size_t radial_count() const noexcept { return radii_.size(); }
    std::size_t angular_count() const noexcept { return dirs_.size() / static_cast<std::size_t>(m_); }
    std::size_t node_count() const noexcept { return radial_count() * angular_count(); }
    const std::vector<double>& radii() const noexcept { return radii_; }
    double radius(std::size_t i) const { return radii_[i]; }
    /// Uniform step in log(rho).
    double log_step() const noexcept { return log_step_; }
    /// Angular step; m = 2 only.
    double angle_step() const;
    double angle(std::size_t j) const;
    std::span<const double> direction(std::size_t j) const
    {
        return {dirs_.data() + j * static_cast<std::size_t>(m_), static_cast<std::size_t>(m_)};
    }
    const std::vector<double>& directions() const noexcept { return dirs_; }
    std::size_t index(std::size_t i, std::size_t j) const noexcept { return i * angular_count() + j; }
    std::vector<double> node(std::size_t i, std::size_t j) const;

    /// Same layout with radii multiplied by `factor`.
    GraphGrid scaled(double factor) const;

private:
    GraphGrid(int m, std::vector<double> radii, std::vector<double> dirs);

    int m_;
    std::vector<double> radii_;
    std::vector<double> dirs_;
    double log_step_ = 0.0;
};

/// Scalar function sampled on a GraphGrid; also used for fields that are
/// not graphs of minimal surfaces.
struct SampledGraph {
    GraphGrid grid;
    std::vector<double> values;

    SampledGraph(GraphGrid g, std::vector<double> v);

    int base_dim() const noexcept { return grid.base_dim(); }
    double value(std::size_t i, std::size_t j) const { return values[grid.index(i, j)]; }
};

using ScalarField = SampledGraph;

/// Points (y, f(y)) in R^{m+1}.
PointCloud graph_to_cloud(const SampledGraph& graph);

enum class HeightMode { centered, shifted };

std::string_view to_string(HeightMode mode);
HeightMode height_mode_from_string(std::string_view s);

struct HeightRecord {
    double r;
    double H;
    Direction e;
    double b;
    HeightMode mode;
    /// Lip(f) * h_max as declared by the caller; 0 when undeclared.
    double sampling_error = 0.0;
    /// Covering radius (radians) of the coarse direction search.
    double certificate_radius = 0.0;
};

/// max over windowed points of |e.x - b|.
double annular_height(const PointCloud& cloud, const AnnularWindow& w, const Direction& e, double b);

struct ShiftHeight {
    double height;
    double shift;
};

/// Optimal shift for a fixed direction: half the slab width and the midrange.
ShiftHeight best_shift_height(const PointCloud& cloud, const AnnularWindow& w, const Direction& e);

struct FlatnessOptions {
    /// Terminal stencil radius of the neighbourhood search, radians.
    double angular_tol = 1e-5;
    /// The stencil also refines below `relative_tol * H / outer radius`,
    /// which is the angular scale at which H itself changes.
    double relative_tol = 1e-4;
    /// Coarse direction grid size; 0 picks a size from the dimension.
    std::size_t coarse_directions = 0;
    /// Sampling contract: spacing of surface samples and Lipschitz bound.
    double sampling_spacing = 0.0;
    double lipschitz = 0.0;
};

/// Infimum of the annular height over directions (and shifts in shifted mode).
HeightRecord flatness(const PointCloud& cloud, const AnnularWindow& w, HeightMode mode,
                      const FlatnessOptions& options = {});

/// Every point divided by rho.
PointCloud rescale_cloud(const PointCloud& cloud, double rho);

/// Supremum of |II| over graph nodes inside the window.
double curvature_sup(const SampledGraph& graph, const AnnularWindow& w);

}  // namespace flatlab
