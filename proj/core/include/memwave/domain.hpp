#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "memwave/errors.hpp"

namespace memwave {

/// One boundary node with its face membership. Rectangle corners appear
/// once per adjacent face, with zero quadrature weight.
struct BoundaryNode {
    std::array<int, 2> ij{0, 0};        ///< full-grid node indices (j unused in 1D)
    int face = 0;                       ///< 0: x=0, 1: x=Lx, 2: y=0, 3: y=Ly
    std::array<double, 2> normal{0, 0}; ///< outward unit normal
    double weight = 0.0;                ///< boundary quadrature weight
    bool corner = false;
};

/// Uniform finite-difference grid on an interval (1D) or axis-aligned
/// rectangle (2D) with homogeneous Dirichlet boundary. Fields are stored at
/// interior nodes only (x-fastest in 2D); boundary values are identically
/// zero. Immutable.
class Grid {
  public:
    /// Placeholder; assign from one of the factories before use.
    Grid() = default;

    static Grid interval(double L, int nodes);
    static Grid rectangle(double Lx, double Ly, int nx, int ny);
    static Grid make(int dim, std::span<const double> extents, std::span<const int> nodes);

    int dim() const { return dim_; }
    double extent(int axis) const { return extent_[static_cast<std::size_t>(axis)]; }
    int nodes(int axis) const { return nodes_[static_cast<std::size_t>(axis)]; }
    double spacing(int axis) const { return spacing_[static_cast<std::size_t>(axis)]; }
    /// Smallest spacing (the one entering the CFL bound).
    double min_spacing() const;

    std::size_t interior_count() const { return interior_count_; }
    int interior_nodes(int axis) const { return nodes(axis) - 2; }

    /// Flat interior index of interior node (i, j), both 1-based in the
    /// full grid (j ignored in 1D).
    std::size_t interior_index(int i, int j = 1) const;
    double coord_x(int i) const { return spacing(0) * static_cast<double>(i); }
    double coord_y(int j) const { return spacing(1) * static_cast<double>(j); }

    double cell_volume() const; ///< h (1D) or hx*hy (2D)
    double domain_measure() const;
    double boundary_measure() const;

    /// Area quadrature weight of a full-grid node (trapezoid tensor rule);
    /// the weights over all nodes sum to the domain measure.
    double area_weight(int i, int j = 0) const;

    const std::vector<BoundaryNode>& boundary() const { return boundary_; }

  private:
    int dim_ = 1;
    std::array<double, 2> extent_{1.0, 0.0};
    std::array<int, 2> nodes_{0, 0};
    std::array<double, 2> spacing_{0.0, 0.0};
    std::size_t interior_count_ = 0;
    std::vector<BoundaryNode> boundary_;
};

/// Discrete Laplacian (second-order centered stencil, Dirichlet closure).
/// Returns Delta u; `out` and `u` are interior fields.
void apply_laplacian(const Grid& grid, std::span<const double> u, std::span<double> out);
std::vector<double> laplacian(const Grid& grid, std::span<const double> u);

/// First Dirichlet eigenvalue of -Delta_discrete by inverse power
/// iteration, converged to `tol` relative.
double smallest_eigenvalue(const Grid& grid, double tol = 1e-10);

/// Analytic first eigenvalue of the continuum Dirichlet Laplacian.
double lambda_continuum(const Grid& grid);
/// Analytic first eigenvalue of the discrete stencil.
double lambda_stencil(const Grid& grid);

/// L2 inner product and norm of interior fields (trapezoid weights; the
/// integrands vanish on the boundary).
double inner(const Grid& grid, std::span<const double> u, std::span<const double> v);
double norm_sq(const Grid& grid, std::span<const double> u);
/// Integral of a scalar sampled at interior nodes that vanishes on the
/// boundary.
double integrate(const Grid& grid, std::span<const double> f);

/// Edge-based gradient inner product <grad u, grad v>; satisfies the exact
/// discrete integration-by-parts identity <-Delta u, v> = <grad u, grad v>.
double gradient_inner(const Grid& grid, std::span<const double> u, std::span<const double> v);
double gradient_norm_sq(const Grid& grid, std::span<const double> u);
/// Edge-based integral of (d_axis u)^2 alone.
double directional_gradient_norm_sq(const Grid& grid, std::span<const double> u, int axis);

/// Node-centered gradient at interior nodes (centered differences with
/// Dirichlet closure). Component `axis` of grad u.
std::vector<double> node_gradient(const Grid& grid, std::span<const double> u, int axis);

/// Normal derivative at every boundary node by a second-order one-sided
/// stencil (uses the boundary zero and the two nearest interior nodes).
/// Order matches Grid::boundary().
std::vector<double> boundary_normal_derivative(const Grid& grid, std::span<const double> u);

/// Integral over the boundary of per-boundary-node values.
double boundary_integral(const Grid& grid, std::span<const double> values);

/// Multiplier vector field with h . nu = 1 on the boundary: per-axis affine
/// field h_i(x) = 2 x_i / L_i - 1, so the Jacobian is diag(2/L_i).
struct MultiplierField {
    std::array<double, 2> jacobian_diag{0.0, 0.0};
    double divergence = 0.0;
    double sup_norm = 0.0;          ///< max |h| over the closed domain
    double jacobian_abs_sum = 0.0;  ///< sum_ij |d_i h_j|
    /// h component `axis` at interior node with flat index idx.
    std::vector<std::array<double, 2>> values; ///< at interior nodes
    std::vector<double> boundary_h_dot_nu;     ///< per boundary node (= 1)
};

MultiplierField make_multiplier_field(const Grid& grid);

/// First `count` Dirichlet sine eigenmodes as interior fields, with the
/// matching discrete stencil eigenvalues. 2D modes are tensor products
/// (k, k).
std::vector<double> sine_mode(const Grid& grid, int k);
double sine_mode_eigenvalue(const Grid& grid, int k);

} // namespace memwave
