#include "memwave/domain.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace memwave {

namespace {

void require(bool ok, const std::string& what) {
    if (!ok) throw ParameterViolation("grid parameter constraint violated: " + what);
}

void check_field(const Grid& grid, std::span<const double> u, const char* name) {
    if (u.size() != grid.interior_count())
        throw SizeMismatch(std::string(name) + ": field size " + std::to_string(u.size()) +
                           " does not match interior count " +
                           std::to_string(grid.interior_count()));
}

/// Trapezoid weights along one axis with the corner half-weights folded
/// into the adjacent nodes, so corners are zero and the sum is the exact
/// face length.
std::vector<double> face_weights(int n, double h) {
    std::vector<double> w(static_cast<std::size_t>(n), h);
    w.front() = 0.0;
    w.back() = 0.0;
    w[1] += 0.5 * h;
    w[static_cast<std::size_t>(n) - 2] += 0.5 * h;
    // the plain trapezoid rule also halves the first and last interior
    // weights only at the face ends; for n = 3 the single non-corner node
    // absorbs both corner halves
    return w;
}

} // namespace

Grid Grid::interval(double L, int nodes) {
    require(L > 0.0, "extent > 0");
    require(nodes >= 3, "nodes >= 3 per axis");
    Grid g;
    g.dim_ = 1;
    g.extent_ = {L, 0.0};
    g.nodes_ = {nodes, 0};
    g.spacing_ = {L / static_cast<double>(nodes - 1), 0.0};
    g.interior_count_ = static_cast<std::size_t>(nodes - 2);
    g.boundary_.push_back({{0, 0}, 0, {-1.0, 0.0}, 1.0, false});
    g.boundary_.push_back({{nodes - 1, 0}, 1, {1.0, 0.0}, 1.0, false});
    return g;
}

Grid Grid::rectangle(double Lx, double Ly, int nx, int ny) {
    require(Lx > 0.0 && Ly > 0.0, "extents > 0");
    require(nx >= 3 && ny >= 3, "nodes >= 3 per axis");
    Grid g;
    g.dim_ = 2;
    g.extent_ = {Lx, Ly};
    g.nodes_ = {nx, ny};
    g.spacing_ = {Lx / static_cast<double>(nx - 1), Ly / static_cast<double>(ny - 1)};
    g.interior_count_ = static_cast<std::size_t>(nx - 2) * static_cast<std::size_t>(ny - 2);

    const auto wx = face_weights(nx, g.spacing_[0]);
    const auto wy = face_weights(ny, g.spacing_[1]);
    for (int j = 0; j < ny; ++j) { // face x = 0 and x = Lx
        const bool corner = (j == 0 || j == ny - 1);
        g.boundary_.push_back({{0, j}, 0, {-1.0, 0.0}, wy[static_cast<std::size_t>(j)], corner});
        g.boundary_.push_back({{nx - 1, j}, 1, {1.0, 0.0}, wy[static_cast<std::size_t>(j)], corner});
    }
    for (int i = 0; i < nx; ++i) { // face y = 0 and y = Ly
        const bool corner = (i == 0 || i == nx - 1);
        g.boundary_.push_back({{i, 0}, 2, {0.0, -1.0}, wx[static_cast<std::size_t>(i)], corner});
        g.boundary_.push_back({{i, ny - 1}, 3, {0.0, 1.0}, wx[static_cast<std::size_t>(i)], corner});
    }
    return g;
}

Grid Grid::make(int dim, std::span<const double> extents, std::span<const int> nodes) {
    if (dim == 1) {
        require(extents.size() >= 1 && nodes.size() >= 1, "1D grid needs one extent and node count");
        return interval(extents[0], nodes[0]);
    }
    if (dim == 2) {
        require(extents.size() >= 2 && nodes.size() >= 2, "2D grid needs two extents and node counts");
        return rectangle(extents[0], extents[1], nodes[0], nodes[1]);
    }
    throw ParameterViolation("grid dimension must be 1 or 2, got " + std::to_string(dim));
}

double Grid::min_spacing() const {
    return dim_ == 1 ? spacing_[0] : std::min(spacing_[0], spacing_[1]);
}

std::size_t Grid::interior_index(int i, int j) const {
    if (dim_ == 1) return static_cast<std::size_t>(i - 1);
    return static_cast<std::size_t>(j - 1) * static_cast<std::size_t>(nodes_[0] - 2) +
           static_cast<std::size_t>(i - 1);
}

double Grid::cell_volume() const {
    return dim_ == 1 ? spacing_[0] : spacing_[0] * spacing_[1];
}

double Grid::domain_measure() const {
    return dim_ == 1 ? extent_[0] : extent_[0] * extent_[1];
}

double Grid::boundary_measure() const {
    return dim_ == 1 ? 2.0 : 2.0 * (extent_[0] + extent_[1]);
}

double Grid::area_weight(int i, int j) const {
    const auto axis_w = [](int idx, int n, double h) {
        return (idx == 0 || idx == n - 1) ? 0.5 * h : h;
    };
    double w = axis_w(i, nodes_[0], spacing_[0]);
    if (dim_ == 2) w *= axis_w(j, nodes_[1], spacing_[1]);
    return w;
}

void apply_laplacian(const Grid& grid, std::span<const double> u, std::span<double> out) {
    check_field(grid, u, "apply_laplacian");
    check_field(grid, out, "apply_laplacian(out)");
    if (grid.dim() == 1) {
        const double ih2 = 1.0 / (grid.spacing(0) * grid.spacing(0));
        const std::size_t m = u.size();
        for (std::size_t k = 0; k < m; ++k) {
            const double left = (k == 0) ? 0.0 : u[k - 1];
            const double right = (k + 1 == m) ? 0.0 : u[k + 1];
            out[k] = (left - 2.0 * u[k] + right) * ih2;
        }
        return;
    }
    const int mx = grid.interior_nodes(0), my = grid.interior_nodes(1);
    const double ihx2 = 1.0 / (grid.spacing(0) * grid.spacing(0));
    const double ihy2 = 1.0 / (grid.spacing(1) * grid.spacing(1));
    for (int j = 0; j < my; ++j) {
        for (int i = 0; i < mx; ++i) {
            const std::size_t k = static_cast<std::size_t>(j) * static_cast<std::size_t>(mx) +
                                  static_cast<std::size_t>(i);
            const double l = (i == 0) ? 0.0 : u[k - 1];
            const double r = (i == mx - 1) ? 0.0 : u[k + 1];
            const double b = (j == 0) ? 0.0 : u[k - static_cast<std::size_t>(mx)];
            const double t = (j == my - 1) ? 0.0 : u[k + static_cast<std::size_t>(mx)];
            out[k] = (l - 2.0 * u[k] + r) * ihx2 + (b - 2.0 * u[k] + t) * ihy2;
        }
    }
}

std::vector<double> laplacian(const Grid& grid, std::span<const double> u) {
    std::vector<double> out(u.size());
    apply_laplacian(grid, u, out);
    return out;
}

double inner(const Grid& grid, std::span<const double> u, std::span<const double> v) {
    check_field(grid, u, "inner");
    check_field(grid, v, "inner");
    double acc = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) acc += u[k] * v[k];
    return acc * grid.cell_volume();
}

double norm_sq(const Grid& grid, std::span<const double> u) { return inner(grid, u, u); }

double integrate(const Grid& grid, std::span<const double> f) {
    check_field(grid, f, "integrate");
    double acc = 0.0;
    for (double v : f) acc += v;
    return acc * grid.cell_volume();
}

double gradient_inner(const Grid& grid, std::span<const double> u, std::span<const double> v) {
    check_field(grid, u, "gradient_inner");
    check_field(grid, v, "gradient_inner");
    if (grid.dim() == 1) {
        const std::size_t m = u.size();
        double acc = u[0] * v[0] + u[m - 1] * v[m - 1];
        for (std::size_t k = 0; k + 1 < m; ++k)
            acc += (u[k + 1] - u[k]) * (v[k + 1] - v[k]);
        return acc / grid.spacing(0);
    }
    const int mx = grid.interior_nodes(0), my = grid.interior_nodes(1);
    const double cx = grid.spacing(1) / grid.spacing(0);
    const double cy = grid.spacing(0) / grid.spacing(1);
    auto at = [&](int i, int j, std::span<const double> f) -> double {
        if (i < 0 || i >= mx || j < 0 || j >= my) return 0.0;
        return f[static_cast<std::size_t>(j) * static_cast<std::size_t>(mx) +
                 static_cast<std::size_t>(i)];
    };
    double acc = 0.0;
    for (int j = 0; j < my; ++j)
        for (int i = -1; i < mx; ++i)
            acc += cx * (at(i + 1, j, u) - at(i, j, u)) * (at(i + 1, j, v) - at(i, j, v));
    for (int j = -1; j < my; ++j)
        for (int i = 0; i < mx; ++i)
            acc += cy * (at(i, j + 1, u) - at(i, j, u)) * (at(i, j + 1, v) - at(i, j, v));
    return acc;
}

double gradient_norm_sq(const Grid& grid, std::span<const double> u) {
    return gradient_inner(grid, u, u);
}

double directional_gradient_norm_sq(const Grid& grid, std::span<const double> u, int axis) {
    check_field(grid, u, "directional_gradient_norm_sq");
    if (grid.dim() == 1) {
        if (axis != 0) throw ParameterViolation("axis 0 expected for a 1D grid");
        return gradient_inner(grid, u, u);
    }
    const int mx = grid.interior_nodes(0), my = grid.interior_nodes(1);
    auto at = [&](int i, int j) -> double {
        if (i < 0 || i >= mx || j < 0 || j >= my) return 0.0;
        return u[static_cast<std::size_t>(j) * static_cast<std::size_t>(mx) +
                 static_cast<std::size_t>(i)];
    };
    double acc = 0.0;
    if (axis == 0) {
        const double cx = grid.spacing(1) / grid.spacing(0);
        for (int j = 0; j < my; ++j)
            for (int i = -1; i < mx; ++i) {
                const double d = at(i + 1, j) - at(i, j);
                acc += cx * d * d;
            }
    } else {
        const double cy = grid.spacing(0) / grid.spacing(1);
        for (int j = -1; j < my; ++j)
            for (int i = 0; i < mx; ++i) {
                const double d = at(i, j + 1) - at(i, j);
                acc += cy * d * d;
            }
    }
    return acc;
}

std::vector<double> node_gradient(const Grid& grid, std::span<const double> u, int axis) {
    check_field(grid, u, "node_gradient");
    std::vector<double> out(u.size(), 0.0);
    if (grid.dim() == 1) {
        const std::size_t m = u.size();
        const double i2h = 1.0 / (2.0 * grid.spacing(0));
        for (std::size_t k = 0; k < m; ++k) {
            const double left = (k == 0) ? 0.0 : u[k - 1];
            const double right = (k + 1 == m) ? 0.0 : u[k + 1];
            out[k] = (right - left) * i2h;
        }
        return out;
    }
    const int mx = grid.interior_nodes(0), my = grid.interior_nodes(1);
    auto at = [&](int i, int j) -> double {
        if (i < 0 || i >= mx || j < 0 || j >= my) return 0.0;
        return u[static_cast<std::size_t>(j) * static_cast<std::size_t>(mx) +
                 static_cast<std::size_t>(i)];
    };
    const double i2h = 1.0 / (2.0 * grid.spacing(axis));
    for (int j = 0; j < my; ++j)
        for (int i = 0; i < mx; ++i) {
            const std::size_t k = static_cast<std::size_t>(j) * static_cast<std::size_t>(mx) +
                                  static_cast<std::size_t>(i);
            out[k] = (axis == 0) ? (at(i + 1, j) - at(i - 1, j)) * i2h
                                 : (at(i, j + 1) - at(i, j - 1)) * i2h;
        }
    return out;
}

std::vector<double> boundary_normal_derivative(const Grid& grid, std::span<const double> u) {
    check_field(grid, u, "boundary_normal_derivative");
    const auto& bnodes = grid.boundary();
    std::vector<double> out(bnodes.size(), 0.0);

    auto value_at = [&](int i, int j) -> double {
        if (grid.dim() == 1) {
            if (i <= 0 || i >= grid.nodes(0) - 1) return 0.0;
            return u[grid.interior_index(i)];
        }
        if (i <= 0 || i >= grid.nodes(0) - 1 || j <= 0 || j >= grid.nodes(1) - 1) return 0.0;
        return u[grid.interior_index(i, j)];
    };

    for (std::size_t b = 0; b < bnodes.size(); ++b) {
        const auto& bn = bnodes[b];
        // two samples along the inward direction; boundary value is 0
        const int di = -static_cast<int>(bn.normal[0]);
        const int dj = -static_cast<int>(bn.normal[1]);
        const double u1 = value_at(bn.ij[0] + di, bn.ij[1] + dj);
        const double u2 = value_at(bn.ij[0] + 2 * di, bn.ij[1] + 2 * dj);
        const double h = (dj == 0) ? grid.spacing(0) : grid.spacing(1);
        // derivative along the inward direction, then flip to the outward normal
        out[b] = -(4.0 * u1 - u2) / (2.0 * h);
    }
    return out;
}

double boundary_integral(const Grid& grid, std::span<const double> values) {
    const auto& bnodes = grid.boundary();
    if (values.size() != bnodes.size())
        throw SizeMismatch("boundary_integral: values size does not match boundary node count");
    double acc = 0.0;
    for (std::size_t b = 0; b < bnodes.size(); ++b) acc += bnodes[b].weight * values[b];
    return acc;
}

namespace {

/// Thomas solve of the 1D Dirichlet -Laplacian system.
void solve_neg_laplacian_1d(const Grid& grid, std::span<const double> rhs,
                            std::span<double> x) {
    const std::size_t m = rhs.size();
    const double h2 = grid.spacing(0) * grid.spacing(0);
    const double diag = 2.0 / h2, off = -1.0 / h2;
    std::vector<double> c(m), d(m);
    c[0] = off / diag;
    d[0] = rhs[0] / diag;
    for (std::size_t k = 1; k < m; ++k) {
        const double denom = diag - off * c[k - 1];
        c[k] = off / denom;
        d[k] = (rhs[k] - off * d[k - 1]) / denom;
    }
    x[m - 1] = d[m - 1];
    for (std::size_t k = m - 1; k-- > 0;) x[k] = d[k] - c[k] * x[k + 1];
}

/// Matrix-free conjugate gradient for -Laplacian x = rhs.
void solve_neg_laplacian_cg(const Grid& grid, std::span<const double> rhs,
                            std::span<double> x) {
    const std::size_t m = rhs.size();
    std::vector<double> r(rhs.begin(), rhs.end()), p(r), ap(m);
    std::fill(x.begin(), x.end(), 0.0);
    double rr = 0.0;
    for (double v : r) rr += v * v;
    const double rr0 = rr;
    if (rr0 == 0.0) return;
    const std::size_t max_iter = 20 * m + 100;
    for (std::size_t it = 0; it < max_iter; ++it) {
        apply_laplacian(grid, p, ap);
        for (double& v : ap) v = -v;
        double pap = 0.0;
        for (std::size_t k = 0; k < m; ++k) pap += p[k] * ap[k];
        const double alpha = rr / pap;
        double rr_new = 0.0;
        for (std::size_t k = 0; k < m; ++k) {
            x[k] += alpha * p[k];
            r[k] -= alpha * ap[k];
            rr_new += r[k] * r[k];
        }
        if (rr_new <= 1e-26 * rr0) return;
        const double beta = rr_new / rr;
        for (std::size_t k = 0; k < m; ++k) p[k] = r[k] + beta * p[k];
        rr = rr_new;
    }
    throw NumericalFailure("conjugate gradient for -Laplacian did not converge");
}

} // namespace

double smallest_eigenvalue(const Grid& grid, double tol) {
    const std::size_t m = grid.interior_count();
    std::vector<double> x(m, 1.0), y(m);
    double lambda = 0.0, lambda_prev = -1.0;
    for (int it = 0; it < 100000; ++it) {
        if (grid.dim() == 1)
            solve_neg_laplacian_1d(grid, x, y);
        else
            solve_neg_laplacian_cg(grid, x, y);
        double xx = 0.0, xy = 0.0, yy = 0.0;
        for (std::size_t k = 0; k < m; ++k) {
            xx += x[k] * x[k];
            xy += x[k] * y[k];
            yy += y[k] * y[k];
        }
        lambda = xx / xy; // Rayleigh quotient of the inverse iterate
        const double ynorm = std::sqrt(yy);
        for (std::size_t k = 0; k < m; ++k) x[k] = y[k] / ynorm;
        if (lambda_prev > 0.0 && std::abs(lambda - lambda_prev) <= tol * std::abs(lambda))
            return lambda;
        lambda_prev = lambda;
    }
    throw NumericalFailure("inverse power iteration did not converge");
}

double lambda_continuum(const Grid& grid) {
    const double pi = std::numbers::pi;
    double acc = (pi / grid.extent(0)) * (pi / grid.extent(0));
    if (grid.dim() == 2) acc += (pi / grid.extent(1)) * (pi / grid.extent(1));
    return acc;
}

double lambda_stencil(const Grid& grid) {
    const double pi = std::numbers::pi;
    auto axis = [&](int a) {
        const double h = grid.spacing(a), L = grid.extent(a);
        const double s = std::sin(pi * h / (2.0 * L));
        return 4.0 / (h * h) * s * s;
    };
    double acc = axis(0);
    if (grid.dim() == 2) acc += axis(1);
    return acc;
}

MultiplierField make_multiplier_field(const Grid& grid) {
    MultiplierField f;
    const int dim = grid.dim();
    for (int a = 0; a < dim; ++a) f.jacobian_diag[static_cast<std::size_t>(a)] = 2.0 / grid.extent(a);
    f.divergence = f.jacobian_diag[0] + f.jacobian_diag[1];
    f.jacobian_abs_sum = f.divergence;
    f.sup_norm = std::sqrt(static_cast<double>(dim));

    f.values.resize(grid.interior_count());
    if (dim == 1) {
        for (int i = 1; i <= grid.interior_nodes(0); ++i)
            f.values[grid.interior_index(i)] = {2.0 * grid.coord_x(i) / grid.extent(0) - 1.0, 0.0};
    } else {
        for (int j = 1; j <= grid.interior_nodes(1); ++j)
            for (int i = 1; i <= grid.interior_nodes(0); ++i)
                f.values[grid.interior_index(i, j)] = {
                    2.0 * grid.coord_x(i) / grid.extent(0) - 1.0,
                    2.0 * grid.coord_y(j) / grid.extent(1) - 1.0};
    }

    f.boundary_h_dot_nu.reserve(grid.boundary().size());
    for (const auto& bn : grid.boundary()) {
        const double hx = 2.0 * grid.coord_x(bn.ij[0]) / grid.extent(0) - 1.0;
        const double hy =
            (dim == 2) ? 2.0 * grid.coord_y(bn.ij[1]) / grid.extent(1) - 1.0 : 0.0;
        f.boundary_h_dot_nu.push_back(hx * bn.normal[0] + hy * bn.normal[1]);
    }
    return f;
}

std::vector<double> sine_mode(const Grid& grid, int k) {
    require(k >= 1 && k <= grid.interior_nodes(0), "sine mode index in [1, interior nodes]");
    const double pi = std::numbers::pi;
    std::vector<double> u(grid.interior_count());
    if (grid.dim() == 1) {
        for (int i = 1; i <= grid.interior_nodes(0); ++i)
            u[grid.interior_index(i)] =
                std::sin(static_cast<double>(k) * pi * grid.coord_x(i) / grid.extent(0));
        return u;
    }
    require(k <= grid.interior_nodes(1), "sine mode index in [1, interior nodes]");
    for (int j = 1; j <= grid.interior_nodes(1); ++j)
        for (int i = 1; i <= grid.interior_nodes(0); ++i)
            u[grid.interior_index(i, j)] =
                std::sin(static_cast<double>(k) * pi * grid.coord_x(i) / grid.extent(0)) *
                std::sin(static_cast<double>(k) * pi * grid.coord_y(j) / grid.extent(1));
    return u;
}

double sine_mode_eigenvalue(const Grid& grid, int k) {
    const double pi = std::numbers::pi;
    auto axis = [&](int a) {
        const double h = grid.spacing(a), L = grid.extent(a);
        const double s = std::sin(static_cast<double>(k) * pi * h / (2.0 * L));
        return 4.0 / (h * h) * s * s;
    };
    double acc = axis(0);
    if (grid.dim() == 2) acc += axis(1);
    return acc;
}

} // namespace memwave
