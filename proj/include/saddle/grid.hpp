#pragma once

#include <Eigen/Core>
#include <string>

namespace saddle {

using Array = Eigen::ArrayXd;

/// Uniform periodic grid in 1 or 2 dimensions. Periodic convention: n points
/// per axis, spacing h = L/n, no duplicated endpoint.
struct Grid {
    int ndim = 1;
    int nx = 0;
    int ny = 1;          // 1 for 1D grids
    double lx = 0.0;
    double ly = 1.0;

    Grid() = default;
    static Grid make_1d(int n, double length);
    static Grid make_2d(int n_x, int n_y, double length_x, double length_y);

    int size() const { return nx * ny; }
    double hx() const { return lx / nx; }
    double hy() const { return ly / ny; }
    double volume() const { return ndim == 1 ? lx : lx * ly; }
    double cell_volume() const { return volume() / size(); }

    /// Physical coordinate of grid point (ix, iy).
    double x(int ix) const { return ix * hx(); }
    double y(int iy) const { return iy * hy(); }

    bool operator==(const Grid& o) const;
    bool operator!=(const Grid& o) const { return !(*this == o); }
};

/// Scalar field sampled on a Grid, row-major with x fastest.
struct Field {
    Grid grid;
    Array values;

    Field() = default;
    explicit Field(const Grid& g) : grid(g), values(Array::Zero(g.size())) {}
    Field(const Grid& g, Array v);

    double& operator()(int ix, int iy) { return values[iy * grid.nx + ix]; }
    double operator()(int ix, int iy) const { return values[iy * grid.nx + ix]; }

    bool finite() const { return values.isFinite().all(); }
};

/// Constant field c on g.
Field constant_field(const Grid& g, double c);

/// Throws std::invalid_argument unless a and b live on the same grid.
void require_same_grid(const Field& a, const Field& b);

/// Discrete integral: sum of values times cell volume.
double integrate(const Field& f);

/// Mean value integrate(f)/|Omega|.
double mean(const Field& f);

/// L2 inner product with uniform quadrature weight.
double inner_l2(const Field& f, const Field& g);

double norm_l2(const Field& f);

/// Plain-text field file:
///   line 1: ndim n_x [n_y] L_x [L_y]
///   then one value per line, row-major, x fastest.
/// '#'-prefixed comment lines are permitted before the header.
void write_field(const Field& f, const std::string& path);
Field read_field(const std::string& path);

}  // namespace saddle
