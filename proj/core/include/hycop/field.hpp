#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "hycop/errors.hpp"

namespace hycop {

enum class Boundary { Periodic, ReflectiveWall };

/// Uniform structured grid, 1D or 2D.
/// Periodic grids place nodes at x_i = i*h (no duplicated endpoint).
/// Wall grids are cell-centred, x_i = (i+1/2)*h, matching the finite-volume
/// update used by the shallow-water primitives; either way integrate() is the
/// exact h*sum quadrature and integrate(1) == L.
struct Grid {
    int dim = 1;
    std::array<int, 2> n{0, 1};         // points per axis (n[1]==1 in 1D)
    std::array<double, 2> length{0, 0}; // domain extent per axis
    Boundary boundary = Boundary::Periodic;

    static Grid make1d(int nx, double lx, Boundary b = Boundary::Periodic) {
        Grid g;
        g.dim = 1;
        g.n = {nx, 1};
        g.length = {lx, 0.0};
        g.boundary = b;
        return g;
    }

    static Grid make2d(int nx, int ny, double lx, double ly, Boundary b = Boundary::Periodic) {
        Grid g;
        g.dim = 2;
        g.n = {nx, ny};
        g.length = {lx, ly};
        g.boundary = b;
        return g;
    }

    int total() const { return n[0] * n[1]; }
    double h(int axis) const { return length[axis] / n[axis]; }

    double x(int axis, int i) const {
        const double off = (boundary == Boundary::ReflectiveWall) ? 0.5 : 0.0;
        return (i + off) * h(axis);
    }

    bool operator==(const Grid& o) const {
        return dim == o.dim && n == o.n && length == o.length && boundary == o.boundary;
    }
};

/// Multi-channel state on a grid.  Storage is channel-major; within a channel
/// 2D data is row-major with x fastest: index = j*n[0] + i.
struct Field {
    Grid grid;
    int channels = 1;
    std::vector<double> v;

    Field() = default;
    Field(const Grid& g, int ch) : grid(g), channels(ch), v(static_cast<size_t>(g.total()) * ch, 0.0) {}

    double& at(int c, int i) { return v[static_cast<size_t>(c) * grid.total() + i]; }
    double at(int c, int i) const { return v[static_cast<size_t>(c) * grid.total() + i]; }
    double& at2(int c, int i, int j) { return at(c, j * grid.n[0] + i); }
    double at2(int c, int i, int j) const { return at(c, j * grid.n[0] + i); }

    double* channel(int c) { return v.data() + static_cast<size_t>(c) * grid.total(); }
    const double* channel(int c) const { return v.data() + static_cast<size_t>(c) * grid.total(); }

    void require_shape(const Grid& g, int ch, const char* where) const {
        if (!(grid == g) || channels != ch)
            throw StateShapeError(std::string(where) + ": field shape mismatch");
    }
};

}  // namespace hycop
