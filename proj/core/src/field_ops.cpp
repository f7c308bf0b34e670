#include "hycop/field_ops.hpp"

#include <cmath>

#include "hycop/parallel.hpp"

namespace hycop {

namespace {
int hardware_default() {
    const unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}
int g_threads = 0;
}  // namespace

void set_thread_count(int n) { g_threads = n; }
int thread_count() { return g_threads > 0 ? g_threads : hardware_default(); }

std::vector<double> wavenumbers(int n, double length) {
    std::vector<double> k(n);
    const double base = 2.0 * 3.14159265358979323846264338327950288 / length;
    for (int m = 0; m < n; ++m) {
        const int signed_m = (m <= n / 2) ? m : m - n;
        k[m] = base * signed_m;
    }
    return k;
}

fft::cvec dft(const Field& f, int channel) {
    const int nx = f.grid.n[0], ny = f.grid.n[1];
    fft::cvec spec(static_cast<size_t>(nx) * ny);
    const double* src = f.channel(channel);
    for (size_t i = 0; i < spec.size(); ++i) spec[i] = src[i];
    if (f.grid.dim == 1) {
        fft::forward(spec);
    } else {
        axis_transform(spec, nx, ny, 0, false);
        axis_transform(spec, nx, ny, 1, false);
    }
    return spec;
}

Field idft(const fft::cvec& spectrum, const Grid& grid) {
    const int nx = grid.n[0], ny = grid.n[1];
    if (spectrum.size() != static_cast<size_t>(nx) * ny)
        throw StateShapeError("idft: spectrum length does not match grid");
    fft::cvec spec = spectrum;
    if (grid.dim == 1) {
        fft::inverse(spec);
    } else {
        axis_transform(spec, nx, ny, 1, true);
        axis_transform(spec, nx, ny, 0, true);
    }
    Field out(grid, 1);
    for (size_t i = 0; i < spec.size(); ++i) out.v[i] = spec[i].real();
    return out;
}

void axis_transform(fft::cvec& data, int nx, int ny, int axis, bool inverse) {
    if (axis == 0) {
        fft::cvec line(nx);
        for (int j = 0; j < ny; ++j) {
            for (int i = 0; i < nx; ++i) line[i] = data[static_cast<size_t>(j) * nx + i];
            fft::transform(line, inverse);
            for (int i = 0; i < nx; ++i) data[static_cast<size_t>(j) * nx + i] = line[i];
        }
    } else {
        fft::cvec line(ny);
        for (int i = 0; i < nx; ++i) {
            for (int j = 0; j < ny; ++j) line[j] = data[static_cast<size_t>(j) * nx + i];
            fft::transform(line, inverse);
            for (int j = 0; j < ny; ++j) data[static_cast<size_t>(j) * nx + i] = line[j];
        }
    }
}

void dealias(fft::cvec& spectrum, int n) {
    const int cut = n / 3;
    for (int m = 0; m < n; ++m) {
        const int am = (m <= n / 2) ? m : n - m;
        if (am >= cut) spectrum[m] = 0.0;
    }
}

namespace {

Field gradient_periodic(const Field& f, int channel, int axis) {
    const int nx = f.grid.n[0], ny = f.grid.n[1];
    const int na = f.grid.n[axis];
    auto spec = dft(f, channel);
    const auto k = wavenumbers(na, f.grid.length[axis]);
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            const int m = (axis == 0) ? i : j;
            // Nyquist mode of an odd derivative is forced to zero.
            const double km = (na % 2 == 0 && m == na / 2) ? 0.0 : k[m];
            spec[static_cast<size_t>(j) * nx + i] *= std::complex<double>(0.0, km);
        }
    return idft(spec, f.grid);
}

Field gradient_wall(const Field& f, int channel, int axis) {
    const int nx = f.grid.n[0], ny = f.grid.n[1];
    const int na = f.grid.n[axis];
    const double h = f.grid.h(axis);
    Field out(f.grid, 1);
    auto value = [&](int i, int j) { return f.at2(channel, i, j); };
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            const int m = (axis == 0) ? i : j;
            double d;
            auto shifted = [&](int dm) {
                return (axis == 0) ? value(i + dm, j) : value(i, j + dm);
            };
            if (m == 0)
                d = (-3.0 * shifted(0) + 4.0 * shifted(1) - shifted(2)) / (2.0 * h);
            else if (m == na - 1)
                d = (3.0 * shifted(0) - 4.0 * shifted(-1) + shifted(-2)) / (2.0 * h);
            else
                d = (shifted(1) - shifted(-1)) / (2.0 * h);
            out.at2(0, i, j) = d;
        }
    return out;
}

}  // namespace

Field gradient(const Field& f, int channel, int axis) {
    if (axis < 0 || axis >= f.grid.dim) throw StateShapeError("gradient: bad axis");
    if (f.grid.boundary == Boundary::Periodic) return gradient_periodic(f, channel, axis);
    if (f.grid.n[axis] < 3) throw StateShapeError("gradient: wall grid too small");
    return gradient_wall(f, channel, axis);
}

double integrate(const Field& f, int channel) {
    const double cell = (f.grid.dim == 1) ? f.grid.h(0) : f.grid.h(0) * f.grid.h(1);
    double s = 0.0;
    const double* src = f.channel(channel);
    for (int i = 0; i < f.grid.total(); ++i) s += src[i];
    return s * cell;
}

double l2_norm(const Field& f, int channel) {
    const double cell = (f.grid.dim == 1) ? f.grid.h(0) : f.grid.h(0) * f.grid.h(1);
    double s = 0.0;
    const double* src = f.channel(channel);
    for (int i = 0; i < f.grid.total(); ++i) s += src[i] * src[i];
    return std::sqrt(s * cell);
}

double rmse(const Field& a, const Field& b) {
    b.require_shape(a.grid, a.channels, "rmse");
    double s = 0.0;
    for (size_t i = 0; i < a.v.size(); ++i) {
        const double d = a.v[i] - b.v[i];
        s += d * d;
    }
    return std::sqrt(s / static_cast<double>(a.v.size()));
}

double rms(const Field& a) {
    double s = 0.0;
    for (double x : a.v) s += x * x;
    return std::sqrt(s / static_cast<double>(a.v.size()));
}

namespace {

// Distributes one signed source mode of an axis of length n into the
// destination axis of length N = factor*n.  Even-n Nyquist energy is split
// half-and-half across +-n/2 so the interpolant stays real.
void axis_targets(int m, int n, int N, int out[2], double w[2]) {
    const int s = (m <= n / 2) ? m : m - n;
    if (n % 2 == 0 && m == n / 2) {
        out[0] = n / 2;
        out[1] = N - n / 2;
        w[0] = w[1] = 0.5;
    } else {
        out[0] = (s + N) % N;
        out[1] = -1;
        w[0] = 1.0;
        w[1] = 0.0;
    }
}

}  // namespace

Field spectral_upsample(const Field& f, int factor) {
    if (f.grid.boundary != Boundary::Periodic)
        throw BoundaryUnsupported("spectral_upsample requires a periodic grid");
    if (factor < 1) throw ConfigError("spectral_upsample: factor must be >= 1");
    if (factor == 1) return f;
    const int nx = f.grid.n[0], ny = f.grid.n[1];
    const int Nx = nx * factor, Ny = (f.grid.dim == 2) ? ny * factor : 1;
    Grid fine = f.grid;
    fine.n = {Nx, Ny};

    Field out(fine, f.channels);
    const double scale = static_cast<double>(Nx) * Ny / (static_cast<double>(nx) * ny);
    for (int c = 0; c < f.channels; ++c) {
        const auto spec = dft(f, c);
        fft::cvec pad(static_cast<size_t>(Nx) * Ny, 0.0);
        for (int j = 0; j < ny; ++j) {
            int tj[2] = {0, -1};
            double wj[2] = {1.0, 0.0};
            if (f.grid.dim == 2)
                axis_targets(j, ny, Ny, tj, wj);
            for (int i = 0; i < nx; ++i) {
                int ti[2];
                double wi[2];
                axis_targets(i, nx, Nx, ti, wi);
                const auto z = spec[static_cast<size_t>(j) * nx + i] * scale;
                for (int a = 0; a < 2 && ti[a] >= 0; ++a)
                    for (int b = 0; b < 2 && tj[b] >= 0; ++b)
                        pad[static_cast<size_t>(tj[b]) * Nx + ti[a]] += wi[a] * wj[b] * z;
            }
        }
        const Field ch = idft(pad, fine);
        for (int i = 0; i < fine.total(); ++i) out.at(c, i) = ch.at(0, i);
    }
    return out;
}

bool all_finite(const Field& f, double bound) {
    for (double x : f.v)
        if (!std::isfinite(x) || std::abs(x) > bound) return false;
    return true;
}

}  // namespace hycop
