#pragma once

#include <complex>
#include <functional>
#include <vector>

#include "gkp/errors.hpp"

namespace gkp {

// Periodic rectangular grid. Physical coordinates are box-centered:
// x_i = -Lx/2 + i*hx, y_j = -Ly/2 + j*hy. Wavenumbers follow the usual DFT
// layout, xi_j = 2*pi*j/Lx for j in {-nx/2, ..., nx/2-1}.
struct GridSpec {
    int nx = 0;
    int ny = 0;
    double Lx = 0.0;
    double Ly = 0.0;

    void validate() const;

    double hx() const { return Lx / nx; }
    double hy() const { return Ly / ny; }
    double cell_area() const { return hx() * hy(); }
    long size() const { return static_cast<long>(nx) * ny; }

    double x(int i) const { return -0.5 * Lx + i * hx(); }
    double y(int j) const { return -0.5 * Ly + j * hy(); }

    // signed mode index for storage index k in [0, n)
    static int mode(int k, int n) { return k < n / 2 ? k : k - n; }
    double xi(int kx) const;
    double eta(int ky) const;

    bool operator==(const GridSpec&) const = default;
};

// Real scalar field sampled on a GridSpec, row-major with x slowest:
// value(ix, iy) lives at index ix*ny + iy.
class Field {
public:
    Field() = default;
    explicit Field(const GridSpec& g) : grid_(g), v_(g.size(), 0.0) { g.validate(); }

    const GridSpec& grid() const { return grid_; }
    double& operator()(int ix, int iy) { return v_[static_cast<size_t>(ix) * grid_.ny + iy]; }
    double operator()(int ix, int iy) const { return v_[static_cast<size_t>(ix) * grid_.ny + iy]; }

    double* data() { return v_.data(); }
    const double* data() const { return v_.data(); }
    long size() const { return grid_.size(); }
    std::vector<double>& values() { return v_; }
    const std::vector<double>& values() const { return v_; }

    // samples f(x, y) at box-centered coordinates
    static Field sample(const GridSpec& g, const std::function<double(double, double)>& f);

    Field& operator+=(const Field& o);
    Field& operator-=(const Field& o);
    Field& operator*=(double a);

    double max_abs() const;

private:
    GridSpec grid_;
    std::vector<double> v_;
};

Field operator+(Field a, const Field& b);
Field operator-(Field a, const Field& b);
Field operator*(double a, Field f);

// Complex spectrum in the unnormalized forward-DFT convention; the inverse
// transform carries the 1/(nx*ny) factor. Same row-major layout as Field.
class Spectrum {
public:
    Spectrum() = default;
    explicit Spectrum(const GridSpec& g) : grid_(g), c_(g.size(), {0.0, 0.0}) {}

    const GridSpec& grid() const { return grid_; }
    std::complex<double>& operator()(int kx, int ky) {
        return c_[static_cast<size_t>(kx) * grid_.ny + ky];
    }
    const std::complex<double>& operator()(int kx, int ky) const {
        return c_[static_cast<size_t>(kx) * grid_.ny + ky];
    }

    std::complex<double>* data() { return c_.data(); }
    const std::complex<double>* data() const { return c_.data(); }
    long size() const { return grid_.size(); }

private:
    GridSpec grid_;
    std::vector<std::complex<double>> c_;
};

inline void require_same_grid(const GridSpec& a, const GridSpec& b, const char* what) {
    if (!(a == b)) fail(ErrorCode::DimensionMismatch, std::string(what) + ": grid mismatch");
}

} // namespace gkp
