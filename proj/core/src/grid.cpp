#include "gkp/grid.hpp"

#include <algorithm>
#include <cmath>

namespace gkp {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
}

void GridSpec::validate() const {
    if (nx < 8 || ny < 8) fail(ErrorCode::InvalidParams, "grid: nx, ny must be >= 8");
    if (nx % 2 != 0 || ny % 2 != 0) fail(ErrorCode::InvalidParams, "grid: nx, ny must be even");
    if (!(Lx > 0.0) || !(Ly > 0.0)) fail(ErrorCode::InvalidParams, "grid: Lx, Ly must be > 0");
}

double GridSpec::xi(int kx) const { return kTwoPi * mode(kx, nx) / Lx; }
double GridSpec::eta(int ky) const { return kTwoPi * mode(ky, ny) / Ly; }

Field Field::sample(const GridSpec& g, const std::function<double(double, double)>& f) {
    Field out(g);
    for (int i = 0; i < g.nx; ++i) {
        const double x = g.x(i);
        for (int j = 0; j < g.ny; ++j) out(i, j) = f(x, g.y(j));
    }
    return out;
}

Field& Field::operator+=(const Field& o) {
    require_same_grid(grid_, o.grid_, "Field::operator+=");
    for (long k = 0; k < size(); ++k) v_[k] += o.v_[k];
    return *this;
}

Field& Field::operator-=(const Field& o) {
    require_same_grid(grid_, o.grid_, "Field::operator-=");
    for (long k = 0; k < size(); ++k) v_[k] -= o.v_[k];
    return *this;
}

Field& Field::operator*=(double a) {
    for (long k = 0; k < size(); ++k) v_[k] *= a;
    return *this;
}

double Field::max_abs() const {
    double m = 0.0;
    for (long k = 0; k < size(); ++k) m = std::max(m, std::abs(v_[k]));
    return m;
}

Field operator+(Field a, const Field& b) { return a += b; }
Field operator-(Field a, const Field& b) { return a -= b; }
Field operator*(double a, Field f) { return f *= a; }

} // namespace gkp
