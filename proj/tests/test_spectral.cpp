#include <doctest.h>

#include <cmath>
#include <random>

#include "gkp/fft.hpp"
#include "gkp/functionals.hpp"
#include "gkp/operators.hpp"

using namespace gkp;

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

GridSpec unit_box(int n = 64) { return {n, n, kTwoPi, kTwoPi}; }

double max_diff(const Field& a, const Field& b) {
    double m = 0.0;
    for (long k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a.data()[k] - b.data()[k]));
    return m;
}

// compensated (Kahan) rectangle-rule quadrature, independent of mass()
double kahan_quadrature_sq(const Field& f) {
    double sum = 0.0, c = 0.0;
    for (long k = 0; k < f.size(); ++k) {
        const double term = f.data()[k] * f.data()[k] - c;
        const double t = sum + term;
        c = (t - sum) - term;
        sum = t;
    }
    return sum * f.grid().cell_area();
}

} // namespace

TEST_SUITE("spectral") {

TEST_CASE("transform of cos(x) is supported on (+-1, 0) and round trips") {
    GridSpec g = unit_box();
    Field f = Field::sample(g, [](double x, double) { return std::cos(x); });
    Spectrum s = transform(f);
    double off = 0.0;
    for (int kx = 0; kx < g.nx; ++kx)
        for (int ky = 0; ky < g.ny; ++ky) {
            const int j = std::abs(GridSpec::mode(kx, g.nx));
            const int k = std::abs(GridSpec::mode(ky, g.ny));
            if (!(j == 1 && k == 0)) off = std::max(off, std::abs(s(kx, ky)));
        }
    CHECK(off / g.size() < 1e-14);
    CHECK(max_diff(inverse_transform(s), f) < 1e-12);
}

TEST_CASE("zero field transforms to zero spectrum") {
    Field f(unit_box(32));
    Spectrum s = transform(f);
    for (long k = 0; k < s.size(); ++k) CHECK(std::abs(s.data()[k]) == 0.0);
}

TEST_CASE("Parseval matches a compensated-summation quadrature oracle") {
    std::mt19937_64 rng(3);
    Field f = random_smooth_field(unit_box(96), rng, 1.3);
    const double phys = kahan_quadrature_sq(f);
    const double spec = quadratic_norms(f, 1.0).mass;
    CHECK(std::abs(phys - spec) / phys < 1e-10);
}

TEST_CASE("round trip stays at machine precision across grid sizes") {
    std::mt19937_64 rng(5);
    for (auto [nx, ny] : {std::pair{8, 8}, {64, 32}, {256, 256}, {1024, 1024}}) {
        GridSpec g{nx, ny, 3.0, 7.0};
        Field f = random_smooth_field(g, rng, 1.0, 3);
        Field back = inverse_transform(transform(f));
        CHECK(max_diff(back, f) / std::max(f.max_abs(), 1e-300) < 1e-12);
    }
}

TEST_CASE("dx_frac applies |xi|^s") {
    GridSpec g = unit_box();
    Field f = Field::sample(g, [](double x, double) { return std::sin(3.0 * x); });
    SUBCASE("s = 2 matches |3|^2 = 9") {
        Field out = dx_frac(f, 2.0);
        Field expect = Field::sample(g, [](double x, double) { return 9.0 * std::sin(3.0 * x); });
        CHECK(max_diff(out, expect) < 1e-11);
    }
    SUBCASE("s = 1 matches |3| = 3") {
        Field out = dx_frac(f, 1.0);
        Field expect = Field::sample(g, [](double x, double) { return 3.0 * std::sin(3.0 * x); });
        CHECK(max_diff(out, expect) < 1e-12);
    }
    SUBCASE("multiplier semigroup: s = 1.5 twice equals s = 3 once") {
        Field twice = dx_frac(dx_frac(f, 1.5), 1.5);
        Field once = dx_frac(f, 3.0);
        CHECK(max_diff(twice, once) / once.max_abs() < 1e-12);
    }
}

TEST_CASE("dx_frac with s = 2 agrees with -d_xx") {
    std::mt19937_64 rng(11);
    Field f = random_smooth_field(unit_box(), rng, 1.0);
    Field a = dx_frac(f, 2.0);
    Field b = dx(dx(f));
    b *= -1.0;
    CHECK(max_diff(a, b) / std::max(a.max_abs(), 1e-300) < 1e-10);
}

TEST_CASE("antideriv_x") {
    GridSpec g = unit_box();
    SUBCASE("cos(2x) -> sin(2x)/2") {
        Field f = Field::sample(g, [](double x, double) { return std::cos(2.0 * x); });
        Field expect =
            Field::sample(g, [](double x, double) { return 0.5 * std::sin(2.0 * x); });
        CHECK(max_diff(antideriv_x(f), expect) < 1e-12);
    }
    SUBCASE("cos(x)sin(y) -> sin(x)sin(y)") {
        Field f =
            Field::sample(g, [](double x, double y) { return std::cos(x) * std::sin(y); });
        Field expect =
            Field::sample(g, [](double x, double y) { return std::sin(x) * std::sin(y); });
        CHECK(max_diff(antideriv_x(f), expect) < 1e-12);
    }
    SUBCASE("constant input hits the xi = 0 obstruction") {
        Field f = Field::sample(g, [](double, double) { return 1.0; });
        CHECK_THROWS_AS(antideriv_x(f), Error);
        try {
            antideriv_x(f);
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::NonZeroXMean);
        }
    }
    SUBCASE("left inverse of dx on zero-x-mean fields") {
        std::mt19937_64 rng(13);
        Field f = random_smooth_field(g, rng, 2.0);
        Field back = antideriv_x(dx(f));
        CHECK(max_diff(back, f) / f.max_abs() < 1e-10);
    }
}

TEST_CASE("dx and dy are exact spectral derivatives and commute") {
    GridSpec g = unit_box();
    Field sy = Field::sample(g, [](double, double y) { return std::sin(y); });
    Field cy = Field::sample(g, [](double, double y) { return std::cos(y); });
    CHECK(max_diff(dy(sy), cy) < 1e-13);

    Field s3 = Field::sample(g, [](double x, double) { return std::sin(3.0 * x); });
    Field c3 = Field::sample(g, [](double x, double) { return 3.0 * std::cos(3.0 * x); });
    CHECK(max_diff(dx(s3), c3) < 1e-12);

    std::mt19937_64 rng(17);
    Field f = random_smooth_field(g, rng, 1.0);
    CHECK(max_diff(dx(dy(f)), dy(dx(f))) < 1e-12);
}

TEST_CASE("dealias implements the 2/3 rule") {
    GridSpec g = unit_box();
    SUBCASE("mode (1,1) is kept") {
        Field f = Field::sample(g, [](double x, double y) { return std::cos(x + y); });
        CHECK(max_diff(dealias(f), f) < 1e-13);
    }
    SUBCASE("mode (nx/2 - 1, 0) is removed") {
        const int j = g.nx / 2 - 1;
        Field f = Field::sample(g, [j](double x, double) { return std::cos(j * x); });
        CHECK(dealias(f).max_abs() < 1e-13);
    }
    SUBCASE("idempotent on full-band data") {
        std::mt19937_64 rng(19);
        GridSpec gg = unit_box(48);
        Field f(gg);
        std::normal_distribution<double> gauss;
        for (long k = 0; k < f.size(); ++k) f.data()[k] = gauss(rng);
        Field once = dealias(f);
        CHECK(max_diff(dealias(once), once) < 1e-14 * std::max(1.0, once.max_abs()));
    }
}

TEST_CASE("multiplier chains preserve realness") {
    std::mt19937_64 rng(23);
    Field f = random_smooth_field(unit_box(), rng, 1.0);
    Field chain = dy(dx_frac(dealias(f), 0.7));
    CHECK(max_imag_residual(transform(chain)) < 1e-12);
}

TEST_CASE("symbol table invariants") {
    GridSpec g{32, 48, 5.0, 9.0};
    SymbolTable tab(g, 0.75);
    for (int kx = 0; kx < g.nx; ++kx) CHECK(tab.xiAbs2a[kx] >= 0.0);
    for (int ky = 0; ky < g.ny; ++ky)
        CHECK(tab.etaSqOverXi[static_cast<size_t>(0) * g.ny + ky] == 0.0);
    for (int kx = 0; kx < g.nx; ++kx)
        for (int ky = 0; ky < g.ny; ++ky) {
            const int mkx = (g.nx - kx) % g.nx;
            const int mky = (g.ny - ky) % g.ny;
            CHECK(tab.keep(kx, ky) == tab.keep(mkx, mky));
        }
}

TEST_CASE("grid validation rejects bad shapes") {
    CHECK_THROWS_AS((GridSpec{6, 8, 1.0, 1.0}.validate()), Error);
    CHECK_THROWS_AS((GridSpec{9, 8, 1.0, 1.0}.validate()), Error);
    CHECK_THROWS_AS((GridSpec{8, 8, -1.0, 1.0}.validate()), Error);
}

TEST_CASE("translate shifts by whole cells exactly") {
    GridSpec g = unit_box(32);
    std::mt19937_64 rng(29);
    Field f = random_smooth_field(g, rng, 1.0, 4);
    Field t = translate(f, 3.0 * g.hx(), 5.0 * g.hy());
    double worst = 0.0;
    for (int i = 0; i < g.nx; ++i)
        for (int j = 0; j < g.ny; ++j)
            worst = std::max(worst,
                             std::abs(t(i, j) - f((i - 3 + g.nx) % g.nx, (j - 5 + g.ny) % g.ny)));
    CHECK(worst < 1e-12);
}

TEST_CASE("dilate_resample: identity at unit scale, mass preserved at sqrt(BD) amplitude") {
    GridSpec g{96, 96, 48.0, 48.0};
    Field f = Field::sample(
        g, [](double x, double y) { return std::exp(-(x * x + y * y) / 9.0); });
    Field same = dilate_resample(f, 1.0, 1.0, 1.0);
    CHECK(max_diff(same, f) < 1e-11);

    // w = sqrt(BD) f(Bx, Dy) has M(w) = M(f) for a localized profile
    const double BD = 1.04;
    Field w = dilate_resample(f, std::sqrt(BD), std::sqrt(BD), std::sqrt(BD));
    CHECK(std::abs(mass(w) - mass(f)) / mass(f) < 1e-8);
}

} // TEST_SUITE
