#include <doctest.h>

#include <cmath>
#include <random>

#include "gkp/functionals.hpp"

using namespace gkp;

namespace {

constexpr double kPi = 3.14159265358979323846264338328;
constexpr double kTwoPi = 2.0 * kPi;

GridSpec unit_box(int n = 64) { return {n, n, kTwoPi, kTwoPi}; }

Field sin_sin(const GridSpec& g) {
    return Field::sample(g, [](double x, double y) { return std::sin(x) * std::sin(y); });
}

// Kahan-compensated quadrature of |u|^p, independent of lp_norm_pow
double kahan_abs_pow(const Field& f, double p) {
    double sum = 0.0, c = 0.0;
    for (long k = 0; k < f.size(); ++k) {
        const double term = std::pow(std::abs(f.data()[k]), p) - c;
        const double t = sum + term;
        c = (t - sum) - term;
        sum = t;
    }
    return sum * f.grid().cell_area();
}

} // namespace

TEST_SUITE("functionals") {

TEST_CASE("mass of sin(x)sin(y) is pi^2") {
    Field u = sin_sin(unit_box());
    CHECK(mass(u) == doctest::Approx(kPi * kPi).epsilon(1e-12));
    CHECK(mass(Field(unit_box(32))) == 0.0);
}

TEST_CASE("mass matches the compensated quadrature oracle on random data") {
    std::mt19937_64 rng(7);
    Field u = random_smooth_field(unit_box(96), rng, 0.8);
    CHECK(std::abs(mass(u) - kahan_abs_pow(u, 2.0)) / mass(u) < 1e-12);
}

TEST_CASE("momentum vanishes on odd pairings") {
    GridSpec g = unit_box();
    Field u = sin_sin(g);
    CHECK(std::abs(momentum(u)) < 1e-12 * mass(u));

    // even in y: u_y odd, momentum integrand odd
    Field even = Field::sample(g, [](double x, double y) { return std::sin(x) * std::cos(y); });
    CHECK(std::abs(momentum(even)) < 1e-12 * mass(even));
}

TEST_CASE("momentum matches the spectral-side Parseval oracle") {
    std::mt19937_64 rng(9);
    GridSpec g = unit_box(96);
    Field u = random_smooth_field(g, rng, 1.0);
    // oracle: int u dx^{-1}u_y = sum (eta/xi) |u^|^2 * (Lx Ly)/(nx ny)^2
    Spectrum s = transform(u);
    double acc = 0.0;
    for (int kx = 0; kx < g.nx; ++kx) {
        const double xi = g.xi(kx);
        if (xi == 0.0) continue;
        for (int ky = 0; ky < g.ny; ++ky) acc += g.eta(ky) / xi * std::norm(s(kx, ky));
    }
    acc *= g.Lx * g.Ly / (static_cast<double>(g.size()) * g.size());
    const double p = momentum(u);
    CHECK(std::abs(p - acc) / std::max(std::abs(acc), 1e-300) < 1e-10);
}

TEST_CASE("energy closed forms") {
    GridSpec g = unit_box();
    Field u = sin_sin(g);
    SUBCASE("eps = +1 cancels the two quadratic halves on sin sin") {
        PhysicalParams prm{1.0, 2.0, 2.0, 0.0, 0.0, +1};
        CHECK(std::abs(energy(u, prm)) < 1e-10);
    }
    SUBCASE("eps = -1 gives a sum of squares") {
        PhysicalParams prm{1.0, 2.0, 2.0, 0.0, 0.0, -1};
        std::mt19937_64 rng(31);
        Field noise = random_smooth_field(g, rng, 0.5);
        CHECK(energy(noise, prm) > 0.0);
        CHECK(energy(u, prm) == doctest::Approx(kPi * kPi).epsilon(1e-10));
    }
    SUBCASE("quadratic part zero leaves -K1 = -(1/3) int |sin sin|^3 = -64/27") {
        PhysicalParams prm{1.0, 2.0, 2.0, 1.0, 0.0, +1};
        const double oracle = kahan_abs_pow(u, 3.0) / 3.0;
        CHECK(oracle == doctest::Approx(64.0 / 27.0).epsilon(1e-10));
        CHECK(energy(u, prm) == doctest::Approx(-64.0 / 27.0).epsilon(1e-10));
    }
}

TEST_CASE("homogeneity of the scalar functionals") {
    std::mt19937_64 rng(37);
    GridSpec g = unit_box();
    Field u = random_smooth_field(g, rng, 1.1);
    PhysicalParams prm{1.0, 3.0, 2.0, 0.8, -0.3, -1};
    for (double lam : {0.5, 2.0}) {
        Field v = u;
        v *= lam;
        CHECK(mass(v) == doctest::Approx(lam * lam * mass(u)).epsilon(1e-12));
        CHECK(k_j(v, prm.p1) ==
              doctest::Approx(std::pow(lam, prm.p1 + 1.0) * k_j(u, prm.p1)).epsilon(1e-12));
        const double expected = 2.0 * lam * lam * i_func(u, prm) -
                                prm.mu1 * (prm.p1 + 1.0) * std::pow(lam, prm.p1 + 1.0) *
                                    k_j(u, prm.p1) -
                                prm.mu2 * (prm.p2 + 1.0) * std::pow(lam, prm.p2 + 1.0) *
                                    k_j(u, prm.p2);
        CHECK(nehari(v, prm) == doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("action with K = 0 is I; P(lambda u)/lambda^2 -> 2I") {
    std::mt19937_64 rng(41);
    Field u = random_smooth_field(unit_box(), rng, 1.0);
    PhysicalParams free{1.0, 2.0, 2.0, 0.0, 0.0, -1};
    CHECK(action(u, free) == doctest::Approx(i_func(u, free)).epsilon(1e-14));

    PhysicalParams prm{1.0, 2.0, 2.0, 1.0, 0.0, -1};
    const double twoI = 2.0 * i_func(u, prm);
    auto gap = [&](double lam) {
        Field v = u;
        v *= lam;
        return std::abs(nehari(v, prm) / (lam * lam) - twoI);
    };
    CHECK(gap(1e-5) < gap(1e-2));
    CHECK(gap(1e-5) < 1e-3 * twoI);
}

TEST_CASE("single-power Nehari recomposition from independently coded pieces") {
    std::mt19937_64 rng(43);
    GridSpec g = unit_box(96);
    Field u = random_smooth_field(g, rng, 0.9);
    const double p = 2.0, mu = 1.3;
    PhysicalParams prm{1.0, p, 2.0, mu, 0.0, -1};
    // independent route: I from a direct spectral loop, K from Kahan quadrature
    Spectrum s = transform(u);
    double m2 = 0.0, a2 = 0.0, b2 = 0.0;
    for (int kx = 0; kx < g.nx; ++kx) {
        const double xi = g.xi(kx);
        for (int ky = 0; ky < g.ny; ++ky) {
            const double e = std::norm(s(kx, ky));
            m2 += e;
            a2 += xi * xi * e;
            if (xi != 0.0) b2 += g.eta(ky) * g.eta(ky) / (xi * xi) * e;
        }
    }
    const double scale = g.Lx * g.Ly / (static_cast<double>(g.size()) * g.size());
    const double iOracle = 0.5 * scale * (m2 + a2 + b2);
    const double kOracle = kahan_abs_pow(u, p + 1.0) / (p + 1.0);
    const double expected = 2.0 * iOracle - (p + 1.0) * mu * kOracle;
    CHECK(nehari(u, prm) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("s0 r-selection and the S0 >= (1 - 2/(p1+1)) I bound") {
    std::mt19937_64 rng(47);
    Field u = random_smooth_field(unit_box(), rng, 1.0);
    SUBCASE("mu2 = 0 reduces to an identity in I") {
        PhysicalParams prm{1.0, 3.0, 2.0, 1.0, 0.0, -1};
        const double expect = (1.0 - 2.0 / (prm.p1 + 1.0)) * i_func(u, prm);
        CHECK(s0(u, prm) == doctest::Approx(expect).epsilon(1e-12));
    }
    SUBCASE("mu2 < 0 keeps the lower bound for any u") {
        PhysicalParams prm{1.0, 3.0, 2.0, 1.0, -0.4, -1};
        const double bound = (1.0 - 2.0 / (prm.p1 + 1.0)) * i_func(u, prm);
        CHECK(s0(u, prm) >= bound * (1.0 - 1e-12));
        Field big = u;
        big *= 12.0; // pushes P(u) <= 0
        PhysicalParams chk = prm;
        CHECK(nehari(big, chk) <= 0.0);
        CHECK(s0(big, chk) >= (1.0 - 2.0 / (prm.p1 + 1.0)) * i_func(big, prm) * (1.0 - 1e-12));
    }
    SUBCASE("mu2 > 0 selects r = p2") {
        PhysicalParams prm{1.0, 3.0, 2.0, 1.0, 0.5, -1};
        const double expect = action(u, prm) - nehari(u, prm) / (prm.p2 + 1.0);
        CHECK(s0(u, prm) == doctest::Approx(expect).epsilon(1e-14));
    }
}

TEST_CASE("R_{b,d} basics and the d -> d-1 difference identity") {
    std::mt19937_64 rng(53);
    GridSpec g = unit_box();
    PhysicalParams prm{1.0, 3.0, 2.0, 0.7, -0.2, -1};
    Field u = random_smooth_field(g, rng, 1.0);
    CHECK(r_functional(u, prm, 0.0, 0.0) == 0.0);

    std::uniform_real_distribution<double> unif(0.0, 5.0);
    for (int t = 0; t < 25; ++t) {
        Field v = random_smooth_field(g, rng, 0.5 + unif(rng) / 5.0);
        const double b = unif(rng);
        const double d = 1.0 + unif(rng);
        const double lhs = r_functional(v, prm, b, d) - r_functional(v, prm, b, d - 1.0);
        const double rhs = quadratic_norms(v, prm.alpha).antiYSq -
                           prm.psi1() * prm.mu1 * k_j(v, prm.p1) -
                           prm.psi2() * prm.mu2 * k_j(v, prm.p2);
        CHECK(std::abs(lhs - rhs) <= 1e-12 * std::max(std::abs(rhs), 1.0));
    }
}

TEST_CASE("sobolev quotient invariances") {
    std::mt19937_64 rng(59);
    GridSpec g = unit_box(96);
    Field u = random_smooth_field(g, rng, 1.0);
    const double p = 2.5, alpha = 1.0;
    SUBCASE("amplitude scale drops out (exponent bookkeeping)") {
        Field v = u;
        v *= 17.0;
        CHECK(sobolev_quotient(v, p, alpha) ==
              doctest::Approx(sobolev_quotient(u, p, alpha)).epsilon(1e-10));
    }
    SUBCASE("anisotropic box dilation drops out") {
        // the same samples on a rescaled box represent u(x/sx, y/sy)
        GridSpec gs{g.nx, g.ny, 1.7 * g.Lx, 0.6 * g.Ly};
        Field v(gs);
        v.values() = u.values();
        CHECK(sobolev_quotient(v, p, alpha) ==
              doctest::Approx(sobolev_quotient(u, p, alpha)).epsilon(1e-6));
    }
    SUBCASE("degenerate denominators are refused") {
        Field flat = Field::sample(g, [](double x, double) { return std::sin(x); });
        CHECK_THROWS_AS(sobolev_quotient(flat, p, alpha), Error); // u_y = 0
    }
}

TEST_CASE("sharp constant closed forms agree on consistent data and reject junk") {
    // Pohozaev-consistent pair: m = alpha M / (2 k_p)
    const double p = 2.0, alpha = 1.0;
    PhysicalParams tmp{alpha, p, p, 1.0, 0.0, -1};
    const double M = 72.0;
    const double m = alpha * M / (2.0 * tmp.k_p(p));
    SharpConstant sc = sharp_constant(M, m, p, alpha);
    CHECK(sc.relDiff < 1e-12);
    CHECK(sc.rho > 0.0);
    CHECK_THROWS_AS(sharp_constant(M, 1.2 * m, p, alpha), Error);
}

TEST_CASE("pohozaev residuals: exact on fabricated norms, large on a bump") {
    const double alpha = 1.0, p = 2.0;
    PhysicalParams prm{alpha, p, p, 1.0, 0.0, -1};
    SUBCASE("fabricated single-power norms give zero residuals") {
        StateNorms n;
        n.dxFracSq = 2.0;
        n.antiYSq = 0.5 * alpha * n.dxFracSq;
        n.mass = prm.k_p(p) * n.dxFracSq;
        const double k1 = alpha * n.dxFracSq / ((p - 1.0) * prm.mu1);
        for (double r : pohozaev_residuals_from_norms(n, k1, 0.0, prm)) CHECK(r < 1e-14);
    }
    SUBCASE("fabricated combined norms satisfy the four-identity set") {
        // identities 1-3 pin B, M, K1 given (A, K2); identity 4 is then a
        // consequence of the same scaling relations and must come out free
        PhysicalParams mix{1.0, 3.0, 2.0, 1.0, -0.25, -1};
        StateNorms n;
        n.dxFracSq = 3.0;
        n.antiYSq = 0.5 * mix.alpha * n.dxFracSq;
        const double r1 = 4.0 + 0.5 * (mix.p1 + 3.0) * (mix.alpha - 2.0);
        const double K2 = 1.0;
        n.mass = (0.5 * r1 * n.dxFracSq - (mix.p2 - mix.p1) * mix.mu2 * K2) / mix.psi1();
        const double K1 = (n.antiYSq - mix.psi2() * mix.mu2 * K2) / (mix.psi1() * mix.mu1);
        const auto res = pohozaev_residuals_from_norms(n, K1, K2, mix);
        REQUIRE(res.size() == 4);
        for (double r : res) CHECK(r < 1e-12);
    }
    SUBCASE("a generic Gaussian bump is a negative control") {
        GridSpec g{96, 96, 48.0, 48.0};
        Field bump = Field::sample(
            g, [](double x, double y) { return std::exp(-(x * x + y * y) / 4.0); });
        bump = project_zero_x_mean(bump);
        const auto res = pohozaev_residuals(bump, prm);
        double worst = 0.0;
        for (double r : res) worst = std::max(worst, r);
        CHECK(worst > 0.1);
    }
}

TEST_CASE("diagnostics record internal consistency") {
    std::mt19937_64 rng(61);
    Field u = random_smooth_field(unit_box(), rng, 0.7);
    PhysicalParams prm{0.8, 2.5, 1.5, 0.9, -0.4, -1};
    const DiagnosticsRecord r = DiagnosticsRecord::compute(u, prm);
    CHECK(r.action == doctest::Approx(r.iFunc - prm.mu1 * r.k1 - prm.mu2 * r.k2).epsilon(1e-13));
    CHECK(r.nehari == doctest::Approx(2.0 * r.iFunc - r.nFunc).epsilon(1e-13));
    CHECK(r.xNormSq == doctest::Approx(r.mass + r.xdotNormSq).epsilon(1e-13));
    CHECK(std::isfinite(r.supNorm));
    CHECK(DiagnosticsRecord::csv_columns().size() == r.csv_values().size());
}

} // TEST_SUITE
