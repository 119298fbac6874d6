#include "gkp/ground_state.hpp"

#include <algorithm>
#include <cmath>

#include "gkp/fft.hpp"

namespace gkp {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

// f(u) = mu1 |u|^{p1-1} u + mu2 |u|^{p2-1} u
inline double nonlinearity(double v, const PhysicalParams& prm) {
    const double a = std::abs(v);
    double f = prm.mu1 * std::pow(a, prm.p1 - 1.0) * v;
    if (prm.mu2 != 0.0) f += prm.mu2 * std::pow(a, prm.p2 - 1.0) * v;
    return f;
}

inline double single_power_f(double v, double p, double mu) {
    if (p == 2.0) return mu * std::abs(v) * v;
    if (p == 3.0) return mu * v * v * v;
    return mu * std::pow(std::abs(v), p - 1.0) * v;
}

// L^ = c + |xi|^{2a} + eta^2/xi^2; its inverse is 0 on the xi=0 plane, which
// doubles as the zero-x-mean projection.
std::vector<double> multiplier_inverse(const GridSpec& g, double alpha, double c) {
    std::vector<double> inv(g.size(), 0.0);
    for (int kx = 0; kx < g.nx; ++kx) {
        const double xi = g.xi(kx);
        if (xi == 0.0) continue;
        const double xiPow = std::pow(std::abs(xi), 2.0 * alpha);
        for (int ky = 0; ky < g.ny; ++ky) {
            const double eta = g.eta(ky);
            inv[static_cast<size_t>(kx) * g.ny + ky] =
                1.0 / (c + xiPow + (eta * eta) / (xi * xi));
        }
    }
    return inv;
}

// zero x-mean + 2/3 truncation in one spectral pass
Field clean_state(const Field& f) {
    Spectrum s = transform(f);
    project_zero_x_mean_inplace(s);
    apply_dealias_inplace(s);
    return inverse_transform(s);
}

Field default_gaussian(const GridSpec& g) {
    const double w = std::min(g.Lx, g.Ly) / 10.0;
    return Field::sample(
        g, [w](double x, double y) { return std::exp(-(x * x + y * y) / (w * w)); });
}

double boundary_ratio(const Field& v) {
    const GridSpec& g = v.grid();
    double edge = 0.0;
    for (int j = 0; j < g.ny; ++j) edge = std::max(edge, std::abs(v(0, j)));
    for (int i = 0; i < g.nx; ++i) edge = std::max(edge, std::abs(v(i, 0)));
    const double peak = v.max_abs();
    return peak > 0.0 ? edge / peak : 0.0;
}

void finish_boundary_checks(GroundStateResult& r, const PetviashviliConfig& cfg) {
    r.boundaryRatio = boundary_ratio(r.profile);
    r.boundaryWarning = r.boundaryRatio > cfg.boundaryWarnRatio;
    if (r.boundaryRatio > cfg.boundaryFailRatio)
        fail(ErrorCode::BoundaryContamination,
             "profile reaches the box edge (edge/peak = " + std::to_string(r.boundaryRatio) + ")");
}

double action_speed_c(const Field& u, const PhysicalParams& prm, double c) {
    const StateNorms n = quadratic_norms(u, prm.alpha);
    return 0.5 * (c * n.mass + n.dxFracSq + n.antiYSq) - prm.mu1 * k_j(u, prm.p1) -
           prm.mu2 * k_j(u, prm.p2);
}

} // namespace

GroundStateResult petviashvili(double p, double alpha, const GridSpec& grid,
                               const PetviashviliConfig& cfg, double mu, double speedC,
                               const Field* init) {
    grid.validate();
    if (!(p > 1.0)) fail(ErrorCode::InvalidParams, "petviashvili: p must be > 1");
    if (!(mu > 0.0)) fail(ErrorCode::InvalidParams, "petviashvili: mu must be > 0");
    if (!(speedC > 0.0)) fail(ErrorCode::InvalidParams, "petviashvili: speed must be > 0");
    const double gamma = cfg.gamma > 0.0 ? cfg.gamma : p / (p - 1.0);
    const double relax = cfg.relaxation;

    const std::vector<double> Linv = multiplier_inverse(grid, alpha, speedC);
    const double scale = (grid.Lx * grid.Ly) / (static_cast<double>(grid.size()) * grid.size());

    SpectralEngine engine(grid);
    Field v = clean_state(init ? *init : default_gaussian(grid));
    require_same_grid(v.grid(), grid, "petviashvili init");
    Spectrum vhat = transform(v);

    GroundStateResult res;
    res.speed = speedC;
    Field fv(grid);
    Spectrum fhat(grid);

    for (int iter = 0; iter < cfg.maxIter; ++iter) {
        for (long k = 0; k < grid.size(); ++k) fv.data()[k] = single_power_f(v.data()[k], p, mu);
        engine.forward(fv.data(), fhat.data());
        apply_dealias_inplace(fhat);
        project_zero_x_mean_inplace(fhat);

        // equation residual ||L v - f(v)|| and <L v, v>, both spectral-side
        double res2 = 0.0;
        double num = 0.0;
        for (int kx = 0; kx < grid.nx; ++kx) {
            const double xi = grid.xi(kx);
            if (xi == 0.0) continue;
            const double xiPow = std::pow(std::abs(xi), 2.0 * alpha);
            for (int ky = 0; ky < grid.ny; ++ky) {
                const size_t idx = static_cast<size_t>(kx) * grid.ny + ky;
                const double eta = grid.eta(ky);
                const double L = speedC + xiPow + (eta * eta) / (xi * xi);
                res2 += std::norm(L * vhat.data()[idx] - fhat.data()[idx]);
                num += L * std::norm(vhat.data()[idx]);
            }
        }
        res2 *= scale;
        num *= scale;
        res.residualNorm = std::sqrt(res2);
        res.residualHistory.push_back(res.residualNorm);
        res.iterations = iter;

        double den = 0.0; // <f(v), v>
        for (long k = 0; k < grid.size(); ++k) den += fv.data()[k] * v.data()[k];
        den *= grid.cell_area();

        if (!std::isfinite(res.residualNorm) || !std::isfinite(den))
            fail(ErrorCode::SolverFailure, "petviashvili: iteration produced non-finite values");
        if (std::sqrt(std::abs(num)) < cfg.collapseTol || den <= 0.0)
            fail(ErrorCode::CollapseToZero, "petviashvili: iterate collapsed to zero");

        res.lastStabilization = num / den;
        if (res.residualNorm <= cfg.tol) {
            res.converged = true;
            break;
        }

        const double sGamma = std::pow(res.lastStabilization, gamma);
        for (long k = 0; k < grid.size(); ++k) {
            const std::complex<double> next = sGamma * fhat.data()[k] * Linv[k];
            vhat.data()[k] = (1.0 - relax) * vhat.data()[k] + relax * next;
        }
        engine.backward(vhat.data(), v.data());
    }

    if (!res.converged)
        fail(ErrorCode::NoConvergence, "petviashvili: residual " +
                                           std::to_string(res.residualNorm) + " after " +
                                           std::to_string(cfg.maxIter) + " iterations");

    for (size_t i = 11; i < res.residualHistory.size(); ++i)
        if (res.residualHistory[i] > res.residualHistory[i - 1] * (1.0 + 1e-12))
            res.monotoneWarning = true;

    res.profile = v;
    PhysicalParams prm;
    prm.alpha = alpha;
    prm.p1 = p;
    prm.p2 = p;
    prm.mu1 = mu;
    prm.mu2 = 0.0;
    prm.eps = -1;
    res.actionValue = action_speed_c(v, prm, speedC);
    res.pohozaevResiduals = pohozaev_residuals(v, prm);
    finish_boundary_checks(res, cfg);
    return res;
}

double nehari_scale(const Field& u, const PhysicalParams& prm, double speedC) {
    const StateNorms n = quadratic_norms(u, prm.alpha);
    const double twoI = speedC * n.mass + n.dxFracSq + n.antiYSq;
    const double w1 = prm.mu1 * (prm.p1 + 1.0) * k_j(u, prm.p1);
    const double w2 = prm.mu2 * (prm.p2 + 1.0) * k_j(u, prm.p2);
    if (twoI <= 0.0) fail(ErrorCode::NoNehariRoot, "nehari_scale: degenerate iterate");

    // P(t u) = 0  <=>  w1 t^{p1-1} + w2 t^{p2-1} = 2 I(u); scan log-spaced t
    // and bisect the first sign change (the smallest positive root)
    auto g = [&](double t) {
        return w1 * std::pow(t, prm.p1 - 1.0) + w2 * std::pow(t, prm.p2 - 1.0) - twoI;
    };
    const int nScan = 800;
    double prevT = std::exp(-20.0);
    double prevG = g(prevT);
    for (int i = 1; i <= nScan; ++i) {
        const double t = std::exp(-20.0 + 40.0 * i / nScan);
        const double gt = g(t);
        if (prevG == 0.0) return prevT;
        if (prevG * gt < 0.0) {
            double lo = prevT, hi = t;
            double glo = prevG;
            for (int it = 0; it < 200; ++it) {
                const double mid = 0.5 * (lo + hi);
                const double gm = g(mid);
                if (glo * gm <= 0.0) {
                    hi = mid;
                } else {
                    lo = mid;
                    glo = gm;
                }
                if ((hi - lo) < 1e-14 * hi) break;
            }
            return 0.5 * (lo + hi);
        }
        prevT = t;
        prevG = gt;
    }
    fail(ErrorCode::NoNehariRoot, "nehari_scale: no positive root of P(lambda u) = 0");
}

GroundStateResult nehari_ground_state(const PhysicalParams& prm, const GridSpec& grid,
                                      const Field* init, const PetviashviliConfig& cfg,
                                      double speedC) {
    prm.validate();
    grid.validate();
    if (!(prm.mu1 > 0.0)) fail(ErrorCode::InvalidParams, "nehari_ground_state requires mu1 > 0");

    if (prm.single_power()) {
        // single power: Petviashvili computes the same minimizer
        return petviashvili(prm.p1, prm.alpha, grid, cfg, prm.mu1, speedC, init);
    }

    // initial guess: profile of the dominant power (the larger-p term when
    // its mu is positive, otherwise the p1 term)
    Field v(grid);
    if (init) {
        v = *init;
        require_same_grid(v.grid(), grid, "nehari init");
    } else {
        const bool useP2 = prm.mu2 > 0.0 && prm.p2 > prm.p1;
        const double p = useP2 ? prm.p2 : prm.p1;
        const double mu = useP2 ? prm.mu2 : prm.mu1;
        PetviashviliConfig coarse = cfg;
        coarse.tol = std::max(cfg.tol, 1e-8);
        v = petviashvili(p, prm.alpha, grid, coarse, mu, speedC).profile;
    }
    v = clean_state(v);
    v *= nehari_scale(v, prm, speedC);

    const double scale = (grid.Lx * grid.Ly) / (static_cast<double>(grid.size()) * grid.size());
    SpectralEngine engine(grid);

    GroundStateResult res;
    res.speed = speedC;
    res.lastStabilization = 1.0;
    Field fv(grid), grad(grid);
    Spectrum fhat(grid), ghat(grid);
    double S = action_speed_c(v, prm, speedC);
    bool stalled = false;

    for (int iter = 0; iter < cfg.maxIter && !stalled; ++iter) {
        Spectrum vhat = transform(v);
        for (long k = 0; k < grid.size(); ++k) fv.data()[k] = nonlinearity(v.data()[k], prm);
        engine.forward(fv.data(), fhat.data());
        apply_dealias_inplace(fhat);
        project_zero_x_mean_inplace(fhat);

        // X-gradient g = v - L^{-1} f(v); equation residual ||L v - f(v)||
        double res2 = 0.0;
        for (int kx = 0; kx < grid.nx; ++kx) {
            const double xi = grid.xi(kx);
            if (xi == 0.0) {
                for (int ky = 0; ky < grid.ny; ++ky) ghat(kx, ky) = 0.0;
                continue;
            }
            const double xiPow = std::pow(std::abs(xi), 2.0 * prm.alpha);
            for (int ky = 0; ky < grid.ny; ++ky) {
                const size_t idx = static_cast<size_t>(kx) * grid.ny + ky;
                const double eta = grid.eta(ky);
                const double L = speedC + xiPow + (eta * eta) / (xi * xi);
                res2 += std::norm(L * vhat.data()[idx] - fhat.data()[idx]);
                ghat.data()[idx] = vhat.data()[idx] - fhat.data()[idx] / L;
            }
        }
        res.residualNorm = std::sqrt(res2 * scale);
        res.residualHistory.push_back(res.residualNorm);
        res.iterations = iter;
        if (!std::isfinite(res.residualNorm))
            fail(ErrorCode::SolverFailure, "nehari descent produced non-finite values");
        if (res.residualNorm <= cfg.tol) {
            res.converged = true;
            break;
        }

        engine.backward(ghat.data(), grad.data());
        double tau = cfg.relaxation;
        bool accepted = false;
        for (int bt = 0; bt < 40 && !accepted; ++bt) {
            Field trial = v;
            for (long k = 0; k < grid.size(); ++k) trial.data()[k] -= tau * grad.data()[k];
            trial = clean_state(trial);
            double lam;
            try {
                lam = nehari_scale(trial, prm, speedC);
            } catch (const Error&) {
                tau *= 0.5;
                continue;
            }
            trial *= lam;
            const double Snew = action_speed_c(trial, prm, speedC);
            if (Snew < S) {
                v = trial;
                S = Snew;
                accepted = true;
            } else if (tau < 1e-9) {
                stalled = true; // no descent left at this resolution
                accepted = true;
            } else {
                tau *= 0.5;
            }
        }
    }

    if (!res.converged)
        fail(ErrorCode::NoConvergence,
             "nehari descent stopped at residual " + std::to_string(res.residualNorm) +
                 " (target " + std::to_string(cfg.tol) + ")");

    res.profile = v;
    res.actionValue = S;
    res.pohozaevResiduals = pohozaev_residuals(v, prm);
    finish_boundary_checks(res, cfg);
    return res;
}

GroundStateResult normalized_ground_state(const PhysicalParams& prm, const GridSpec& grid,
                                          double rho, const PetviashviliConfig& cfg,
                                          const Field* init) {
    prm.validate();
    grid.validate();
    if (!(rho > 0.0)) fail(ErrorCode::InvalidParams, "normalized_ground_state: rho must be > 0");

    Field v = clean_state(init ? *init : default_gaussian(grid));
    {
        const double m = mass(v);
        if (m <= 0.0) fail(ErrorCode::InvalidParams, "normalized_ground_state: trivial init");
        v *= std::sqrt(rho / m);
    }

    const std::vector<double> Linv = multiplier_inverse(grid, prm.alpha, 1.0);
    SpectralEngine engine(grid);
    Field fv(grid), grad(grid);
    Spectrum fhat(grid), ghat(grid);

    GroundStateResult res;
    double E = energy(v, prm);
    double tau = cfg.relaxation;
    int flat = 0;

    for (int iter = 0; iter < cfg.maxIter; ++iter) {
        res.iterations = iter;
        if (E < cfg.energyFloor)
            fail(ErrorCode::FlowDiverges,
                 "normalized flow: E fell below the configured floor (evidence of d_rho = -inf)");

        Spectrum vhat = transform(v);
        for (long k = 0; k < grid.size(); ++k) fv.data()[k] = nonlinearity(v.data()[k], prm);
        engine.forward(fv.data(), fhat.data());
        apply_dealias_inplace(fhat);
        project_zero_x_mean_inplace(fhat);

        // preconditioned L2 gradient of E: (|xi|^{2a} - eps eta^2/xi^2) v^ - f^
        for (int kx = 0; kx < grid.nx; ++kx) {
            const double xi = grid.xi(kx);
            if (xi == 0.0) {
                for (int ky = 0; ky < grid.ny; ++ky) ghat(kx, ky) = 0.0;
                continue;
            }
            const double xiPow = std::pow(std::abs(xi), 2.0 * prm.alpha);
            for (int ky = 0; ky < grid.ny; ++ky) {
                const size_t idx = static_cast<size_t>(kx) * grid.ny + ky;
                const double eta = grid.eta(ky);
                const double lin = xiPow - prm.eps * (eta * eta) / (xi * xi);
                ghat.data()[idx] = (lin * vhat.data()[idx] - fhat.data()[idx]) * Linv[idx];
            }
        }
        engine.backward(ghat.data(), grad.data());

        bool accepted = false;
        for (int bt = 0; bt < 60 && !accepted; ++bt) {
            Field trial = v;
            for (long k = 0; k < grid.size(); ++k) trial.data()[k] -= tau * grad.data()[k];
            trial = clean_state(trial);
            const double m = mass(trial);
            if (m <= 0.0) {
                tau *= 0.5;
                continue;
            }
            trial *= std::sqrt(rho / m);
            const double Enew = energy(trial, prm);
            if (Enew < E) {
                const double drop = E - Enew;
                v = trial;
                E = Enew;
                accepted = true;
                flat = drop < cfg.tol * std::max(1.0, std::abs(E)) ? flat + 1 : 0;
                tau = std::min(tau * 1.2, cfg.relaxation);
            } else {
                tau *= 0.5;
                if (tau < 1e-10) {
                    flat = 1000; // no descent direction left at this resolution
                    accepted = true;
                }
            }
        }
        if (flat >= 25) {
            res.converged = true;
            break;
        }
    }

    if (!res.converged)
        fail(ErrorCode::NoConvergence, "normalized flow did not settle within maxIter");

    res.profile = v;
    res.actionValue = E; // candidate d_rho
    res.pohozaevResiduals = pohozaev_residuals(v, prm);
    res.boundaryRatio = boundary_ratio(v);
    res.boundaryWarning = res.boundaryRatio > cfg.boundaryWarnRatio;
    return res;
}

GroundStateResult speed_c_ground_state(double c, const PhysicalParams& prm, const GridSpec& grid,
                                       const PetviashviliConfig& cfg) {
    if (!(c > 0.0)) fail(ErrorCode::InvalidParams, "speed_c_ground_state: c must be > 0");
    return nehari_ground_state(prm, grid, nullptr, cfg, c);
}

GardnerSoliton gardner_soliton_1d(double A, double varsigma, double B0, double x0,
                                  const Grid1D& grid) {
    if (!(A > 0.0)) fail(ErrorCode::InvalidParams, "gardner: A must be > 0");
    if (grid.n < 8 || !(grid.L > 0.0)) fail(ErrorCode::InvalidParams, "gardner: bad 1D grid");
    const double disc = 1.0 - 6.0 * varsigma * A;
    if (disc < 0.0)
        fail(ErrorCode::InvalidParams, "gardner: 1 - 6 varsigma A < 0, no real soliton");
    GardnerSoliton out;
    out.R = std::sqrt(disc);
    out.speed = A * B0;
    out.profile.resize(grid.n);
    const double k = std::sqrt(A);
    for (int i = 0; i < grid.n; ++i) {
        const double x = grid.x(i) - x0;
        out.profile[i] = 6.0 * A / (1.0 + out.R * std::cosh(k * x));
    }
    return out;
}

double gardner_residual_max(const std::vector<double>& u, const Grid1D& grid, double A,
                            double varsigma) {
    const std::vector<double> uxx = second_derivative_1d(u, grid.L);
    double worst = 0.0;
    for (size_t i = 0; i < u.size(); ++i) {
        const double r =
            -A * u[i] + uxx[i] + 0.5 * u[i] * u[i] - (varsigma / 3.0) * u[i] * u[i] * u[i];
        worst = std::max(worst, std::abs(r));
    }
    return worst;
}

ZaitsevWave zaitsev_profile(double beta0, double beta, const GridSpec& grid) {
    if (!(beta0 > 0.0)) fail(ErrorCode::InvalidParams, "zaitsev: beta0 must be > 0");
    if (!(std::abs(beta) < 1.0)) fail(ErrorCode::InvalidParams, "zaitsev: |beta| must be < 1");
    grid.validate();

    ZaitsevWave out{Field(grid), 0.0, 0.0};
    out.speed = beta0 * beta0 * (4.0 - beta * beta) / (1.0 - beta * beta);

    // classical y-wavenumber, snapped to the grid so the sample stays periodic
    const double deltaRaw =
        beta0 * beta0 * std::sqrt((4.0 - beta * beta) / (3.0 * (1.0 - beta * beta)));
    const double dEta = kTwoPi / grid.Ly;
    out.delta = std::max(1.0, std::round(deltaRaw / dEta)) * dEta;

    double minDen = 1e300;
    for (int i = 0; i < grid.nx; ++i) {
        const double ch = std::cosh(beta0 * grid.x(i));
        for (int j = 0; j < grid.ny; ++j) {
            const double cs = std::cos(out.delta * grid.y(j));
            const double den = ch - beta * cs;
            minDen = std::min(minDen, std::abs(den));
            out.field(i, j) = 12.0 * beta0 * beta0 * (1.0 - beta * ch * cs) / (den * den);
        }
    }
    if (minDen < 1e-6)
        fail(ErrorCode::NearSingular, "zaitsev: denominator approaches zero on the grid");
    return out;
}

} // namespace gkp
