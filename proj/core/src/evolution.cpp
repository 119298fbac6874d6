#include "gkp/evolution.hpp"

#include <algorithm>
#include <cmath>

namespace gkp {

const char* termination_name(Termination t) {
    switch (t) {
        case Termination::completed: return "completed";
        case Termination::blowupDetected: return "blowupDetected";
        case Termination::nanDetected: return "nanDetected";
    }
    return "unknown";
}

VirialWeight VirialWeight::y_squared() {
    return {"ySquared", [](double y) { return y * y; }, [](double) { return 2.0; },
            [](double) { return 0.0; }};
}

namespace {

inline double f_of(double v, const PhysicalParams& prm) {
    const double a = std::abs(v);
    double f;
    if (prm.p1 == 2.0)
        f = prm.mu1 * a * v;
    else if (prm.p1 == 3.0)
        f = prm.mu1 * v * v * v;
    else
        f = prm.mu1 * std::pow(a, prm.p1 - 1.0) * v;
    if (prm.mu2 != 0.0) {
        if (prm.p2 == 2.0)
            f += prm.mu2 * a * v;
        else if (prm.p2 == 3.0)
            f += prm.mu2 * v * v * v;
        else if (prm.p2 == 1.0)
            f += prm.mu2 * v;
        else
            f += prm.mu2 * std::pow(a, prm.p2 - 1.0) * v;
    }
    return f;
}

} // namespace

Stepper::Stepper(const GridSpec& grid, const PhysicalParams& prm, const TimeStepperConfig& cfg)
    : grid_(grid), prm_(prm), cfg_(cfg), engine_(grid), uhat_(grid), phys_(grid), k1_(grid),
      k2_(grid), k3_(grid), k4_(grid), stage_(grid) {
    prm.validate();
    omega_.assign(grid.size(), 0.0);
    const int jcut = grid.nx / 3;
    const int kcut = grid.ny / 3;
    double maxOmega = 0.0;
    for (int kx = 0; kx < grid.nx; ++kx) {
        const double xi = grid.xi(kx);
        if (xi == 0.0) continue; // pinned plane
        const double disp = xi * std::pow(std::abs(xi), 2.0 * prm.alpha);
        const int j = std::abs(GridSpec::mode(kx, grid.nx));
        for (int ky = 0; ky < grid.ny; ++ky) {
            const double eta = grid.eta(ky);
            const double om = disp - prm.eps * eta * eta / xi;
            omega_[static_cast<size_t>(kx) * grid.ny + ky] = om;
            const int k = std::abs(GridSpec::mode(ky, grid.ny));
            const bool inBand = !cfg.dealias || (j <= jcut && k <= kcut);
            if (inBand) maxOmega = std::max(maxOmega, std::abs(om));
        }
    }
    autoDt_ = std::min(0.4 / std::max(maxOmega, 1e-300), 1e-3 * grid.Lx);
}

void Stepper::set_state(const Field& u) {
    require_same_grid(u.grid(), grid_, "Stepper::set_state");
    engine_.forward(u.data(), uhat_.data());
    project_zero_x_mean_inplace(uhat_);
    if (cfg_.dealias) apply_dealias_inplace(uhat_);
}

Field Stepper::state() const { return inverse_transform(uhat_); }

void Stepper::nonlinear(const Spectrum& in, Spectrum& out) {
    engine_.backward(in.data(), phys_.data());
    for (long k = 0; k < grid_.size(); ++k) phys_.data()[k] = f_of(phys_.data()[k], prm_);
    engine_.forward(phys_.data(), out.data());
    if (cfg_.dealias) apply_dealias_inplace(out);
    for (int kx = 0; kx < grid_.nx; ++kx) {
        const std::complex<double> mIXi(0.0, -grid_.xi(kx));
        for (int ky = 0; ky < grid_.ny; ++ky) out(kx, ky) *= mIXi;
    }
}

void Stepper::etdrk4_tables(double dt) {
    if (etdDt_ == dt && !e1_.empty()) return;
    etdDt_ = dt;
    const long n = grid_.size();
    e1_.resize(n);
    e2_.resize(n);
    fQ_.resize(n);
    f1_.resize(n);
    f2_.resize(n);
    f3_.resize(n);
    // Kassam-Trefethen contour evaluation of the phi-coefficients around each
    // z = i Omega dt; the symbol is bounded after the zero-mean projection but
    // small xi stays stiff, hence the contour instead of direct formulas.
    const int M = 32;
    for (long idx = 0; idx < n; ++idx) {
        const std::complex<double> z(0.0, omega_[idx] * dt);
        e1_[idx] = std::exp(0.5 * z);
        e2_[idx] = std::exp(z);
        // full-circle mean: z is imaginary, so the real-axis half-circle
        // shortcut does not apply
        std::complex<double> q = 0.0, a = 0.0, b = 0.0, c = 0.0;
        for (int m = 0; m < M; ++m) {
            const double th = 2.0 * M_PI * (m + 0.5) / M;
            const std::complex<double> r = z + std::polar(1.0, th);
            const std::complex<double> er = std::exp(r);
            const std::complex<double> r2 = r * r, r3 = r2 * r;
            q += (std::exp(0.5 * r) - 1.0) / r;
            a += (-4.0 - r + er * (4.0 - 3.0 * r + r2)) / r3;
            b += (2.0 + r + er * (-2.0 + r)) / r3;
            c += (-4.0 - 3.0 * r - r2 + er * (4.0 - r)) / r3;
        }
        fQ_[idx] = dt * q / double(M);
        f1_[idx] = dt * a / double(M);
        f2_[idx] = dt * b / double(M);
        f3_[idx] = dt * c / double(M);
    }
}

void Stepper::step(double dt) {
    const long n = grid_.size();
    if (cfg_.scheme == Scheme::IFRK4) {
        // integrating-factor RK4: exact exponential on the linear part,
        // classical RK4 on the transformed nonlinearity
        nonlinear(uhat_, k1_);
        for (long i = 0; i < n; ++i) {
            const std::complex<double> E1 = std::polar(1.0, omega_[i] * dt * 0.5);
            stage_.data()[i] = E1 * (uhat_.data()[i] + 0.5 * dt * k1_.data()[i]);
        }
        nonlinear(stage_, k2_);
        for (long i = 0; i < n; ++i) {
            const std::complex<double> E1 = std::polar(1.0, omega_[i] * dt * 0.5);
            stage_.data()[i] = E1 * uhat_.data()[i] + 0.5 * dt * k2_.data()[i];
        }
        nonlinear(stage_, k3_);
        for (long i = 0; i < n; ++i) {
            const std::complex<double> E1 = std::polar(1.0, omega_[i] * dt * 0.5);
            const std::complex<double> E2 = std::polar(1.0, omega_[i] * dt);
            stage_.data()[i] = E2 * uhat_.data()[i] + dt * E1 * k3_.data()[i];
        }
        nonlinear(stage_, k4_);
        for (long i = 0; i < n; ++i) {
            const std::complex<double> E1 = std::polar(1.0, omega_[i] * dt * 0.5);
            const std::complex<double> E2 = std::polar(1.0, omega_[i] * dt);
            uhat_.data()[i] =
                E2 * uhat_.data()[i] +
                (dt / 6.0) * (E2 * k1_.data()[i] + 2.0 * E1 * (k2_.data()[i] + k3_.data()[i]) +
                              k4_.data()[i]);
        }
    } else {
        etdrk4_tables(dt);
        nonlinear(uhat_, k1_);
        for (long i = 0; i < n; ++i)
            stage_.data()[i] = e1_[i] * uhat_.data()[i] + fQ_[i] * k1_.data()[i];
        nonlinear(stage_, k2_);
        for (long i = 0; i < n; ++i)
            stage_.data()[i] = e1_[i] * uhat_.data()[i] + fQ_[i] * k2_.data()[i];
        nonlinear(stage_, k3_);
        for (long i = 0; i < n; ++i)
            stage_.data()[i] = e1_[i] * stage_.data()[i] +
                               fQ_[i] * (2.0 * k3_.data()[i] - k1_.data()[i]);
        nonlinear(stage_, k4_);
        for (long i = 0; i < n; ++i)
            uhat_.data()[i] = e2_[i] * uhat_.data()[i] + f1_[i] * k1_.data()[i] +
                              2.0 * f2_[i] * (k2_.data()[i] + k3_.data()[i]) +
                              f3_[i] * k4_.data()[i];
    }
    project_zero_x_mean_inplace(uhat_);
}

Field step(const Field& u, const PhysicalParams& prm, const TimeStepperConfig& cfg) {
    Stepper st(u.grid(), prm, cfg);
    st.set_state(u);
    const double dt = cfg.dt > 0.0 ? cfg.dt : st.auto_dt();
    st.step(dt);
    return st.state();
}

namespace {

struct SampleContext {
    const PhysicalParams& prm;
    const std::vector<VirialWeight>& weights;
    const SampleHook& hook;
};

void take_sample(TrajectoryDiagnostics& traj, const Spectrum& uhat, double t,
                 const SampleContext& ctx) {
    const GridSpec& g = uhat.grid();
    Field u = inverse_transform(uhat);
    if (ctx.hook) ctx.hook(t, u);
    traj.times.push_back(t);
    traj.records.push_back(DiagnosticsRecord::compute(u, ctx.prm));
    traj.bandEdge.push_back(band_edge_fraction(uhat));

    // weighted moments need dx^{-1}u and dx^{-1}u_y in physical space
    Spectrum tmp = uhat;
    apply_antideriv_x_inplace(tmp);
    Field v = inverse_transform(tmp); // dx^{-1} u
    tmp = uhat;
    apply_dy_inplace(tmp);
    apply_antideriv_x_inplace(tmp);
    Field vy = inverse_transform(tmp); // dx^{-1} u_y

    const double cell = g.cell_area();
    const PhysicalParams& prm = ctx.prm;

    for (size_t w = 0; w < ctx.weights.size(); ++w) {
        const VirialWeight& wt = ctx.weights[w];
        double V = 0.0, p4 = 0.0, p2vy = 0.0, p2F = 0.0;
        for (int i = 0; i < g.nx; ++i) {
            for (int j = 0; j < g.ny; ++j) {
                const double y = g.y(j);
                const double uu = u(i, j);
                const double phi = wt.phi(y);
                const double phi2 = wt.phi2(y);
                V += phi * uu * uu;
                p4 += wt.phi4(y) * v(i, j) * v(i, j);
                p2vy += phi2 * vy(i, j) * vy(i, j);
                double F = 0.0;
                const double au = std::abs(uu);
                F += prm.psi1() * prm.mu1 * std::pow(au, prm.p1 + 1.0) / (prm.p1 + 1.0);
                if (prm.mu2 != 0.0)
                    F += prm.psi2() * prm.mu2 * std::pow(au, prm.p2 + 1.0) / (prm.p2 + 1.0);
                p2F += phi2 * F;
            }
        }
        V *= cell;
        p4 *= cell;
        p2vy *= cell;
        p2F *= cell;
        // d^2V/dt^2 = -int phi'''' (dx^{-1}u)^2 + 4 int phi'' (dx^{-1}u_y)^2
        //             + 4 eps int phi'' (psi1 mu1 F1 + psi2 mu2 F2)
        const double rhs = -p4 + 4.0 * p2vy + 4.0 * prm.eps * p2F;
        traj.virial[w].value.push_back(V);
        traj.virial[w].rhs.push_back(rhs);
    }

    // x moment and its analytic derivative
    double X = 0.0;
    for (int i = 0; i < g.nx; ++i) {
        const double x = g.x(i);
        for (int j = 0; j < g.ny; ++j) X += x * u(i, j) * u(i, j);
    }
    X *= cell;
    const DiagnosticsRecord& r = traj.records.back();
    const double dxFracSq = r.xdotNormSq - r.antiYNormSq;
    // d/dt int x u^2 = -(2a+1)||D_x^a u||^2 - eps ||dx^{-1}u_y||^2
    //                  + 2 int (u f(u) - F(u))
    const double dXdt = -(2.0 * prm.alpha + 1.0) * dxFracSq - prm.eps * r.antiYNormSq +
                        2.0 * (prm.mu1 * prm.p1 * r.k1 + prm.mu2 * prm.p2 * r.k2);
    traj.xMoment.push_back(X);
    traj.xMomentRhs.push_back(dXdt);
}

} // namespace

TrajectoryDiagnostics run(const Field& u0, const PhysicalParams& prm,
                          const TimeStepperConfig& cfg, const std::vector<VirialWeight>& weights,
                          const SampleHook& hook) {
    if (!(cfg.tEnd > 0.0)) fail(ErrorCode::InvalidParams, "run: tEnd must be > 0");
    Stepper st(u0.grid(), prm, cfg);
    st.set_state(u0);

    double dt = cfg.dt > 0.0 ? cfg.dt : st.auto_dt();
    long nsteps = std::max(1L, static_cast<long>(std::ceil(cfg.tEnd / dt - 1e-9)));
    dt = cfg.tEnd / nsteps; // land exactly on tEnd
    const int every = std::max(1, cfg.diagnosticsEvery);

    TrajectoryDiagnostics traj;
    traj.dtUsed = dt;
    traj.virial.resize(weights.size());
    for (size_t w = 0; w < weights.size(); ++w) traj.virial[w].name = weights[w].name;
    SampleContext ctx{prm, weights, hook};

    take_sample(traj, st.spectrum(), 0.0, ctx);
    double normCap = cfg.blowupNormCap;
    if (normCap <= 0.0) normCap = 1e6 * std::sqrt(std::max(traj.records[0].xdotNormSq, 1e-300));

    for (long s = 1; s <= nsteps; ++s) {
        st.step(dt);
        traj.stepsTaken = s;
        const bool last = s == nsteps;
        if (s % every == 0 || last) {
            const double t = s * dt;
            take_sample(traj, st.spectrum(), t, ctx);
            const DiagnosticsRecord& r = traj.records.back();
            if (!std::isfinite(r.mass) || !std::isfinite(r.xdotNormSq)) {
                traj.terminated = Termination::nanDetected;
                break;
            }
            if (std::sqrt(r.xdotNormSq) > normCap ||
                traj.bandEdge.back() > cfg.bandGuardFraction) {
                traj.terminated = Termination::blowupDetected;
                break;
            }
        }
    }
    traj.tFinal = traj.times.back();
    traj.finalState = st.state();
    return traj;
}

namespace {

const WeightSeries& find_weight(const TrajectoryDiagnostics& traj, const std::string& name) {
    for (const auto& w : traj.virial)
        if (w.name == name) return w;
    fail(ErrorCode::InvalidParams, "no virial series named '" + name + "' in the trajectory");
}

double series_scale(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

} // namespace

SeriesCheck virial_series(const TrajectoryDiagnostics& traj, const std::string& weightName) {
    const WeightSeries& w = find_weight(traj, weightName);
    const size_t n = traj.times.size();
    if (n < 3) fail(ErrorCode::InsufficientSampling, "virial_series needs at least 3 samples");
    SeriesCheck out;
    const double scale = std::max(series_scale(w.rhs), 1e-300);
    for (size_t i = 1; i + 1 < n; ++i) {
        const double hL = traj.times[i] - traj.times[i - 1];
        const double hR = traj.times[i + 1] - traj.times[i];
        if (std::abs(hL - hR) > 1e-9 * hL) continue; // uniform triples only
        const double d2 = (w.value[i + 1] - 2.0 * w.value[i] + w.value[i - 1]) / (hL * hL);
        out.times.push_back(traj.times[i]);
        out.measured.push_back(d2);
        out.analytic.push_back(w.rhs[i]);
        out.maxRelError = std::max(out.maxRelError, std::abs(d2 - w.rhs[i]) /
                                                        std::max(std::abs(w.rhs[i]), 1e-3 * scale));
    }
    if (out.times.empty())
        fail(ErrorCode::InsufficientSampling, "virial_series: no uniformly spaced sample triples");
    return out;
}

SeriesCheck x_moment_series(const TrajectoryDiagnostics& traj) {
    const size_t n = traj.times.size();
    if (n < 3) fail(ErrorCode::InsufficientSampling, "x_moment_series needs at least 3 samples");
    SeriesCheck out;
    const double scale = std::max(series_scale(traj.xMomentRhs), 1e-300);
    for (size_t i = 1; i + 1 < n; ++i) {
        const double hL = traj.times[i] - traj.times[i - 1];
        const double hR = traj.times[i + 1] - traj.times[i];
        if (std::abs(hL - hR) > 1e-9 * hL) continue;
        const double d1 = (traj.xMoment[i + 1] - traj.xMoment[i - 1]) / (2.0 * hL);
        out.times.push_back(traj.times[i]);
        out.measured.push_back(d1);
        out.analytic.push_back(traj.xMomentRhs[i]);
        out.maxRelError =
            std::max(out.maxRelError, std::abs(d1 - traj.xMomentRhs[i]) /
                                          std::max(std::abs(traj.xMomentRhs[i]), 1e-3 * scale));
    }
    if (out.times.empty())
        fail(ErrorCode::InsufficientSampling, "x_moment_series: no uniformly spaced triples");
    return out;
}

BlowupReport blowup_monitor(const TrajectoryDiagnostics& traj, double normCap,
                            double bandGuardFraction) {
    BlowupReport rep;
    if (traj.records.empty()) return rep;
    const DiagnosticsRecord& r0 = traj.records.front();
    const DiagnosticsRecord& rN = traj.records.back();
    const double x0 = std::sqrt(std::max(r0.xdotNormSq, 1e-300));
    if (normCap <= 0.0) normCap = 1e6 * x0;

    rep.xdotGrowth = std::sqrt(std::max(rN.xdotNormSq, 0.0)) / x0;
    rep.antiYGrowth =
        std::sqrt(std::max(rN.antiYNormSq, 0.0) / std::max(r0.antiYNormSq, 1e-300));
    rep.uyGrowth = std::sqrt(std::max(rN.uyNormSq, 0.0) / std::max(r0.uyNormSq, 1e-300));
    for (double b : traj.bandEdge) rep.maxBandEdge = std::max(rep.maxBandEdge, b);

    if (std::sqrt(rN.xdotNormSq) > normCap) {
        rep.flagged = true;
        rep.reason = "normCap";
    } else if (rep.maxBandEdge > bandGuardFraction) {
        rep.flagged = true;
        rep.reason = "resolutionLoss";
    }
    return rep;
}

} // namespace gkp
