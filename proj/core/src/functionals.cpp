#include "gkp/functionals.hpp"

#include <cmath>

namespace gkp {

namespace {

double rel_mismatch(double a, double b) {
    const double scale = std::max({std::abs(a), std::abs(b), 1e-300});
    return std::abs(a - b) / scale;
}

// |u|^{p+1} with fast paths for the common integer powers
inline double abs_pow_p1(double v, double p) {
    const double a = std::abs(v);
    if (p == 2.0) return a * a * a;
    if (p == 3.0) return a * a * a * a;
    if (p == 1.0) return a * a;
    return std::pow(a, p + 1.0);
}

} // namespace

StateNorms quadratic_norms(const Spectrum& s, double alpha) {
    const GridSpec& g = s.grid();
    const double scale = (g.Lx * g.Ly) / (static_cast<double>(g.size()) * g.size());
    StateNorms n;
    for (int kx = 0; kx < g.nx; ++kx) {
        const double xi = g.xi(kx);
        const double xiPow = std::pow(std::abs(xi), 2.0 * alpha);
        for (int ky = 0; ky < g.ny; ++ky) {
            const double eta = g.eta(ky);
            const double e = std::norm(s(kx, ky));
            n.mass += e;
            n.dxFracSq += xiPow * e;
            n.uySq += eta * eta * e;
            if (xi != 0.0) {
                n.antiYSq += (eta * eta) / (xi * xi) * e;
                n.momentum += (eta / xi) * e;
            }
        }
    }
    n.mass *= scale;
    n.dxFracSq *= scale;
    n.uySq *= scale;
    n.antiYSq *= scale;
    n.momentum *= scale;
    return n;
}

StateNorms quadratic_norms(const Field& u, double alpha) {
    return quadratic_norms(transform(u), alpha);
}

double mass(const Field& u) {
    double s = 0.0;
    for (long k = 0; k < u.size(); ++k) s += u.data()[k] * u.data()[k];
    return s * u.grid().cell_area();
}

double momentum(const Field& u) {
    require_zero_x_mean(u);
    Field w = antideriv_x(dy(u));
    double s = 0.0;
    for (long k = 0; k < u.size(); ++k) s += u.data()[k] * w.data()[k];
    return s * u.grid().cell_area();
}

double lp_norm_pow(const Field& u, double p) {
    double s = 0.0;
    for (long k = 0; k < u.size(); ++k) s += abs_pow_p1(u.data()[k], p);
    return s * u.grid().cell_area();
}

double k_j(const Field& u, double p) { return lp_norm_pow(u, p) / (p + 1.0); }

double sup_norm(const Field& u) { return u.max_abs(); }

double energy(const Field& u, const PhysicalParams& prm) {
    require_zero_x_mean(u);
    const StateNorms n = quadratic_norms(u, prm.alpha);
    return 0.5 * (n.dxFracSq - prm.eps * n.antiYSq) - prm.mu1 * k_j(u, prm.p1) -
           prm.mu2 * k_j(u, prm.p2);
}

double i_func(const Field& u, const PhysicalParams& prm) {
    require_zero_x_mean(u);
    const StateNorms n = quadratic_norms(u, prm.alpha);
    return 0.5 * n.xSq();
}

double n_func(const Field& u, const PhysicalParams& prm) {
    return prm.mu1 * lp_norm_pow(u, prm.p1) + prm.mu2 * lp_norm_pow(u, prm.p2);
}

double nehari(const Field& u, const PhysicalParams& prm) {
    return 2.0 * i_func(u, prm) - n_func(u, prm);
}

double action(const Field& u, const PhysicalParams& prm) {
    return i_func(u, prm) - prm.mu1 * k_j(u, prm.p1) - prm.mu2 * k_j(u, prm.p2);
}

double s0(const Field& u, const PhysicalParams& prm) {
    // r = p1 when mu2 < 0, r = p2 when mu2 > 0; mu2 == 0 defaults to p1
    const double r = prm.mu2 > 0.0 ? prm.p2 : prm.p1;
    return action(u, prm) - nehari(u, prm) / (r + 1.0);
}

double k_tilde(const Field& u, const PhysicalParams& prm) {
    return prm.psi1() * prm.mu1 * k_j(u, prm.p1) + prm.psi2() * prm.mu2 * k_j(u, prm.p2);
}

double r_functional(const StateNorms& n, double k1, double k2, const PhysicalParams& prm,
                    double b, double d) {
    if (b < 0.0 || d < 0.0) fail(ErrorCode::InvalidParams, "r_functional: b, d must be >= 0");
    return prm.alpha * b * n.dxFracSq + (d - b) * n.antiYSq -
           (b + d) * (prm.psi1() * prm.mu1 * k1 + prm.psi2() * prm.mu2 * k2);
}

double r_functional(const Field& u, const PhysicalParams& prm, double b, double d) {
    require_zero_x_mean(u);
    const StateNorms n = quadratic_norms(u, prm.alpha);
    return r_functional(n, k_j(u, prm.p1), k_j(u, prm.p2), prm, b, d);
}

double sobolev_quotient(const Field& u, double p, double alpha) {
    const StateNorms n = quadratic_norms(u, alpha);
    const double l2 = std::sqrt(n.mass);
    const double dxn = std::sqrt(n.dxFracSq);
    const double ayn = std::sqrt(n.antiYSq);
    if (l2 < 1e-14 || dxn < 1e-14 || ayn < 1e-14)
        fail(ErrorCode::DegenerateField, "sobolev_quotient: a denominator norm is below 1e-14");
    const PhysicalParams tmp{alpha, p, p, 0.0, 0.0, -1};
    const double cp = tmp.c_p(p);
    const double denom = std::pow(l2, 2.0 * cp) * std::pow(dxn, (p - 1.0) / alpha) *
                         std::pow(ayn, (p - 1.0) / 2.0);
    return lp_norm_pow(u, p) / denom;
}

SharpConstant sharp_constant(double groundStateMass, double groundStateAction, double p,
                             double alpha, double tol) {
    if (!(groundStateMass > 0.0) || !(groundStateAction > 0.0))
        fail(ErrorCode::InvalidParams, "sharp_constant: ground-state mass and action must be > 0");
    const PhysicalParams tmp{alpha, p, p, 0.0, 0.0, -1};
    const double kp = tmp.k_p(p);
    const double cp = tmp.c_p(p);
    const double cpPrime = cp - 0.5 * (p - 1.0);
    const double common = (1.0 / alpha) * (p - 1.0) / (p + 1.0);
    const double inv1 = common * std::pow(kp, cpPrime) * std::pow(0.5 * alpha, 0.25 * (p - 1.0)) *
                        std::pow(groundStateMass, 0.5 * (p - 1.0));
    const double inv2 = common * std::pow(kp, cp) * std::pow(2.0 / alpha, 0.25 * (p - 1.0)) *
                        std::pow(groundStateAction, 0.5 * (p - 1.0));
    SharpConstant out;
    out.rho = 1.0 / inv1;
    out.rhoAlt = 1.0 / inv2;
    out.relDiff = rel_mismatch(out.rho, out.rhoAlt);
    if (out.relDiff > tol)
        fail(ErrorCode::InconsistentGroundState,
             "sharp_constant: the two closed forms disagree (rel diff " +
                 std::to_string(out.relDiff) + ")");
    return out;
}

std::vector<double> pohozaev_residuals_from_norms(const StateNorms& n, double k1, double k2,
                                                  const PhysicalParams& prm) {
    const double a = prm.alpha;
    if (prm.single_power()) {
        const double p = prm.p1;
        return {
            rel_mismatch(2.0 * n.antiYSq, a * n.dxFracSq),
            rel_mismatch(a * n.dxFracSq, (p - 1.0) * prm.mu1 * k1),
            rel_mismatch(n.dxFracSq, n.mass / prm.k_p(p)),
        };
    }
    const double r1 = 4.0 + 0.5 * (prm.p1 + 3.0) * (a - 2.0);
    const double r2 = 4.0 + 0.5 * (prm.p2 + 3.0) * (a - 2.0);
    return {
        rel_mismatch(a * n.dxFracSq, 2.0 * n.antiYSq),
        rel_mismatch(n.antiYSq, prm.psi1() * prm.mu1 * k1 + prm.psi2() * prm.mu2 * k2),
        rel_mismatch(prm.psi1() * n.mass, 0.5 * r1 * n.dxFracSq - (prm.p2 - prm.p1) * prm.mu2 * k2),
        rel_mismatch(prm.psi2() * n.mass, 0.5 * r2 * n.dxFracSq - (prm.p1 - prm.p2) * prm.mu1 * k1),
    };
}

std::vector<double> pohozaev_residuals(const Field& phi, const PhysicalParams& prm) {
    const StateNorms n = quadratic_norms(phi, prm.alpha);
    return pohozaev_residuals_from_norms(n, k_j(phi, prm.p1), k_j(phi, prm.p2), prm);
}

DiagnosticsRecord DiagnosticsRecord::compute(const Field& u, const PhysicalParams& prm) {
    const StateNorms n = quadratic_norms(u, prm.alpha);
    const double kj1 = k_j(u, prm.p1);
    const double kj2 = k_j(u, prm.p2);
    DiagnosticsRecord r;
    r.mass = n.mass;
    r.momentum = n.momentum;
    r.k1 = kj1;
    r.k2 = kj2;
    r.iFunc = 0.5 * n.xSq();
    r.energy = 0.5 * (n.dxFracSq - prm.eps * n.antiYSq) - prm.mu1 * kj1 - prm.mu2 * kj2;
    r.nFunc = prm.mu1 * (prm.p1 + 1.0) * kj1 + prm.mu2 * (prm.p2 + 1.0) * kj2;
    r.nehari = 2.0 * r.iFunc - r.nFunc;
    r.action = r.iFunc - prm.mu1 * kj1 - prm.mu2 * kj2;
    const double rExp = prm.mu2 > 0.0 ? prm.p2 : prm.p1;
    r.s0 = r.action - r.nehari / (rExp + 1.0);
    r.kTilde = prm.psi1() * prm.mu1 * kj1 + prm.psi2() * prm.mu2 * kj2;
    r.xdotNormSq = n.xdotSq();
    r.xNormSq = n.xSq();
    r.supNorm = u.max_abs();
    r.uyNormSq = n.uySq;
    r.antiYNormSq = n.antiYSq;
    return r;
}

const std::vector<std::string>& DiagnosticsRecord::csv_columns() {
    static const std::vector<std::string> cols = {
        "mass",       "energy",  "momentum", "iFunc",    "k1",       "k2",
        "nFunc",      "nehari",  "action",   "s0",       "kTilde",   "xdotNormSq",
        "xNormSq",    "supNorm", "uyNormSq", "antiYNormSq"};
    return cols;
}

std::vector<double> DiagnosticsRecord::csv_values() const {
    return {mass,   energy, momentum, iFunc,      k1,      k2,      nFunc,    nehari,
            action, s0,     kTilde,   xdotNormSq, xNormSq, supNorm, uyNormSq, antiYNormSq};
}

} // namespace gkp
