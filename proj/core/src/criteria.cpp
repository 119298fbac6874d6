#include "gkp/criteria.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace gkp {

namespace {

struct PowerTerm {
    double p = 0.0;
    double mu = 0.0;
    double rho = 0.0;
    double e = 0.0; // (a+2)(p-1)/(2a)
    double coeff = 0.0; // mu rho/(p+1) M^{c_p}
};

std::pair<PowerTerm, PowerTerm> h_terms(const PhysicalParams& prm, double massU0, double rho1,
                                        double rho2) {
    auto mk = [&](double p, double mu, double rho) {
        PowerTerm t;
        t.p = p;
        t.mu = mu;
        t.rho = rho;
        t.e = (prm.alpha + 2.0) * (p - 1.0) / (2.0 * prm.alpha);
        t.coeff = mu * rho / (p + 1.0) * std::pow(massU0, prm.c_p(p));
        return t;
    };
    return {mk(prm.p1, prm.mu1, rho1), mk(prm.p2, prm.mu2, rho2)};
}

constexpr double kCritTol = 1e-9;

} // namespace

const char* regime_name(Regime r) {
    switch (r) {
        case Regime::subcritical: return "subcritical";
        case Regime::critical: return "critical";
        case Regime::supercriticalI: return "supercritical-i";
        case Regime::supercriticalII: return "supercritical-ii";
        case Regime::unclassified: return "unclassified";
    }
    return "unclassified";
}

const char* verdict_name(Verdict v) {
    switch (v) {
        case Verdict::boundedGuaranteed: return "boundedGuaranteed";
        case Verdict::hypothesesNotMet: return "hypothesesNotMet";
        case Verdict::indeterminate: return "indeterminate";
    }
    return "indeterminate";
}

const char* lambda_membership_name(LambdaMembership m) {
    switch (m) {
        case LambdaMembership::inLambdaPlus: return "inLambdaPlus";
        case LambdaMembership::inLambdaMinus: return "inLambdaMinus";
        case LambdaMembership::neither: return "neither";
    }
    return "neither";
}

double threshold_h(double z, const PhysicalParams& prm, double massU0, double rho1, double rho2) {
    if (z < 0.0) fail(ErrorCode::InvalidParams, "threshold_h: z must be >= 0");
    auto [t1, t2] = h_terms(prm, massU0, rho1, rho2);
    double h = 0.5 * z * z;
    if (t1.coeff != 0.0) h -= t1.coeff * std::pow(z, t1.e);
    if (t2.coeff != 0.0) h -= t2.coeff * std::pow(z, t2.e);
    return h;
}

double threshold_h_prime(double z, const PhysicalParams& prm, double massU0, double rho1,
                         double rho2) {
    if (z < 0.0) fail(ErrorCode::InvalidParams, "threshold_h_prime: z must be >= 0");
    auto [t1, t2] = h_terms(prm, massU0, rho1, rho2);
    double hp = z;
    if (t1.coeff != 0.0) hp -= t1.coeff * t1.e * std::pow(z, t1.e - 1.0);
    if (t2.coeff != 0.0) hp -= t2.coeff * t2.e * std::pow(z, t2.e - 1.0);
    return hp;
}

CriticalRadius z0_and_z1(const PhysicalParams& prm, double massU0, double rho1, double rho2) {
    prm.validate();
    if (!(massU0 > 0.0)) fail(ErrorCode::InvalidParams, "z0_and_z1: mass must be > 0");
    auto [t1, t2] = h_terms(prm, massU0, rho1, rho2);
    const PowerTerm& lo = t1.p <= t2.p ? t1 : t2;
    const PowerTerm& hi = t1.p <= t2.p ? t2 : t1;
    const double sc = prm.s_c();

    auto hprime = [&](double z) { return threshold_h_prime(z, prm, massU0, rho1, rho2); };

    CriticalRadius out;
    if (std::abs(lo.p - sc) <= kCritTol && hi.p > sc + kCritTol) {
        // case (i): h'(z) = A z - B z^{e_hi - 1}
        out.caseLabel = 1;
        const double A = 1.0 - 2.0 * lo.coeff; // e_lo = 2 merges into the quadratic term
        const double Bco = hi.coeff * hi.e;    // = rho mu/(p+1) (p-1)(a+2)/(2a) M^{c_p}
        if (!(A > 0.0))
            fail(ErrorCode::NoPositiveRoot,
                 "z0: criticality condition (3.1) fails, h' has no positive root");
        if (!(Bco > 0.0))
            fail(ErrorCode::NoPositiveRoot, "z0: vanishing supercritical term, z0 -> infinity");
        out.zClosedForm = std::pow(A / Bco, 1.0 / (hi.e - 2.0));
        out.zPaperForm = std::pow(A / Bco, (sc - 1.0) / (2.0 * hi.p - sc + 1.0));

        // bracket and bisect the root of h'
        double zHi = *out.zClosedForm * 2.0;
        while (hprime(zHi) > 0.0 && zHi < 1e12) zHi *= 2.0;
        double loZ = 0.0, hiZ = zHi;
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (loZ + hiZ);
            if (hprime(mid) > 0.0)
                loZ = mid;
            else
                hiZ = mid;
        }
        out.zRoot = 0.5 * (loZ + hiZ);
        out.hPrimeAtRoot = hprime(out.zRoot);
        out.hMax = threshold_h(out.zRoot, prm, massU0, rho1, rho2);
        out.energyThreshold = out.hMax;
        const double relPaper = std::abs(*out.zPaperForm - out.zRoot) / out.zRoot;
        const double relDirect = std::abs(*out.zClosedForm - out.zRoot) / out.zRoot;
        out.closedFormDisagreement = relPaper > 1e-6 || relDirect > 1e-6;
        return out;
    }

    if (lo.p > sc + kCritTol) {
        // case (ii): h~(z) = h'(z)/z = 1 - sum B_j z^{e_j - 2}, decreasing
        out.caseLabel = 2;
        const double B1 = lo.coeff * lo.e;
        const double B2 = hi.coeff * hi.e;
        if (!(B1 > 0.0) && !(B2 > 0.0))
            fail(ErrorCode::NoPositiveRoot, "z1: both nonlinear terms vanish");
        auto htilde = [&](double z) {
            return 1.0 - B1 * std::pow(z, lo.e - 2.0) - B2 * std::pow(z, hi.e - 2.0);
        };
        // monotonicity scan before bisection
        double prev = htilde(1e-8);
        for (int i = 1; i <= 64; ++i) {
            const double z = 1e-8 * std::pow(1e12, i / 64.0);
            const double v = htilde(z);
            if (v > prev + 1e-12 * std::abs(prev))
                fail(ErrorCode::SolverFailure, "z1: h'(z)/z is not decreasing");
            prev = v;
        }
        double zHi = 1.0;
        while (htilde(zHi) > 0.0 && zHi < 1e12) zHi *= 2.0;
        if (htilde(zHi) > 0.0) fail(ErrorCode::NoPositiveRoot, "z1: no root found up to 1e12");
        double loZ = 0.0, hiZ = zHi;
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (loZ + hiZ);
            if (htilde(mid) > 0.0)
                loZ = mid;
            else
                hiZ = mid;
        }
        out.zRoot = 0.5 * (loZ + hiZ);
        out.hPrimeAtRoot = hprime(out.zRoot);
        out.hMax = threshold_h(out.zRoot, prm, massU0, rho1, rho2);
        // theorem's energy bound uses the smaller exponent
        out.energyThreshold = (lo.e - 2.0) / (2.0 * lo.e) * out.zRoot * out.zRoot;
        return out;
    }

    fail(ErrorCode::InvalidParams,
         "z0_and_z1: exponents do not match case (i) (p_low = s_c) or case (ii) (p_low > s_c)");
}

ThresholdReport classify_energy_subcritical(const Field& u0, const PhysicalParams& prm,
                                            const SharpConstantOracle& oracle) {
    prm.validate();
    ThresholdReport rep;
    const StateNorms n = quadratic_norms(u0, prm.alpha);
    rep.e0 = energy(u0, prm);
    rep.xdot0 = std::sqrt(n.xdotSq());
    const double massU0 = n.mass;
    const double sc = prm.s_c();

    const bool muOk = prm.mu1 > 0.0 && prm.mu2 > 0.0;
    rep.hypotheses.emplace_back("mu1Positive", prm.mu1 > 0.0);
    rep.hypotheses.emplace_back("mu2Positive", prm.mu2 > 0.0);

    const double pLo = std::min(prm.p1, prm.p2);
    const double pHi = std::max(prm.p1, prm.p2);

    if (pHi < sc - kCritTol) {
        rep.regime = Regime::subcritical;
        rep.hypotheses.emplace_back("exponentsSubcritical", true);
        rep.verdict = muOk ? Verdict::boundedGuaranteed : Verdict::hypothesesNotMet;
        return rep;
    }

    // sharp constants are needed from here on
    double rho1 = 0.0, rho2 = 0.0;
    if (muOk) {
        rho1 = oracle(prm.p1).value();
        rho2 = prm.p2 == prm.p1 ? rho1 : oracle(prm.p2).value();
        auto [t1, t2] = h_terms(prm, massU0, rho1, rho2);
        rep.hParams = {{t1.coeff, t1.e}, {t2.coeff, t2.e}};
    }

    if (std::abs(pHi - sc) <= kCritTol) {
        // every exponent is either subcritical or exactly critical
        rep.regime = Regime::critical;
        if (!muOk) {
            rep.verdict = Verdict::hypothesesNotMet;
            return rep;
        }
        double A = 1.0;
        auto [t1, t2] = h_terms(prm, massU0, rho1, rho2);
        for (const PowerTerm& t : {t1, t2})
            if (std::abs(t.p - sc) <= kCritTol) A -= 2.0 * t.coeff;
        rep.hypotheses.emplace_back("criticalityInequality", A > 0.0);
        rep.verdict = A > 0.0 ? Verdict::boundedGuaranteed : Verdict::hypothesesNotMet;
        return rep;
    }

    if (std::abs(pLo - sc) <= kCritTol) {
        rep.regime = Regime::supercriticalI;
    } else if (pLo > sc + kCritTol) {
        rep.regime = Regime::supercriticalII;
    } else {
        // mixed sub/supercritical: outside Thms 3.2/3.3
        rep.regime = Regime::unclassified;
        rep.verdict = Verdict::indeterminate;
        return rep;
    }

    if (!muOk) {
        rep.verdict = Verdict::hypothesesNotMet;
        return rep;
    }

    try {
        const CriticalRadius cr = z0_and_z1(prm, massU0, rho1, rho2);
        if (cr.caseLabel == 1)
            rep.z0 = cr.zRoot;
        else
            rep.z1 = cr.zRoot;
        rep.hMax = cr.hMax;
        rep.closedFormDisagreement = cr.closedFormDisagreement;
        const bool sizeOk = rep.xdot0 < cr.zRoot;
        const bool energyOk = rep.e0 < cr.energyThreshold;
        rep.hypotheses.emplace_back("initialXdotBelowRadius", sizeOk);
        rep.hypotheses.emplace_back("initialEnergyBelowThreshold", energyOk);
        rep.verdict =
            sizeOk && energyOk ? Verdict::boundedGuaranteed : Verdict::hypothesesNotMet;
    } catch (const Error& e) {
        if (e.code() == ErrorCode::NoPositiveRoot) {
            rep.hypotheses.emplace_back("criticalRadiusExists", false);
            rep.verdict = Verdict::hypothesesNotMet;
        } else {
            throw;
        }
    }
    return rep;
}

double young_constant(double tau, double q1, double q2) {
    if (!(tau > 0.0)) fail(ErrorCode::InvalidParams, "young_constant: tau must be > 0");
    if (!(q2 > q1) || !(q1 > 2.0))
        fail(ErrorCode::InvalidParams,
             "young_constant: needs q2 > q1 > 2 for a finite constant");
    // maximize (a^{q1} - tau a^2)/a^{q2}; interior critical point:
    // a*^{q1-2} = tau (q2-2)/(q2-q1)
    const double aStar = std::pow(tau * (q2 - 2.0) / (q2 - q1), 1.0 / (q1 - 2.0));
    const double c = std::pow(aStar, 2.0 - q2) * tau * (q1 - 2.0) / (q2 - q1);

    // dense log-grid cross-check of the closed form
    double best = 0.0;
    for (int i = 0; i <= 2000; ++i) {
        const double a = aStar * std::pow(100.0, (i - 1000.0) / 1000.0);
        best = std::max(best, (std::pow(a, q1) - tau * a * a) / std::pow(a, q2));
    }
    if (!(best <= c * (1.0 + 1e-9) + 1e-300))
        fail(ErrorCode::SolverFailure, "young_constant: grid search exceeded the closed form");
    return c;
}

bool BlowupConditions::condition(const std::string& name) const {
    for (const auto& [n, v] : conditionsMet)
        if (n == name) return v;
    fail(ErrorCode::InvalidParams, "no blow-up condition named '" + name + "'");
}

namespace {

BlowupConditions evaluate_case_iii(double E0, double M0, const PhysicalParams& prm, double theta,
                                   double tau) {
    BlowupConditions out;
    out.caseLabel = BlowupCase::iii;
    out.theta = theta;
    out.tau = tau;
    const double p1 = prm.p1, p2 = prm.p2;
    out.aP1 = prm.mu1 / (2.0 * (p1 + 1.0)) * (theta * (p2 - 1.0) - p1 + 1.0);
    out.aP2 = prm.mu2 * prm.psi2() / (p2 + 1.0) * (1.0 - theta);

    const bool signsOk = prm.mu2 < 0.0 && prm.mu1 > 0.0;
    const bool thetaOk = theta > 0.0 && theta < 1.0;
    const bool expOk = p2 >= std::max(4.0 / theta + 1.0, p1);
    bool youngOk = p2 > p1; // exponents (p1+1, p2+1) need p2+1 > p1+1 > 2
    double cTau = 0.0;
    if (youngOk) {
        try {
            cTau = young_constant(tau, p1 + 1.0, p2 + 1.0);
        } catch (const Error&) {
            youngOk = false;
        }
    }
    out.cTau = cTau;
    const bool ineqEnergy = 0.5 * (p2 - 1.0) * theta * E0 + out.aP1 * tau * M0 <= 0.0;
    const bool ineqYoung = youngOk && out.aP1 * cTau + out.aP2 <= 0.0;

    out.conditionsMet = {{"signPattern", signsOk},   {"thetaInUnitInterval", thetaOk},
                         {"exponentCondition", expOk}, {"youngApplicable", youngOk},
                         {"energyMassInequality", ineqEnergy}, {"youngInequality", ineqYoung}};
    out.met = signsOk && thetaOk && expOk && youngOk && ineqEnergy && ineqYoung;
    return out;
}

} // namespace

BlowupConditions blowup_conditions(const Field& u0, const PhysicalParams& prm, BlowupCase c,
                                   std::optional<double> theta, std::optional<double> tau) {
    prm.validate();
    const double E0 = energy(u0, prm);
    const double M0 = mass(u0);
    BlowupConditions out;
    out.caseLabel = c;

    switch (c) {
        case BlowupCase::i: {
            out.conditionsMet = {{"mu2Positive", prm.mu2 > 0.0},
                                 {"energyNonpositive", E0 <= 0.0},
                                 {"exponentsAtLeastFive", prm.p2 >= prm.p1 && prm.p1 >= 5.0}};
            break;
        }
        case BlowupCase::ii: {
            out.conditionsMet = {{"mu1Negative", prm.mu1 < 0.0},
                                 {"energyNonpositive", E0 <= 0.0},
                                 {"exponentCondition", prm.p2 >= std::max(5.0, prm.p1)}};
            break;
        }
        case BlowupCase::iii: {
            if (theta && tau) return evaluate_case_iii(E0, M0, prm, *theta, *tau);
            // 50x50 log grids; the paper only asserts existence of (theta, tau),
            // so the first admissible pair wins
            std::vector<double> thetas, taus;
            if (theta)
                thetas = {*theta};
            else
                for (int i = 0; i < 50; ++i)
                    thetas.push_back(0.999 * std::pow(10.0, -3.0 + 3.0 * (i + 0.5) / 50.0));
            if (tau)
                taus = {*tau};
            else
                for (int i = 0; i < 50; ++i)
                    taus.push_back(std::pow(10.0, -6.0 + 12.0 * (i + 0.5) / 50.0));
            for (double th : thetas)
                for (double tu : taus) {
                    BlowupConditions cand = evaluate_case_iii(E0, M0, prm, th, tu);
                    if (cand.met) return cand;
                }
            out = evaluate_case_iii(E0, M0, prm, thetas.back(), taus.back());
            out.met = false;
            return out;
        }
    }
    out.met = true;
    for (const auto& [name, v] : out.conditionsMet) out.met = out.met && v;
    return out;
}

LambdaReport lambda_membership(const Field& u, const PhysicalParams& prm, double b, double d,
                               double mEstimate) {
    LambdaReport rep;
    rep.mEstimate = mEstimate;
    rep.actionValue = action(u, prm);
    rep.rValue = r_functional(u, prm, b, d);
    if (rep.actionValue < mEstimate)
        rep.membership = rep.rValue >= 0.0 ? LambdaMembership::inLambdaPlus
                                           : LambdaMembership::inLambdaMinus;
    else
        rep.membership = LambdaMembership::neither;
    return rep;
}

ExponentBoundsReport exponent_bounds_check(const PhysicalParams& prm, double b, double d) {
    if (b < 0.0 || d < 0.0)
        fail(ErrorCode::InvalidParams, "exponent_bounds_check: b, d must be >= 0");
    ExponentBoundsReport rep;
    const double a = prm.alpha;
    if (b + d > 0.0) {
        rep.lemma41Bound = 4.0 * std::max(d - b, a * b) / (b + d) + 1.0;
        rep.lemma41P1 = prm.p1 >= rep.lemma41Bound;
        rep.lemma41P2 = prm.p1 >= prm.p2 && prm.p2 >= rep.lemma41Bound;
    } else {
        rep.lemma41Bound = std::numeric_limits<double>::infinity();
    }
    rep.thm44Applicable = d >= b + 1.0;
    if (rep.thm44Applicable && b + d > 0.0) {
        rep.thm44Bound = 4.0 * std::max((d - b) / (b + d), a * b / (d + b - 1.0)) + 1.0;
        rep.thm44P1 = prm.p1 > rep.thm44Bound;
    }
    rep.thm47BValid = b > 1.0 / (a + 2.0);
    if (rep.thm47BValid) {
        rep.thm47Bound = 1.0 + 4.0 * a * b / ((a + 2.0) * b - 1.0);
        rep.thm47P1 = prm.p1 > rep.thm47Bound;
    }
    return rep;
}

InstabilitySetup instability_data(const GroundStateResult& phi, const PhysicalParams& prm,
                                  double b, double BD, double delta) {
    prm.validate();
    if (!phi.converged) fail(ErrorCode::InvalidParams, "instability_data: phi not converged");
    if (!(BD > 1.0) || BD > 1.2)
        fail(ErrorCode::InvalidParams, "instability_data: BD must lie in (1, 1.2]");
    if (!(b > 1.0 / (prm.alpha + 2.0)))
        fail(ErrorCode::InvalidParams, "instability_data: b must exceed 1/(alpha+2)");
    if (!(delta > 0.0)) fail(ErrorCode::InvalidParams, "instability_data: delta must be > 0");

    InstabilitySetup setup;
    setup.mEstimate = phi.actionValue;
    setup.B = std::sqrt(BD); // equal split minimizes resampling error
    setup.D = setup.B;
    setup.w = dilate_resample(phi.profile, setup.B, setup.D, std::sqrt(BD));

    // the dilation compresses the profile, stretching its spectrum; reject if
    // a measurable energy fraction would be lost to the 2/3 truncation
    {
        Spectrum ws = transform(setup.w);
        double total = 0.0;
        for (long k = 0; k < ws.size(); ++k) total += std::norm(ws.data()[k]);
        apply_dealias_inplace(ws);
        project_zero_x_mean_inplace(ws);
        double kept = 0.0;
        for (long k = 0; k < ws.size(); ++k) kept += std::norm(ws.data()[k]);
        const double loss = total > 0.0 ? 1.0 - kept / total : 0.0;
        if (loss > 1e-4)
            fail(ErrorCode::ResamplingError,
                 "instability_data: dilated profile leaves the resolved band (truncation loss " +
                     std::to_string(loss) + ")");
        setup.w = inverse_transform(ws);
    }

    const StateNorms nw = quadratic_norms(setup.w, prm.alpha);
    const double k1w = k_j(setup.w, prm.p1);
    const double k2w = k_j(setup.w, prm.p2);
    setup.actionW = 0.5 * nw.xSq() - prm.mu1 * k1w - prm.mu2 * k2w;

    double bCur = b;
    for (int doubling = 0; doubling <= 10; ++doubling) {
        const double dCur = (1.0 + prm.alpha) * bCur;
        const double rBD = r_functional(nw, k1w, k2w, prm, bCur, dCur);
        const double rBDm1 = dCur >= 1.0 ? r_functional(nw, k1w, k2w, prm, bCur, dCur - 1.0)
                                         : -1.0; // d-1 < 0: not usable
        const bool ok = rBD < 0.0 && setup.actionW < setup.mEstimate && rBDm1 > 0.0 &&
                        dCur >= bCur + 1.0;
        setup.searchTrace.push_back("b=" + std::to_string(bCur) + " d=" + std::to_string(dCur) +
                                    " R=" + std::to_string(rBD) +
                                    " Rm1=" + std::to_string(rBDm1) + (ok ? " ok" : " reject"));
        if (ok) {
            setup.b = bCur;
            setup.d = dCur;
            setup.rBD = rBD;
            setup.rBDm1 = rBDm1;
            setup.admissible = true;
            setup.bDoublings = doubling;
            break;
        }
        bCur *= 2.0;
    }
    if (!setup.admissible) {
        std::string msg = "instability_data: no admissible (b, d) after the b-search:";
        for (const std::string& line : setup.searchTrace) msg += "\n  " + line;
        fail(ErrorCode::NotAdmissible, msg);
    }

    Field diff = setup.w - phi.profile;
    const StateNorms nd = quadratic_norms(diff, prm.alpha);
    setup.deltaDistance = std::sqrt(nd.xSq());
    setup.deltaOk = setup.deltaDistance < delta;
    return setup;
}

StabilityProbe d_second_derivative(const PhysicalParams& prm, const std::vector<double>& cGrid,
                                   const GridSpec& grid, const PetviashviliConfig& cfg) {
    if (cGrid.size() != 3 && cGrid.size() != 5)
        fail(ErrorCode::InvalidParams, "d_second_derivative: need 3 or 5 speeds");
    std::vector<double> cs = cGrid;
    std::sort(cs.begin(), cs.end());
    const double h = cs[1] - cs[0];
    for (size_t i = 1; i + 1 < cs.size(); ++i)
        if (std::abs((cs[i + 1] - cs[i]) - h) > 1e-12)
            fail(ErrorCode::InvalidParams, "d_second_derivative: speeds must be equispaced");

    StabilityProbe probe;
    probe.h = h;
    probe.speeds = cs;
    for (double c : cs) {
        GroundStateResult r;
        try {
            r = speed_c_ground_state(c, prm, grid, cfg);
        } catch (const Error& e) {
            fail(ErrorCode::SolverFailure,
                 "d_second_derivative: solver failed at c = " + std::to_string(c) + ": " +
                     e.what());
        }
        const double E = energy(r.profile, prm);
        const double M = mass(r.profile);
        probe.dValues.push_back(E + c * M);
        probe.solverResiduals.push_back(r.residualNorm);
    }
    if (cs.size() == 3) {
        probe.dSecond = (probe.dValues[0] - 2.0 * probe.dValues[1] + probe.dValues[2]) / (h * h);
    } else {
        probe.dSecond = (-probe.dValues[0] + 16.0 * probe.dValues[1] - 30.0 * probe.dValues[2] +
                         16.0 * probe.dValues[3] - probe.dValues[4]) /
                        (12.0 * h * h);
    }
    return probe;
}

} // namespace gkp
