#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gkp/ground_state.hpp"

namespace gkp {

// ---------------------------------------------------------------------------
// Boundedness thresholds. All of these live in the coercive-energy regime
// (eps = -1 in the implemented sign convention), where
//   E(u) >= h(||u||_Xdot),
//   h(z) = z^2/2 - sum_j (mu_j rho_j / (p_j+1)) M0^{c_{p_j}} z^{e_j},
//   e_j = (alpha+2)(p_j-1)/(2 alpha),  M0 = ||u_0||_{L2}^2.
// ---------------------------------------------------------------------------

enum class Regime { subcritical, critical, supercriticalI, supercriticalII, unclassified };
enum class Verdict { boundedGuaranteed, hypothesesNotMet, indeterminate };

const char* regime_name(Regime r);
const char* verdict_name(Verdict v);

double threshold_h(double z, const PhysicalParams& prm, double massU0, double rho1, double rho2);
double threshold_h_prime(double z, const PhysicalParams& prm, double massU0, double rho1,
                         double rho2);

struct CriticalRadius {
    int caseLabel = 0;       // 1: p_low = s_c < p_high, 2: p_low > s_c
    double zRoot = 0.0;      // numerical root of h'
    double hPrimeAtRoot = 0.0;
    double hMax = 0.0;       // h at the root
    double energyThreshold = 0.0; // theorem's bound on E(u_0)
    std::optional<double> zClosedForm; // direct solution of h'(z) = 0 (case 1)
    std::optional<double> zPaperForm;  // the (s_c-1)/(2 p_2 - s_c + 1) exponent form
    bool closedFormDisagreement = false; // flagged, not resolved
};

// critical radius z0 (case p_low = s_c) or z1 (case p_low > s_c); throws
// NoPositiveRoot when the respective root degenerates (e.g. mu_high -> 0)
CriticalRadius z0_and_z1(const PhysicalParams& prm, double massU0, double rho1, double rho2);

struct ThresholdReport {
    Regime regime = Regime::unclassified;
    // the two (coefficient, exponent) pairs of h's nonlinear terms
    std::vector<std::pair<double, double>> hParams;
    std::optional<double> z0;
    std::optional<double> z1;
    std::optional<double> hMax;
    double e0 = 0.0;    // E(u_0)
    double xdot0 = 0.0; // ||u_0||_Xdot
    Verdict verdict = Verdict::indeterminate;
    bool closedFormDisagreement = false;
    std::vector<std::pair<std::string, bool>> hypotheses;
};

// sharp-constant provider for a homogeneous exponent p (ground-state backed)
using SharpConstantOracle = std::function<SharpConstant(double p)>;

ThresholdReport classify_energy_subcritical(const Field& u0, const PhysicalParams& prm,
                                            const SharpConstantOracle& oracle);

// minimal C with a^{q1} <= tau a^2 + C a^{q2} for all a > 0 (needs q2 > q1 > 2)
double young_constant(double tau, double q1, double q2);

enum class BlowupCase { i, ii, iii };

struct BlowupConditions {
    BlowupCase caseLabel = BlowupCase::i;
    double theta = 0.0;
    double tau = 0.0;
    double cTau = 0.0;
    double aP1 = 0.0;
    double aP2 = 0.0;
    std::vector<std::pair<std::string, bool>> conditionsMet;
    bool met = false;

    bool condition(const std::string& name) const;
};

// evaluates the inequalities of the selected blow-up case; for case iii the
// Young inequality is applied with exponents (p1+1, p2+1) as in the proof.
// theta/tau unset triggers a 50x50 log-grid search, first admissible pair wins.
BlowupConditions blowup_conditions(const Field& u0, const PhysicalParams& prm, BlowupCase c,
                                   std::optional<double> theta = std::nullopt,
                                   std::optional<double> tau = std::nullopt);

enum class LambdaMembership { inLambdaPlus, inLambdaMinus, neither };
const char* lambda_membership_name(LambdaMembership m);

struct LambdaReport {
    LambdaMembership membership = LambdaMembership::neither;
    double actionValue = 0.0;
    double rValue = 0.0;
    double mEstimate = 0.0;
};

LambdaReport lambda_membership(const Field& u, const PhysicalParams& prm, double b, double d,
                               double mEstimate);

struct ExponentBoundsReport {
    double lemma41Bound = 0.0; // 4 max{d-b, a b}/(b+d) + 1
    bool lemma41P1 = false;
    bool lemma41P2 = false;
    double thm44Bound = 0.0; // 4 max{(d-b)/(b+d), a b/(d+b-1)} + 1 (needs d >= b+1)
    bool thm44Applicable = false;
    bool thm44P1 = false;
    double thm47Bound = 0.0; // 1 + 4 a b / ((a+2) b - 1), needs b > 1/(a+2)
    bool thm47BValid = false;
    bool thm47P1 = false;
};

ExponentBoundsReport exponent_bounds_check(const PhysicalParams& prm, double b, double d);

struct InstabilitySetup {
    double b = 0.0;
    double d = 0.0; // (1 + alpha) b
    double B = 0.0;
    double D = 0.0;
    Field w; // sqrt(BD) phi(Bx, Dy), spectrally resampled
    double rBD = 0.0;
    double rBDm1 = 0.0;
    double actionW = 0.0;
    double mEstimate = 0.0;
    bool admissible = false; // rBD < 0 and actionW < m and rBDm1 > 0
    double deltaDistance = 0.0; // ||w - phi||_X
    bool deltaOk = false;
    int bDoublings = 0;
    std::vector<std::string> searchTrace;
};

// builds the blow-up initial datum of the instability construction; if the
// (b, d) pair is not admissible the b parameter is doubled (up to 2^10)
InstabilitySetup instability_data(const GroundStateResult& phi, const PhysicalParams& prm,
                                  double b, double BD, double delta);

struct StabilityProbe {
    double dSecond = 0.0; // centered second difference of d(c) = E + c M at c = 1
    double h = 0.0;
    std::vector<double> speeds;
    std::vector<double> dValues;
    std::vector<double> solverResiduals;
};

StabilityProbe d_second_derivative(const PhysicalParams& prm, const std::vector<double>& cGrid,
                                   const GridSpec& grid, const PetviashviliConfig& cfg);

} // namespace gkp
