#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "gkp/grid.hpp"
#include "gkp/operators.hpp"
#include "gkp/params.hpp"

namespace gkp {

// All integrals use the rectangle rule (spectrally exact for periodic
// band-limited integrands); quadratic norms are evaluated on the spectral
// side via Parseval with the same normalization.

// quadratic quantities of one state, all from a single forward transform
struct StateNorms {
    double mass = 0.0;      // ||u||^2
    double dxFracSq = 0.0;  // ||D_x^alpha u||^2
    double antiYSq = 0.0;   // ||dx^{-1} u_y||^2
    double uySq = 0.0;      // ||u_y||^2
    double momentum = 0.0;  // int u dx^{-1}u_y

    double xdotSq() const { return dxFracSq + antiYSq; }
    double xSq() const { return mass + dxFracSq + antiYSq; }
};

StateNorms quadratic_norms(const Spectrum& s, double alpha);
StateNorms quadratic_norms(const Field& u, double alpha);

double mass(const Field& u);
double momentum(const Field& u);                         // requires zero x-mean
double k_j(const Field& u, double p);                    // int |u|^{p+1}/(p+1)
double lp_norm_pow(const Field& u, double p);            // int |u|^{p+1}
double sup_norm(const Field& u);

double energy(const Field& u, const PhysicalParams& prm);
double i_func(const Field& u, const PhysicalParams& prm);
double n_func(const Field& u, const PhysicalParams& prm); // int (mu1|u|^{p1+1} + mu2|u|^{p2+1})
double nehari(const Field& u, const PhysicalParams& prm); // P = 2I - N
double action(const Field& u, const PhysicalParams& prm); // S = I - K
double s0(const Field& u, const PhysicalParams& prm);     // S - P/(r+1), r per sign of mu2
double k_tilde(const Field& u, const PhysicalParams& prm); // psi1 mu1 K1 + psi2 mu2 K2

// R_{b,d}(u) = a b ||D_x^a u||^2 + (d-b) ||dx^{-1}u_y||^2
//              - (b+d) (psi1 mu1 K1 + psi2 mu2 K2)
double r_functional(const Field& u, const PhysicalParams& prm, double b, double d);
double r_functional(const StateNorms& n, double k1, double k2, const PhysicalParams& prm,
                    double b, double d);

// anisotropic quotient ||u||_{p+1}^{p+1} / (||u||^{2c_p} ||D_x^a u||^{(p-1)/a}
//                                           ||dx^{-1}u_y||^{(p-1)/2})
double sobolev_quotient(const Field& u, double p, double alpha);

// the two closed forms of the optimal constant rho_p, computed from
// Pohozaev-verified ground-state data (mass and action of the homogeneous
// ground state)
struct SharpConstant {
    double rho = 0.0;     // from ||phi||^{p-1}
    double rhoAlt = 0.0;  // from m^{(p-1)/2}
    double relDiff = 0.0;

    double value() const { return rho; }
};

SharpConstant sharp_constant(double groundStateMass, double groundStateAction, double p,
                             double alpha, double tol = 1e-3);

// Pohozaev identity residuals. Homogeneous case (mu2 == 0): the three
// identities 2B = aA, aA = ((p-1)/(p+1)) int|u|^{p+1} (mu-weighted), A =
// k_p^{-1} M. Combined case: the four-identity set with
// r_j = 4 + (p_j+3)(a-2)/2. Each entry is |lhs-rhs| / max(|lhs|,|rhs|).
std::vector<double> pohozaev_residuals(const Field& phi, const PhysicalParams& prm);
std::vector<double> pohozaev_residuals_from_norms(const StateNorms& n, double k1, double k2,
                                                  const PhysicalParams& prm);

// one full diagnostics sample; serializes to a flat JSON object / CSV row
struct DiagnosticsRecord {
    double mass = 0.0;
    double energy = 0.0;
    double momentum = 0.0;
    double iFunc = 0.0;
    double k1 = 0.0;
    double k2 = 0.0;
    double nFunc = 0.0;
    double nehari = 0.0;
    double action = 0.0;
    double s0 = 0.0;
    double kTilde = 0.0;
    double xdotNormSq = 0.0;
    double xNormSq = 0.0;
    double supNorm = 0.0;
    // both transverse norms are tracked for the blow-up report
    double uyNormSq = 0.0;
    double antiYNormSq = 0.0; // ||dx^{-1} u_y||^2

    static DiagnosticsRecord compute(const Field& u, const PhysicalParams& prm);
    static const std::vector<std::string>& csv_columns();
    std::vector<double> csv_values() const;
};

} // namespace gkp
