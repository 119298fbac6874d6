#pragma once

#include <optional>
#include <vector>

#include "gkp/functionals.hpp"
#include "gkp/grid.hpp"
#include "gkp/params.hpp"

namespace gkp {

// Shared solver knobs. tol is the L2 residual target of the discrete
// solitary-wave equation ||L v - dealias(f(v))||. gamma = 0 selects the
// standard p/(p-1) stabilization exponent.
struct PetviashviliConfig {
    double tol = 1e-10;
    int maxIter = 2000;
    double gamma = 0.0;
    double relaxation = 1.0;
    // |profile| on the box edge relative to the peak: warn beyond the first
    // threshold, refuse (BoundaryContamination) beyond the second. Localized
    // KP profiles decay algebraically, so the warn level trips on any box of
    // practical size; the hard failure marks a genuinely undersized box.
    double boundaryWarnRatio = 1e-6;
    double boundaryFailRatio = 1e-2;
    double collapseTol = 1e-12;
    double energyFloor = -1e6; // normalized flow: FlowDiverges below this
};

struct GroundStateResult {
    Field profile;
    double residualNorm = 0.0;
    double actionValue = 0.0; // S (or S_c; for the normalized flow: E)
    int iterations = 0;
    std::vector<double> pohozaevResiduals;
    bool converged = false;

    double speed = 1.0;
    double lastStabilization = 0.0; // Petviashvili s-factor at the final iterate
    double boundaryRatio = 0.0;
    bool boundaryWarning = false;
    bool monotoneWarning = false; // residual grew after iteration 10
    std::vector<double> residualHistory;
};

// Petviashvili iteration for the single-power solitary-wave equation
//   (c v + D_x^{2a} v - mu |v|^{p-1} v)_xx + v_yy = 0
// as the spectral fixed point  v^ <- s^gamma f^(v) / L^,
// L^ = c + |xi|^{2a} + eta^2/xi^2,  s = <L v, v>/<f(v), v>.
GroundStateResult petviashvili(double p, double alpha, const GridSpec& grid,
                               const PetviashviliConfig& cfg, double mu = 1.0, double speedC = 1.0,
                               const Field* init = nullptr);

// Nehari-constrained descent for combined nonlinearities: preconditioned
// gradient of S with an amplitude rescale to P(lambda u) = 0 after each step.
GroundStateResult nehari_ground_state(const PhysicalParams& prm, const GridSpec& grid,
                                      const Field* init, const PetviashviliConfig& cfg,
                                      double speedC = 1.0);

// Mass-constrained minimization of E (candidate for d_rho): projected
// gradient flow with renormalization to M(u) = rho after each step.
GroundStateResult normalized_ground_state(const PhysicalParams& prm, const GridSpec& grid,
                                          double rho, const PetviashviliConfig& cfg,
                                          const Field* init = nullptr);

// speed-c ground state; c = 1 reduces to the solvers above
GroundStateResult speed_c_ground_state(double c, const PhysicalParams& prm, const GridSpec& grid,
                                       const PetviashviliConfig& cfg);

// amplitude rescale u -> lambda u with P(lambda u) = 0 (smallest positive root)
double nehari_scale(const Field& u, const PhysicalParams& prm, double speedC = 1.0);

// --- closed-form reference solutions ----------------------------------------

struct Grid1D {
    int n = 0;
    double L = 0.0;
    double h() const { return L / n; }
    double x(int i) const { return -0.5 * L + i * h(); }
};

struct GardnerSoliton {
    std::vector<double> profile;
    double speed = 0.0; // A*B0
    double R = 0.0;
};

// u(x) = 6A / (1 + R cosh(sqrt(A) (x - x0))), R = sqrt(1 - 6 varsigma A)
GardnerSoliton gardner_soliton_1d(double A, double varsigma, double B0, double x0,
                                  const Grid1D& grid);

// max residual of the integrated Gardner traveling-wave equation in the
// B0 = 1 normalization: -A u + u'' + u^2/2 - (varsigma/3) u^3, spectral u''
double gardner_residual_max(const std::vector<double>& u, const Grid1D& grid, double A,
                            double varsigma);

struct ZaitsevWave {
    Field field;
    double speed = 0.0;
    double delta = 0.0; // snapped to a multiple of 2 pi / Ly
};

// KP-I wave localized in x, periodic in y:
// psi = 12 b0^2 (1 - beta cosh(b0 x) cos(delta y)) / (cosh(b0 x) - beta cos(delta y))^2,
// speed c = b0^2 (4 - beta^2)/(1 - beta^2).
ZaitsevWave zaitsev_profile(double beta0, double beta, const GridSpec& grid);

} // namespace gkp
