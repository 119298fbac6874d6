#pragma once

#include <functional>
#include <string>
#include <vector>

#include "gkp/fft.hpp"
#include "gkp/functionals.hpp"
#include "gkp/grid.hpp"
#include "gkp/params.hpp"

namespace gkp {

// Spectral form of the evolution:
//   u^_t = i Omega u^ - i xi f^(u),  Omega = xi |xi|^{2a} - eps eta^2/xi,
// with the xi=0 plane pinned to zero. The linear part is advanced by its
// exact exponential (integrating factor); ETD-RK4 is available as an option.
enum class Scheme { IFRK4, ETDRK4 };

enum class Termination { completed, blowupDetected, nanDetected };
const char* termination_name(Termination t);

struct TimeStepperConfig {
    double dt = 0.0;   // <= 0 selects 0.4 / max|Omega| over the retained band,
                       // capped at 1e-3 * Lx, then rounded to land on tEnd
    double tEnd = 1.0;
    Scheme scheme = Scheme::IFRK4;
    bool dealias = true;
    int diagnosticsEvery = 10;
    double blowupNormCap = 0.0;      // <= 0: 1e6 * initial Xdot norm
    double bandGuardFraction = 0.10; // dealias-band edge energy fraction guard
};

// weight phi(y) with the derivatives the virial identity needs
struct VirialWeight {
    std::string name;
    std::function<double(double)> phi;
    std::function<double(double)> phi2; // phi''
    std::function<double(double)> phi4; // phi''''

    static VirialWeight y_squared();
};

struct WeightSeries {
    std::string name;
    std::vector<double> value; // V(t) = int phi(y) u^2
    std::vector<double> rhs;   // analytic d^2V/dt^2 at the same times
};

struct TrajectoryDiagnostics {
    std::vector<double> times;
    std::vector<DiagnosticsRecord> records;
    std::vector<WeightSeries> virial;
    std::vector<double> xMoment;    // int x u^2 (box-centered x)
    std::vector<double> xMomentRhs; // analytic d/dt of the x moment
    std::vector<double> bandEdge;   // outer-shell spectral energy fraction
    Termination terminated = Termination::completed;

    double dtUsed = 0.0;
    long stepsTaken = 0;
    double tFinal = 0.0;
    Field finalState;
};

// One trajectory, single thread of control. Exposed for tests that drive
// individual steps (e.g. time reversal with negative dt).
class Stepper {
public:
    Stepper(const GridSpec& grid, const PhysicalParams& prm, const TimeStepperConfig& cfg);

    void set_state(const Field& u); // projects to zero x-mean, dealiases
    Field state() const;
    const Spectrum& spectrum() const { return uhat_; }

    void step(double dt);
    double auto_dt() const { return autoDt_; }
    const PhysicalParams& params() const { return prm_; }

private:
    void nonlinear(const Spectrum& in, Spectrum& out); // -i xi dealias(f^(u))
    void etdrk4_tables(double dt);

    GridSpec grid_;
    PhysicalParams prm_;
    TimeStepperConfig cfg_;
    SpectralEngine engine_;
    Spectrum uhat_;
    std::vector<double> omega_;
    double autoDt_ = 0.0;

    // scratch
    Field phys_;
    Spectrum k1_, k2_, k3_, k4_, stage_;
    // etdrk4 coefficient tables for the current dt
    double etdDt_ = 0.0;
    std::vector<std::complex<double>> e1_, e2_, fQ_, f1_, f2_, f3_;
};

// single step of the configured scheme (spec-level convenience)
Field step(const Field& u, const PhysicalParams& prm, const TimeStepperConfig& cfg);

// called at every diagnostics sample with the current physical state
using SampleHook = std::function<void(double t, const Field& u)>;

// integrate to tEnd with diagnostics every diagnosticsEvery steps; early
// termination on the blow-up monitor or NaN is recorded, not thrown
TrajectoryDiagnostics run(const Field& u0, const PhysicalParams& prm,
                          const TimeStepperConfig& cfg,
                          const std::vector<VirialWeight>& weights = {VirialWeight::y_squared()},
                          const SampleHook& hook = {});

struct SeriesCheck {
    std::vector<double> times;   // interior sample times
    std::vector<double> measured; // finite differences of the stored series
    std::vector<double> analytic; // stored analytic right side
    double maxRelError = 0.0;    // normalized by the series scale
};

// centered second difference of V(t) against the analytic right side
SeriesCheck virial_series(const TrajectoryDiagnostics& traj, const std::string& weightName);
// centered first difference of the x moment against the analytic right side
SeriesCheck x_moment_series(const TrajectoryDiagnostics& traj);

struct BlowupReport {
    bool flagged = false;
    std::string reason;      // "normCap" or "resolutionLoss"
    double xdotGrowth = 1.0; // final / initial Xdot norm
    double antiYGrowth = 1.0; // final / initial ||dx^{-1} u_y||
    double uyGrowth = 1.0;    // final / initial ||u_y||
    double maxBandEdge = 0.0;
};

BlowupReport blowup_monitor(const TrajectoryDiagnostics& traj, double normCap = 0.0,
                            double bandGuardFraction = 0.10);

} // namespace gkp
