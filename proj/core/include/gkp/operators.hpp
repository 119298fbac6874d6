#pragma once

#include <cstdint>
#include <random>

#include "gkp/fft.hpp"
#include "gkp/grid.hpp"

namespace gkp {

// Precomputed Fourier symbols for one grid and one alpha. Read-only after
// construction; safe to share across threads.
struct SymbolTable {
    GridSpec grid;
    double alpha = 0.0;
    std::vector<double> xi;          // per kx index
    std::vector<double> eta;         // per ky index
    std::vector<double> xiAbs2a;     // |xi|^(2*alpha) per kx index
    std::vector<double> etaSqOverXi; // eta^2/xi^2 on the full grid, 0 on the xi=0 plane
    std::vector<uint8_t> dealiasMask; // 2/3 rule in both directions

    SymbolTable(const GridSpec& g, double alpha);

    bool keep(int kx, int ky) const {
        return dealiasMask[static_cast<size_t>(kx) * grid.ny + ky] != 0;
    }
};

// --- x-mean handling -------------------------------------------------------
// KP states have zero mean along every x-line; \partial_x^{-1} is only
// defined there. The checks below are relative to the field's RMS value.

double max_x_line_mean(const Field& f);
double rms(const Field& f);
void require_zero_x_mean(const Field& f, double relTol = 1e-10);
// zero the xi=0 plane (subtract per-line x-means)
Field project_zero_x_mean(const Field& f);
void project_zero_x_mean_inplace(Spectrum& s);

// --- Fourier multiplier operators ------------------------------------------

// |xi|^s multiplier; s=2*alpha realizes D_x^{2 alpha}
Field dx_frac(const Field& f, double s);
// (i*xi)^{-1} multiplier; xi=0 plane mapped to 0; refuses inputs with
// significant x-mean (NonZeroXMean beyond relTol * rms)
Field antideriv_x(const Field& f, double relTol = 1e-10);
Field dx(const Field& f);
Field dy(const Field& f);
// 2/3-rule truncation in both directions; idempotent
Field dealias(const Field& f);

// spectral-side variants used by solvers (no transforms)
void apply_dealias_inplace(Spectrum& s);
void apply_dx_inplace(Spectrum& s);
void apply_dy_inplace(Spectrum& s);
void apply_xi_power_inplace(Spectrum& s, double power);
void apply_antideriv_x_inplace(Spectrum& s);

// --- geometry helpers -------------------------------------------------------

// Trigonometric resampling of the anisotropic dilation about the box center:
// out(x, y) = amp * f(cx + Bx*(x-cx), cy + Dy*(y-cy)). Exact for the
// band-limited periodic interpolant; arguments wrap periodically.
Field dilate_resample(const Field& f, double Bx, double Dy, double amp = 1.0);

// exact spectral translation f(x - sx, y - sy)
Field translate(const Field& f, double sx, double sy);

// fraction of |u_hat|^2 living in the outer shell of the retained 2/3 band
// (modes with |j| > 2/3 jcut or |k| > 2/3 kcut). Resolution-loss indicator.
double band_edge_fraction(const Spectrum& s);

// --- test/validation data ---------------------------------------------------

// Smooth localized random field: low-mode Gaussian spectrum times a Gaussian
// envelope in physical space, zero x-mean, dealiased, sup-norm ~ amplitude.
Field random_smooth_field(const GridSpec& g, std::mt19937_64& rng, double amplitude = 1.0,
                          int maxMode = 8);

} // namespace gkp
