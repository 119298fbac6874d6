#pragma once

#include "gkp/errors.hpp"

namespace gkp {

// Coefficients of the generalized KP equation
//   (u_t - D_x^{2a} u_x + (f(u))_x)_x + eps u_yy = 0,
//   f(u) = mu1 |u|^{p1-1} u + mu2 |u|^{p2-1} u.
//
// Sign convention: the linear dispersion relation implemented downstream is
// Omega(xi, eta) = xi |xi|^{2a} - eps eta^2/xi and the energy is
// E = 1/2 (||D_x^a u||^2 - eps ||dx^{-1} u_y||^2) - K. Under this literal
// convention eps = -1 is the regime with coercive energy and solitary waves
// travelling at speed +1; eps = +1 admits zero-frequency linear modes.
struct PhysicalParams {
    double alpha = 1.0;
    double p1 = 2.0;
    double p2 = 2.0;
    double mu1 = 1.0;
    double mu2 = 0.0;
    int eps = -1;

    void validate() const {
        if (!(alpha > 0.0)) fail(ErrorCode::InvalidParams, "params.alpha must be > 0");
        if (!(p1 > 1.0)) fail(ErrorCode::InvalidParams, "params.p1 must be > 1");
        if (!(p2 >= 1.0)) fail(ErrorCode::InvalidParams, "params.p2 must be >= 1");
        if (eps != 1 && eps != -1) fail(ErrorCode::InvalidParams, "params.eps must be +1 or -1");
    }

    // critical exponent s_c = 1 + 4a/(2+a)
    double s_c() const { return 1.0 + 4.0 * alpha / (2.0 + alpha); }

    // c_p = (3a + 2 + p(a-2)) / (4a)
    double c_p(double p) const { return (3.0 * alpha + 2.0 + p * (alpha - 2.0)) / (4.0 * alpha); }

    // k_p = (3a + 2 + p(a-2)) / (2(p-1))
    double k_p(double p) const {
        return (3.0 * alpha + 2.0 + p * (alpha - 2.0)) / (2.0 * (p - 1.0));
    }

    static double psi(double p) { return 0.5 * (p - 1.0); }
    double psi1() const { return psi(p1); }
    double psi2() const { return psi(p2); }

    bool single_power() const { return mu2 == 0.0; }
};

} // namespace gkp
