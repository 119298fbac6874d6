#pragma once

#include "gkp/grid.hpp"

namespace gkp {

// Forward/inverse 2D transforms. Convention: unnormalized forward DFT,
// inverse carries 1/(nx*ny). Plans are FFTW_ESTIMATE (deterministic across
// runs) and cached per grid size behind a mutex; execution is thread-safe
// on distinct arrays.
Spectrum transform(const Field& f);
Field inverse_transform(const Spectrum& s);

// Largest |imag| left after the complex inverse transform, relative to the
// max magnitude of the field. Realness diagnostic for multiplier chains.
double max_imag_residual(const Spectrum& s);

// spectral d^2/dx^2 of a periodic 1D sample with period L
std::vector<double> second_derivative_1d(const std::vector<double>& u, double L);

// In-place engine with preallocated staging buffers for hot loops.
class SpectralEngine {
public:
    explicit SpectralEngine(const GridSpec& g);

    const GridSpec& grid() const { return grid_; }

    // real field -> spectrum (unnormalized)
    void forward(const double* in, std::complex<double>* out);
    // spectrum -> real part of inverse (1/(nx*ny) applied)
    void backward(const std::complex<double>* in, double* out);

private:
    GridSpec grid_;
    std::vector<std::complex<double>> stage_;
};

} // namespace gkp
