#include "gkp/fft.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>

namespace gkp {

namespace {

// FFTW planner is not thread-safe; plans are cached per grid size and reused
// via the new-array execute interface. FFTW_ESTIMATE keeps planning
// deterministic run-to-run, FFTW_UNALIGNED lets us execute on any buffer.
struct PlanPair {
    fftw_plan fwd = nullptr;
    fftw_plan bwd = nullptr;
};

class PlanCache {
public:
    static PlanCache& instance() {
        static PlanCache c;
        return c;
    }

    PlanPair get(int nx, int ny) {
        std::lock_guard<std::mutex> lock(mu_);
        auto key = std::make_pair(nx, ny);
        auto it = plans_.find(key);
        if (it != plans_.end()) return it->second;

        std::vector<std::complex<double>> a(static_cast<size_t>(nx) * ny);
        std::vector<std::complex<double>> b(a.size());
        auto* ap = reinterpret_cast<fftw_complex*>(a.data());
        auto* bp = reinterpret_cast<fftw_complex*>(b.data());
        PlanPair p;
        const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
        p.fwd = fftw_plan_dft_2d(nx, ny, ap, bp, FFTW_FORWARD, flags);
        p.bwd = fftw_plan_dft_2d(nx, ny, ap, bp, FFTW_BACKWARD, flags);
        plans_[key] = p;
        return p;
    }

private:
    std::mutex mu_;
    std::map<std::pair<int, int>, PlanPair> plans_;
};

void exec(fftw_plan plan, const std::complex<double>* in, std::complex<double>* out) {
    fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(in)),
                     reinterpret_cast<fftw_complex*>(out));
}

} // namespace

Spectrum transform(const Field& f) {
    const GridSpec& g = f.grid();
    Spectrum out(g);
    std::vector<std::complex<double>> stage(g.size());
    for (long k = 0; k < g.size(); ++k) stage[k] = f.data()[k];
    exec(PlanCache::instance().get(g.nx, g.ny).fwd, stage.data(), out.data());
    return out;
}

Field inverse_transform(const Spectrum& s) {
    const GridSpec& g = s.grid();
    Field out(g);
    std::vector<std::complex<double>> stage(g.size());
    exec(PlanCache::instance().get(g.nx, g.ny).bwd, s.data(), stage.data());
    const double scale = 1.0 / g.size();
    for (long k = 0; k < g.size(); ++k) out.data()[k] = stage[k].real() * scale;
    return out;
}

double max_imag_residual(const Spectrum& s) {
    const GridSpec& g = s.grid();
    std::vector<std::complex<double>> stage(g.size());
    exec(PlanCache::instance().get(g.nx, g.ny).bwd, s.data(), stage.data());
    const double scale = 1.0 / g.size();
    double maxIm = 0.0, maxRe = 0.0;
    for (long k = 0; k < g.size(); ++k) {
        maxIm = std::max(maxIm, std::abs(stage[k].imag() * scale));
        maxRe = std::max(maxRe, std::abs(stage[k].real() * scale));
    }
    return maxRe > 0.0 ? maxIm / maxRe : maxIm;
}

std::vector<double> second_derivative_1d(const std::vector<double>& u, double L) {
    const int n = static_cast<int>(u.size());
    std::vector<std::complex<double>> a(n), b(n);
    for (int i = 0; i < n; ++i) a[i] = u[i];
    fftw_plan fwd = fftw_plan_dft_1d(n, reinterpret_cast<fftw_complex*>(a.data()),
                                     reinterpret_cast<fftw_complex*>(b.data()), FFTW_FORWARD,
                                     FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_execute(fwd);
    fftw_destroy_plan(fwd);
    const double k0 = 2.0 * M_PI / L;
    for (int k = 0; k < n; ++k) {
        const int j = k < n / 2 ? k : k - n;
        b[k] *= -(k0 * j) * (k0 * j);
    }
    fftw_plan bwd = fftw_plan_dft_1d(n, reinterpret_cast<fftw_complex*>(b.data()),
                                     reinterpret_cast<fftw_complex*>(a.data()), FFTW_BACKWARD,
                                     FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_execute(bwd);
    fftw_destroy_plan(bwd);
    std::vector<double> out(n);
    for (int i = 0; i < n; ++i) out[i] = a[i].real() / n;
    return out;
}

SpectralEngine::SpectralEngine(const GridSpec& g) : grid_(g), stage_(g.size()) {
    g.validate();
    PlanCache::instance().get(g.nx, g.ny); // build plans eagerly
}

void SpectralEngine::forward(const double* in, std::complex<double>* out) {
    for (long k = 0; k < grid_.size(); ++k) stage_[k] = in[k];
    exec(PlanCache::instance().get(grid_.nx, grid_.ny).fwd, stage_.data(), out);
}

void SpectralEngine::backward(const std::complex<double>* in, double* out) {
    exec(PlanCache::instance().get(grid_.nx, grid_.ny).bwd, in, stage_.data());
    const double scale = 1.0 / grid_.size();
    for (long k = 0; k < grid_.size(); ++k) out[k] = stage_[k].real() * scale;
}

} // namespace gkp
