#include "gkp/operators.hpp"

#include <algorithm>
#include <cmath>

namespace gkp {

const char* error_code_name(ErrorCode c) {
    switch (c) {
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::NonZeroXMean: return "NonZeroXMean";
        case ErrorCode::InvalidParams: return "InvalidParams";
        case ErrorCode::DegenerateField: return "DegenerateField";
        case ErrorCode::InconsistentGroundState: return "InconsistentGroundState";
        case ErrorCode::NoConvergence: return "NoConvergence";
        case ErrorCode::CollapseToZero: return "CollapseToZero";
        case ErrorCode::BoundaryContamination: return "BoundaryContamination";
        case ErrorCode::NoNehariRoot: return "NoNehariRoot";
        case ErrorCode::FlowDiverges: return "FlowDiverges";
        case ErrorCode::NearSingular: return "NearSingular";
        case ErrorCode::InsufficientSampling: return "InsufficientSampling";
        case ErrorCode::NanEncountered: return "NanEncountered";
        case ErrorCode::NoPositiveRoot: return "NoPositiveRoot";
        case ErrorCode::NotAdmissible: return "NotAdmissible";
        case ErrorCode::ResamplingError: return "ResamplingError";
        case ErrorCode::SolverFailure: return "SolverFailure";
        case ErrorCode::IoError: return "IoError";
        case ErrorCode::ConfigError: return "ConfigError";
    }
    return "Unknown";
}

SymbolTable::SymbolTable(const GridSpec& g, double a) : grid(g), alpha(a) {
    g.validate();
    if (!(a > 0.0)) fail(ErrorCode::InvalidParams, "SymbolTable: alpha must be > 0");
    xi.resize(g.nx);
    xiAbs2a.resize(g.nx);
    for (int kx = 0; kx < g.nx; ++kx) {
        xi[kx] = g.xi(kx);
        xiAbs2a[kx] = std::pow(std::abs(xi[kx]), 2.0 * a);
    }
    eta.resize(g.ny);
    for (int ky = 0; ky < g.ny; ++ky) eta[ky] = g.eta(ky);

    etaSqOverXi.assign(g.size(), 0.0);
    dealiasMask.assign(g.size(), 0);
    const int jcut = g.nx / 3;
    const int kcut = g.ny / 3;
    for (int kx = 0; kx < g.nx; ++kx) {
        const int j = GridSpec::mode(kx, g.nx);
        for (int ky = 0; ky < g.ny; ++ky) {
            const int k = GridSpec::mode(ky, g.ny);
            const size_t idx = static_cast<size_t>(kx) * g.ny + ky;
            if (xi[kx] != 0.0) etaSqOverXi[idx] = eta[ky] * eta[ky] / (xi[kx] * xi[kx]);
            dealiasMask[idx] = (std::abs(j) <= jcut && std::abs(k) <= kcut) ? 1 : 0;
        }
    }
}

double max_x_line_mean(const Field& f) {
    const GridSpec& g = f.grid();
    double worst = 0.0;
    for (int j = 0; j < g.ny; ++j) {
        double s = 0.0;
        for (int i = 0; i < g.nx; ++i) s += f(i, j);
        worst = std::max(worst, std::abs(s / g.nx));
    }
    return worst;
}

double rms(const Field& f) {
    double s = 0.0;
    for (long k = 0; k < f.size(); ++k) s += f.data()[k] * f.data()[k];
    return std::sqrt(s / f.size());
}

void require_zero_x_mean(const Field& f, double relTol) {
    const double m = max_x_line_mean(f);
    if (m > relTol * std::max(rms(f), 1e-300))
        fail(ErrorCode::NonZeroXMean,
             "field has nonzero x-mean (max line mean " + std::to_string(m) + ")");
}

Field project_zero_x_mean(const Field& f) {
    const GridSpec& g = f.grid();
    Field out = f;
    for (int j = 0; j < g.ny; ++j) {
        double s = 0.0;
        for (int i = 0; i < g.nx; ++i) s += f(i, j);
        const double m = s / g.nx;
        for (int i = 0; i < g.nx; ++i) out(i, j) -= m;
    }
    return out;
}

void project_zero_x_mean_inplace(Spectrum& s) {
    const GridSpec& g = s.grid();
    for (int ky = 0; ky < g.ny; ++ky) s(0, ky) = 0.0;
}

namespace {

template <class Mult>
Field apply_multiplier(const Field& f, Mult&& m) {
    Spectrum s = transform(f);
    const GridSpec& g = f.grid();
    for (int kx = 0; kx < g.nx; ++kx)
        for (int ky = 0; ky < g.ny; ++ky) s(kx, ky) *= m(g.xi(kx), g.eta(ky));
    return inverse_transform(s);
}

} // namespace

Field dx_frac(const Field& f, double s) {
    return apply_multiplier(f, [s](double xi, double) {
        return std::complex<double>(std::pow(std::abs(xi), s), 0.0);
    });
}

Field antideriv_x(const Field& f, double relTol) {
    require_zero_x_mean(f, relTol);
    return apply_multiplier(f, [](double xi, double) {
        if (xi == 0.0) return std::complex<double>(0.0, 0.0);
        return std::complex<double>(0.0, -1.0 / xi); // 1/(i xi)
    });
}

Field dx(const Field& f) {
    return apply_multiplier(f, [](double xi, double) { return std::complex<double>(0.0, xi); });
}

Field dy(const Field& f) {
    return apply_multiplier(f, [](double, double eta) { return std::complex<double>(0.0, eta); });
}

Field dealias(const Field& f) {
    Spectrum s = transform(f);
    apply_dealias_inplace(s);
    return inverse_transform(s);
}

void apply_dealias_inplace(Spectrum& s) {
    const GridSpec& g = s.grid();
    const int jcut = g.nx / 3;
    const int kcut = g.ny / 3;
    for (int kx = 0; kx < g.nx; ++kx) {
        const int j = std::abs(GridSpec::mode(kx, g.nx));
        for (int ky = 0; ky < g.ny; ++ky) {
            const int k = std::abs(GridSpec::mode(ky, g.ny));
            if (j > jcut || k > kcut) s(kx, ky) = 0.0;
        }
    }
}

void apply_dx_inplace(Spectrum& s) {
    const GridSpec& g = s.grid();
    for (int kx = 0; kx < g.nx; ++kx) {
        const std::complex<double> m(0.0, g.xi(kx));
        for (int ky = 0; ky < g.ny; ++ky) s(kx, ky) *= m;
    }
}

void apply_dy_inplace(Spectrum& s) {
    const GridSpec& g = s.grid();
    for (int ky = 0; ky < g.ny; ++ky) {
        const std::complex<double> m(0.0, g.eta(ky));
        for (int kx = 0; kx < g.nx; ++kx) s(kx, ky) *= m;
    }
}

void apply_xi_power_inplace(Spectrum& s, double power) {
    const GridSpec& g = s.grid();
    for (int kx = 0; kx < g.nx; ++kx) {
        const double m = std::pow(std::abs(g.xi(kx)), power);
        for (int ky = 0; ky < g.ny; ++ky) s(kx, ky) *= m;
    }
}

void apply_antideriv_x_inplace(Spectrum& s) {
    const GridSpec& g = s.grid();
    for (int kx = 0; kx < g.nx; ++kx) {
        const double xi = g.xi(kx);
        const std::complex<double> m = xi == 0.0 ? std::complex<double>(0.0, 0.0)
                                                 : std::complex<double>(0.0, -1.0 / xi);
        for (int ky = 0; ky < g.ny; ++ky) s(kx, ky) *= m;
    }
}

Field dilate_resample(const Field& f, double Bx, double Dy, double amp) {
    if (!(Bx > 0.0) || !(Dy > 0.0))
        fail(ErrorCode::InvalidParams, "dilate_resample: scale factors must be > 0");
    const GridSpec& g = f.grid();
    Spectrum s = transform(f);

    // Evaluate the trig interpolant at the tensor grid of coordinates scaled
    // about the box center. The 2D sum factorizes into two dense stages.
    // DFT phases are anchored at storage index 0 (coordinate -L/2), so the
    // interpolant at centered coordinate x* uses exp(i xi (x* + L/2)).
    const std::complex<double> I(0.0, 1.0);
    std::vector<std::complex<double>> ey(static_cast<size_t>(g.ny) * g.ny);
    for (int ky = 0; ky < g.ny; ++ky) {
        const double eta = g.eta(ky);
        for (int j = 0; j < g.ny; ++j) {
            const double yj = Dy * g.y(j) + 0.5 * g.Ly;
            ey[static_cast<size_t>(ky) * g.ny + j] = std::exp(I * (eta * yj));
        }
    }
    // mid(kx, j) = sum_ky s(kx,ky) e^{i eta ky * y'_j}
    std::vector<std::complex<double>> mid(static_cast<size_t>(g.nx) * g.ny);
    for (int kx = 0; kx < g.nx; ++kx) {
        for (int j = 0; j < g.ny; ++j) {
            std::complex<double> acc = 0.0;
            for (int ky = 0; ky < g.ny; ++ky)
                acc += s(kx, ky) * ey[static_cast<size_t>(ky) * g.ny + j];
            mid[static_cast<size_t>(kx) * g.ny + j] = acc;
        }
    }
    std::vector<std::complex<double>> ex(static_cast<size_t>(g.nx) * g.nx);
    for (int kx = 0; kx < g.nx; ++kx) {
        const double xi = g.xi(kx);
        for (int i = 0; i < g.nx; ++i) {
            const double xEval = Bx * g.x(i) + 0.5 * g.Lx;
            ex[static_cast<size_t>(kx) * g.nx + i] = std::exp(I * (xi * xEval));
        }
    }
    Field out(g);
    const double scale = amp / g.size();
    for (int i = 0; i < g.nx; ++i) {
        for (int j = 0; j < g.ny; ++j) {
            std::complex<double> acc = 0.0;
            for (int kx = 0; kx < g.nx; ++kx)
                acc += mid[static_cast<size_t>(kx) * g.ny + j] * ex[static_cast<size_t>(kx) * g.nx + i];
            out(i, j) = acc.real() * scale;
        }
    }
    return out;
}

Field translate(const Field& f, double sx, double sy) {
    const GridSpec& g = f.grid();
    Spectrum s = transform(f);
    const std::complex<double> I(0.0, 1.0);
    for (int kx = 0; kx < g.nx; ++kx) {
        const double xi = g.xi(kx);
        for (int ky = 0; ky < g.ny; ++ky)
            s(kx, ky) *= std::exp(-I * (xi * sx + g.eta(ky) * sy));
    }
    return inverse_transform(s);
}

double band_edge_fraction(const Spectrum& s) {
    const GridSpec& g = s.grid();
    const int jcut = g.nx / 3;
    const int kcut = g.ny / 3;
    const double jEdge = 2.0 * jcut / 3.0;
    const double kEdge = 2.0 * kcut / 3.0;
    double total = 0.0, edge = 0.0;
    for (int kx = 0; kx < g.nx; ++kx) {
        const int j = std::abs(GridSpec::mode(kx, g.nx));
        if (j > jcut) continue;
        for (int ky = 0; ky < g.ny; ++ky) {
            const int k = std::abs(GridSpec::mode(ky, g.ny));
            if (k > kcut) continue;
            const double e = std::norm(s(kx, ky));
            total += e;
            if (j > jEdge || k > kEdge) edge += e;
        }
    }
    return total > 0.0 ? edge / total : 0.0;
}

Field random_smooth_field(const GridSpec& g, std::mt19937_64& rng, double amplitude, int maxMode) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Spectrum s(g);
    const int jm = std::min(maxMode, g.nx / 4);
    const int km = std::min(maxMode, g.ny / 4);
    // Hermitian-symmetric low-mode spectrum, xi=0 plane left empty
    for (int j = 1; j <= jm; ++j) {
        for (int k = -km; k <= km; ++k) {
            const double decay = std::exp(-3.0 * (double(j * j) / (jm * jm) +
                                                  double(k * k) / (km * km + 1)));
            const std::complex<double> c(gauss(rng) * decay, gauss(rng) * decay);
            const int kx = j;
            const int ky = (k + g.ny) % g.ny;
            const int mkx = g.nx - j;
            const int mky = (g.ny - ky) % g.ny;
            s(kx, ky) = c;
            s(mkx, mky) = std::conj(c);
        }
    }
    Field raw = inverse_transform(s);

    // localize with a Gaussian envelope so the sample behaves like an R^2 state
    const double wx = g.Lx / 6.0, wy = g.Ly / 6.0;
    for (int i = 0; i < g.nx; ++i) {
        const double x = g.x(i);
        for (int j = 0; j < g.ny; ++j) {
            const double y = g.y(j);
            raw(i, j) *= std::exp(-(x * x) / (wx * wx) - (y * y) / (wy * wy));
        }
    }
    Field out = dealias(project_zero_x_mean(raw));
    const double m = out.max_abs();
    if (m > 0.0) out *= amplitude / m;
    return out;
}

} // namespace gkp
