#include "gkp/io.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>

namespace gkp {

namespace {

void write_raw(std::ofstream& out, const void* p, size_t n) {
    out.write(reinterpret_cast<const char*>(p), static_cast<std::streamsize>(n));
}

void read_raw(std::ifstream& in, void* p, size_t n) {
    in.read(reinterpret_cast<char*>(p), static_cast<std::streamsize>(n));
    if (!in) fail(ErrorCode::IoError, "unexpected end of field file");
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

void write_field_binary(const std::filesystem::path& path, const Field& f,
                        const PhysicalParams& prm) {
    static_assert(std::endian::native == std::endian::little,
                  "field format is little-endian; big-endian hosts need byte swaps");
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorCode::IoError, "cannot open " + path.string() + " for writing");
    const GridSpec& g = f.grid();
    const uint32_t nx = static_cast<uint32_t>(g.nx), ny = static_cast<uint32_t>(g.ny);
    write_raw(out, &nx, 4);
    write_raw(out, &ny, 4);
    const double header[8] = {g.Lx, g.Ly, prm.alpha, prm.p1, prm.p2, prm.mu1, prm.mu2,
                              static_cast<double>(prm.eps)};
    write_raw(out, header, sizeof header);
    write_raw(out, f.data(), sizeof(double) * static_cast<size_t>(f.size()));
    if (!out) fail(ErrorCode::IoError, "failed writing " + path.string());
}

LoadedField read_field_binary(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::IoError, "cannot open field file " + path.string());
    uint32_t nx = 0, ny = 0;
    read_raw(in, &nx, 4);
    read_raw(in, &ny, 4);
    double header[8];
    read_raw(in, header, sizeof header);
    LoadedField out;
    GridSpec g{static_cast<int>(nx), static_cast<int>(ny), header[0], header[1]};
    g.validate();
    out.params.alpha = header[2];
    out.params.p1 = header[3];
    out.params.p2 = header[4];
    out.params.mu1 = header[5];
    out.params.mu2 = header[6];
    out.params.eps = header[7] >= 0.0 ? 1 : -1;
    out.field = Field(g);
    read_raw(in, out.field.data(), sizeof(double) * static_cast<size_t>(g.size()));
    return out;
}

void write_field_csv(const std::filesystem::path& path, const Field& f) {
    std::ofstream out(path);
    if (!out) fail(ErrorCode::IoError, "cannot open " + path.string() + " for writing");
    out << "x,y,u\n";
    const GridSpec& g = f.grid();
    for (int i = 0; i < g.nx; ++i)
        for (int j = 0; j < g.ny; ++j)
            out << fmt(g.x(i)) << ',' << fmt(g.y(j)) << ',' << fmt(f(i, j)) << '\n';
}

void write_surface_csv(const std::filesystem::path& path, const Field& f) {
    write_field_csv(path, f);
}

void write_slices_csv(const std::filesystem::path& path, const Field& f) {
    std::ofstream out(path);
    if (!out) fail(ErrorCode::IoError, "cannot open " + path.string() + " for writing");
    const GridSpec& g = f.grid();
    const int j0 = g.ny / 2; // y = 0 line
    const int i0 = g.nx / 2; // x = 0 line
    out << "index,x,u_xz,y,u_yz\n";
    const int n = std::max(g.nx, g.ny);
    for (int k = 0; k < n; ++k) {
        out << k << ',';
        if (k < g.nx)
            out << fmt(g.x(k)) << ',' << fmt(f(k, j0)) << ',';
        else
            out << ",,";
        if (k < g.ny)
            out << fmt(g.y(k)) << ',' << fmt(f(i0, k)) << '\n';
        else
            out << ",\n";
    }
}

void write_trajectory_csv(const std::filesystem::path& path, const TrajectoryDiagnostics& traj,
                          const std::vector<std::pair<std::string, std::vector<double>>>& extra) {
    std::ofstream out(path);
    if (!out) fail(ErrorCode::IoError, "cannot open " + path.string() + " for writing");
    out << "time";
    for (const auto& c : DiagnosticsRecord::csv_columns()) out << ',' << c;
    for (const auto& w : traj.virial) out << ",virial_" << w.name << ",virialRhs_" << w.name;
    out << ",xMoment,xMomentRhs,bandEdge";
    for (const auto& [name, _] : extra) out << ',' << name;
    out << '\n';
    for (size_t i = 0; i < traj.times.size(); ++i) {
        out << fmt(traj.times[i]);
        for (double v : traj.records[i].csv_values()) out << ',' << fmt(v);
        for (const auto& w : traj.virial) out << ',' << fmt(w.value[i]) << ',' << fmt(w.rhs[i]);
        out << ',' << fmt(traj.xMoment[i]) << ',' << fmt(traj.xMomentRhs[i]) << ','
            << fmt(traj.bandEdge[i]);
        for (const auto& [_, series] : extra)
            out << ',' << (i < series.size() ? fmt(series[i]) : std::string());
        out << '\n';
    }
}

std::string file_checksum(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::IoError, "cannot checksum " + path.string());
    uint64_t h = 1469598103934665603ULL;
    char buf[65536];
    while (in) {
        in.read(buf, sizeof buf);
        const std::streamsize got = in.gcount();
        for (std::streamsize i = 0; i < got; ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 1099511628211ULL;
        }
    }
    char hex[32];
    std::snprintf(hex, sizeof hex, "fnv1a64:%016llx", static_cast<unsigned long long>(h));
    return hex;
}

} // namespace gkp
