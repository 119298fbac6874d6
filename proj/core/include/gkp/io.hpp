#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "gkp/evolution.hpp"
#include "gkp/grid.hpp"
#include "gkp/params.hpp"

namespace gkp {

// Binary field format (little-endian):
//   u32 nx, u32 ny,
//   f64 Lx, Ly, alpha, p1, p2, mu1, mu2, eps,
//   then nx*ny row-major f64 values (value(ix, iy) at ix*ny + iy).
void write_field_binary(const std::filesystem::path& path, const Field& f,
                        const PhysicalParams& prm);

struct LoadedField {
    Field field;
    PhysicalParams params;
};

LoadedField read_field_binary(const std::filesystem::path& path);

// x,y,u triplets (one row per sample); intended for small grids
void write_field_csv(const std::filesystem::path& path, const Field& f);

// full surface grid and the XZ/YZ centerline slices
void write_surface_csv(const std::filesystem::path& path, const Field& f);
void write_slices_csv(const std::filesystem::path& path, const Field& f);

// trajectory CSV, one row per sample; columns: time, the DiagnosticsRecord
// columns, virial/virialRhs per weight, xMoment, xMomentRhs, bandEdge, then
// any extra series appended by the caller
void write_trajectory_csv(const std::filesystem::path& path, const TrajectoryDiagnostics& traj,
                          const std::vector<std::pair<std::string, std::vector<double>>>& extra =
                              {});

// FNV-1a 64-bit checksum of a file's bytes, rendered as "fnv1a64:<hex>"
std::string file_checksum(const std::filesystem::path& path);

} // namespace gkp
