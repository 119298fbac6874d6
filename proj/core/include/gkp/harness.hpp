#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "gkp/criteria.hpp"
#include "gkp/evolution.hpp"
#include "gkp/ground_state.hpp"

namespace gkp {

inline constexpr const char* kToolVersion = "0.1.0";

// Flat dotted-key configuration (params.alpha, grid.nx, ...). Files hold one
// "key = value" pair per line, '#' starts a comment; --set overrides win.
struct RunConfig {
    std::string command;
    PhysicalParams params;
    GridSpec grid{128, 128, 64.0, 64.0};
    PetviashviliConfig solver;
    TimeStepperConfig stepper;
    std::filesystem::path outputs = "out";
    uint64_t seed = 0;
    int workers = 0; // 0: hardware concurrency (GKP_WORKERS overrides)
    // command-specific keys (evolve.initialData, instability.BD, ...)
    std::map<std::string, std::string> extra;
    // sweep axes: dotted key -> list of values, Cartesian product
    std::vector<std::pair<std::string, std::vector<std::string>>> sweepAxes;

    static RunConfig from_map(const std::map<std::string, std::string>& kv);
    static RunConfig from_file(const std::filesystem::path& path,
                               const std::vector<std::string>& overrides = {});
    std::map<std::string, std::string> to_map() const;

    std::string extra_or(const std::string& key, const std::string& dflt) const;
    double extra_num(const std::string& key, double dflt) const;
};

std::map<std::string, std::string> parse_config_text(const std::string& text);

struct ArtifactEntry {
    std::string fileName;
    std::string kind;
    std::string checksum;
};

struct RunManifest {
    std::map<std::string, std::string> configEcho;
    std::string toolVersion = kToolVersion;
    double wallTimeSeconds = 0.0;
    std::vector<ArtifactEntry> artifacts;
    std::string stateHash; // checksum over the sorted artifact checksums

    void add(const std::filesystem::path& dir, const std::string& fileName,
             const std::string& kind);
    void write(const std::filesystem::path& dir) const;
    void finalize();
};

// Command entry points; each writes its artifacts plus manifest.json under
// cfg.outputs and returns the manifest. Errors propagate as gkp::Error.
RunManifest cmd_groundstate(const RunConfig& cfg);
RunManifest cmd_evolve(const RunConfig& cfg);
RunManifest cmd_classify(const RunConfig& cfg);
RunManifest cmd_instability(const RunConfig& cfg);
RunManifest cmd_sweep(const RunConfig& cfg);
RunManifest cmd_validate(const RunConfig& cfg); // throws SolverFailure on any failed invariant

RunManifest run_command(const RunConfig& cfg);

// named generator for initial data: gaussian | random | groundstate |
// gardner | zaitsev | mode:kx,ky[,amp] | file:PATH
Field make_initial_data(const RunConfig& cfg, const std::string& spec);

// machine-readable error payload for the CLI (exit statuses 1 and 2)
std::string error_report_json(const Error& e);

} // namespace gkp
