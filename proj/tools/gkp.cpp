// gkp — command-line front end: ground states, time evolution, threshold
// classification, instability scenarios, parameter sweeps and the invariant
// suite. Exit codes: 0 success, 1 numerical failure, 2 invalid input.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "gkp/harness.hpp"

namespace {

struct CommonArgs {
    std::string configPath;
    std::vector<std::string> sets;
    std::string outDir;
    long long seed = -1;
    int workers = 0;
};

void add_common(CLI::App* sub, CommonArgs& args) {
    sub->add_option("--config", args.configPath, "configuration file (key = value lines)");
    sub->add_option("--set", args.sets, "override a config key, e.g. --set params.alpha=1")
        ->take_all();
    sub->add_option("--out", args.outDir, "output directory (overrides config 'outputs')");
    sub->add_option("--seed", args.seed, "RNG seed (overrides config 'seed')");
    sub->add_option("--workers", args.workers,
                    "worker pool size for sweeps (env GKP_WORKERS overrides)");
}

int dispatch(const std::string& command, const CommonArgs& args) {
    gkp::RunConfig cfg;
    try {
        if (!args.configPath.empty()) {
            cfg = gkp::RunConfig::from_file(args.configPath, args.sets);
        } else {
            std::map<std::string, std::string> kv;
            for (const std::string& ov : args.sets) {
                const size_t eq = ov.find('=');
                if (eq == std::string::npos)
                    gkp::fail(gkp::ErrorCode::ConfigError,
                              "--set expects key=value, got '" + ov + "'");
                kv[ov.substr(0, eq)] = ov.substr(eq + 1);
            }
            cfg = gkp::RunConfig::from_map(kv);
        }
        cfg.command = command;
        if (!args.outDir.empty()) cfg.outputs = args.outDir;
        if (args.seed >= 0) cfg.seed = static_cast<uint64_t>(args.seed);
        if (args.workers > 0) cfg.workers = args.workers;

        const gkp::RunManifest man = gkp::run_command(cfg);
        std::cout << command << ": ok, " << man.artifacts.size() << " artifact(s) in "
                  << cfg.outputs.string() << " (" << man.wallTimeSeconds << " s)\n";
        return 0;
    } catch (const gkp::Error& e) {
        const std::string payload = gkp::error_report_json(e);
        std::error_code ec;
        std::filesystem::create_directories(cfg.outputs, ec);
        if (!ec) {
            std::ofstream out(cfg.outputs / "error.json");
            out << payload << '\n';
        }
        std::cerr << payload << '\n';
        return e.is_usage_error() ? 2 : 1;
    } catch (const std::exception& e) {
        std::cerr << "{\"error\":{\"code\":\"Internal\",\"message\":\"" << e.what() << "\"}}\n";
        return 1;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"gkp — spectral laboratory for the generalized KP equation"};
    app.require_subcommand(1);

    const std::vector<std::pair<std::string, std::string>> commands = {
        {"groundstate", "compute a solitary-wave profile and its diagnostics"},
        {"evolve", "integrate initial data and track conserved quantities"},
        {"classify", "evaluate boundedness/blow-up criteria for initial data"},
        {"instability", "run the ground-state instability scenario"},
        {"sweep", "fan a command out over parameter axes"},
        {"validate", "run the invariant suite"},
    };

    std::map<std::string, CommonArgs> argsByCommand;
    for (const auto& [name, desc] : commands) add_common(app.add_subcommand(name, desc),
                                                         argsByCommand[name]);

    CLI11_PARSE(app, argc, argv);

    for (const auto& [name, _] : commands)
        if (app.got_subcommand(name)) return dispatch(name, argsByCommand[name]);
    std::cerr << "no command given\n";
    return 2;
}
