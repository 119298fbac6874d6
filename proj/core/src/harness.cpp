#include "gkp/harness.hpp"

#include <json.hpp>

#include <atomic>
#include <chrono>
#include <cstdio>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>
#include <thread>

#include "gkp/io.hpp"

namespace gkp {

using nlohmann::json;

namespace {

namespace fs = std::filesystem;

double to_num(const std::string& key, const std::string& v) {
    try {
        size_t pos = 0;
        const double x = std::stod(v, &pos);
        while (pos < v.size() && std::isspace(static_cast<unsigned char>(v[pos]))) ++pos;
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        fail(ErrorCode::ConfigError, key + ": not a number: '" + v + "'");
    }
}

bool to_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    fail(ErrorCode::ConfigError, key + ": not a boolean: '" + v + "'");
}

std::string trim(const std::string& s) {
    size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(trim(cur));
    return out;
}

std::string fmt_num(double v) {
    std::ostringstream ss;
    ss.precision(17);
    ss << v;
    return ss.str();
}

} // namespace

std::map<std::string, std::string> parse_config_text(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const size_t eq = line.find('=');
        if (eq == std::string::npos)
            fail(ErrorCode::ConfigError,
                 "config line " + std::to_string(lineno) + ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (key.empty()) fail(ErrorCode::ConfigError, "config line " + std::to_string(lineno) +
                                                          ": empty key");
        kv[key] = val;
    }
    return kv;
}

RunConfig RunConfig::from_map(const std::map<std::string, std::string>& kv) {
    RunConfig cfg;
    for (const auto& [key, val] : kv) {
        if (key == "command") cfg.command = val;
        else if (key == "params.alpha") cfg.params.alpha = to_num(key, val);
        else if (key == "params.p1") cfg.params.p1 = to_num(key, val);
        else if (key == "params.p2") cfg.params.p2 = to_num(key, val);
        else if (key == "params.mu1") cfg.params.mu1 = to_num(key, val);
        else if (key == "params.mu2") cfg.params.mu2 = to_num(key, val);
        else if (key == "params.eps") cfg.params.eps = static_cast<int>(to_num(key, val));
        else if (key == "grid.nx") cfg.grid.nx = static_cast<int>(to_num(key, val));
        else if (key == "grid.ny") cfg.grid.ny = static_cast<int>(to_num(key, val));
        else if (key == "grid.Lx") cfg.grid.Lx = to_num(key, val);
        else if (key == "grid.Ly") cfg.grid.Ly = to_num(key, val);
        else if (key == "solver.tol") cfg.solver.tol = to_num(key, val);
        else if (key == "solver.maxIter") cfg.solver.maxIter = static_cast<int>(to_num(key, val));
        else if (key == "solver.gamma") cfg.solver.gamma = to_num(key, val);
        else if (key == "solver.relaxation") cfg.solver.relaxation = to_num(key, val);
        else if (key == "solver.boundaryWarnRatio") cfg.solver.boundaryWarnRatio = to_num(key, val);
        else if (key == "solver.boundaryFailRatio") cfg.solver.boundaryFailRatio = to_num(key, val);
        else if (key == "solver.energyFloor") cfg.solver.energyFloor = to_num(key, val);
        else if (key == "stepper.dt") cfg.stepper.dt = to_num(key, val);
        else if (key == "stepper.tEnd") cfg.stepper.tEnd = to_num(key, val);
        else if (key == "stepper.scheme") {
            if (val == "ifrk4") cfg.stepper.scheme = Scheme::IFRK4;
            else if (val == "etdrk4") cfg.stepper.scheme = Scheme::ETDRK4;
            else fail(ErrorCode::ConfigError, "stepper.scheme: unknown scheme '" + val + "'");
        }
        else if (key == "stepper.dealias") cfg.stepper.dealias = to_bool(key, val);
        else if (key == "stepper.diagnosticsEvery")
            cfg.stepper.diagnosticsEvery = static_cast<int>(to_num(key, val));
        else if (key == "stepper.blowupNormCap") cfg.stepper.blowupNormCap = to_num(key, val);
        else if (key == "stepper.bandGuardFraction")
            cfg.stepper.bandGuardFraction = to_num(key, val);
        else if (key == "outputs") cfg.outputs = val;
        else if (key == "seed") cfg.seed = static_cast<uint64_t>(to_num(key, val));
        else if (key == "workers") cfg.workers = static_cast<int>(to_num(key, val));
        else if (key.rfind("sweep.axis.", 0) == 0)
            cfg.sweepAxes.emplace_back(key.substr(11), split(val, ','));
        else cfg.extra[key] = val;
    }
    return cfg;
}

RunConfig RunConfig::from_file(const fs::path& path, const std::vector<std::string>& overrides) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::ConfigError, "cannot open config file " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    auto kv = parse_config_text(ss.str());
    for (const std::string& ov : overrides) {
        const size_t eq = ov.find('=');
        if (eq == std::string::npos)
            fail(ErrorCode::ConfigError, "--set expects key=value, got '" + ov + "'");
        kv[trim(ov.substr(0, eq))] = trim(ov.substr(eq + 1));
    }
    return from_map(kv);
}

std::map<std::string, std::string> RunConfig::to_map() const {
    std::map<std::string, std::string> kv;
    kv["command"] = command;
    kv["params.alpha"] = fmt_num(params.alpha);
    kv["params.p1"] = fmt_num(params.p1);
    kv["params.p2"] = fmt_num(params.p2);
    kv["params.mu1"] = fmt_num(params.mu1);
    kv["params.mu2"] = fmt_num(params.mu2);
    kv["params.eps"] = fmt_num(params.eps);
    kv["grid.nx"] = fmt_num(grid.nx);
    kv["grid.ny"] = fmt_num(grid.ny);
    kv["grid.Lx"] = fmt_num(grid.Lx);
    kv["grid.Ly"] = fmt_num(grid.Ly);
    kv["solver.tol"] = fmt_num(solver.tol);
    kv["solver.maxIter"] = fmt_num(solver.maxIter);
    kv["solver.gamma"] = fmt_num(solver.gamma);
    kv["solver.relaxation"] = fmt_num(solver.relaxation);
    kv["stepper.dt"] = fmt_num(stepper.dt);
    kv["stepper.tEnd"] = fmt_num(stepper.tEnd);
    kv["stepper.scheme"] = stepper.scheme == Scheme::IFRK4 ? "ifrk4" : "etdrk4";
    kv["stepper.dealias"] = stepper.dealias ? "true" : "false";
    kv["stepper.diagnosticsEvery"] = fmt_num(stepper.diagnosticsEvery);
    kv["stepper.blowupNormCap"] = fmt_num(stepper.blowupNormCap);
    kv["outputs"] = outputs.string();
    kv["seed"] = std::to_string(seed);
    kv["workers"] = fmt_num(workers);
    for (const auto& [k, v] : extra) kv[k] = v;
    for (const auto& [k, vals] : sweepAxes) {
        std::string joined;
        for (size_t i = 0; i < vals.size(); ++i) joined += (i ? "," : "") + vals[i];
        kv["sweep.axis." + k] = joined;
    }
    return kv;
}

std::string RunConfig::extra_or(const std::string& key, const std::string& dflt) const {
    auto it = extra.find(key);
    return it == extra.end() ? dflt : it->second;
}

double RunConfig::extra_num(const std::string& key, double dflt) const {
    auto it = extra.find(key);
    return it == extra.end() ? dflt : to_num(key, it->second);
}

void RunManifest::add(const fs::path& dir, const std::string& fileName, const std::string& kind) {
    artifacts.push_back({fileName, kind, file_checksum(dir / fileName)});
}

void RunManifest::finalize() {
    std::vector<std::string> parts;
    for (const auto& a : artifacts) parts.push_back(a.fileName + ":" + a.checksum);
    std::sort(parts.begin(), parts.end());
    uint64_t h = 1469598103934665603ULL;
    for (const std::string& p : parts)
        for (char c : p) {
            h ^= static_cast<unsigned char>(c);
            h *= 1099511628211ULL;
        }
    char hex[32];
    std::snprintf(hex, sizeof hex, "fnv1a64:%016llx", static_cast<unsigned long long>(h));
    stateHash = hex;
}

void RunManifest::write(const fs::path& dir) const {
    json j;
    j["configEcho"] = configEcho;
    j["toolVersion"] = toolVersion;
    j["wallTimeSeconds"] = wallTimeSeconds;
    j["stateHash"] = stateHash;
    j["artifacts"] = json::array();
    for (const auto& a : artifacts)
        j["artifacts"].push_back({{"fileName", a.fileName}, {"kind", a.kind},
                                  {"checksum", a.checksum}});
    std::ofstream out(dir / "manifest.json");
    out << j.dump(2) << '\n';
}

namespace {

class Stopwatch {
public:
    Stopwatch() : t0_(std::chrono::steady_clock::now()) {}
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
    }

private:
    std::chrono::steady_clock::time_point t0_;
};

void prepare_outdir(const RunConfig& cfg) { fs::create_directories(cfg.outputs); }

json ground_state_json(const GroundStateResult& r, const PhysicalParams& prm) {
    const GridSpec& g = r.profile.grid();
    double peak = 0.0;
    for (long k = 0; k < r.profile.size(); ++k)
        if (std::abs(r.profile.data()[k]) > std::abs(peak)) peak = r.profile.data()[k];
    json j;
    j["converged"] = r.converged;
    j["iterations"] = r.iterations;
    j["residualNorm"] = r.residualNorm;
    j["actionValue"] = r.actionValue;
    j["speed"] = r.speed;
    j["pohozaevResiduals"] = r.pohozaevResiduals;
    j["peakValue"] = peak;       // signed: records the polarity of the wave
    j["peakAbs"] = std::abs(peak);
    j["boundaryRatio"] = r.boundaryRatio;
    j["boundaryWarning"] = r.boundaryWarning;
    j["monotoneWarning"] = r.monotoneWarning;
    j["nehariResidual"] = std::abs(nehari(r.profile, prm)) /
                          std::max(i_func(r.profile, prm), 1e-300);
    j["grid"] = {{"nx", g.nx}, {"ny", g.ny}, {"Lx", g.Lx}, {"Ly", g.Ly}};
    return j;
}

json diagnostics_json(const DiagnosticsRecord& r) {
    json j;
    const auto& cols = DiagnosticsRecord::csv_columns();
    const auto vals = r.csv_values();
    for (size_t i = 0; i < cols.size(); ++i) j[cols[i]] = vals[i];
    return j;
}

GroundStateResult solve_ground_state(const RunConfig& cfg, double speedC = 1.0) {
    const std::string which = cfg.extra_or("groundstate.solver", "auto");
    if (which == "normalized") {
        const double rho = cfg.extra_num("groundstate.rho", 1.0);
        return normalized_ground_state(cfg.params, cfg.grid, rho, cfg.solver);
    }
    if (which == "petviashvili")
        return petviashvili(cfg.params.p1, cfg.params.alpha, cfg.grid, cfg.solver, cfg.params.mu1,
                            speedC);
    if (which == "auto" || which == "nehari")
        return nehari_ground_state(cfg.params, cfg.grid, nullptr, cfg.solver, speedC);
    fail(ErrorCode::ConfigError, "groundstate.solver: unknown solver '" + which + "'");
}

json blowup_report_json(const BlowupReport& rep) {
    return {{"flagged", rep.flagged},       {"reason", rep.reason},
            {"xdotGrowth", rep.xdotGrowth}, {"antiYGrowth", rep.antiYGrowth},
            {"uyGrowth", rep.uyGrowth},     {"maxBandEdge", rep.maxBandEdge}};
}

json trajectory_summary_json(const TrajectoryDiagnostics& traj, const TimeStepperConfig& scfg) {
    const DiagnosticsRecord& r0 = traj.records.front();
    double massDrift = 0.0, energyDrift = 0.0, momentumDrift = 0.0, maxSup = 0.0, maxXdot = 0.0;
    for (const auto& r : traj.records) {
        massDrift = std::max(massDrift, std::abs(r.mass - r0.mass));
        energyDrift = std::max(energyDrift, std::abs(r.energy - r0.energy));
        momentumDrift = std::max(momentumDrift, std::abs(r.momentum - r0.momentum));
        maxSup = std::max(maxSup, r.supNorm);
        maxXdot = std::max(maxXdot, std::sqrt(r.xdotNormSq));
    }
    json j;
    j["terminated"] = termination_name(traj.terminated);
    j["tFinal"] = traj.tFinal;
    j["steps"] = traj.stepsTaken;
    j["dtUsed"] = traj.dtUsed;
    j["massDriftRel"] = massDrift / std::max(std::abs(r0.mass), 1e-300);
    j["energyDriftRel"] = energyDrift / std::max(std::abs(r0.energy), 1e-300);
    j["momentumDriftAbs"] = momentumDrift; // conservation of P is reported, not gated
    j["maxSupNorm"] = maxSup;
    j["maxXdotNorm"] = maxXdot;
    j["initial"] = diagnostics_json(r0);
    j["final"] = diagnostics_json(traj.records.back());
    j["blowupMonitor"] =
        blowup_report_json(blowup_monitor(traj, scfg.blowupNormCap, scfg.bandGuardFraction));
    return j;
}

} // namespace

std::string error_report_json(const Error& e) {
    std::string field;
    const std::string what = e.what();
    const size_t sp = what.find_first_of(" :");
    if (sp != std::string::npos && what.substr(0, sp).find('.') != std::string::npos)
        field = what.substr(0, sp);
    json j;
    j["error"] = {{"code", error_code_name(e.code())}, {"message", what}};
    if (!field.empty()) j["error"]["field"] = field;
    return j.dump(2);
}

Field make_initial_data(const RunConfig& cfg, const std::string& spec) {
    const GridSpec& g = cfg.grid;
    const double amp = cfg.extra_num("initial.amplitude", 1.0);
    if (spec == "gaussian") {
        const double wx = cfg.extra_num("initial.width", std::min(g.Lx, g.Ly) / 8.0);
        Field f = Field::sample(g, [&](double x, double y) {
            return amp * std::exp(-(x * x + y * y) / (wx * wx));
        });
        return dealias(project_zero_x_mean(f));
    }
    if (spec == "random") {
        std::mt19937_64 rng(cfg.seed);
        return random_smooth_field(g, rng, amp);
    }
    if (spec == "groundstate") return solve_ground_state(cfg).profile;
    if (spec == "gardner") {
        Grid1D g1{g.nx, g.Lx};
        const GardnerSoliton gs =
            gardner_soliton_1d(cfg.extra_num("initial.A", 0.1), cfg.extra_num("initial.varsigma", 0.0),
                               cfg.extra_num("initial.B0", 1.0), 0.0, g1);
        Field f(g);
        for (int i = 0; i < g.nx; ++i)
            for (int j = 0; j < g.ny; ++j) f(i, j) = gs.profile[i];
        return dealias(project_zero_x_mean(f));
    }
    if (spec == "zaitsev") {
        const ZaitsevWave z = zaitsev_profile(cfg.extra_num("initial.beta0", 1.0),
                                              cfg.extra_num("initial.beta", 0.5), g);
        return dealias(project_zero_x_mean(z.field));
    }
    if (spec.rfind("mode:", 0) == 0) {
        const auto parts = split(spec.substr(5), ',');
        if (parts.size() < 2) fail(ErrorCode::ConfigError, "mode: expects mode:kx,ky[,amp]");
        const double kx = to_num("mode.kx", parts[0]);
        const double ky = to_num("mode.ky", parts[1]);
        const double a = parts.size() > 2 ? to_num("mode.amp", parts[2]) : amp;
        const double twoPi = 6.283185307179586476925286766559;
        return Field::sample(g, [&](double x, double y) {
            return a * std::cos(twoPi * kx * x / g.Lx + twoPi * ky * y / g.Ly);
        });
    }
    if (spec.rfind("file:", 0) == 0) {
        const LoadedField lf = read_field_binary(spec.substr(5));
        if (!(lf.field.grid() == g))
            fail(ErrorCode::ConfigError, "initial data file grid does not match grid.*");
        return lf.field;
    }
    fail(ErrorCode::ConfigError, "unknown initial data generator '" + spec + "'");
}

RunManifest cmd_groundstate(const RunConfig& cfg) {
    Stopwatch watch;
    cfg.params.validate();
    cfg.grid.validate();
    prepare_outdir(cfg);

    const GroundStateResult r = solve_ground_state(cfg, cfg.extra_num("groundstate.speed", 1.0));

    RunManifest man;
    man.configEcho = cfg.to_map();
    write_field_binary(cfg.outputs / "profile.bin", r.profile, cfg.params);
    man.add(cfg.outputs, "profile.bin", "field");
    {
        std::ofstream out(cfg.outputs / "groundstate.json");
        out << ground_state_json(r, cfg.params).dump(2) << '\n';
    }
    man.add(cfg.outputs, "groundstate.json", "report");
    write_surface_csv(cfg.outputs / "surface.csv", r.profile);
    man.add(cfg.outputs, "surface.csv", "plotdata");
    write_slices_csv(cfg.outputs / "slices.csv", r.profile);
    man.add(cfg.outputs, "slices.csv", "plotdata");
    if (cfg.grid.size() <= 64 * 64) {
        write_field_csv(cfg.outputs / "profile.csv", r.profile);
        man.add(cfg.outputs, "profile.csv", "field");
    }
    man.wallTimeSeconds = watch.seconds();
    man.finalize();
    man.write(cfg.outputs);
    return man;
}

RunManifest cmd_evolve(const RunConfig& cfg) {
    Stopwatch watch;
    cfg.params.validate();
    cfg.grid.validate();
    prepare_outdir(cfg);

    const std::string dataSpec = cfg.extra_or("evolve.initialData", "gaussian");
    Field u0 = make_initial_data(cfg, dataSpec);

    // speed-1 comoving comparison for ground-state initial data
    const bool compare =
        to_bool("evolve.compareTravelingWave",
                cfg.extra_or("evolve.compareTravelingWave",
                             dataSpec == "groundstate" ? "true" : "false"));
    std::vector<double> twTimes, twError;
    const double phiNorm = std::sqrt(mass(u0));
    auto hook = [&](double t, const Field& u) {
        if (!compare) return;
        Field ref = translate(u0, t, 0.0);
        ref -= u;
        twTimes.push_back(t);
        twError.push_back(std::sqrt(mass(ref)) / phiNorm);
    };

    TrajectoryDiagnostics traj =
        run(u0, cfg.params, cfg.stepper, {VirialWeight::y_squared()}, hook);

    RunManifest man;
    man.configEcho = cfg.to_map();
    std::vector<std::pair<std::string, std::vector<double>>> extraCols;
    if (compare) extraCols.emplace_back("travelingWaveError", twError);
    write_trajectory_csv(cfg.outputs / "trajectory.csv", traj, extraCols);
    man.add(cfg.outputs, "trajectory.csv", "timeseries");

    json summary = trajectory_summary_json(traj, cfg.stepper);
    if (compare && !twError.empty()) summary["travelingWaveErrorFinal"] = twError.back();
    {
        std::ofstream out(cfg.outputs / "summary.json");
        out << summary.dump(2) << '\n';
    }
    man.add(cfg.outputs, "summary.json", "report");

    write_field_binary(cfg.outputs / "final_state.bin", traj.finalState, cfg.params);
    man.add(cfg.outputs, "final_state.bin", "field");

    man.wallTimeSeconds = watch.seconds();
    man.finalize();
    man.write(cfg.outputs);
    return man;
}

RunManifest cmd_classify(const RunConfig& cfg) {
    Stopwatch watch;
    cfg.params.validate();
    cfg.grid.validate();
    prepare_outdir(cfg);

    Field u0 = make_initial_data(cfg, cfg.extra_or("classify.initialData", "gaussian"));

    // sharp constants come from homogeneous ground states, cached per exponent
    std::map<double, SharpConstant> cache;
    SharpConstantOracle oracle = [&](double p) {
        auto it = cache.find(p);
        if (it != cache.end()) return it->second;
        PetviashviliConfig scfg = cfg.solver;
        scfg.tol = std::max(scfg.tol, 1e-9);
        const GroundStateResult gs = petviashvili(p, cfg.params.alpha, cfg.grid, scfg);
        const SharpConstant sc =
            sharp_constant(mass(gs.profile), gs.actionValue, p, cfg.params.alpha);
        cache[p] = sc;
        return sc;
    };

    const ThresholdReport rep = classify_energy_subcritical(u0, cfg.params, oracle);

    json j;
    j["threshold"] = {{"regime", regime_name(rep.regime)},
                      {"verdict", verdict_name(rep.verdict)},
                      {"e0", rep.e0},
                      {"xdot0", rep.xdot0},
                      {"closedFormDisagreement", rep.closedFormDisagreement}};
    if (rep.z0) j["threshold"]["z0"] = *rep.z0;
    if (rep.z1) j["threshold"]["z1"] = *rep.z1;
    if (rep.hMax) j["threshold"]["hMax"] = *rep.hMax;
    j["threshold"]["hParams"] = json::array();
    for (const auto& [coeff, expo] : rep.hParams)
        j["threshold"]["hParams"].push_back({{"coeff", coeff}, {"exponent", expo}});
    j["threshold"]["hypotheses"] = json::object();
    for (const auto& [name, ok] : rep.hypotheses) j["threshold"]["hypotheses"][name] = ok;

    const std::string caseStr = cfg.extra_or("classify.case", "none");
    if (caseStr != "none") {
        BlowupCase bc;
        if (caseStr == "i") bc = BlowupCase::i;
        else if (caseStr == "ii") bc = BlowupCase::ii;
        else if (caseStr == "iii") bc = BlowupCase::iii;
        else fail(ErrorCode::ConfigError, "classify.case: expected i, ii, iii or none");
        std::optional<double> th, ta;
        if (cfg.extra.count("classify.theta")) th = cfg.extra_num("classify.theta", 0.0);
        if (cfg.extra.count("classify.tau")) ta = cfg.extra_num("classify.tau", 0.0);
        const BlowupConditions bcond = blowup_conditions(u0, cfg.params, bc, th, ta);
        json bj;
        bj["case"] = caseStr;
        bj["met"] = bcond.met;
        bj["theta"] = bcond.theta;
        bj["tau"] = bcond.tau;
        bj["cTau"] = bcond.cTau;
        bj["aP1"] = bcond.aP1;
        bj["aP2"] = bcond.aP2;
        bj["conditions"] = json::object();
        for (const auto& [name, ok] : bcond.conditionsMet) bj["conditions"][name] = ok;
        j["blowup"] = bj;
    }

    RunManifest man;
    man.configEcho = cfg.to_map();

    if (to_bool("classify.confirm", cfg.extra_or("classify.confirm", "false"))) {
        TrajectoryDiagnostics traj = run(u0, cfg.params, cfg.stepper);
        write_trajectory_csv(cfg.outputs / "confirm_trajectory.csv", traj);
        man.add(cfg.outputs, "confirm_trajectory.csv", "timeseries");
        const json summary = trajectory_summary_json(traj, cfg.stepper);
        {
            std::ofstream out(cfg.outputs / "confirm_summary.json");
            out << summary.dump(2) << '\n';
        }
        man.add(cfg.outputs, "confirm_summary.json", "report");
        const bool flagged = traj.terminated == Termination::blowupDetected;
        j["confirmation"] = {{"terminated", termination_name(traj.terminated)},
                             {"blowupFlagged", flagged},
                             {"consistentWithVerdict",
                              rep.verdict == Verdict::boundedGuaranteed ? !flagged : true}};
    }

    {
        std::ofstream out(cfg.outputs / "classify_report.json");
        out << j.dump(2) << '\n';
    }
    man.add(cfg.outputs, "classify_report.json", "report");
    man.wallTimeSeconds = watch.seconds();
    man.finalize();
    man.write(cfg.outputs);
    return man;
}

RunManifest cmd_instability(const RunConfig& cfg) {
    Stopwatch watch;
    cfg.params.validate();
    cfg.grid.validate();
    prepare_outdir(cfg);

    const double BD = cfg.extra_num("instability.BD", 1.01);
    const double b = cfg.extra_num("instability.b", 2.0 / (cfg.params.alpha + 2.0));
    const double delta = cfg.extra_num("instability.delta", 0.1);
    if (!(BD > 1.0)) fail(ErrorCode::InvalidParams, "instability.BD: must exceed 1");

    const GroundStateResult phi = solve_ground_state(cfg);
    const InstabilitySetup setup = instability_data(phi, cfg.params, b, BD, delta);

    json sj;
    sj["b"] = setup.b;
    sj["d"] = setup.d;
    sj["B"] = setup.B;
    sj["D"] = setup.D;
    sj["BD"] = BD;
    sj["rBD"] = setup.rBD;
    sj["rBDm1"] = setup.rBDm1;
    sj["actionW"] = setup.actionW;
    sj["mEstimate"] = setup.mEstimate;
    sj["admissible"] = setup.admissible;
    sj["deltaRequested"] = delta;
    sj["deltaDistance"] = setup.deltaDistance;
    sj["deltaOk"] = setup.deltaOk;
    sj["bDoublings"] = setup.bDoublings;
    sj["searchTrace"] = setup.searchTrace;

    RunManifest man;
    man.configEcho = cfg.to_map();

    // unstable run from w
    TrajectoryDiagnostics unstable = run(setup.w, cfg.params, cfg.stepper);
    write_trajectory_csv(cfg.outputs / "unstable_trajectory.csv", unstable);
    man.add(cfg.outputs, "unstable_trajectory.csv", "timeseries");
    {
        std::ofstream out(cfg.outputs / "unstable_summary.json");
        out << trajectory_summary_json(unstable, cfg.stepper).dump(2) << '\n';
    }
    man.add(cfg.outputs, "unstable_summary.json", "report");

    // paired control from the small-amplitude side of Lambda+
    Field control = phi.profile;
    control *= cfg.extra_num("instability.controlScale", 0.5);
    const LambdaReport controlMembership =
        lambda_membership(control, cfg.params, setup.b, setup.d, setup.mEstimate);
    TimeStepperConfig controlCfg = cfg.stepper;
    controlCfg.tEnd = unstable.tFinal; // same horizon as the unstable run
    TrajectoryDiagnostics ctrl = run(control, cfg.params, controlCfg);
    write_trajectory_csv(cfg.outputs / "control_trajectory.csv", ctrl);
    man.add(cfg.outputs, "control_trajectory.csv", "timeseries");
    {
        std::ofstream out(cfg.outputs / "control_summary.json");
        out << trajectory_summary_json(ctrl, controlCfg).dump(2) << '\n';
    }
    man.add(cfg.outputs, "control_summary.json", "report");

    sj["unstableTerminated"] = termination_name(unstable.terminated);
    sj["controlTerminated"] = termination_name(ctrl.terminated);
    sj["controlMembership"] = lambda_membership_name(controlMembership.membership);
    {
        std::ofstream out(cfg.outputs / "instability_setup.json");
        out << sj.dump(2) << '\n';
    }
    man.add(cfg.outputs, "instability_setup.json", "report");

    man.wallTimeSeconds = watch.seconds();
    man.finalize();
    man.write(cfg.outputs);
    return man;
}

namespace {

// sweep cell: base config with one value per axis substituted
struct SweepCell {
    RunConfig cfg;
    std::string label;
    std::vector<std::pair<std::string, std::string>> assignment;
};

std::vector<SweepCell> expand_sweep(const RunConfig& base) {
    if (base.sweepAxes.empty())
        fail(ErrorCode::ConfigError, "sweep: no sweep.axis.* keys configured");
    std::vector<SweepCell> cells;
    std::vector<size_t> idx(base.sweepAxes.size(), 0);
    while (true) {
        auto kv = base.to_map();
        kv.erase("command");
        std::map<std::string, std::string> cellMap;
        for (auto& [k, v] : kv)
            if (k.rfind("sweep.", 0) != 0) cellMap[k] = v;
        SweepCell cell;
        for (size_t a = 0; a < base.sweepAxes.size(); ++a) {
            const auto& [key, vals] = base.sweepAxes[a];
            cellMap[key] = vals[idx[a]];
            cell.assignment.emplace_back(key, vals[idx[a]]);
        }
        cellMap["command"] = base.extra.count("sweep.command") ? base.extra.at("sweep.command")
                                                               : std::string("groundstate");
        cell.cfg = RunConfig::from_map(cellMap);
        cell.cfg.seed = base.seed;
        char buf[16];
        std::snprintf(buf, sizeof buf, "run_%03zu", cells.size());
        cell.label = buf;
        cell.cfg.outputs = base.outputs / cell.label;
        cells.push_back(std::move(cell));

        size_t a = 0;
        for (; a < idx.size(); ++a) {
            if (++idx[a] < base.sweepAxes[a].second.size()) break;
            idx[a] = 0;
        }
        if (a == idx.size()) break;
    }
    return cells;
}

} // namespace

RunManifest cmd_sweep(const RunConfig& cfg) {
    Stopwatch watch;
    prepare_outdir(cfg);
    std::vector<SweepCell> cells = expand_sweep(cfg);

    int workers = cfg.workers;
    if (const char* env = std::getenv("GKP_WORKERS")) workers = std::atoi(env);
    if (workers <= 0) workers = static_cast<int>(std::thread::hardware_concurrency());
    workers = std::max(1, std::min<int>(workers, static_cast<int>(cells.size())));

    // memory guard: refuse grids whose working set would be unreasonable
    for (const SweepCell& c : cells) {
        const double bytes = 16.0 * 10.0 * c.cfg.grid.size();
        if (bytes * workers > 8e9)
            fail(ErrorCode::ConfigError,
                 "sweep: estimated memory exceeds 8 GB; reduce workers or grid");
    }

    std::vector<std::string> status(cells.size());
    std::vector<std::string> errors(cells.size());
    std::atomic<size_t> next{0};
    auto worker = [&] {
        while (true) {
            const size_t i = next.fetch_add(1);
            if (i >= cells.size()) return;
            try {
                run_command(cells[i].cfg);
                status[i] = "ok";
            } catch (const Error& e) {
                status[i] = "failed";
                errors[i] = e.what();
            } catch (const std::exception& e) {
                status[i] = "failed";
                errors[i] = e.what();
            }
        }
    };
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();

    RunManifest man;
    man.configEcho = cfg.to_map();

    json index;
    index["command"] = cfg.extra.count("sweep.command") ? cfg.extra.at("sweep.command")
                                                        : std::string("groundstate");
    index["workers"] = workers;
    index["runs"] = json::array();
    int failures = 0;
    for (size_t i = 0; i < cells.size(); ++i) {
        json rj;
        rj["label"] = cells[i].label;
        rj["status"] = status[i];
        if (!errors[i].empty()) rj["error"] = errors[i];
        rj["assignment"] = json::object();
        for (const auto& [k, v] : cells[i].assignment) rj["assignment"][k] = v;
        if (status[i] == "ok") {
            std::ifstream mf(cells[i].cfg.outputs / "manifest.json");
            if (mf) {
                json sub = json::parse(mf, nullptr, false);
                if (!sub.is_discarded()) rj["stateHash"] = sub.value("stateHash", "");
            }
        } else {
            ++failures;
        }
        index["runs"].push_back(rj);
    }
    index["failures"] = failures;

    // overlay plot data for ground-state sweeps: one slice column per run
    if (index["command"] == "groundstate") {
        std::ofstream xz(cfg.outputs / "overlay_xz.csv");
        std::ofstream yz(cfg.outputs / "overlay_yz.csv");
        bool first = true;
        std::vector<std::vector<std::string>> xzCols, yzCols;
        for (size_t i = 0; i < cells.size(); ++i) {
            if (status[i] != "ok") continue;
            std::ifstream sl(cells[i].cfg.outputs / "slices.csv");
            if (!sl) continue;
            std::string line;
            std::getline(sl, line); // header
            std::vector<std::string> xcol, ycol, xs, ys;
            while (std::getline(sl, line)) {
                const auto f = split(line, ',');
                if (f.size() >= 5) {
                    xs.push_back(f[1]);
                    xcol.push_back(f[2]);
                    ys.push_back(f[3]);
                    ycol.push_back(f[4]);
                }
            }
            if (first) {
                xzCols.push_back(xs);
                yzCols.push_back(ys);
                first = false;
            }
            xzCols.push_back(xcol);
            yzCols.push_back(ycol);
        }
        auto writeOverlay = [&](std::ofstream& out, const std::vector<std::vector<std::string>>& cols,
                                const char* coord) {
            if (cols.empty()) return;
            out << coord;
            for (size_t c = 1; c < cols.size(); ++c) out << ",run" << c - 1;
            out << '\n';
            for (size_t r = 0; r < cols[0].size(); ++r) {
                for (size_t c = 0; c < cols.size(); ++c)
                    out << (c ? "," : "") << (r < cols[c].size() ? cols[c][r] : "");
                out << '\n';
            }
        };
        writeOverlay(xz, xzCols, "x");
        writeOverlay(yz, yzCols, "y");
        xz.close();
        yz.close();
        man.add(cfg.outputs, "overlay_xz.csv", "plotdata");
        man.add(cfg.outputs, "overlay_yz.csv", "plotdata");
    }

    {
        std::ofstream out(cfg.outputs / "index.json");
        out << index.dump(2) << '\n';
    }
    man.add(cfg.outputs, "index.json", "index");
    man.wallTimeSeconds = watch.seconds();
    man.finalize();
    man.write(cfg.outputs);
    return man;
}

RunManifest run_command(const RunConfig& cfg) {
    if (cfg.command == "groundstate") return cmd_groundstate(cfg);
    if (cfg.command == "evolve") return cmd_evolve(cfg);
    if (cfg.command == "classify") return cmd_classify(cfg);
    if (cfg.command == "instability") return cmd_instability(cfg);
    if (cfg.command == "sweep") return cmd_sweep(cfg);
    if (cfg.command == "validate") return cmd_validate(cfg);
    fail(ErrorCode::ConfigError, "command: unknown command '" + cfg.command + "'");
}

} // namespace gkp
