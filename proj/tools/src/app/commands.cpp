#include "commands.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <iostream>

#include "fracrit/error.hpp"
#include "fracrit/morrey.hpp"
#include "fracrit/parallel.hpp"
#include "fracrit/random_field.hpp"
#include "fracrit/snapshot.hpp"
#include "report.hpp"

#ifndef FRACRIT_VERSION
#define FRACRIT_VERSION "unknown"
#endif

namespace fracrit::app {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Where a command writes: either <dir>/<default_name> or an explicit .json path.
struct Outputs {
    fs::path dir;
    fs::path main;
    std::string stem;  // prefix for companion files when main is explicit

    fs::path companion(const std::string& name) const {
        return stem.empty() ? dir / name : dir / (stem + "." + name);
    }
};

Outputs resolve_outputs(const RunConfig& cfg, const CommandOptions& o, const std::string& default_name) {
    Outputs out;
    const std::string target = o.out ? *o.out : cfg.output_dir;
    const fs::path t(target);
    if (t.extension() == ".json") {
        out.dir = t.has_parent_path() ? t.parent_path() : fs::path(".");
        out.main = t;
        out.stem = t.stem().string();
    } else {
        out.dir = t;
        out.main = t / default_name;
    }
    fs::create_directories(out.dir);
    return out;
}

void write_json(const fs::path& path, const json& j) {
    atomic_write(path.string(), j.dump(2) + "\n");
}

json manifest(const RunConfig& cfg, const CommandOptions& o, const std::string& command, const json& timing,
              const json& results) {
    json m;
    m["command"] = command;
    m["code_version"] = FRACRIT_VERSION;
    m["config"] = cfg.echo;
    m["seed"] = cfg.seed;
    m["threads"] = o.threads;
    m["results"] = results;
    m["timing"] = timing;  // wall-clock seconds; the only non-reproducible block
    return m;
}

void emit(const CommandOptions& o, const json& j) {
    if (!o.quiet) std::cout << j.dump(2) << "\n";
}

json check(const std::string& suite, const std::string& name, bool ok, double value, double threshold,
           bool informational = false) {
    json c = {{"suite", suite}, {"name", name}, {"ok", ok}, {"value", value}, {"threshold", threshold}};
    if (informational) c["informational"] = true;
    return c;
}

double rel_diff(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

} // namespace

int cmd_calibrate(const RunConfig& cfg, const CommandOptions& o) {
    const auto t0 = Clock::now();
    const Outputs out = resolve_outputs(cfg, o, "calib.json");
    const Calibration& cal = calibration(cfg.grid, cfg.params, cfg.calibration);
    SobolevOptions so;
    so.seed = cfg.seed;
    const SobolevReport sr = sobolev_report(cfg.grid, cfg.params, so);
    json j;
    j["beta"] = cal.beta;
    j["kappa"] = cal.kappa;
    j["lambda"] = cal.lambda;
    j["residual"] = cal.residual;
    j["S_num"] = sr.S_num;
    j["hs_norm2_W"] = sr.hs_norm2_W;
    j["energy_W"] = sr.energy_W;
    j["energy_identity_error"] = sr.energy_identity_error;
    j["probes"] = {{"count", sr.probes}, {"violations", sr.violations}, {"min_delta", sr.min_delta}};
    j["zero_mode"] = to_string(cfg.params.zero_mode);
    write_json(out.main, j);
    write_json(out.companion("manifest.json"), manifest(cfg, o, "calibrate", {{"total", seconds_since(t0)}}, j));
    emit(o, j);
    return exit_ok;
}

int cmd_constants(const RunConfig& cfg, const CommandOptions& o) {
    const auto t0 = Clock::now();
    const Outputs out = resolve_outputs(cfg, o, "constants.json");
    const double S = sobolev_constant(cfg.grid, cfg.params);
    const ProblemData d = build_problem(cfg, S);
    const Smallness sm = check_smallness(d, S);
    json j;
    j["C0"] = C0_constant(d);
    j["alpha"] = alpha_root(cfg.params);
    j["r1"] = r1_radius(d, S);
    j["S_num"] = S;
    j["a_sup"] = d.a_sup();
    j["check_smallness"] = to_json(sm);
    j["multiplicity_hypothesis"] = multiplicity_hypothesis(d);
    write_json(out.main, j);
    write_json(out.companion("manifest.json"), manifest(cfg, o, "constants", {{"total", seconds_since(t0)}}, j));
    emit(o, j);
    return exit_ok;
}

json verify_suites(const RunConfig& cfg) {
    const GridSpec& g = cfg.grid;
    const FracParams& p = cfg.params;
    const double ts = p.two_star();
    json checks = json::array();

    // Energy identity on the (possibly perturbed) calibrated bubble.
    Field W = reference_bubble(g, p);
    W *= cfg.beta_scale;
    const double S = sobolev_quotient(W, p);
    const ProblemData unit(p, Field(g, 1.0), Field(g));
    const double E = energy_bar(unit, W);
    const double target = (p.s / p.N) * std::pow(S, p.N / (2.0 * p.s));
    checks.push_back(check("energy-identity", "bar-energy-of-W", rel_diff(E, target) < 1e-3, rel_diff(E, target), 1e-3));
    const double res = bubble_residual(W, p);
    checks.push_back(check("energy-identity", "bubble-residual", res <= cfg.calibration.max_residual, res,
                           cfg.calibration.max_residual));

    // Scaling invariances under co-scaled rescaling with lattice-aligned shifts.
    const Field W0 = reference_bubble(g, p);
    const double hs0 = hs_norm2(W0, p), lp0 = lp_norm(W0, ts);
    const double mo0 = morrey_norm(W0, MorreySpec::make(g, p));
    const std::vector<std::pair<double, int>> cases = {{0.5, 5}, {2.0, -7}, {4.0, 3}, {0.25, 11}};
    for (const auto& [r, k] : cases) {
        Point y{0.0, 0.0, 0.0};
        y[0] = r * k * g.h();
        const Field V = rescale(W0, r, y, p);
        const std::string tag = "r=" + format_double(r) + ",shift=" + std::to_string(k) + "h";
        const double dh = rel_diff(hs_norm2(V, p), hs0);
        const double dl = rel_diff(lp_norm(V, ts), lp0);
        const double dm = rel_diff(morrey_norm(V, MorreySpec::make(V.grid(), p)), mo0);
        checks.push_back(check("scaling", "hs_norm2 " + tag, dh < 1e-6, dh, 1e-6));
        checks.push_back(check("scaling", "lp_norm " + tag, dl < 1e-6, dl, 1e-6));
        checks.push_back(check("scaling", "morrey_norm " + tag, dm < 5e-2, dm, 5e-2));
    }

    // Morrey: Hoelder bound ||u||_M <= 2^{-(N-2s)/2} ||u||_{2*} and a finite interpolation ratio.
    const MorreySpec ms = MorreySpec::make(g, p);
    const double theta = 0.5 * (2.0 / ts + 1.0);
    double worst_holder = -1e300, worst_ratio = 0.0;
    for (int i = 0; i < 8; ++i) {
        Rng rng = derived_rng(cfg.seed, 1000 + i);
        const Field u = i == 0 ? W0 : random_smooth_field(g, p.s, rng);
        const double lhs = morrey_norm(u, ms);
        const double rhs = std::pow(2.0, -(p.N - 2.0 * p.s) / 2.0) * lp_norm(u, ts);
        worst_holder = std::max(worst_holder, lhs / rhs - 1.0);
        worst_ratio = std::max(worst_ratio, interpolation_check(u, ms, p, theta));
    }
    checks.push_back(check("morrey", "holder-upper-bound", worst_holder <= 1e-12, worst_holder, 1e-12));
    checks.push_back(check("morrey", "interpolation-ratio-finite", std::isfinite(worst_ratio) && worst_ratio > 0.0,
                           worst_ratio, 0.0));

    // Lower bound on U for Nehari-projected random fields.
    const double S_num = sobolev_constant(g, p);
    const ProblemData d = build_problem(cfg, S_num);
    const double bound = C0_constant(d) * std::pow(S_num, p.N / (4.0 * p.s));
    const int n_fields = 50;
    std::vector<double> margin(n_fields);
    parallel_for(n_fields, [&](std::size_t i) {
        Rng rng = derived_rng(cfg.seed, 2000 + i);
        Field u = random_smooth_field(g, p.s, rng);
        u *= nehari_scale(d, u);
        margin[i] = (4.0 * p.s / (p.N + 2.0 * p.s)) * std::sqrt(hs_norm2(u, p)) - bound;
    });
    int violations = 0;
    double min_margin = 1e300;
    for (double m : margin) {
        if (m < -1e-6) ++violations;
        min_margin = std::min(min_margin, m);
    }
    checks.push_back(check("nehari-lower-bound", "violations", violations == 0, violations, 0.0));
    checks.push_back(check("nehari-lower-bound", "min-margin", min_margin >= -1e-6, min_margin, -1e-6));

    // phi and alpha.
    const double alpha = alpha_root(p);
    checks.push_back(check("phi-alpha", "phi(1)", std::abs(phi(1.0, p)) < 1e-12, phi(1.0, p), 1e-12));
    checks.push_back(check("phi-alpha", "phi(alpha)", std::abs(phi(alpha, p)) < 1e-10, phi(alpha, p), 1e-10));
    checks.push_back(check("phi-alpha", "alpha>1", alpha > 1.0, alpha, 1.0));
    checks.push_back(check("phi-alpha", "sign-pattern", phi_sign_pattern(p), 1.0, 1.0));

    const Smallness sm = check_smallness(d, S_num);
    checks.push_back(check("smallness", "dual-norm-threshold", sm.ok, sm.lhs, sm.rhs, true));
    return checks;
}

int cmd_verify(const RunConfig& cfg, const CommandOptions& o) {
    const auto t0 = Clock::now();
    const Outputs out = resolve_outputs(cfg, o, "verify.json");
    const json checks = verify_suites(cfg);
    json failing = json::array();
    for (const auto& c : checks)
        if (!c.at("ok").get<bool>() && !c.contains("informational"))
            failing.push_back(c.at("suite").get<std::string>() + "/" + c.at("name").get<std::string>());
    json j;
    j["checks"] = checks;
    j["failing"] = failing;
    j["all_ok"] = failing.empty();
    write_json(out.main, j);
    write_json(out.companion("manifest.json"),
               manifest(cfg, o, "verify", {{"total", seconds_since(t0)}}, {{"all_ok", failing.empty()}, {"failing", failing}}));
    emit(o, j);
    return failing.empty() ? exit_ok : exit_checks_failed;
}

int cmd_decompose(const RunConfig& cfg, const CommandOptions& o) {
    const auto t0 = Clock::now();
    if (o.in.empty()) throw ConfigError("decompose needs --in FIELD");
    const Snapshot snap = read_snapshot(o.in);
    if (snap.field.grid() != cfg.grid) throw ConfigError("field grid does not match the configured grid");
    if (snap.s != cfg.params.s) throw ConfigError("field order s does not match the configured s");
    const Outputs out = resolve_outputs(cfg, o, "decomp.json");
    const double S = sobolev_constant(cfg.grid, cfg.params);
    const ProblemData d = build_problem(cfg, S);
    const DecompositionResult r = extract_profiles(snap.field, d, cfg.solve.decompose);
    json j = to_json(r, cfg.grid.N);
    const fs::path rem = out.companion("remainder.bin");
    write_snapshot(rem.string(), r.remainder, cfg.params.s, json{{"role", "remainder"}}.dump());
    j["remainder"] = rem.filename().string();
    write_json(out.main, j);
    write_json(out.companion("manifest.json"),
               manifest(cfg, o, "decompose", {{"total", seconds_since(t0)}},
                        {{"bubbles", r.bubbles.size()}, {"halt_reason", r.halt_reason}}));
    emit(o, j);
    return exit_ok;
}

int cmd_solve(const RunConfig& cfg, const CommandOptions& o) {
    const auto t0 = Clock::now();
    const Outputs out = resolve_outputs(cfg, o, "report.json");
    const double S = sobolev_constant(cfg.grid, cfg.params);
    const ProblemData d = build_problem(cfg, S);
    const SolveReport rep = solve_two(d, cfg.solve);
    const double t_solve = seconds_since(t0);

    json j = to_json(rep, cfg.grid.N);
    std::vector<TraceRow> trace = rep.first.trace;
    trace.insert(trace.end(), rep.mp.trace.begin(), rep.mp.trace.end());
    const fs::path csv = out.companion("trace.csv");
    const fs::path u0 = out.companion("u0.bin");
    const fs::path v0 = out.companion("v0.bin");
    j["files"] = {{"trace", csv.filename().string()},
                  {"u0", u0.filename().string()},
                  {"v0", v0.filename().string()}};
    atomic_write(csv.string(), trace_csv(trace));
    write_snapshot(u0.string(), rep.first.u0, cfg.params.s, json{{"role", "u0"}, {"energy", rep.first.c0}}.dump());
    write_snapshot(v0.string(), rep.mp.v0, cfg.params.s, json{{"role", "v0"}, {"energy", rep.mp.gamma}}.dump());
    write_json(out.main, j);

    json checks = json::object();
    for (const auto& c : rep.checks) checks[c.name] = c.ok;
    write_json(out.companion("manifest.json"),
               manifest(cfg, o, "solve", {{"solve", t_solve}, {"total", seconds_since(t0)}},
                        {{"constants", j["constants"]},
                         {"c0", rep.first.c0},
                         {"gamma", rep.mp.gamma},
                         {"c1", rep.c1.value},
                         {"labels", rep.labels},
                         {"checks", checks}}));
    if (!o.quiet) {
        std::cout << "c0 = " << format_double(rep.first.c0) << "\ngamma = " << format_double(rep.mp.gamma)
                  << "\nc1 = " << format_double(rep.c1.value) << "\n";
        for (const auto& c : rep.checks) std::cout << (c.ok ? "ok   " : "FAIL ") << c.name << "\n";
        for (const auto& l : rep.labels) std::cout << "label " << l << "\n";
    }
    return j["all_checks_ok"].get<bool>() ? exit_ok : exit_checks_failed;
}

int run_command(const std::string& name, const CommandOptions& o) {
    try {
        RunConfig cfg = o.config ? load_config(*o.config) : parse_config(default_config_json());
        if (o.seed) {
            cfg.seed = *o.seed;
            cfg.solve.c1.seed = *o.seed;
            cfg.echo["seed"] = *o.seed;
        }
        if (o.threads < 1) throw ConfigError("--threads must be >= 1");
        set_thread_count(o.threads);
        set_default_calibration_options(cfg.calibration);
        if (name == "calibrate") return cmd_calibrate(cfg, o);
        if (name == "constants") return cmd_constants(cfg, o);
        if (name == "verify") return cmd_verify(cfg, o);
        if (name == "decompose") return cmd_decompose(cfg, o);
        if (name == "solve") return cmd_solve(cfg, o);
        throw ConfigError("unknown command '" + name + "'");
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return exit_config;
    } catch (const Error& e) {
        std::cerr << "error [" << e.code() << "]: " << e.what() << "\n";
        return e.code() == "no-descent" ? exit_no_descent : exit_other;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return exit_config;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_other;
    }
}

} // namespace fracrit::app
