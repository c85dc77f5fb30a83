#include "report.hpp"

#include <cstdio>

namespace fracrit::app {

using json = nlohmann::ordered_json;

json point_to_json(const Point& x, int N) {
    json a = json::array();
    for (int i = 0; i < N; ++i) a.push_back(x[i]);
    return a;
}

json to_json(const Smallness& s) {
    return {{"ok", s.ok}, {"dual_norm_f", s.lhs}, {"threshold", s.rhs}, {"f_nonzero", s.f_nonzero}};
}

json to_json(const RegionTag& r) {
    return {{"region", to_string(r.region)}, {"g", r.g}, {"tol", r.tol}};
}

json to_json(const VerifyReport& v) {
    return {{"residual", v.residual},
            {"min", v.min},
            {"max", v.max},
            {"region", to_json(v.region)},
            {"energy", v.energy},
            {"negative_part_ratio", v.negative_part_ratio},
            {"flags", v.flags}};
}

json to_json(const DecompositionResult& r, int N) {
    json bubbles = json::array();
    for (const auto& b : r.bubbles)
        bubbles.push_back({{"center", point_to_json(b.center, N)},
                           {"scale", b.scale},
                           {"a_local", b.a_local},
                           {"local_coefficient", b.local_coefficient},
                           {"energy", b.energy},
                           {"energy_reference", b.energy_reference},
                           {"fit_residual", b.fit_residual},
                           {"concentration", b.concentration},
                           {"concentration_radius", b.concentration_radius}});
    return {{"bubbles", bubbles},
            {"morrey_history", r.morrey_history},
            {"separation", r.separation},
            {"stop_threshold", r.stop_threshold},
            {"halt_reason", r.halt_reason},
            {"flags", r.flags}};
}

json to_json(const SolveReport& r, int N) {
    json checks = json::array();
    bool all_ok = true;
    for (const auto& c : r.checks) {
        checks.push_back({{"name", c.name}, {"ok", c.ok}, {"lhs", c.lhs}, {"rhs", c.rhs}});
        all_ok = all_ok && c.ok;
    }
    json ladder = json::array();
    for (const auto& t : r.t0.ladder) ladder.push_back({{"t", t.t}, {"g", t.g}, {"energy", t.energy}});

    json out;
    out["constants"] = {{"S_num", r.S_num},
                        {"hs_norm2_W", r.hs_norm2_W},
                        {"C0", r.C0},
                        {"alpha", r.alpha},
                        {"phi_a_sup", r.phi_a_sup},
                        {"r1", r.r1}};
    out["smallness"] = to_json(r.smallness);
    out["labels"] = r.labels;
    out["first"] = {{"c0", r.first.c0},
                    {"residual", r.first.residual},
                    {"iterations", r.first.iterations},
                    {"norm", r.first.norm},
                    {"r1", r.first.r1}};
    out["t0"] = {{"t0", r.t0.t0}, {"ladder", ladder}};
    out["mountain_pass"] = {{"gamma", r.mp.gamma},
                            {"residual", r.mp.residual},
                            {"sweeps", r.mp.sweeps},
                            {"max_node", r.mp.max_node},
                            {"initial_max_energy", r.mp.initial_max_energy},
                            {"initial_crossing", r.mp.initial_crossing},
                            {"path_energies", r.mp.final_path.energies}};
    out["c1"] = {{"value", r.c1.value},
                 {"best_start", r.c1.best_start},
                 {"candidates", r.c1.candidates},
                 {"running_min", r.c1.running_min},
                 {"projection_g", r.c1.projection_g}};
    out["verify_u0"] = to_json(r.verify_u0);
    out["verify_v0"] = to_json(r.verify_v0);
    out["distance_u0_v0"] = r.distance_u0_v0;
    if (r.deviation_decomposition)
        out["deviation_decomposition"] = to_json(*r.deviation_decomposition, N);
    else
        out["deviation_decomposition"] = nullptr;
    out["checks"] = checks;
    out["all_checks_ok"] = all_ok;
    return out;
}

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string trace_csv(const std::vector<TraceRow>& rows) {
    std::string out = "phase,iteration,energy,grad_norm,max_node\n";
    for (const auto& r : rows) {
        out += r.phase;
        out += ',';
        out += std::to_string(r.iteration);
        out += ',';
        out += format_double(r.energy);
        out += ',';
        out += format_double(r.grad_norm);
        out += ',';
        out += std::to_string(r.max_node);
        out += '\n';
    }
    return out;
}

} // namespace fracrit::app
