#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fracrit/decompose.hpp"
#include "fracrit/functionals.hpp"

namespace fracrit {

struct DescentConfig {
    double armijo = 1e-4;       // sufficient-decrease parameter in (0, 1)
    double tol_g = 1e-10;       // dual-norm gradient tolerance
    int max_iterations = 5000;
    bool ball_projection = true;
    void validate() const;
};

struct TraceRow {
    std::string phase;   // "first", "path", "climb", "c1"
    int iteration = 0;
    double energy = 0.0;
    double grad_norm = 0.0;
    int max_node = -1;
};

struct FirstSolution {
    Field u0;
    double c0 = 0.0;
    double residual = 0.0;
    int iterations = 0;
    double r1 = 0.0;
    double norm = 0.0;
    std::vector<TraceRow> trace;
};

// Preconditioned descent from 0 inside the ball of radius r1.
FirstSolution find_first_solution(const ProblemData& d, const DescentConfig& cfg, double S_num);

// w_t(x) = W((x - xbar0)/t) built from the calibrated reference bubble.
Field scaled_profile(const ProblemData& d, double t);
// u0 + a(xbar0)^{-(N-2s)/(4s)} w_t
Field path_endpoint(const ProblemData& d, const Field& u0, double t);

struct T0Rung {
    double t = 0.0;
    double g = 0.0;
    double energy = 0.0;
};

struct T0Result {
    double t0 = 0.0;
    std::vector<T0Rung> ladder;
};

T0Result select_t0(const ProblemData& d, const Field& u0);

struct MountainPassConfig {
    int P = 21;
    double tol_mp = 1e-6;
    int max_sweeps = 20000;
    int reparam_every = 10;
    int plateau_window = 50;     // sweeps without max-energy progress before climbing
    int stall_sweeps = 500;      // sweeps without gradient progress before "stalled-path"
    double climb_switch = 1e-2;  // gradient norm below which climbing starts
    double climb_step = 0.3;
    double armijo = 1e-4;
    void validate() const;
};

struct PathState {
    std::vector<Field> nodes;
    std::vector<double> energies;
    int max_node = 0;
};

struct MountainPassResult {
    Field v0;
    double gamma = 0.0;
    double residual = 0.0;
    int sweeps = 0;
    int max_node = 0;
    double initial_max_energy = 0.0;
    bool initial_crossing = false;   // g changes sign along the initial path
    PathState final_path;
    std::vector<TraceRow> trace;
};

PathState initial_path(const ProblemData& d, const Field& u0, double t0, int P);
// Equal Hs arc-length redistribution with fixed endpoints.
void reparameterize(PathState& path, const FracParams& p);

MountainPassResult mountain_pass(const ProblemData& d, const Field& u0, double t0, const MountainPassConfig& cfg);

struct C1Config {
    int n_starts = 16;
    int max_steps = 200;
    std::uint64_t seed = 1;
};

struct C1Estimate {
    double value = 0.0;
    std::vector<double> candidates;    // final value per start
    std::vector<double> running_min;
    std::vector<double> projection_g;  // |g|/||u||^2 right after each projection
    int best_start = -1;
};

// Multistart Nehari-projected descent on U. Optional extra starts (for
// instance the point where a mountain-pass path crosses U) come first.
C1Estimate estimate_c1(const ProblemData& d, const C1Config& cfg, const std::vector<Field>& extra_starts = {});

struct VerifyReport {
    double residual = 0.0;
    double min = 0.0;
    double max = 0.0;
    RegionTag region;
    double energy = 0.0;
    double negative_part_ratio = 0.0;  // ||u_-||^2 / ||u||^2
    std::vector<std::string> flags;
};

VerifyReport verify_solution(const ProblemData& d, const Field& u, bool bar_energy = false);

struct SolveConfig {
    DescentConfig descent;
    MountainPassConfig mp;
    C1Config c1;
    bool decompose_deviation = true;
    DecomposeOptions decompose;
};

struct BoundCheck {
    std::string name;
    bool ok = false;
    double lhs = 0.0;
    double rhs = 0.0;
};

struct SolveReport {
    double S_num = 0.0;
    double hs_norm2_W = 0.0;
    double C0 = 0.0;
    double alpha = 0.0;
    double phi_a_sup = 0.0;
    double r1 = 0.0;
    Smallness smallness;
    std::vector<std::string> labels;

    FirstSolution first;
    T0Result t0;
    MountainPassResult mp;
    C1Estimate c1;
    VerifyReport verify_u0, verify_v0;
    double distance_u0_v0 = 0.0;
    std::optional<DecompositionResult> deviation_decomposition;
    std::vector<BoundCheck> checks;
};

// Full two-solution pipeline. Errors from the stages propagate.
SolveReport solve_two(const ProblemData& d, const SolveConfig& cfg);

} // namespace fracrit
