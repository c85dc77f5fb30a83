#include "fracrit/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "fracrit/bubbles.hpp"
#include "fracrit/error.hpp"
#include "fracrit/parallel.hpp"
#include "fracrit/random_field.hpp"

namespace fracrit {

void DescentConfig::validate() const {
    if (!(armijo > 0.0 && armijo < 1.0)) throw std::invalid_argument("sufficient-decrease parameter must lie in (0,1)");
    if (!(tol_g > 0.0)) throw std::invalid_argument("tol_g must be positive");
    if (max_iterations < 1) throw std::invalid_argument("max_iterations must be positive");
}

void MountainPassConfig::validate() const {
    if (P < 3) throw std::invalid_argument("a path needs at least 3 nodes");
    if (!(tol_mp > 0.0)) throw std::invalid_argument("tol_mp must be positive");
    if (!(armijo > 0.0 && armijo < 1.0)) throw std::invalid_argument("sufficient-decrease parameter must lie in (0,1)");
    if (max_sweeps < 1 || reparam_every < 1 || plateau_window < 1 || stall_sweeps < 1)
        throw std::invalid_argument("sweep counts must be positive");
    if (!(climb_step > 0.0)) throw std::invalid_argument("climb_step must be positive");
}

namespace {

double hs_norm(const Field& u, const FracParams& p) { return std::sqrt(std::max(0.0, hs_norm2(u, p))); }

} // namespace

FirstSolution find_first_solution(const ProblemData& d, const DescentConfig& cfg, double S_num) {
    cfg.validate();
    const FracParams& p = d.params();
    if (d.f().max_abs() == 0.0) throw Error("no-descent", "f = 0, so u = 0 is already critical");
    FirstSolution out;
    out.r1 = r1_radius(d, S_num);
    Field u(d.grid());
    bool converged = false;
    for (int it = 0; it < cfg.max_iterations; ++it) {
        const Gradient G = gradient_I(d, u);
        out.trace.push_back({"first", it, energy_I(d, u), G.dual_norm, -1});
        out.iterations = it;
        if (G.dual_norm < cfg.tol_g) {
            converged = true;
            break;
        }
        const double slope = -G.dual_norm * G.dual_norm;
        double tau = 1.0;
        Field delta = -1.0 * G.preconditioned;
        bool accepted = false;
        while (tau > 1e-14) {
            const double dE = energy_I_difference(d, u, delta);
            if (std::isfinite(dE) && dE <= cfg.armijo * tau * slope && dE < 0.0) {
                accepted = true;
                break;
            }
            tau *= 0.5;
            delta *= 0.5;
        }
        if (!accepted) {
            if (it == 0) throw Error("no-descent", "no descent direction at u = 0");
            throw Error("stalled-descent", "line search failed at gradient norm " + std::to_string(G.dual_norm));
        }
        u += delta;
        if (cfg.ball_projection) {
            const double n = hs_norm(u, p);
            if (n > out.r1) u *= out.r1 / n;
        }
        if (classify(d, u).region != Region::U1)
            throw Error("left-region", "descent iterate left U1; the forcing is too large");
    }
    if (!converged)
        throw Error("stalled-descent", "no convergence within " + std::to_string(cfg.max_iterations) + " iterations");
    out.u0 = u;
    out.c0 = energy_I(d, u);
    out.residual = gradient_I(d, u).dual_norm;
    out.norm = hs_norm(u, p);
    return out;
}

Field scaled_profile(const ProblemData& d, double t) {
    const GridSpec& g = d.grid();
    const FracParams& p = d.params();
    BubbleParams bp;
    bp.center = d.a_argmax();
    bp.lambda = t * reference_scale(g);
    Field w = bubble(g, p, bp);
    w *= std::pow(t, (g.N - 2.0 * p.s) / 2.0);
    return w;
}

Field path_endpoint(const ProblemData& d, const Field& u0, double t) {
    const FracParams& p = d.params();
    const double co = std::pow(d.a_sup(), -(p.N - 2.0 * p.s) / (4.0 * p.s));
    Field z = u0;
    if (t > 0.0) z.axpy(co, scaled_profile(d, t));
    return z;
}

T0Result select_t0(const ProblemData& d, const Field& u0) {
    const GridSpec& g = d.grid();
    const double bound = g.L / 10.0;
    const double lam = reference_scale(g);
    const double e0 = energy_I(d, u0);
    T0Result out;
    double t = 1.0;
    while (true) {
        if (t * lam > bound) throw Error("box-too-small", "t = " + std::to_string(t) + " exceeds the box-scale bound");
        const Field z = path_endpoint(d, u0, t);
        const T0Rung rung{t, g_value(d, z), energy_I(d, z)};
        out.ladder.push_back(rung);
        if (rung.g < 0.0 && rung.energy < e0) break;
        t *= 2.0;
    }
    out.t0 = 2.0 * t;  // margin; the box bound applies to the search ladder
    return out;
}

PathState initial_path(const ProblemData& d, const Field& u0, double t0, int P) {
    PathState path;
    for (int i = 0; i < P; ++i) {
        const double tau = static_cast<double>(i) / (P - 1);
        path.nodes.push_back(path_endpoint(d, u0, tau * t0));
    }
    path.energies.assign(P, 0.0);
    for (int i = 0; i < P; ++i) path.energies[i] = energy_I(d, path.nodes[i]);
    path.max_node = 1;
    for (int i = 1; i < P - 1; ++i)
        if (path.energies[i] > path.energies[path.max_node]) path.max_node = i;
    return path;
}

void reparameterize(PathState& path, const FracParams& p) {
    const int P = static_cast<int>(path.nodes.size());
    std::vector<double> arc(P, 0.0);
    for (int i = 1; i < P; ++i) arc[i] = arc[i - 1] + hs_norm(path.nodes[i] - path.nodes[i - 1], p);
    if (!(arc.back() > 0.0)) return;
    std::vector<Field> fresh;
    fresh.reserve(P);
    fresh.push_back(path.nodes.front());
    int j = 0;
    for (int i = 1; i < P - 1; ++i) {
        const double target = arc.back() * i / (P - 1);
        while (j < P - 2 && arc[j + 1] <= target) ++j;
        const double span = arc[j + 1] - arc[j];
        const double w = span > 0.0 ? (target - arc[j]) / span : 0.0;
        Field z = (1.0 - w) * path.nodes[j];
        z.axpy(w, path.nodes[j + 1]);
        fresh.push_back(std::move(z));
    }
    fresh.push_back(path.nodes.back());
    path.nodes = std::move(fresh);
}

namespace {

// Preconditioned descent step whose Hs length is capped, with backtracking.
Field capped_step(const ProblemData& d, const Field& z, const Gradient& G, double weight, double cap, double armijo) {
    const double dn = G.dual_norm;
    if (!(dn > 0.0)) return z;
    double tau = std::min(1.0, cap / dn) * weight;
    while (tau > 1e-14) {
        const Field delta = -tau * G.preconditioned;
        const double dE = energy_I_difference(d, z, delta);
        if (std::isfinite(dE) && dE <= -armijo * tau * dn * dn) return z + delta;
        tau *= 0.5;
    }
    return z;
}

int interior_argmax(const std::vector<double>& e) {
    int best = 1;
    for (int i = 2; i + 1 < static_cast<int>(e.size()); ++i)
        if (e[i] > e[best]) best = i;
    return best;
}

} // namespace

MountainPassResult mountain_pass(const ProblemData& d, const Field& u0, double t0, const MountainPassConfig& cfg) {
    cfg.validate();
    const FracParams& p = d.params();
    MountainPassResult out;
    PathState path = initial_path(d, u0, t0, cfg.P);
    if (classify(d, path.nodes.front()).region != Region::U1)
        throw Error("bad-endpoints", "path start is not in U1");
    if (classify(d, path.nodes.back()).region != Region::U2)
        throw Error("bad-endpoints", "path end is not in U2");
    out.initial_max_energy = path.energies[path.max_node];
    for (int i = 0; i + 1 < cfg.P; ++i)
        if (g_value(d, path.nodes[i]) > 0.0 && g_value(d, path.nodes[i + 1]) < 0.0) out.initial_crossing = true;
    reparameterize(path, p);

    const int P = cfg.P;
    bool climbing = false;
    double best_max = std::numeric_limits<double>::infinity();
    int last_progress = 0;
    double best_gn = std::numeric_limits<double>::infinity();
    int last_gn_progress = 0;
    bool converged = false;
    int i = 1;
    double gn = 0.0;
    Gradient G;
    int sweep = 0;
    for (; sweep < cfg.max_sweeps; ++sweep) {
        parallel_for(static_cast<std::size_t>(P),
                     [&](std::size_t k) { path.energies[k] = energy_I(d, path.nodes[k]); });
        i = interior_argmax(path.energies);
        G = gradient_I(d, path.nodes[i]);
        gn = G.dual_norm;
        out.trace.push_back({climbing ? "climb" : "path", sweep, path.energies[i], gn, i});
        if (gn < cfg.tol_mp) {
            converged = true;
            break;
        }
        if (!climbing) {
            if (path.energies[i] < best_max - 1e-12 * std::abs(best_max) || !std::isfinite(best_max)) {
                best_max = path.energies[i];
                last_progress = sweep;
            }
            if (gn < cfg.climb_switch || sweep - last_progress > cfg.plateau_window) {
                climbing = true;
                best_gn = gn;
                last_gn_progress = sweep;
            }
        }
        if (!climbing) {
            const double sp = std::min(hs_norm(path.nodes[i] - path.nodes[i - 1], p),
                                       hs_norm(path.nodes[i + 1] - path.nodes[i], p));
            std::vector<int> moving{i};
            for (int j : {i - 1, i + 1})
                if (j > 0 && j < P - 1) moving.push_back(j);
            std::vector<Field> updated(moving.size());
            parallel_for(moving.size(), [&](std::size_t k) {
                const int j = moving[k];
                const Gradient Gj = j == i ? G : gradient_I(d, path.nodes[j]);
                updated[k] = capped_step(d, path.nodes[j], Gj, j == i ? 1.0 : 0.5, 0.5 * sp, cfg.armijo);
            });
            for (std::size_t k = 0; k < moving.size(); ++k) path.nodes[moving[k]] = std::move(updated[k]);
            if (sweep % cfg.reparam_every == cfg.reparam_every - 1) reparameterize(path, p);
        } else {
            if (gn < best_gn * (1.0 - 1e-3)) {
                best_gn = gn;
                last_gn_progress = sweep;
            }
            if (sweep - last_gn_progress > cfg.stall_sweeps)
                throw Error("stalled-path", "max-node gradient stuck at " + std::to_string(gn) +
                                                "; phi(||a||_inf) = " + std::to_string(phi(d.a_sup(), p)));
            // Climbing image: descend along the gradient except along the
            // path tangent, where the max node ascends.
            Field tan = path.nodes[i + 1] - path.nodes[i - 1];
            const double tn = hs_norm(tan, p);
            Field dir = G.preconditioned;
            if (tn > 0.0) {
                tan *= 1.0 / tn;
                dir.axpy(-2.0 * hs_inner(dir, tan, p), tan);
            }
            path.nodes[i].axpy(-cfg.climb_step, dir);
        }
    }
    if (!converged)
        throw Error("stalled-path", "no convergence within " + std::to_string(cfg.max_sweeps) +
                                        " sweeps; phi(||a||_inf) = " + std::to_string(phi(d.a_sup(), p)));
    out.v0 = path.nodes[i];
    out.gamma = energy_I(d, out.v0);
    out.residual = gn;
    out.sweeps = sweep;
    out.max_node = i;
    path.max_node = i;
    out.final_path = std::move(path);
    return out;
}

C1Estimate estimate_c1(const ProblemData& d, const C1Config& cfg, const std::vector<Field>& extra_starts) {
    const GridSpec& g = d.grid();
    const FracParams& p = d.params();
    std::vector<Field> starts(extra_starts);
    for (int j = 0; j < cfg.n_starts; ++j) {
        Rng rng = derived_rng(cfg.seed, static_cast<std::uint64_t>(j));
        if (j % 2 == 0) {
            starts.push_back(random_smooth_field(g, p.s, rng));
        } else {
            std::uniform_real_distribution<double> pos(-g.L / 4.0, g.L / 4.0), lg(-2.0, 2.0);
            BubbleParams bp;
            for (int k = 0; k < g.N; ++k) bp.center[k] = pos(rng);
            bp.lambda = reference_scale(g) * std::exp2(lg(rng));
            starts.push_back(bubble(g, p, bp));
        }
    }
    const std::size_t n = starts.size();
    C1Estimate out;
    out.candidates.assign(n, 0.0);
    out.projection_g.assign(n, 0.0);
    parallel_for(n, [&](std::size_t j) {
        Field u = starts[j];
        u *= nehari_scale(d, u);
        out.projection_g[j] = std::abs(g_value(d, u)) / hs_norm2(u, p);
        double e = energy_I(d, u);
        double tau = 1.0;
        for (int step = 0; step < cfg.max_steps && tau > 1e-10; ++step) {
            const Gradient G = gradient_I(d, u);
            const double cap = 0.25 * hs_norm(u, p);
            double t = std::min(tau, G.dual_norm > 0.0 ? cap / G.dual_norm : tau);
            bool accepted = false;
            while (t > 1e-10) {
                Field trial = u;
                trial.axpy(-t, G.preconditioned);
                if (trial.max_abs() > 0.0 && !trial.is_constant()) {
                    trial *= nehari_scale(d, trial);
                    const double et = energy_I(d, trial);
                    if (et < e) {
                        u = std::move(trial);
                        e = et;
                        accepted = true;
                        break;
                    }
                }
                t *= 0.5;
            }
            if (!accepted) break;
            tau = std::min(1.0, 2.0 * t);
        }
        out.candidates[j] = e;
    });
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j) {
        if (out.candidates[j] < best) {
            best = out.candidates[j];
            out.best_start = static_cast<int>(j);
        }
        out.running_min.push_back(best);
    }
    out.value = best;
    return out;
}

VerifyReport verify_solution(const ProblemData& d, const Field& u, bool bar_energy) {
    const FracParams& p = d.params();
    VerifyReport r;
    r.residual = (bar_energy ? gradient_bar(d, u) : gradient_I(d, u)).dual_norm;
    r.min = u.min();
    r.max = u.max();
    r.region = classify(d, u);
    r.energy = bar_energy ? energy_bar(d, u) : energy_I(d, u);
    const double n2 = hs_norm2(u, p);
    r.negative_part_ratio = n2 > 0.0 ? hs_norm2(u.negative_part(), p) / n2 : 0.0;
    if (r.negative_part_ratio > 1e-10) r.flags.push_back("negative-part");
    return r;
}

namespace {

Field crossing_point(const ProblemData& d, const PathState& path) {
    for (std::size_t i = 0; i + 1 < path.nodes.size(); ++i) {
        const double g0 = g_value(d, path.nodes[i]);
        const double g1 = g_value(d, path.nodes[i + 1]);
        if (g0 > 0.0 && g1 <= 0.0) {
            const double w = g0 / (g0 - g1);
            Field z = (1.0 - w) * path.nodes[i];
            z.axpy(w, path.nodes[i + 1]);
            z *= nehari_scale(d, z);
            return z;
        }
    }
    throw Error("no-crossing", "mountain-pass path does not cross U");
}

} // namespace

SolveReport solve_two(const ProblemData& d, const SolveConfig& cfg) {
    const GridSpec& g = d.grid();
    const FracParams& p = d.params();
    SolveReport rep;
    SobolevOptions so;
    so.probes = 0;
    const SobolevReport sob = sobolev_report(g, p, so);
    rep.S_num = sob.S_num;
    rep.hs_norm2_W = sob.hs_norm2_W;
    rep.C0 = C0_constant(d);
    rep.alpha = alpha_root(p);
    rep.phi_a_sup = phi(d.a_sup(), p);
    rep.r1 = r1_radius(d, rep.S_num);
    rep.smallness = check_smallness(d, rep.S_num);
    const Hypotheses& hyp = d.hypotheses();
    if (!multiplicity_hypothesis(d)) rep.labels.push_back("outside-theorem-hypotheses");
    if (!hyp.a_at_least_one || !hyp.a_tends_to_one) rep.labels.push_back("hypothesis-A-violated");
    if (!hyp.f_nonnegative || !hyp.f_nonzero) rep.labels.push_back("hypothesis-F-violated");
    if (!rep.smallness.ok) rep.labels.push_back("smallness-violated");

    rep.first = find_first_solution(d, cfg.descent, rep.S_num);
    rep.t0 = select_t0(d, rep.first.u0);
    rep.mp = mountain_pass(d, rep.first.u0, rep.t0.t0, cfg.mp);
    rep.c1 = estimate_c1(d, cfg.c1, {crossing_point(d, rep.mp.final_path)});
    rep.verify_u0 = verify_solution(d, rep.first.u0);
    rep.verify_v0 = verify_solution(d, rep.mp.v0);
    rep.distance_u0_v0 = hs_norm(rep.mp.v0 - rep.first.u0, p);

    const double c0 = rep.first.c0, gamma = rep.mp.gamma, tol = cfg.mp.tol_mp;
    const double a = d.a_sup(), ts = p.two_star();
    const double mp_gap = std::pow(a, -p.N / p.s) * (a * a / 2.0 - 1.0 / ts) * rep.hs_norm2_W;
    const double ps_gap =
        std::pow(d.a_sup(), -(p.N - 2.0 * p.s) / (2.0 * p.s)) * (p.s / p.N) * std::pow(rep.S_num, p.N / (2.0 * p.s));
    auto add = [&](const std::string& name, bool ok, double lhs, double rhs) {
        rep.checks.push_back({name, ok, lhs, rhs});
    };
    add("first-energy-negative", c0 < 0.0, c0, 0.0);
    add("first-inside-ball", rep.first.norm < rep.r1, rep.first.norm, rep.r1);
    add("first-residual", rep.first.residual < cfg.descent.tol_g, rep.first.residual, cfg.descent.tol_g);
    add("first-nonnegative", rep.first.u0.min() >= -1e-8 * rep.first.u0.max(), rep.first.u0.min(),
        -1e-8 * rep.first.u0.max());
    add("first-in-U1", rep.verify_u0.region.region == Region::U1, rep.verify_u0.region.g, 0.0);
    add("initial-path-crossing", rep.mp.initial_crossing, rep.mp.initial_crossing ? 1.0 : 0.0, 1.0);
    add("initial-path-bound", rep.mp.initial_max_energy < c0 + mp_gap + 1e-3, rep.mp.initial_max_energy,
        c0 + mp_gap + 1e-3);
    add("gamma-above-c0", c0 < gamma, gamma, c0);
    add("gamma-upper-bound", gamma < c0 + mp_gap, gamma, c0 + mp_gap);
    add("ps-window", gamma < c0 + ps_gap, gamma, c0 + ps_gap);
    add("second-residual", rep.mp.residual < tol, rep.mp.residual, tol);
    add("distinct", rep.distance_u0_v0 > 10.0 * tol, rep.distance_u0_v0, 10.0 * tol);
    add("second-nonnegative", rep.mp.v0.min() >= -1e-6 * rep.mp.v0.max(), rep.mp.v0.min(),
        -1e-6 * rep.mp.v0.max());
    add("c0-below-c1", c0 + 10.0 * tol < rep.c1.value, c0, rep.c1.value);
    add("c1-below-gamma", rep.c1.value + 10.0 * tol < gamma, rep.c1.value, gamma);
    if (multiplicity_hypothesis(d)) add("phi-gate", rep.phi_a_sup >= 0.0, rep.phi_a_sup, 0.0);

    if (cfg.decompose_deviation)
        rep.deviation_decomposition = extract_profiles(rep.mp.v0 - rep.first.u0, d, cfg.decompose);
    return rep;
}

} // namespace fracrit
