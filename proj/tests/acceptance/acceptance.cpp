// Acceptance run on the canonical instance (N = 1, s = 1/4, M = 4096, L = 50).
// Prints one PASS/FAIL line per criterion and exits non-zero if any fails.
//
// usage: fracrit_acceptance <path-to-fracrit-cli> <scratch-dir>

#include <fftw3.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <iterator>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "fracrit/bubbles.hpp"
#include "fracrit/decompose.hpp"
#include "fracrit/functionals.hpp"
#include "fracrit/morrey.hpp"
#include "fracrit/parallel.hpp"
#include "fracrit/random_field.hpp"
#include "fracrit/solver.hpp"
#include "fracrit/spectral.hpp"

using namespace fracrit;
namespace fs = std::filesystem;
using std::numbers::pi;

namespace {

const GridSpec canon{1, 50.0, 4096};
const FracParams p14(1, 0.25);

// Independent 1-D spectral oracle on FFTW directly: symbol (pi k / L)^{2s},
// zero mode (pi/L)^{2s} (1-2s)/4^s.
class Oracle1D {
public:
    Oracle1D(const GridSpec& g, double s) : g_(g), s_(s), in_(g.M), out_(g.M / 2 + 1) {
        fwd_ = fftw_plan_dft_r2c_1d(g.M, in_.data(), reinterpret_cast<fftw_complex*>(out_.data()), FFTW_ESTIMATE);
        bwd_ = fftw_plan_dft_c2r_1d(g.M, reinterpret_cast<fftw_complex*>(out_.data()), in_.data(), FFTW_ESTIMATE);
    }
    ~Oracle1D() {
        fftw_destroy_plan(fwd_);
        fftw_destroy_plan(bwd_);
    }
    Oracle1D(const Oracle1D&) = delete;
    Oracle1D& operator=(const Oracle1D&) = delete;

    double sigma(int k) const {
        if (k == 0) return std::pow(pi / g_.L, 2 * s_) * (1 - 2 * s_) / std::pow(4.0, s_);
        return std::pow(pi * k / g_.L, 2 * s_);
    }

    double hs_norm2(const Field& u) {
        std::copy(u.values().begin(), u.values().end(), in_.begin());
        fftw_execute(fwd_);
        double acc = 0.0;
        for (int k = 0; k <= g_.M / 2; ++k) {
            const double w = (k == 0 || k == g_.M / 2) ? 1.0 : 2.0;
            acc += w * sigma(k) * std::norm(out_[k]);
        }
        return 2.0 * g_.L * acc / (double(g_.M) * g_.M);
    }

    Field inverse(const Field& f) {
        std::copy(f.values().begin(), f.values().end(), in_.begin());
        fftw_execute(fwd_);
        for (int k = 0; k <= g_.M / 2; ++k) out_[k] /= sigma(k) * g_.M;
        fftw_execute(bwd_);
        return Field(g_, in_);
    }

private:
    GridSpec g_;
    double s_;
    std::vector<double> in_;
    std::vector<std::complex<double>> out_;
    fftw_plan fwd_{}, bwd_{};
};

double sum_pow(const Field& u, double q) {
    double acc = 0.0;
    for (double x : u.values()) acc += std::pow(std::abs(x), q);
    return acc * u.grid().cell_volume();
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

int failures = 0;

void report(int id, bool ok, const std::string& detail) {
    std::printf("AC%-2d %s  %s\n", id, ok ? "PASS" : "FAIL", detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

std::string fmt(const char* f, double a) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

ProblemData canonical_problem(double S) {
    Field f = Field::from_function(canon, [](const Point& x) { return std::exp(-x[0] * x[0] / 2); });
    const ProblemData probe(p14, Field(canon, 1.0), f);
    f *= 0.5 * C0_constant(probe) * std::pow(S, p14.N / (4 * p14.s)) / dual_norm(f, p14);
    return ProblemData(p14, Field(canon, 1.0), f);
}

// ---------------------------------------------------------------------------

void ac1() {
    std::vector<double> res;
    for (int M : {4096, 2048, 1024}) res.push_back(calibration(GridSpec{1, 50.0, M}, p14).residual);
    const bool small = res[0] < 1e-3;
    const bool monotone = res[2] > res[1] && res[1] > res[0];
    std::ostringstream os;
    os.precision(6);
    os << "bubble residual M=4096/2048/1024: " << res[0] << " / " << res[1] << " / " << res[2]
       << " (need < 1e-3 and strictly growing)";
    report(1, small && monotone, os.str());
}

void ac2(Oracle1D& o) {
    const Field w = reference_bubble(canon, p14);
    const double B = o.hs_norm2(w);
    const double Q = sum_pow(w, 4.0);
    const double S = B / std::sqrt(Q);
    const double I = 0.5 * B - 0.25 * Q;
    const double target = 0.25 * S * S;  // (s/N) S^{N/(2s)}
    const double err = std::abs(I - target) / I;
    // Library values agree with the oracle.
    const double lib_S = sobolev_constant(canon, p14);
    const bool agree = rel(lib_S, S) < 1e-12;
    report(2, err < 1e-3 && agree,
           "energy identity rel err " + fmt("%.3e", err) + " (< 1e-3), S_num " + fmt("%.9f", S) + ", library S " +
               fmt("%.9f", lib_S));
}

void ac3() {
    const double phi1 = phi(1.0, p14);
    const double golden = (1.0 + std::sqrt(5.0)) / 2.0;
    const double a = alpha_root(p14);
    // Sampled sign pattern: phi < 0 on (1, alpha), phi > 0 on (alpha, alpha + 5).
    bool pattern = true;
    const int n = 2000;
    for (int i = 1; i < n; ++i) {
        const double t1 = 1.0 + (a - 1.0) * i / n;
        const double t2 = a + 5.0 * i / n;
        pattern = pattern && phi(t1, p14) < 0.0 && phi(t2, p14) > 0.0;
    }
    // phi(t) = (t-1)(t^2-t-1)/4 at N = 1, s = 1/4.
    double factor_err = 0.0;
    for (double t : {0.5, 1.3, 2.0, 4.5}) factor_err = std::max(factor_err, std::abs(phi(t, p14) - 0.25 * (t - 1) * (t * t - t - 1)));
    const bool ok = std::abs(phi1) < 1e-12 && std::abs(a - golden) < 1e-8 && pattern && factor_err < 1e-12;
    report(3, ok,
           "|phi(1)| " + fmt("%.2e", std::abs(phi1)) + ", |alpha - golden| " + fmt("%.2e", std::abs(a - golden)) +
               ", sign pattern " + (pattern ? "ok" : "broken"));
}

void ac4() {
    const double ts = p14.two_star();
    const Field w = reference_bubble(canon, p14);
    Rng rng = derived_rng(4, 0);
    const Field noisy = w + 0.05 * random_smooth_field(canon, p14.s, rng);
    const std::vector<double> rs{0.25, 0.5, 2.0, 4.0, 8.0};
    const std::vector<int> shifts{-40, -17, -9, -3, -1, 1, 2, 5, 13, 31};
    struct Ref {
        double hs, lp, mo;
    };
    auto refs = [&](const Field& u) {
        return Ref{hs_norm2(u, p14), lp_norm(u, ts), morrey_norm(u, MorreySpec::make(u.grid(), p14))};
    };
    const Ref r_w = refs(w), r_n = refs(noisy);
    std::vector<double> dh(50), dl(50), dm(50);
    parallel_for(50, [&](std::size_t c) {
        const double r = rs[c / 10];
        const int k = shifts[c % 10];
        const Field& u = (c % 2 == 0) ? w : noisy;
        const Ref& ref = (c % 2 == 0) ? r_w : r_n;
        const Field v = rescale(u, r, Point{r * k * canon.h(), 0.0, 0.0}, p14);
        const Ref got = refs(v);
        dh[c] = rel(got.hs, ref.hs);
        dl[c] = rel(got.lp, ref.lp);
        dm[c] = rel(got.mo, ref.mo);
    });
    const double mh = *std::max_element(dh.begin(), dh.end());
    const double ml = *std::max_element(dl.begin(), dl.end());
    const double mm = *std::max_element(dm.begin(), dm.end());
    report(4, mh < 1e-6 && ml < 1e-6 && mm < 5e-2,
           "50 (r, y) cases: max rel dev hs " + fmt("%.2e", mh) + ", L^2* " + fmt("%.2e", ml) + " (< 1e-6), Morrey " +
               fmt("%.2e", mm) + " (< 5e-2)");
}

void ac5(const ProblemData& d, double S) {
    const double bound = C0_constant(d) * std::pow(S, p14.N / (4 * p14.s));
    const int n = 500;
    std::vector<double> margin(n);
    parallel_for(n, [&](std::size_t i) {
        Rng rng = derived_rng(5, i);
        Field u = random_smooth_field(canon, p14.s, rng);
        u *= nehari_scale(d, u);
        margin[i] = (4 * p14.s / (p14.N + 2 * p14.s)) * std::sqrt(hs_norm2(u, p14)) - bound;
    });
    const auto violations = std::count_if(margin.begin(), margin.end(), [](double m) { return m < -1e-6; });
    report(5, violations == 0,
           std::to_string(violations) + " violations over 500 Nehari-projected fields, min margin " +
               fmt("%.4e", *std::min_element(margin.begin(), margin.end())) + ", bound " + fmt("%.6f", bound));
}

// Probe corpus: noise, single bubbles at random centre/scale, and bubble pairs over noise.
Field probe_field(std::size_t i) {
    Rng rng = derived_rng(6, i);
    std::uniform_real_distribution<double> centre(-40.0, 40.0), logscale(std::log(0.1), std::log(2.0));
    auto random_bubble = [&]() {
        return bubble(canon, p14, BubbleParams{Point{centre(rng), 0, 0}, std::exp(logscale(rng)), std::nullopt});
    };
    switch (i % 3) {
    case 0: return random_smooth_field(canon, p14.s, rng);
    case 1: return random_bubble();
    default: {
        Field u = random_bubble() + random_bubble();
        u.axpy(0.1, random_smooth_field(canon, p14.s, rng));
        return u;
    }
    }
}

void ac6() {
    const MorreySpec ms = MorreySpec::make(canon, p14);
    const double theta = 2.0 / p14.two_star();
    const int n = 1000;
    std::vector<double> ratio(n);
    parallel_for(n, [&](std::size_t i) { ratio[i] = interpolation_check(probe_field(i), ms, p14, theta); });
    const double c500 = *std::max_element(ratio.begin(), ratio.begin() + 500);
    const double c1000 = *std::max_element(ratio.begin(), ratio.end());
    const bool finite = std::all_of(ratio.begin(), ratio.end(), [](double r) { return std::isfinite(r) && r > 0; });
    const double drift = std::abs(c1000 / c500 - 1.0);
    report(6, finite && drift <= 0.1,
           "C_int(500) " + fmt("%.6f", c500) + ", C_int(1000) " + fmt("%.6f", c1000) + ", drift " + fmt("%.3f", drift) +
               " (<= 0.10)");
}

void ac7(const ProblemData& forced, const Field& u0) {
    const ProblemData unforced(p14, Field(canon, 1.0), Field(canon));
    struct Case {
        bool base;
        int k;
        std::vector<SynthBubble> bubbles;
    };
    const std::vector<std::pair<double, double>> singles{{20.0, 16.0}, {-15.0, 8.0}};
    const std::vector<std::pair<std::pair<double, double>, std::pair<double, double>>> pairs{
        {{-25.0, 8.0}, {20.0, 16.0}}, {{-30.0, 16.0}, {15.0, 8.0}}, {{-20.0, 8.0}, {25.0, 8.0}}};
    std::vector<Case> cases;
    for (int k : {5, 6}) cases.push_back({true, k, {}});
    for (bool base : {false, true})
        for (int k : {5, 6})
            for (const auto& [x, r0] : singles) cases.push_back({base, k, {SynthBubble{Point{x, 0, 0}, r0, 1.0}}});
    for (bool base : {false, true})
        for (int k : {5, 6})
            for (const auto& [b1, b2] : pairs) {
                if (cases.size() == 20) break;
                cases.push_back({base, k,
                                 {SynthBubble{Point{b1.first, 0, 0}, b1.second, 1.0},
                                  SynthBubble{Point{b2.first, 0, 0}, b2.second, 1.0}}});
            }

    int count_ok = 0, centre_ok = 0, scale_ok = 0, energy_ok = 0;
    double worst_energy = 0.0;
    for (const Case& c : cases) {
        const ProblemData& d = c.base ? forced : unforced;
        const Field base = c.base ? u0 : Field(canon);
        const SynthResult sy = synth_ps_sequence(base, c.bubbles, c.k, p14);
        const DecompositionResult r = extract_profiles(sy.field, d);
        if (r.bubbles.size() != c.bubbles.size()) {
            std::fprintf(stderr, "    m=%zu k=%d base=%d: found %zu (%s)\n", c.bubbles.size(), c.k, int(c.base),
                         r.bubbles.size(), r.halt_reason.c_str());
            continue;
        }
        ++count_ok;
        bool centres = true, scales = true;
        for (const BubbleParams& b : sy.placed) {
            const auto hit = std::min_element(r.bubbles.begin(), r.bubbles.end(), [&](const auto& x, const auto& y) {
                return std::abs(wrap_delta(x.center[0] - b.center[0], canon.L)) <
                       std::abs(wrap_delta(y.center[0] - b.center[0], canon.L));
            });
            centres = centres && std::abs(wrap_delta(hit->center[0] - b.center[0], canon.L)) <= canon.h();
            scales = scales && rel(hit->scale, b.lambda) <= 0.03;
        }
        centre_ok += centres;
        scale_ok += scales;
        // I(v) against I(remainder) + sum of per-profile energies.
        double parts = energy_I(d, r.remainder);
        for (const auto& b : r.bubbles) parts += b.energy;
        const double total = energy_I(d, sy.field);
        const double err = total == 0.0 ? std::abs(parts) : std::abs(parts - total) / std::abs(total);
        worst_energy = std::max(worst_energy, err);
        energy_ok += err <= 0.02;
        std::fprintf(stderr, "    m=%zu k=%d base=%d: found %zu, centres %d, scales %d, I(v) %.6f, parts %.6f\n",
                     c.bubbles.size(), c.k, int(c.base), r.bubbles.size(), int(centres), int(scales), total, parts);
    }
    const int n = static_cast<int>(cases.size());
    const bool ok = count_ok == n && centre_ok == n && scale_ok == n && energy_ok == n;
    report(7, ok,
           std::to_string(n) + " cases: count " + std::to_string(count_ok) + ", centres " + std::to_string(centre_ok) +
               ", scales " + std::to_string(scale_ok) + ", energy additivity " + std::to_string(energy_ok) +
               " (worst rel err " + fmt("%.3f", worst_energy) + ", need <= 0.02)");
}

void ac8(const ProblemData& d, const FirstSolution& fs, Oracle1D& o) {
    // u <- R^{-1}(a u_+^3 + f) until the increment stalls.
    Field u(canon);
    double step = 1.0;
    int it = 0;
    for (; it < 2000 && step > 1e-14; ++it) {
        Field rhs = d.f();
        for (std::size_t i = 0; i < u.size(); ++i) {
            const double v = std::max(u[i], 0.0);
            rhs[i] += d.a()[i] * v * v * v;
        }
        const Field next = o.inverse(rhs);
        step = std::sqrt(o.hs_norm2(next - u));
        u = next;
    }
    const double dist = std::sqrt(o.hs_norm2(fs.u0 - u));
    const bool ok = fs.c0 < 0.0 && fs.residual < 1e-6 && fs.u0.min() >= 0.0 && dist < 1e-4;
    report(8, ok,
           "c0 " + fmt("%.7f", fs.c0) + ", residual " + fmt("%.2e", fs.residual) + ", min u0 " + fmt("%.2e", fs.u0.min()) +
               ", |u0 - fixed point|_Hs " + fmt("%.2e", dist) + " after " + std::to_string(it) + " iterations");
}

void ac9(const ProblemData& d, const FirstSolution& fs, const MountainPassResult& mp, double tol_mp) {
    const SobolevReport sob = [] {
        SobolevOptions so;
        so.probes = 0;
        return sobolev_report(canon, p14, so);
    }();
    const double a = d.a_sup();  // a at the maximiser xbar0
    const double ts = p14.two_star();
    const double upper = fs.c0 + std::pow(a, -p14.N / p14.s) * (a * a / 2 - 1 / ts) * sob.hs_norm2_W;
    const double ps = fs.c0 + std::pow(d.a_sup(), -(p14.N - 2 * p14.s) / (2 * p14.s)) * (p14.s / p14.N) *
                                  std::pow(sob.S_num, p14.N / (2 * p14.s));
    const double dist = std::sqrt(hs_norm2(mp.v0 - fs.u0, p14));
    const double neg = hs_norm2(mp.v0.negative_part(), p14) / hs_norm2(mp.v0, p14);
    const bool ok = fs.c0 < mp.gamma && mp.gamma < upper && dist > 10 * tol_mp && neg <= 1e-6 && mp.gamma < ps &&
                    mp.residual < tol_mp;
    report(9, ok,
           "c0 " + fmt("%.7f", fs.c0) + " < gamma " + fmt("%.7f", mp.gamma) + " < " + fmt("%.7f", upper) +
               ", PS window " + fmt("%.7f", ps) + ", |v0-u0| " + fmt("%.3e", dist) + ", neg part " +
               fmt("%.2e", neg) + ", residual " + fmt("%.2e", mp.residual));
}

void ac10(const ProblemData& d, const Field& u0, const Field& v0) {
    std::vector<Field> points;
    for (int i = 0; i < 20; ++i) {
        Rng rng = derived_rng(10, i);
        points.push_back(random_smooth_field(canon, p14.s, rng));
    }
    points.push_back(u0);
    points.push_back(v0);
    std::vector<double> order(points.size());
    parallel_for(points.size(), [&](std::size_t i) {
        Rng rng = derived_rng(11, i);
        const Field h = random_smooth_field(canon, p14.s, rng);
        const double exact = dual_pairing(gradient_I(d, points[i]).raw_dual, h);
        auto err = [&](double eps) {
            const double fd = (energy_I_difference(d, points[i], eps * h) - energy_I_difference(d, points[i], -eps * h)) /
                              (2 * eps);
            return std::abs(fd - exact);
        };
        order[i] = std::log10(err(1e-3) / err(1e-4));
    });
    const double worst = *std::min_element(order.begin(), order.end());
    report(10, worst >= 1.9,
           "22 points (20 random, u0, v0): min observed order " + fmt("%.3f", worst) + " (>= 1.9), at u0 " +
               fmt("%.3f", order[20]) + ", v0 " + fmt("%.3f", order[21]));
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void ac11(const std::string& cli, const fs::path& scratch) {
    const std::vector<std::string> files{"report.json", "trace.csv", "u0.bin", "u0.bin.json", "v0.bin", "v0.bin.json"};
    std::vector<fs::path> dirs{scratch / "run1", scratch / "run2"};
    bool ran = true;
    for (const auto& dir : dirs) {
        fs::remove_all(dir);
        const std::string cmd = "\"" + cli + "\" solve --quiet --seed 7 --out \"" + dir.string() + "\"";
        ran = ran && std::system(cmd.c_str()) == 0;
    }
    int identical = 0;
    for (const auto& f : files) {
        const std::string a = slurp(dirs[0] / f), b = slurp(dirs[1] / f);
        identical += !a.empty() && a == b;
    }
    report(11, ran && identical == static_cast<int>(files.size()),
           "two `fracrit solve` runs: " + std::to_string(identical) + "/" + std::to_string(files.size()) +
               " output files byte-identical");
}

} // namespace

int main(int argc, char** argv) {
    if (argc < 3) {
        std::fprintf(stderr, "usage: %s <fracrit-cli> <scratch-dir>\n", argv[0]);
        return 2;
    }
    const std::string cli = argv[1];
    const fs::path scratch = argv[2];
    fs::create_directories(scratch);
    set_thread_count(4);

    auto timed = [](const char* name, const std::function<void()>& fn) {
        const auto t0 = std::chrono::steady_clock::now();
        try {
            fn();
        } catch (const std::exception& e) {
            std::printf("%s FAIL  exception: %s\n", name, e.what());
            ++failures;
        }
        const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::fprintf(stderr, "  [%s %.1fs]\n", name, sec);
    };

    Oracle1D oracle(canon, p14.s);
    const double S = sobolev_constant(canon, p14);
    const ProblemData d = canonical_problem(S);

    timed("AC1", ac1);
    timed("AC2", [&] { ac2(oracle); });
    timed("AC3", ac3);
    timed("AC4", ac4);
    timed("AC5", [&] { ac5(d, S); });
    timed("AC6", ac6);

    // The first solution feeds AC7 (as the macroscopic base), AC8, AC9 and AC10.
    FirstSolution fs;
    MountainPassResult mp;
    const MountainPassConfig mpc;
    bool have_first = false, have_mp = false;
    try {
        fs = find_first_solution(d, DescentConfig{}, S);
        have_first = true;
        mp = mountain_pass(d, fs.u0, select_t0(d, fs.u0).t0, mpc);
        have_mp = true;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "solver stage failed: %s\n", e.what());
    }
    auto need = [](bool have, const char* what) {
        if (!have) throw std::runtime_error(std::string("no ") + what);
    };
    timed("AC7", [&] {
        need(have_first, "first solution");
        ac7(d, fs.u0);
    });
    timed("AC8", [&] {
        need(have_first, "first solution");
        ac8(d, fs, oracle);
    });
    timed("AC9", [&] {
        need(have_mp, "mountain-pass solution");
        ac9(d, fs, mp, mpc.tol_mp);
    });
    timed("AC10", [&] {
        need(have_mp, "mountain-pass solution");
        ac10(d, fs.u0, mp.v0);
    });
    timed("AC11", [&] { ac11(cli, scratch); });

    std::printf("%d of 11 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
