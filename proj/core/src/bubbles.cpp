#include "fracrit/bubbles.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <tuple>

#include "fracrit/error.hpp"
#include "fracrit/random_field.hpp"

namespace fracrit {

double reference_scale(const GridSpec& g) { return g.L / 50.0; }

GridSpec reference_grid(int N) {
    switch (N) {
    case 1: return GridSpec{1, 50.0, 4096};
    case 2: return GridSpec{2, 50.0, 512};
    case 3: return GridSpec{3, 50.0, 128};
    default: throw std::invalid_argument("dimension N must be 1, 2 or 3");
    }
}

Field bubble_profile(const GridSpec& g, const FracParams& p, const Point& center, double lambda) {
    if (!(lambda > 0.0)) throw std::invalid_argument("bubble scale lambda must be positive");
    const double expo = (g.N - 2.0 * p.s) / 2.0;
    Field w(g);
    const double h = g.h();
    for (std::size_t i = 0; i < w.size(); ++i) {
        const auto ijk = g.unflatten(i);
        double r2 = 0.0;
        for (int d = 0; d < g.N; ++d) {
            const double dx = wrap_delta(-g.L + ijk[d] * h - center[d], g.L);
            r2 += dx * dx;
        }
        w[i] = std::pow(lambda / (lambda * lambda + r2), expo);
    }
    return w;
}

namespace {

double pow_abs(double x, double q) {
    const double a = std::abs(x);
    if (q == 3.0) return a * a * a;
    if (q == 4.0) return (a * a) * (a * a);
    return std::pow(a, q);
}

std::size_t center_index(const GridSpec& g) {
    return g.flatten({g.M / 2, g.M / 2, g.M / 2});
}

} // namespace

double bubble_residual(const Field& w, const FracParams& p) {
    const Field aw = frac_laplacian(w, p);
    const double q = p.two_star() - 1.0;
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        const double nl = std::copysign(pow_abs(w[i], q), w[i]);
        num += (aw[i] - nl) * (aw[i] - nl);
        den += nl * nl;
    }
    return std::sqrt(num / den);
}

namespace {

Calibration calibrate_unchecked(const GridSpec& g, const FracParams& p, double lambda) {
    g.validate();
    p.validate();
    if (g.N != p.N) throw std::invalid_argument("dimension mismatch between grid and fractional parameters");
    const Field u1 = bubble_profile(g, p, Point{0.0, 0.0, 0.0}, lambda);
    const Field au = frac_laplacian(u1, p);
    const std::size_t c = center_index(g);
    Calibration cal;
    cal.grid = g;
    cal.params = p;
    cal.lambda = lambda;
    cal.kappa = au[c] / std::pow(u1[c], p.two_star() - 1.0);
    if (!(cal.kappa > 0.0) || !std::isfinite(cal.kappa))
        throw Error("discretization-insufficient", "non-positive operator value at the bubble centre");
    cal.beta = std::pow(cal.kappa, (g.N - 2.0 * p.s) / (4.0 * p.s));
    cal.residual = bubble_residual(cal.beta * u1, p);
    return cal;
}

void check_residual(const Calibration& cal, const CalibrationOptions& opt) {
    if (!(cal.residual <= opt.max_residual))
        throw Error("discretization-insufficient",
                    "bubble residual " + std::to_string(cal.residual) + " exceeds " + std::to_string(opt.max_residual));
}

std::mutex options_mu;
CalibrationOptions default_options;

} // namespace

void set_default_calibration_options(const CalibrationOptions& opt) {
    std::lock_guard<std::mutex> lock(options_mu);
    default_options = opt;
}

CalibrationOptions default_calibration_options() {
    std::lock_guard<std::mutex> lock(options_mu);
    return default_options;
}

Calibration calibrate(const GridSpec& g, const FracParams& p, double lambda, const CalibrationOptions& opt) {
    Calibration cal = calibrate_unchecked(g, p, lambda);
    check_residual(cal, opt);
    return cal;
}

const Calibration& calibration(const GridSpec& g, const FracParams& p) {
    return calibration(g, p, default_calibration_options());
}

const Calibration& calibration(const GridSpec& g, const FracParams& p, const CalibrationOptions& opt) {
    using Key = std::tuple<int, double, int, int, double>;
    static std::map<Key, std::shared_ptr<const Calibration>> cache;
    static std::mutex mu;
    const Key key{p.N, p.s, static_cast<int>(p.zero_mode), g.M, g.L};
    std::shared_ptr<const Calibration> cal;
    {
        std::lock_guard<std::mutex> lock(mu);
        auto it = cache.find(key);
        if (it != cache.end()) cal = it->second;
    }
    if (!cal) {
        auto fresh = std::make_shared<const Calibration>(calibrate_unchecked(g, p, reference_scale(g)));
        std::lock_guard<std::mutex> lock(mu);
        cal = cache.emplace(key, std::move(fresh)).first->second;  // keeps the first insertion
    }
    check_residual(*cal, opt);
    return *cal;
}

double calibrate_amplitude(int N, double s) {
    const FracParams p(N, s);
    return calibration(reference_grid(N), p).beta;
}

Field bubble(const GridSpec& g, const FracParams& p, const BubbleParams& bp) {
    if (!(bp.lambda > 0.0)) throw std::invalid_argument("bubble scale lambda must be positive");
    for (int d = 0; d < g.N; ++d)
        if (!(bp.center[d] >= -g.L && bp.center[d] < g.L))
            throw std::invalid_argument("bubble centre lies outside the box");
    const double beta = bp.amplitude ? *bp.amplitude : calibration(g, p).beta;
    Field w = bubble_profile(g, p, bp.center, bp.lambda);
    w *= beta;
    return w;
}

Field reference_bubble(const GridSpec& g, const FracParams& p) {
    return bubble(g, p, BubbleParams{Point{0.0, 0.0, 0.0}, reference_scale(g), std::nullopt});
}

Field rescale(const Field& u, double r, const Point& y, const FracParams& p) {
    if (!(r > 0.0)) throw std::invalid_argument("rescale factor must be positive");
    const GridSpec& g = u.grid();
    Point shift{0.0, 0.0, 0.0};
    for (int d = 0; d < g.N; ++d) shift[d] = y[d] / r;
    Field moved = translate(u, shift);
    GridSpec g2 = g;
    g2.L = r * g.L;
    std::vector<double> v = std::move(moved.values());
    const double c = std::pow(r, -(g.N - 2.0 * p.s) / 2.0);
    for (double& x : v) x *= c;
    return Field(g2, std::move(v));
}

double sobolev_quotient(const Field& u, const FracParams& p) {
    require_nondegenerate(u);
    const double l = lp_norm(u, p.two_star());
    return hs_norm2(u, p) / (l * l);
}

SobolevReport sobolev_report(const GridSpec& g, const FracParams& p, const SobolevOptions& opt) {
    const Field w = reference_bubble(g, p);
    const double ts = p.two_star();
    SobolevReport rep;
    rep.hs_norm2_W = hs_norm2(w, p);
    rep.lp_pow_W = std::pow(lp_norm(w, ts), ts);
    rep.S_num = rep.hs_norm2_W / std::pow(rep.lp_pow_W, 2.0 / ts);
    rep.energy_W = 0.5 * rep.hs_norm2_W - rep.lp_pow_W / ts;
    const double target = (p.s / g.N) * std::pow(rep.S_num, g.N / (2.0 * p.s));
    rep.energy_identity_error = std::abs(rep.energy_W - target) / std::abs(rep.energy_W);

    Rng rng = derived_rng(opt.seed, 0);
    const double wn = std::sqrt(rep.hs_norm2_W);
    rep.min_delta = std::numeric_limits<double>::infinity();
    for (int i = 0; i < opt.probes; ++i) {
        Field eta = random_smooth_field(g, p.s, rng);
        eta *= opt.eps * wn / std::sqrt(hs_norm2(eta, p));
        const double delta = sobolev_quotient(w + eta, p) - rep.S_num;
        rep.min_delta = std::min(rep.min_delta, delta);
        if (delta < -opt.tolerance) ++rep.violations;
    }
    rep.probes = opt.probes;
    rep.minimal = rep.violations == 0;
    if (opt.strict && !rep.minimal)
        throw Error("discretization-insufficient", std::to_string(rep.violations) +
                                                       " perturbations lowered the Sobolev quotient");
    return rep;
}

double sobolev_constant(const GridSpec& g, const FracParams& p) {
    SobolevOptions opt;
    opt.probes = 0;
    return sobolev_report(g, p, opt).S_num;
}

std::vector<std::vector<double>> separation_matrix(const std::vector<Point>& centers,
                                                   const std::vector<double>& scales, const GridSpec& g) {
    const std::size_t m = centers.size();
    std::vector<std::vector<double>> sep(m, std::vector<double>(m, 0.0));
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j)
            if (i != j)
                sep[i][j] = std::abs(std::log(scales[i] / scales[j])) +
                            periodic_distance(centers[i], centers[j], g) / scales[i];
    return sep;
}

SynthResult synth_ps_sequence(const Field& base, const std::vector<SynthBubble>& bubbles, int k,
                              const FracParams& p, double separation_threshold) {
    const GridSpec& g = base.grid();
    SynthResult out{base, {}, {}, false};
    const double beta = calibration(g, p).beta;
    std::vector<Point> centers;
    std::vector<double> scales;
    for (const auto& b : bubbles) {
        if (!(b.a_local > 0.0)) throw std::invalid_argument("local coefficient must be positive");
        BubbleParams bp;
        bp.center = b.center;
        bp.lambda = b.r0 * std::ldexp(1.0, -k);
        bp.amplitude = beta * std::pow(b.a_local, -(g.N - 2.0 * p.s) / (4.0 * p.s));
        out.field += bubble(g, p, bp);
        out.placed.push_back(bp);
        centers.push_back(bp.center);
        scales.push_back(bp.lambda);
    }
    out.separation = separation_matrix(centers, scales, g);
    for (std::size_t i = 0; i < centers.size(); ++i)
        for (std::size_t j = 0; j < centers.size(); ++j)
            if (i != j && out.separation[i][j] < separation_threshold) out.overlap_warning = true;
    return out;
}

} // namespace fracrit
