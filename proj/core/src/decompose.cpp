#include "fracrit/decompose.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "fracrit/bubbles.hpp"

namespace fracrit {

namespace {

// Least-squares fit of +/- A W_{lambda, c} plus an affine background on the
// points of a window around the origin of the rescaled field.
class WindowFit {
public:
    WindowFit(const Field& vt, double radius, double amplitude, double expo)
        : N_(vt.grid().N), amp_(amplitude), expo_(expo), h_(vt.grid().h()) {
        const GridSpec& g = vt.grid();
        for (std::size_t i = 0; i < vt.size(); ++i) {
            const Point x = g.point(i);
            double r2 = 0.0;
            for (int d = 0; d < N_; ++d) r2 += x[d] * x[d];
            if (r2 <= radius * radius) {
                pts_.push_back(x);
                val_.push_back(vt[i]);
            }
        }
        const int K = N_ + 1;
        gram_.assign(K * K, 0.0);
        for (const auto& x : pts_) {
            const auto b = basis(x);
            for (int a = 0; a < K; ++a)
                for (int c = 0; c < K; ++c) gram_[a * K + c] += b[a] * b[c];
        }
    }

    std::size_t points() const { return pts_.size(); }
    double spacing() const { return h_; }

    // Squared residual after removing the best affine background, and the
    // energy of the template's own background-free part (the scale against
    // which the misfit is judged; flat templates have almost none).
    std::pair<double, double> residual(double lambda, const Point& c, double sign) const {
        std::vector<double> r(pts_.size()), t(pts_.size());
        for (std::size_t j = 0; j < pts_.size(); ++j) {
            double r2 = 0.0;
            for (int d = 0; d < N_; ++d) {
                const double dx = pts_[j][d] - c[d];
                r2 += dx * dx;
            }
            t[j] = amp_ * std::pow(lambda / (lambda * lambda + r2), expo_);
            r[j] = val_[j] - sign * t[j];
        }
        return {detrended_energy(r), detrended_energy(t)};
    }

private:
    int N_;
    double amp_, expo_, h_;
    std::vector<Point> pts_;
    std::vector<double> val_;
    std::vector<double> gram_;

    std::array<double, 4> basis(const Point& x) const { return {1.0, x[0], x[1], x[2]}; }

    double detrended_energy(const std::vector<double>& r) const {
        const int K = N_ + 1;
        std::array<double, 4> rhs{0, 0, 0, 0};
        for (std::size_t j = 0; j < pts_.size(); ++j) {
            const auto b = basis(pts_[j]);
            for (int a = 0; a < K; ++a) rhs[a] += b[a] * r[j];
        }
        const auto coef = solve(rhs);
        double res = 0.0;
        for (std::size_t j = 0; j < pts_.size(); ++j) {
            const auto b = basis(pts_[j]);
            double bg = 0.0;
            for (int a = 0; a < K; ++a) bg += coef[a] * b[a];
            res += (r[j] - bg) * (r[j] - bg);
        }
        return res;
    }

    std::array<double, 4> solve(std::array<double, 4> rhs) const {
        const int K = N_ + 1;
        std::vector<double> A(gram_);
        for (int col = 0; col < K; ++col) {
            int piv = col;
            for (int row = col + 1; row < K; ++row)
                if (std::abs(A[row * K + col]) > std::abs(A[piv * K + col])) piv = row;
            if (piv != col) {
                for (int k = 0; k < K; ++k) std::swap(A[col * K + k], A[piv * K + k]);
                std::swap(rhs[col], rhs[piv]);
            }
            const double diag = A[col * K + col];
            if (std::abs(diag) < 1e-300) continue;
            for (int row = col + 1; row < K; ++row) {
                const double f = A[row * K + col] / diag;
                for (int k = col; k < K; ++k) A[row * K + k] -= f * A[col * K + k];
                rhs[row] -= f * rhs[col];
            }
        }
        std::array<double, 4> x{0, 0, 0, 0};
        for (int row = K - 1; row >= 0; --row) {
            double acc = rhs[row];
            for (int k = row + 1; k < K; ++k) acc -= A[row * K + k] * x[k];
            const double diag = A[row * K + row];
            x[row] = std::abs(diag) < 1e-300 ? 0.0 : acc / diag;
        }
        return x;
    }
};

template <class F>
double golden_min(const F& f, double lo, double hi, int iters = 60) {
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double c = b - g * (b - a), d = a + g * (b - a);
    double fc = f(c), fd = f(d);
    for (int i = 0; i < iters; ++i) {
        if (fc <= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    return fc <= fd ? c : d;
}

struct FitResult {
    double lambda = 1.0;
    Point center{0.0, 0.0, 0.0};
    double sign = 1.0;
    double rel = std::numeric_limits<double>::infinity();
};

FitResult fit_template(const WindowFit& wf, int N) {
    const double lo = std::log(1.0 / 16.0), hi = std::log(2.0);
    const int n = 64;
    const double step = (hi - lo) / (n - 1);
    FitResult best;
    double best_res = std::numeric_limits<double>::infinity();
    int best_i = 0;
    for (double sign : {1.0, -1.0})
        for (int i = 0; i < n; ++i) {
            const double lam = std::exp(lo + i * step);
            const auto [res, t2] = wf.residual(lam, Point{0, 0, 0}, sign);
            (void)t2;
            if (res < best_res) {
                best_res = res;
                best.lambda = lam;
                best.sign = sign;
                best_i = i;
            }
        }
    double loglam = lo + best_i * step;
    Point c{0.0, 0.0, 0.0};
    const double h = wf.spacing();
    for (int round = 0; round < 2; ++round) {
        loglam = golden_min(
            [&](double ll) { return wf.residual(std::exp(ll), c, best.sign).first; },
            loglam - step, loglam + step);
        for (int d = 0; d < N; ++d) {
            c[d] = golden_min(
                [&](double x) {
                    Point q = c;
                    q[d] = x;
                    return wf.residual(std::exp(loglam), q, best.sign).first;
                },
                -h, h);
        }
    }
    best.lambda = std::exp(loglam);
    best.center = c;
    const auto [res, t2] = wf.residual(best.lambda, c, best.sign);
    best.rel = std::sqrt(res / t2);
    return best;
}

} // namespace

DecompositionResult extract_profiles(const Field& v, const ProblemData& d, const DecomposeOptions& opt) {
    const GridSpec& g = v.grid();
    require_same_grid(g, d.grid());
    const FracParams& p = d.params();
    const MorreySpec ms = MorreySpec::make(g, p, opt.morrey_r);
    const double beta = calibration(g, p).beta;
    SobolevOptions so;
    so.probes = 0;
    const double S_num = sobolev_report(g, p, so).S_num;
    const double unit_energy = (p.s / g.N) * std::pow(S_num, g.N / (2.0 * p.s));
    const ProblemData unit(p, Field(g, 1.0), Field(g));
    const double expo = (g.N - 2.0 * p.s) / 2.0;
    const double max_scale = opt.max_scale ? *opt.max_scale : g.L / 8.0;

    DecompositionResult out;
    out.remainder = v;
    double current = morrey_norm(v, ms);
    out.morrey_history.push_back(current);
    out.stop_threshold = opt.stop_threshold ? *opt.stop_threshold : opt.stop_threshold_rel * current;

    while (true) {
        if (current == 0.0) {
            out.halt_reason = "zero-field";
            break;
        }
        if (current < out.stop_threshold) {
            out.halt_reason = "below-threshold";
            break;
        }
        if (static_cast<int>(out.bubbles.size()) >= opt.max_bubbles) {
            out.halt_reason = "max-bubbles";
            break;
        }
        const Concentration conc = concentration_search(out.remainder, p, max_scale);
        if (conc.at_cap) {
            out.halt_reason = "macroscopic-scale";
            break;
        }
        // Blow up around the concentration point to unit scale.
        Point y{0.0, 0.0, 0.0};
        for (int k = 0; k < g.N; ++k) y[k] = -conc.x[k] / conc.R;
        const Field vt = rescale(out.remainder, 1.0 / conc.R, y, p);

        const double a_loc = d.a()[conc.index];
        const double coef = std::pow(a_loc, -(g.N - 2.0 * p.s) / (4.0 * p.s));
        const WindowFit wf(vt, opt.window, coef * beta, expo);
        const FitResult fit = fit_template(wf, g.N);
        if (fit.sign < 0.0 || !(fit.rel <= opt.fit_tol)) {
            out.halt_reason = "unfit-profile";
            out.flags.push_back("unfit-profile");
            break;
        }
        ExtractedBubble b;
        b.scale = fit.lambda * conc.R;
        for (int k = 0; k < g.N; ++k) b.center[k] = wrap_delta(conc.x[k] + conc.R * fit.center[k], g.L);
        b.a_local = a_loc;
        b.local_coefficient = coef;
        const double weight = std::pow(a_loc, -(g.N - 2.0 * p.s) / (2.0 * p.s));
        b.energy_reference = weight * unit_energy;
        b.fit_residual = fit.rel;
        b.concentration = conc.value;
        b.concentration_radius = conc.R;

        const Field profile = bubble(g, p, BubbleParams{b.center, b.scale, beta});
        b.energy = weight * energy_bar(unit, profile);
        Field next = out.remainder;
        next.axpy(-coef, profile);
        const double next_norm = morrey_norm(next, ms);
        if (!(next_norm < current)) {
            out.halt_reason = "no-morrey-decrease";
            out.flags.push_back("no-morrey-decrease");
            break;
        }
        out.remainder = std::move(next);
        current = next_norm;
        out.morrey_history.push_back(current);
        out.bubbles.push_back(b);
    }

    std::vector<Point> centers;
    std::vector<double> scales;
    for (const auto& b : out.bubbles) {
        centers.push_back(b.center);
        scales.push_back(b.scale);
    }
    out.separation = separation_matrix(centers, scales, g);
    return out;
}

} // namespace fracrit
