#include "fracrit/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>

#include "fracrit/error.hpp"

namespace fracrit {

namespace {

struct Plans {
    fftw_plan r2c = nullptr;
    fftw_plan c2r = nullptr;
};

std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

// Plans are created once per (N, M) and kept for the process lifetime;
// fftw_execute_dft_* on them is thread-safe.
const Plans& plans_for(int N, int M) {
    static std::map<std::pair<int, int>, Plans> cache;
    std::lock_guard<std::mutex> lock(planner_mutex());
    auto it = cache.find({N, M});
    if (it != cache.end()) return it->second;
    int dims[3] = {M, M, M};
    std::size_t real_n = 1, half_n = 1;
    for (int d = 0; d < N; ++d) real_n *= M;
    for (int d = 0; d < N - 1; ++d) half_n *= M;
    half_n *= (M / 2 + 1);
    double* in = fftw_alloc_real(real_n);
    fftw_complex* out = fftw_alloc_complex(half_n);
    Plans p;
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    p.r2c = fftw_plan_dft_r2c(N, dims, in, out, flags);
    p.c2r = fftw_plan_dft_c2r(N, dims, out, in, flags);
    fftw_free(in);
    fftw_free(out);
    if (!p.r2c || !p.c2r) throw std::runtime_error("FFTW planning failed");
    return cache.emplace(std::make_pair(N, M), p).first->second;
}

std::size_t half_size(const GridSpec& g) {
    std::size_t n = static_cast<std::size_t>(g.M / 2 + 1);
    for (int d = 0; d < g.N - 1; ++d) n *= static_cast<std::size_t>(g.M);
    return n;
}

int signed_index(int i, int M) { return i < M / 2 ? i : i - M; }

void require_dims(const GridSpec& g, const FracParams& p) {
    if (g.N != p.N) throw std::invalid_argument("dimension mismatch between grid and fractional parameters");
}

} // namespace

const char* to_string(ZeroMode z) { return z == ZeroMode::exact ? "exact" : "cell_average"; }

ZeroMode zero_mode_from_string(const std::string& name) {
    if (name == "exact") return ZeroMode::exact;
    if (name == "cell_average") return ZeroMode::cell_average;
    throw std::invalid_argument("unknown zero-mode policy '" + name + "'");
}

FracParams::FracParams(int N_, double s_, ZeroMode zm) : N(N_), s(s_), zero_mode(zm) { validate(); }

void FracParams::validate() const {
    if (N < 1 || N > 3) throw std::invalid_argument("dimension N must be 1, 2 or 3");
    if (!(s > 0.0 && s < 1.0)) throw std::invalid_argument("order s must lie in (0, 1)");
    if (!(N > 2.0 * s)) throw std::invalid_argument("N > 2s is required");
}

double FracParams::c_Ns() const {
    return std::pow(4.0, s) * std::tgamma(N / 2.0 + s) /
           (std::pow(std::numbers::pi, N / 2.0) * std::abs(std::tgamma(-s)));
}

double FracParams::zero_symbol(double L) const {
    if (zero_mode == ZeroMode::exact) return 0.0;
    return std::pow(std::numbers::pi / L, 2.0 * s) / cell_mean_inverse_symbol(N, s);
}

double FracParams::zero_inverse_symbol(double L) const {
    if (zero_mode == ZeroMode::exact) return std::pow(std::numbers::pi / L, -2.0 * s);
    return 1.0 / zero_symbol(L);
}

double cell_mean_inverse_symbol(int N, double s) {
    // Radial integration from the origin to each of the 2N faces reduces the
    // cube mean to N/(N-2s) * integral over [-1/2,1/2]^{N-1} of (1/4+|y|^2)^{-s}.
    const double pre = N / (N - 2.0 * s);
    if (N == 1) return pre * std::pow(0.25, -s);
    auto midpoint = [&](int n) {
        const double w = 1.0 / n;
        double acc = 0.0;
        if (N == 2) {
            for (int i = 0; i < n; ++i) {
                const double y = -0.5 + (i + 0.5) * w;
                acc += std::pow(0.25 + y * y, -s);
            }
            return acc * w;
        }
        for (int i = 0; i < n; ++i) {
            const double y = -0.5 + (i + 0.5) * w;
            for (int j = 0; j < n; ++j) {
                const double z = -0.5 + (j + 0.5) * w;
                acc += std::pow(0.25 + y * y + z * z, -s);
            }
        }
        return acc * w * w;
    };
    const int n = N == 2 ? 2000 : 400;
    const double coarse = midpoint(n), fine = midpoint(2 * n);
    return pre * (4.0 * fine - coarse) / 3.0;
}

Spectrum forward(const Field& u) {
    const GridSpec& g = u.grid();
    Spectrum s{g, std::vector<std::complex<double>>(half_size(g))};
    const Plans& pl = plans_for(g.N, g.M);
    std::vector<double> in(u.values());
    fftw_execute_dft_r2c(pl.r2c, in.data(), reinterpret_cast<fftw_complex*>(s.c.data()));
    const double scale = 1.0 / static_cast<double>(g.size());
    for (auto& c : s.c) c *= scale;
    return s;
}

Field inverse(const Spectrum& s) {
    const GridSpec& g = s.grid;
    if (s.c.size() != half_size(g)) throw std::invalid_argument("spectrum size does not match grid");
    const Plans& pl = plans_for(g.N, g.M);
    std::vector<std::complex<double>> tmp(s.c);  // c2r overwrites its input
    Field u(g);
    fftw_execute_dft_c2r(pl.c2r, reinterpret_cast<fftw_complex*>(tmp.data()), u.data());
    return u;
}

void for_each_mode(const GridSpec& g,
                   const std::function<void(std::size_t, double, double, const std::array<int, 3>&)>& fn) {
    const int M = g.M;
    const int H = M / 2 + 1;
    const double dk = std::numbers::pi / g.L;
    const std::size_t n = half_size(g);
    std::array<int, 3> k{0, 0, 0};
    for (std::size_t idx = 0; idx < n; ++idx) {
        std::size_t rest = idx;
        const int last = static_cast<int>(rest % H);
        rest /= H;
        k[g.N - 1] = last;
        for (int d = g.N - 2; d >= 0; --d) {
            k[d] = signed_index(static_cast<int>(rest % M), M);
            rest /= M;
        }
        double xi2 = 0.0;
        for (int d = 0; d < g.N; ++d) {
            const double xi = k[d] * dk;
            xi2 += xi * xi;
        }
        const double weight = (last == 0 || last == M / 2) ? 1.0 : 2.0;
        fn(idx, xi2, weight, k);
    }
}

namespace {

// Forward symbol |xi|^{2s}, with the zero mode per policy.
double symbol(double xi2, double s, double zero) { return xi2 == 0.0 ? zero : std::pow(xi2, s); }

} // namespace

Field frac_laplacian(const Field& u, const FracParams& p) {
    require_dims(u.grid(), p);
    Spectrum sp = forward(u);
    const double z = p.zero_symbol(u.grid().L);
    for_each_mode(u.grid(), [&](std::size_t i, double xi2, double, const std::array<int, 3>&) {
        sp.c[i] *= symbol(xi2, p.s, z);
    });
    return inverse(sp);
}

Field riesz_inverse(const Field& f, const FracParams& p) {
    require_dims(f.grid(), p);
    Spectrum sp = forward(f);
    const double z = p.zero_inverse_symbol(f.grid().L);
    for_each_mode(f.grid(), [&](std::size_t i, double xi2, double, const std::array<int, 3>&) {
        sp.c[i] *= xi2 == 0.0 ? z : std::pow(xi2, -p.s);
    });
    return inverse(sp);
}

double hs_inner(const Field& u, const Field& v, const FracParams& p) {
    require_same_grid(u.grid(), v.grid());
    require_dims(u.grid(), p);
    const Spectrum a = forward(u);
    const Spectrum b = &u == &v ? a : forward(v);
    const double z = p.zero_symbol(u.grid().L);
    double acc = 0.0;
    for_each_mode(u.grid(), [&](std::size_t i, double xi2, double w, const std::array<int, 3>&) {
        acc += w * symbol(xi2, p.s, z) * (a.c[i].real() * b.c[i].real() + a.c[i].imag() * b.c[i].imag());
    });
    return acc * u.grid().box_volume();
}

double hs_norm2(const Field& u, const FracParams& p) { return hs_inner(u, u, p); }

double lp_norm(const Field& u, double p) {
    if (!(p >= 1.0)) throw std::invalid_argument("lp_norm requires p >= 1");
    double acc = 0.0;
    if (p == 2.0) {
        for (double x : u.values()) acc += x * x;
    } else if (p == 4.0) {
        for (double x : u.values()) acc += (x * x) * (x * x);
    } else {
        for (double x : u.values()) acc += std::pow(std::abs(x), p);
    }
    return std::pow(acc * u.grid().cell_volume(), 1.0 / p);
}

double dual_pairing(const Field& f, const Field& u) { return integrate_product(f, u); }

double dual_norm(const Field& f, const FracParams& p) {
    require_dims(f.grid(), p);
    const Spectrum sp = forward(f);
    const double z = p.zero_inverse_symbol(f.grid().L);
    double acc = 0.0;
    for_each_mode(f.grid(), [&](std::size_t i, double xi2, double w, const std::array<int, 3>&) {
        acc += w * (xi2 == 0.0 ? z : std::pow(xi2, -p.s)) * std::norm(sp.c[i]);
    });
    return std::sqrt(acc * f.grid().box_volume());
}

Field translate(const Field& u, const Point& y) {
    const GridSpec& g = u.grid();
    const double h = g.h();
    std::array<int, 3> shift{0, 0, 0};
    bool aligned = true;
    for (int d = 0; d < g.N; ++d) {
        const double q = y[d] / h;
        const double r = std::round(q);
        if (std::abs(q - r) > 1e-12 * std::max(1.0, std::abs(q))) aligned = false;
        shift[d] = static_cast<int>(std::fmod(r, static_cast<double>(g.M)));
    }
    if (aligned) {
        Field out(g);
        for (std::size_t i = 0; i < u.size(); ++i) {
            auto ijk = g.unflatten(i);
            for (int d = 0; d < g.N; ++d) ijk[d] += shift[d];
            out[g.flatten(ijk)] = u[i];
        }
        return out;
    }
    Spectrum sp = forward(u);
    const double dk = std::numbers::pi / g.L;
    for_each_mode(g, [&](std::size_t i, double, double, const std::array<int, 3>& k) {
        std::complex<double> ph(1.0, 0.0);
        for (int d = 0; d < g.N; ++d) {
            const double arg = k[d] * dk * y[d];
            if (std::abs(k[d]) == g.M / 2)
                ph *= std::cos(arg);  // Nyquist mode: keep the interpolant real
            else
                ph *= std::polar(1.0, -arg);
        }
        sp.c[i] *= ph;
    });
    return inverse(sp);
}

void require_nondegenerate(const Field& u) {
    if (u.size() == 0 || u.is_constant())
        throw Error("degenerate-field", "operation requires a non-constant field");
}

} // namespace fracrit
