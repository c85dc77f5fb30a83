#include "fracrit/morrey.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "fracrit/error.hpp"
#include "fracrit/parallel.hpp"

namespace fracrit {

double ball_radius(const GridSpec& g, int n) { return (n + 0.5) * g.h(); }

MorreySpec MorreySpec::make(const GridSpec& g, const FracParams& p, double r) {
    const double ts = p.two_star();
    if (!(r >= 1.0 && r < ts)) throw std::invalid_argument("Morrey exponent must lie in [1, 2*)");
    MorreySpec ms;
    ms.r = r;
    ms.gamma = r * (g.N - 2.0 * p.s) / 2.0;
    const int nmax = g.M / 2 - 1;
    ms.ladder.push_back(0);
    for (int n = 1; n < nmax; n *= 2) ms.ladder.push_back(n);
    if (ms.ladder.back() != nmax) ms.ladder.push_back(nmax);
    ms.stride = std::max(1, g.M / 128);
    ms.n_max = nmax;
    return ms;
}

MorreySpec MorreySpec::capped(const GridSpec& g, double R) const {
    MorreySpec out = *this;
    const int cap = static_cast<int>(std::floor(R / g.h() - 0.5));
    out.n_max = std::clamp(cap, 0, n_max);
    out.ladder.clear();
    for (int n : ladder)
        if (n <= out.n_max) out.ladder.push_back(n);
    if (out.ladder.empty() || out.ladder.back() != out.n_max) out.ladder.push_back(out.n_max);
    return out;
}

BoxSums::BoxSums(const Field& density) : g_(density.grid()) {
    const int M = g_.M;
    const int E = M + 1;
    std::size_t total = 1;
    for (int d = 0; d < g_.N; ++d) total *= E;
    sat_.assign(total, 0.0);
    // Copy values shifted by one along every axis, then prefix-sum axis by axis.
    for (std::size_t i = 0; i < density.size(); ++i) {
        const auto ijk = g_.unflatten(i);
        std::size_t idx = 0;
        for (int d = 0; d < g_.N; ++d) idx = idx * E + static_cast<std::size_t>(ijk[d] + 1);
        sat_[idx] = density[i];
    }
    std::size_t inner = 1;
    for (int d = g_.N - 1; d >= 0; --d) {
        const std::size_t outer = total / (inner * E);
        for (std::size_t o = 0; o < outer; ++o)
            for (std::size_t in = 0; in < inner; ++in) {
                const std::size_t base = o * E * inner + in;
                for (int k = 1; k < E; ++k) sat_[base + k * inner] += sat_[base + (k - 1) * inner];
            }
        inner *= E;
    }
}

double BoxSums::block(const std::array<int, 3>& lo, const std::array<int, 3>& hi) const {
    const int E = g_.M + 1;
    double acc = 0.0;
    for (int mask = 0; mask < (1 << g_.N); ++mask) {
        std::size_t idx = 0;
        int sign = 1;
        for (int d = 0; d < g_.N; ++d) {
            const bool take_lo = mask & (1 << d);
            idx = idx * E + static_cast<std::size_t>(take_lo ? lo[d] : hi[d]);
            if (take_lo) sign = -sign;
        }
        acc += sign * sat_[idx];
    }
    return acc;
}

double BoxSums::sum(std::size_t center, int n) const {
    const int M = g_.M;
    if (n < 0 || 2 * n + 1 > M) throw std::invalid_argument("ball half width out of range");
    const auto c = g_.unflatten(center);
    // Per axis, the periodic interval [c-n, c+n] splits into at most two ranges.
    std::array<std::array<std::pair<int, int>, 2>, 3> ranges{};
    std::array<int, 3> count{1, 1, 1};
    for (int d = 0; d < g_.N; ++d) {
        const int lo = c[d] - n, hi = c[d] + n + 1;
        if (lo < 0) {
            ranges[d][0] = {lo + M, M};
            ranges[d][1] = {0, hi};
            count[d] = 2;
        } else if (hi > M) {
            ranges[d][0] = {lo, M};
            ranges[d][1] = {0, hi - M};
            count[d] = 2;
        } else {
            ranges[d][0] = {lo, hi};
        }
    }
    double acc = 0.0;
    for (int a = 0; a < count[0]; ++a)
        for (int b = 0; b < (g_.N > 1 ? count[1] : 1); ++b)
            for (int e = 0; e < (g_.N > 2 ? count[2] : 1); ++e) {
                std::array<int, 3> lo{ranges[0][a].first, ranges[1][b].first, ranges[2][e].first};
                std::array<int, 3> hi{ranges[0][a].second, ranges[1][b].second, ranges[2][e].second};
                acc += block(lo, hi);
            }
    return acc;
}

namespace {

struct LadderHit {
    double value = 0.0;
    std::size_t index = 0;
    int n = 0;
};

bool better(const LadderHit& a, const LadderHit& b) {
    if (a.value != b.value) return a.value > b.value;
    if (a.n != b.n) return a.n < b.n;
    return a.index < b.index;
}

std::vector<std::size_t> strided_centres(const GridSpec& g, int stride) {
    std::vector<std::size_t> out;
    const int per_axis = (g.M + stride - 1) / stride;
    std::size_t count = 1;
    for (int d = 0; d < g.N; ++d) count *= per_axis;
    out.reserve(count);
    for (std::size_t c = 0; c < count; ++c) {
        std::size_t rest = c;
        std::array<int, 3> ijk{0, 0, 0};
        for (int d = g.N - 1; d >= 0; --d) {
            ijk[d] = static_cast<int>(rest % per_axis) * stride;
            rest /= per_axis;
        }
        out.push_back(g.flatten(ijk));
    }
    std::sort(out.begin(), out.end());
    return out;
}

template <class Objective>
LadderHit scan(const BoxSums& sums, const std::vector<std::size_t>& centres, const std::vector<int>& radii,
               const Objective& objective) {
    const std::size_t blocks = std::min<std::size_t>(centres.size(), 64);
    std::vector<LadderHit> best(blocks, LadderHit{-1.0, 0, 0});
    parallel_for(blocks, [&](std::size_t b) {
        const std::size_t lo = centres.size() * b / blocks, hi = centres.size() * (b + 1) / blocks;
        LadderHit local{-1.0, 0, 0};
        for (std::size_t i = lo; i < hi; ++i)
            for (int n : radii) {
                const LadderHit cand{objective(n, sums.sum(centres[i], n)), centres[i], n};
                if (better(cand, local)) local = cand;
            }
        best[b] = local;
    });
    LadderHit out{-1.0, 0, 0};
    for (const auto& h : best)
        if (better(h, out)) out = h;
    return out;
}

// Coarse scan over strided centres and the ladder, then a refinement pass
// with all centres within one stride of the coarse winner and radii
// n * 2^{i/4}. Ties: smaller n first, then lower flat index.
template <class Objective>
LadderHit ladder_search(const BoxSums& sums, const MorreySpec& ms, const Objective& objective) {
    const GridSpec& g = sums.grid();
    const LadderHit coarse = scan(sums, strided_centres(g, ms.stride), ms.ladder, objective);
    std::set<int> radii(ms.ladder.begin(), ms.ladder.end());
    const int nmax = ms.n_max;
    for (int i = -4; i <= 4; ++i) {
        const int n = static_cast<int>(std::lround((coarse.n + 0.5) * std::pow(2.0, i / 4.0) - 0.5));
        radii.insert(std::clamp(n, 0, nmax));
    }
    std::set<std::size_t> near;
    const auto c = g.unflatten(coarse.index);
    const int w = ms.stride == 1 ? 0 : ms.stride;
    const int span = 2 * w + 1;
    std::size_t count = 1;
    for (int d = 0; d < g.N; ++d) count *= span;
    for (std::size_t k = 0; k < count; ++k) {
        std::size_t rest = k;
        std::array<int, 3> ijk = c;
        for (int d = g.N - 1; d >= 0; --d) {
            ijk[d] = c[d] + static_cast<int>(rest % span) - w;
            rest /= span;
        }
        near.insert(g.flatten(ijk));
    }
    const LadderHit fine = scan(sums, std::vector<std::size_t>(near.begin(), near.end()),
                                std::vector<int>(radii.begin(), radii.end()), objective);
    return better(fine, coarse) ? fine : coarse;
}

} // namespace

double morrey_norm(const Field& u, const MorreySpec& ms) {
    const GridSpec& g = u.grid();
    if (u.max_abs() == 0.0) return 0.0;
    Field dens(g);
    for (std::size_t i = 0; i < u.size(); ++i) dens[i] = std::pow(std::abs(u[i]), ms.r);
    const BoxSums sums(dens);
    const auto obj = [&](int n, double s) {
        return std::pow(ball_radius(g, n), ms.gamma) * std::max(s, 0.0) / std::pow(2.0 * n + 1.0, g.N);
    };
    return std::pow(ladder_search(sums, ms, obj).value, 1.0 / ms.r);
}

double interpolation_check(const Field& u, const MorreySpec& ms, const FracParams& p, double theta) {
    const double ts = p.two_star();
    if (!(theta >= 2.0 / ts - 1e-15 && theta < 1.0)) throw std::invalid_argument("theta must lie in [2/2*, 1)");
    if (u.max_abs() == 0.0) throw Error("degenerate-field", "interpolation ratio of the zero field");
    return lp_norm(u, ts) / (std::pow(hs_norm2(u, p), theta / 2.0) * std::pow(morrey_norm(u, ms), 1.0 - theta));
}

double concentration_value(const Field& v, const FracParams& p, std::size_t index, int n) {
    Field dens(v.grid());
    for (std::size_t i = 0; i < v.size(); ++i) dens[i] = v[i] * v[i];
    const BoxSums sums(dens);
    const GridSpec& g = v.grid();
    return std::pow(ball_radius(g, n), -2.0 * p.s) * g.cell_volume() * sums.sum(index, n);
}

Concentration concentration_search(const Field& v, const FracParams& p, double max_radius) {
    require_nondegenerate(v);
    const GridSpec& g = v.grid();
    Field dens(g);
    for (std::size_t i = 0; i < v.size(); ++i) dens[i] = v[i] * v[i];
    const BoxSums sums(dens);
    MorreySpec ms = MorreySpec::make(g, p);
    if (std::isfinite(max_radius)) ms = ms.capped(g, max_radius);
    const double hv = g.cell_volume();
    const auto obj = [&](int n, double s) { return std::pow(ball_radius(g, n), -2.0 * p.s) * hv * std::max(s, 0.0); };
    const LadderHit hit = ladder_search(sums, ms, obj);
    Concentration c;
    c.index = hit.index;
    c.x = g.point(hit.index);
    c.n = hit.n;
    c.R = ball_radius(g, hit.n);
    c.value = hit.value;
    c.at_cap = hit.n == ms.n_max;
    return c;
}

} // namespace fracrit
