#include <doctest.h>

#include <cmath>

#include "fracrit/bubbles.hpp"
#include "fracrit/error.hpp"
#include "fracrit/morrey.hpp"
#include "fracrit/random_field.hpp"

using namespace fracrit;

namespace {

const FracParams p14(1, 0.25);

// Brute-force periodic cube sum.
double brute_sum(const Field& dens, std::size_t idx, int n) {
    const GridSpec& g = dens.grid();
    const auto c = g.unflatten(idx);
    double acc = 0.0;
    if (g.N == 1) {
        for (int i = -n; i <= n; ++i) acc += dens[g.flatten({c[0] + i, 0, 0})];
    } else {
        for (int i = -n; i <= n; ++i)
            for (int j = -n; j <= n; ++j) acc += dens[g.flatten({c[0] + i, c[1] + j, 0})];
    }
    return acc;
}

double brute_morrey(const Field& u, double gamma, const std::vector<int>& radii) {
    const GridSpec& g = u.grid();
    Field dens(g);
    for (std::size_t i = 0; i < u.size(); ++i) dens[i] = u[i] * u[i];
    double best = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i)
        for (int n : radii) {
            const double avg = brute_sum(dens, i, n) / std::pow(2.0 * n + 1.0, g.N);
            best = std::max(best, std::pow(ball_radius(g, n), gamma) * avg);
        }
    return std::sqrt(best);
}

struct Hit {
    std::size_t index;
    int n;
    double value;
};

Hit brute_concentration(const Field& v, int n_cap) {
    const GridSpec& g = v.grid();
    Field dens(g);
    for (std::size_t i = 0; i < v.size(); ++i) dens[i] = v[i] * v[i];
    Hit best{0, 0, -1.0};
    for (std::size_t i = 0; i < v.size(); ++i)
        for (int n = 0; n <= n_cap; ++n) {
            const double q = std::pow(ball_radius(g, n), -0.5) * g.cell_volume() * brute_sum(dens, i, n);
            if (q > best.value) best = {i, n, q};
        }
    return best;
}

} // namespace

TEST_CASE("box sums match brute force with periodic wrap") {
    for (const GridSpec& g : {GridSpec{1, 3.0, 40}, GridSpec{2, 3.0, 20}}) {
        Rng rng = derived_rng(2, g.N);
        Field dens = random_smooth_field(g, 0.25, rng);
        for (double& x : dens.values()) x = x * x;
        const BoxSums sums(dens);
        for (std::size_t idx : {std::size_t{0}, std::size_t{7}, g.size() - 1, g.size() / 2})
            for (int n : {0, 1, 3, g.M / 2 - 1})
                CHECK(sums.sum(idx, n) == doctest::Approx(brute_sum(dens, idx, n)).epsilon(1e-12));
        CHECK_THROWS_AS(sums.sum(0, g.M / 2), std::invalid_argument);
    }
}

TEST_CASE("Morrey ladder and exponent") {
    const GridSpec g{1, 10.0, 64};
    const MorreySpec ms = MorreySpec::make(g, p14);
    CHECK(ms.gamma == doctest::Approx(0.5));
    CHECK(ms.ladder == std::vector<int>{0, 1, 2, 4, 8, 16, 31});
    CHECK(ms.stride == 1);
    CHECK(MorreySpec::make(GridSpec{1, 50.0, 4096}, p14).stride == 32);
    CHECK(ball_radius(g, 3) == doctest::Approx(3.5 * g.h()));
    const MorreySpec capped = ms.capped(g, 5.0 * g.h());
    CHECK(capped.n_max == 4);
    CHECK(capped.ladder == std::vector<int>{0, 1, 2, 4});
    CHECK_THROWS_AS(MorreySpec::make(g, p14, 4.0), std::invalid_argument);
    CHECK_THROWS_AS(MorreySpec::make(g, p14, 0.5), std::invalid_argument);
}

TEST_CASE("Morrey norm sits between ladder-only and full brute force") {
    const GridSpec g{1, 10.0, 64};
    const MorreySpec ms = MorreySpec::make(g, p14);
    std::vector<int> all;
    for (int n = 0; n <= ms.n_max; ++n) all.push_back(n);
    for (int seed = 0; seed < 5; ++seed) {
        Rng rng = derived_rng(40, seed);
        const Field u = random_smooth_field(g, 0.25, rng);
        const double lib = morrey_norm(u, ms);
        CHECK(lib >= brute_morrey(u, ms.gamma, ms.ladder) * (1 - 1e-12));
        CHECK(lib <= brute_morrey(u, ms.gamma, all) * (1 + 1e-12));
    }
    CHECK(morrey_norm(Field(g), ms) == 0.0);
}

TEST_CASE("Hoelder bound and invariance under rescaling") {
    const GridSpec g{1, 50.0, 4096};
    const MorreySpec ms = MorreySpec::make(g, p14);
    const Field w = reference_bubble(g, p14);
    // R^{N-2s} avg_B |u|^2 <= 2^{-(N-2s)} ||u||_{2*}^2 on cubes of side 2R.
    CHECK(morrey_norm(w, ms) <= std::pow(2.0, -0.25) * lp_norm(w, 4.0));
    for (double r : {0.5, 2.0, 4.0}) {
        const Field v = rescale(w, r, Point{r * 9 * g.h(), 0, 0}, p14);
        CHECK(morrey_norm(v, MorreySpec::make(v.grid(), p14)) == doctest::Approx(morrey_norm(w, ms)).epsilon(1e-12));
    }
}

TEST_CASE("interpolation ratio") {
    const GridSpec g{1, 50.0, 1024};
    const MorreySpec ms = MorreySpec::make(g, p14);
    const Field w = bubble(g, p14, BubbleParams{Point{}, 1.0, 1.0});
    const double r = interpolation_check(w, ms, p14, 0.5);
    CHECK(std::isfinite(r));
    CHECK(r > 0.0);
    const double expect = lp_norm(w, 4.0) / (std::pow(hs_norm2(w, p14), 0.25) * std::pow(morrey_norm(w, ms), 0.5));
    CHECK(r == doctest::Approx(expect).epsilon(1e-14));
    // A second far bubble changes the ratio by less than a factor 2.
    const Field two = w + bubble(g, p14, BubbleParams{Point{30.0, 0, 0}, 0.5, 1.0});
    const double r2 = interpolation_check(two, ms, p14, 0.5);
    CHECK(r2 < 2.0 * r);
    CHECK_THROWS_AS(interpolation_check(w, ms, p14, 0.4), std::invalid_argument);
    CHECK_THROWS_AS(interpolation_check(w, ms, p14, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(interpolation_check(Field(g), ms, p14, 0.5), Error);
}

TEST_CASE("concentration search against a dense scan") {
    const GridSpec g{1, 50.0, 1024};
    const int j0 = 600;
    const Point x0{g.coord(j0), 0, 0};
    for (double lambda : {0.5, 1.0, 2.0}) {
        const Field v = bubble(g, p14, BubbleParams{x0, lambda, 1.0});
        const double cap = g.L / 8;
        const Concentration c = concentration_search(v, p14, cap);
        const int n_cap = static_cast<int>(std::floor(cap / g.h() - 0.5));
        const Hit b = brute_concentration(v, n_cap);
        CHECK(std::abs(wrap_delta(c.x[0] - x0[0], g.L)) <= g.h() + 1e-12);
        CHECK(std::abs(wrap_delta(c.x[0] - g.point(b.index)[0], g.L)) <= g.h() + 1e-12);
        // Within one ladder rung (factor 2) of the dense optimum.
        CHECK(c.R <= 2.0 * ball_radius(g, b.n));
        CHECK(c.R >= 0.5 * ball_radius(g, b.n));
        CHECK(c.value <= b.value * (1 + 1e-12));
        CHECK(c.value == doctest::Approx(concentration_value(v, p14, c.index, c.n)).epsilon(1e-12));
    }
    CHECK_THROWS_AS(concentration_search(Field(g, 1.0), p14), Error);
}
