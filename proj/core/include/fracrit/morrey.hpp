#pragma once

#include <limits>
#include <vector>

#include "fracrit/grid.hpp"
#include "fracrit/spectral.hpp"

namespace fracrit {

// Balls are lattice cubes B(x_i, n) = {x_j : |j - i|_inf <= n} of volume
// ((2n+1)h)^N and radius R = (n + 1/2) h; they map onto themselves under
// co-scaled rescaling.
double ball_radius(const GridSpec& g, int n);

struct MorreySpec {
    double r = 2.0;
    double gamma = 0.0;        // r (N-2s)/2
    std::vector<int> ladder;   // half widths n: 0, 1, 2, 4, ... , M/2 - 1
    int stride = 1;            // centre subsampling, max(1, M/128)
    int n_max = 0;             // largest half width searched

    static MorreySpec make(const GridSpec& g, const FracParams& p, double r = 2.0);
    // Restricts the ladder to radii (n + 1/2) h <= R.
    MorreySpec capped(const GridSpec& g, double R) const;
};

// Periodic summed-volume table of a nonnegative density.
class BoxSums {
public:
    explicit BoxSums(const Field& density);
    // Sum of the density over B(x_idx, n), n <= M/2 - 1.
    double sum(std::size_t idx, int n) const;
    const GridSpec& grid() const { return g_; }

private:
    GridSpec g_;
    std::vector<double> sat_;  // (M+1)^N, exclusive prefix sums
    double block(const std::array<int, 3>& lo, const std::array<int, 3>& hi) const;
};

double morrey_norm(const Field& u, const MorreySpec& ms);

// ||u||_{2*} / (||u||^theta ||u||_Morrey^{1-theta}).
double interpolation_check(const Field& u, const MorreySpec& ms, const FracParams& p, double theta);

struct Concentration {
    Point x{0.0, 0.0, 0.0};
    std::size_t index = 0;
    int n = 0;
    double R = 0.0;
    double value = 0.0;  // Q(x, R) = R^{-2s} int_B |v|^2
    bool at_cap = false; // maximiser sits on the largest admissible radius
};

double concentration_value(const Field& v, const FracParams& p, std::size_t index, int n);
// max_radius bounds the searched radii (default: whole box).
Concentration concentration_search(const Field& v, const FracParams& p,
                                   double max_radius = std::numeric_limits<double>::infinity());

} // namespace fracrit
