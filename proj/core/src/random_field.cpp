#include "fracrit/random_field.hpp"

#include <cmath>

#include "fracrit/spectral.hpp"

namespace fracrit {

Field random_smooth_field(const GridSpec& g, double s, Rng& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Spectrum sp{g, {}};
    {
        Field zero(g);
        sp = forward(zero);
    }
    const double decay = g.N / 2.0 + s + 1.0;
    for_each_mode(g, [&](std::size_t i, double xi2, double, const std::array<int, 3>& k) {
        const double amp = std::pow(1.0 + std::sqrt(xi2), -decay);
        const double re = normal(rng);
        const double im = normal(rng);
        bool real_mode = true;
        for (int d = 0; d < g.N; ++d)
            if (k[d] != 0 && std::abs(k[d]) != g.M / 2) real_mode = false;
        sp.c[i] = amp * std::complex<double>(re, real_mode ? 0.0 : im);
    });
    Field u = inverse(sp);
    const double m = u.max_abs();
    if (m > 0) u *= 1.0 / m;
    return u;
}

Rng derived_rng(std::uint64_t seed, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
    return Rng(seq);
}

} // namespace fracrit
