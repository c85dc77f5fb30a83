#pragma once

#include <cstdint>
#include <random>

#include "fracrit/grid.hpp"

namespace fracrit {

using Rng = std::mt19937_64;

// Smooth spectral noise with |c_xi| ~ (1+|xi|)^{-(N/2+s+1)} and random phases,
// normalised to unit maximum modulus.
Field random_smooth_field(const GridSpec& g, double s, Rng& rng);

// Derives an independent stream for task i from a base seed.
Rng derived_rng(std::uint64_t seed, std::uint64_t stream);

} // namespace fracrit
