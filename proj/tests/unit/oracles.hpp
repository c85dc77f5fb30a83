#pragma once

// Slow reference implementations used as test oracles. They share no code
// with the library beyond the Field container.

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "fracrit/grid.hpp"

namespace oracle {

// Full-spectrum DFT of a 1-D field: c_k = (1/M) sum_j u_j e^{-i k pi (x_j + L)/L},
// k = -M/2 .. M/2-1 stored at index k + M/2.
inline std::vector<std::complex<double>> dft1(const fracrit::Field& u) {
    const auto& g = u.grid();
    const int M = g.M;
    std::vector<std::complex<double>> c(M);
    for (int k = -M / 2; k < M / 2; ++k) {
        std::complex<double> acc = 0.0;
        for (int j = 0; j < M; ++j) {
            const double ang = -2.0 * std::numbers::pi * k * j / M;
            acc += u[j] * std::complex<double>(std::cos(ang), std::sin(ang));
        }
        c[k + M / 2] = acc / double(M);
    }
    return c;
}

// sigma_0 = (pi/L)^{2s} (1-2s) / 4^s: harmonic mean of |xi|^{2s} over the
// 1-D frequency cell, from the closed-form integral of |eta|^{-2s}.
inline double cell_sigma0_1d(double s, double L) {
    return std::pow(std::numbers::pi / L, 2.0 * s) * (1.0 - 2.0 * s) / std::pow(4.0, s);
}

// (2L) sum_k sigma(k) Re(c_u conj c_v), sigma(0) = sigma0.
inline double hs_inner1(const fracrit::Field& u, const fracrit::Field& v, double s, double sigma0) {
    const auto& g = u.grid();
    const auto cu = dft1(u), cv = dft1(v);
    double acc = 0.0;
    for (int k = -g.M / 2; k < g.M / 2; ++k) {
        const double sig = k == 0 ? sigma0 : std::pow(std::abs(k) * std::numbers::pi / g.L, 2.0 * s);
        acc += sig * std::real(cu[k + g.M / 2] * std::conj(cv[k + g.M / 2]));
    }
    return 2.0 * g.L * acc;
}

inline double quad(const fracrit::Field& u, double p) {
    double acc = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) acc += std::pow(std::abs(u[i]), p);
    return acc * u.grid().cell_volume();
}

} // namespace oracle
