#pragma once

#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "fracrit/grid.hpp"

namespace fracrit {

// Treatment of the zero Fourier mode, which R^N does not have.
//   exact:        forward symbol 0 at xi = 0; inversion and dual norms use
//                 max(|xi|, pi/L)^{-2s} there.
//   cell_average: the zero mode gets sigma0 = 1 / mean_{cell}|xi|^{-2s}, the
//                 harmonic average of the symbol over the frequency cell
//                 [-pi/2L, pi/2L]^N. Used consistently by the operator, the
//                 quadratic form, the inverse and the dual norm, so the discrete
//                 energy is coercive and the inverse has a positive kernel.
enum class ZeroMode { exact, cell_average };

const char* to_string(ZeroMode z);
ZeroMode zero_mode_from_string(const std::string& name);

struct FracParams {
    int N = 1;
    double s = 0.25;
    ZeroMode zero_mode = ZeroMode::cell_average;

    FracParams() = default;
    FracParams(int N, double s, ZeroMode zm = ZeroMode::cell_average);

    void validate() const;  // throws std::invalid_argument
    double two_star() const { return 2.0 * N / (N - 2.0 * s); }
    // 4^s Gamma(N/2+s) / (pi^{N/2} |Gamma(-s)|), the singular-integral constant.
    double c_Ns() const;
    // Symbol used at xi = 0 by the forward operator / quadratic form.
    double zero_symbol(double L) const;
    // Symbol reciprocal used at xi = 0 by inversion / dual norm.
    double zero_inverse_symbol(double L) const;
};

// mean over [-1/2, 1/2]^N of |eta|^{-2s}.
double cell_mean_inverse_symbol(int N, double s);

// Half-spectrum (r2c layout) coefficients normalised by M^N, so that
// u(x_j) = sum_xi c_xi e^{i xi . (x_j + L)} over the full spectrum.
struct Spectrum {
    GridSpec grid;
    std::vector<std::complex<double>> c;
};

Spectrum forward(const Field& u);
Field inverse(const Spectrum& s);

// Visits every stored half-spectrum entry with its |xi|^2 and its
// multiplicity (1 or 2) in the full spectrum.
void for_each_mode(const GridSpec& g,
                   const std::function<void(std::size_t idx, double xi2, double weight,
                                            const std::array<int, 3>& k)>& fn);

Field frac_laplacian(const Field& u, const FracParams& p);
double hs_inner(const Field& u, const Field& v, const FracParams& p);
double hs_norm2(const Field& u, const FracParams& p);
double lp_norm(const Field& u, double p);
double dual_pairing(const Field& f, const Field& u);
double dual_norm(const Field& f, const FracParams& p);
Field riesz_inverse(const Field& f, const FracParams& p);

// u(x - y) on the torus. Cyclic index shift when y is a multiple of h on
// every axis, trigonometric interpolation otherwise.
Field translate(const Field& u, const Point& y);

// Throws fracrit::Error("degenerate-field") when u is constant.
void require_nondegenerate(const Field& u);

} // namespace fracrit
