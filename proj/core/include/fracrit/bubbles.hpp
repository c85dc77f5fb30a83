#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "fracrit/grid.hpp"
#include "fracrit/spectral.hpp"

namespace fracrit {

struct BubbleParams {
    Point center{0.0, 0.0, 0.0};
    double lambda = 1.0;
    std::optional<double> amplitude;  // defaults to the grid calibration beta
};

struct CalibrationOptions {
    // Relative PDE residual above which the grid is declared unusable.
    double max_residual = 5e-2;
};

struct Calibration {
    GridSpec grid;
    FracParams params;
    double lambda = 1.0;  // bubble scale used for calibration
    double kappa = 0.0;   // (A U1)(0) / U1(0)^{2*-1}
    double beta = 0.0;    // kappa^{(N-2s)/(4s)}
    double residual = 0.0;
};

// Scale at which a grid is calibrated: L/50, so that every calibration sees
// the same box-to-bubble ratio and co-scaled grids share one beta.
double reference_scale(const GridSpec& g);
GridSpec reference_grid(int N);

// Unit-amplitude profile (lambda/(lambda^2+|x-x0|^2))^{(N-2s)/2}.
Field bubble_profile(const GridSpec& g, const FracParams& p, const Point& center, double lambda);

// ||A W - W^{2*-1}||_2 / ||W^{2*-1}||_2.
double bubble_residual(const Field& w, const FracParams& p);

Calibration calibrate(const GridSpec& g, const FracParams& p, double lambda,
                      const CalibrationOptions& opt = {});
// Cached per (N, s, zero mode, M, L); the residual guard is applied on every
// call. The two-argument form uses the process-wide default options.
const Calibration& calibration(const GridSpec& g, const FracParams& p);
const Calibration& calibration(const GridSpec& g, const FracParams& p, const CalibrationOptions& opt);
void set_default_calibration_options(const CalibrationOptions& opt);
CalibrationOptions default_calibration_options();
// beta on the reference grid of dimension N.
double calibrate_amplitude(int N, double s);

Field bubble(const GridSpec& g, const FracParams& p, const BubbleParams& bp);
// The calibrated bubble at the reference scale centred at the origin.
Field reference_bubble(const GridSpec& g, const FracParams& p);

// r^{-(N-2s)/2} u((x-y)/r). The result lives on the co-scaled grid
// (same M, half length rL), so norms and Morrey quantities are preserved
// exactly up to the translation, which is exact for y/r on the lattice.
Field rescale(const Field& u, double r, const Point& y, const FracParams& p);

// J_inf(u) = ||u||^2 / ||u||_{2*}^2.
double sobolev_quotient(const Field& u, const FracParams& p);

struct SobolevOptions {
    int probes = 100;
    double eps = 1e-2;       // ||eps eta|| relative to ||W||
    double tolerance = 1e-6;
    bool strict = false;     // throw "discretization-insufficient" on probe failure
    std::uint64_t seed = 20240611;
};

struct SobolevReport {
    double S_num = 0.0;
    double hs_norm2_W = 0.0;
    double lp_pow_W = 0.0;          // ||W||_{2*}^{2*}
    double energy_W = 0.0;          // I_{1,0}(W)
    double energy_identity_error = 0.0;  // relative
    int probes = 0;
    int violations = 0;
    double min_delta = 0.0;         // min over probes of J(W+eps eta) - J(W)
    bool minimal = true;
};

SobolevReport sobolev_report(const GridSpec& g, const FracParams& p, const SobolevOptions& opt = {});
double sobolev_constant(const GridSpec& g, const FracParams& p);

struct SynthBubble {
    Point center{0.0, 0.0, 0.0};
    double r0 = 1.0;       // scale at k = 0
    double a_local = 1.0;  // a(x^j)
};

struct SynthResult {
    Field field;
    std::vector<BubbleParams> placed;
    std::vector<std::vector<double>> separation;
    bool overlap_warning = false;
};

// |log(r_i/r_j)| + |x_i - x_j| / r_i (periodic distance); diagonal is 0.
std::vector<std::vector<double>> separation_matrix(const std::vector<Point>& centers,
                                                   const std::vector<double>& scales, const GridSpec& g);

// base + sum_j a_j^{-(N-2s)/(4s)} W^{r0_j 2^{-k}, x_j}.
SynthResult synth_ps_sequence(const Field& base, const std::vector<SynthBubble>& bubbles, int k,
                              const FracParams& p, double separation_threshold = 10.0);

} // namespace fracrit
