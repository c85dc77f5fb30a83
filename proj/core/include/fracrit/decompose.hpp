#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fracrit/functionals.hpp"
#include "fracrit/morrey.hpp"

namespace fracrit {

struct DecomposeOptions {
    double stop_threshold_rel = 1e-2;        // relative to the initial Morrey norm
    std::optional<double> stop_threshold;    // absolute override
    int max_bubbles = 8;
    double fit_tol = 5e-2;                   // relative L2 misfit inside the fit window
    double window = 3.0;                     // fit window radius, in concentration radii
    std::optional<double> max_scale;         // default L/8; larger concentrations belong to the remainder
    double morrey_r = 2.0;
};

struct ExtractedBubble {
    Point center{0.0, 0.0, 0.0};
    double scale = 0.0;
    double a_local = 1.0;
    double local_coefficient = 1.0;  // a(x^j)^{-(N-2s)/(4s)}
    // a(x^j)^{-(N-2s)/(2s)} I_{1,0}(W), with I_{1,0}(W) evaluated on the grid at
    // the fitted centre and scale (dilation invariance makes this the same
    // quantity; on the grid it carries the matching truncation error).
    double energy = 0.0;
    double energy_reference = 0.0;   // same factor times (s/N) S_num^{N/(2s)}
    double fit_residual = 0.0;
    double concentration = 0.0;      // Q at the detected (x*, R*)
    double concentration_radius = 0.0;
};

struct DecompositionResult {
    Field remainder;
    std::vector<ExtractedBubble> bubbles;
    std::vector<double> morrey_history;  // initial norm, then after each extraction
    std::vector<std::vector<double>> separation;
    double stop_threshold = 0.0;
    // below-threshold | zero-field | max-bubbles | macroscopic-scale | unfit-profile | no-morrey-decrease
    std::string halt_reason;
    std::vector<std::string> flags;
};

DecompositionResult extract_profiles(const Field& v, const ProblemData& d, const DecomposeOptions& opt = {});

} // namespace fracrit
