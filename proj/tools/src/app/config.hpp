#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "fracrit/bubbles.hpp"
#include "fracrit/functionals.hpp"
#include "fracrit/solver.hpp"

namespace fracrit::app {

// Raised for anything wrong with a run configuration (exit code 3).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct CoefficientSpec {
    std::string type = "constant";  // constant | bump
    double value = 1.0;             // constant
    double peak = 1.0;              // bump: 1 + (peak-1) exp(-|x-c|^2/width^2)
    double width = 1.0;
    Point center{0.0, 0.0, 0.0};
};

struct ForcingSpec {
    std::string type = "gaussian";  // gaussian | zero
    Point center{0.0, 0.0, 0.0};
    double width = 1.0;             // exp(-|x-c|^2/(2 width^2)) before rescaling
    std::optional<double> dual_norm;
    std::optional<double> smallness_fraction;  // of C0 S^{N/(4s)}
};

struct RunConfig {
    GridSpec grid;
    FracParams params;
    CoefficientSpec coefficient;
    ForcingSpec forcing;
    SolveConfig solve;
    CalibrationOptions calibration;
    double beta_scale = 1.0;  // fault injection for verify
    std::uint64_t seed = 1;
    std::string output_dir = ".";
    nlohmann::ordered_json echo;  // normalised config as parsed
};

RunConfig parse_config(const nlohmann::ordered_json& j);
RunConfig load_config(const std::string& path);

// Canonical one-dimensional instance used when no --config is given.
nlohmann::ordered_json default_config_json();

Field build_coefficient(const RunConfig& cfg);
// Gaussian forcing rescaled to the requested dual norm (needs S_num for
// smallness_fraction).
Field build_forcing(const RunConfig& cfg, double S_num);
ProblemData build_problem(const RunConfig& cfg, double S_num);

} // namespace fracrit::app
