#pragma once

#include <string>
#include <vector>

#include "fracrit/grid.hpp"
#include "fracrit/spectral.hpp"

namespace fracrit {

struct Hypotheses {
    bool a_positive = false;
    bool a_at_least_one = false;      // a >= 1 everywhere
    bool a_tends_to_one = false;      // a == 1 (to 1e-8) on the box boundary layer
    bool a_identically_one = false;
    bool f_nonnegative = false;
    bool f_nonzero = false;
};

// One instance of (-Delta)^s u = a |u|^{2*-2} u + f on a grid.
class ProblemData {
public:
    ProblemData(const FracParams& p, Field a, Field f);

    const FracParams& params() const { return p_; }
    const GridSpec& grid() const { return a_.grid(); }
    const Field& a() const { return a_; }
    const Field& f() const { return f_; }
    double a_sup() const { return a_sup_; }
    // Grid argmax of a, lowest flat index among ties.
    std::size_t a_argmax_index() const { return a_argmax_; }
    Point a_argmax() const { return grid().point(a_argmax_); }
    const Hypotheses& hypotheses() const { return hyp_; }

private:
    FracParams p_;
    Field a_, f_;
    double a_sup_ = 0.0;
    std::size_t a_argmax_ = 0;
    Hypotheses hyp_;
};

// h^N sum a |u|^q and h^N sum a u_+^q.
double weighted_power_integral(const Field& a, const Field& u, double q);
double weighted_positive_power_integral(const Field& a, const Field& u, double q);

// 1/2 ||u||^2 - (1/2*) int a |u|^{2*} - <f,u>
double energy_bar(const ProblemData& d, const Field& u);
// 1/2 ||u||^2 - (1/2*) int a u_+^{2*} - <f,u>
double energy_I(const ProblemData& d, const Field& u);
// energy_I(u + delta) - energy_I(u), evaluated term by term without cancellation.
double energy_I_difference(const ProblemData& d, const Field& u, const Field& delta);
// 1/2 ||u||^2 - (a_sup/2*) ||u||_{2*}^{2*} - <f,u>
double energy_tilde(const ProblemData& d, const Field& u);
// d/dt energy_tilde(t u) at t = 1.
double energy_tilde_slope(const ProblemData& d, const Field& u);

struct Gradient {
    Field raw_dual;        // A u - a u_+^{2*-1} - f  (or |u|^{2*-2}u for the bar energy)
    Field preconditioned;  // riesz_inverse(raw_dual)
    double dual_norm = 0.0;
};

Gradient gradient_I(const ProblemData& d, const Field& u);
Gradient gradient_bar(const ProblemData& d, const Field& u);

double g_value(const ProblemData& d, const Field& u);

enum class Region { U1, U_boundary, U2 };
const char* to_string(Region r);

struct RegionTag {
    Region region = Region::U1;
    double g = 0.0;
    double tol = 0.0;
};

// tol < 0 selects the default band 1e-8 * ||u||^2.
RegionTag classify(const ProblemData& d, const Field& u, double tol = -1.0);

// t(u) with g(t(u) u) = 0.
double nehari_scale(const ProblemData& d, const Field& u);

// (4s/(N+2s)) ((2*-1) a_sup)^{-(N-2s)/(4s)}
double C0_constant(const FracParams& p, double a_sup);
double C0_constant(const ProblemData& d);
// (s/N) t^{(N+2s)/(2s)} - t^2/2 + 1/2*
double phi(double t, const FracParams& p);
// Zero of phi in (1, inf).
double alpha_root(const FracParams& p);
// True when phi < 0 on (1, alpha) and phi > 0 on (alpha, alpha + span) at n samples each.
bool phi_sign_pattern(const FracParams& p, int n = 1000, double span = 5.0);
// ((2*-1) a_sup)^{-1/(2*-2)} S^{N/(4s)}
double r1_radius(const ProblemData& d, double S_num);

struct Smallness {
    bool ok = false;
    double lhs = 0.0;  // ||f||_dual
    double rhs = 0.0;  // C0 S^{N/(4s)}
    bool f_nonzero = false;
};
Smallness check_smallness(const ProblemData& d, double S_num);

// Multiplicity hypothesis on ||a||_inf: a == 1 or a_sup >= alpha.
bool multiplicity_hypothesis(const ProblemData& d);

} // namespace fracrit
