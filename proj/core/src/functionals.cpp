#include "fracrit/functionals.hpp"

#include <cmath>
#include <stdexcept>

#include "fracrit/error.hpp"

namespace fracrit {

namespace {

double pow_abs(double x, double q) {
    const double a = std::abs(x);
    if (q == 2.0) return a * a;
    if (q == 3.0) return a * a * a;
    if (q == 4.0) return (a * a) * (a * a);
    return std::pow(a, q);
}

// (x+dx)_+^q - x_+^q without catastrophic cancellation.
double positive_power_difference(double x, double dx, double q) {
    const double y = x + dx;
    if (x > 0.0 && y > 0.0) {
        if (q == 4.0) return dx * (4.0 * x * x * x + dx * (6.0 * x * x + dx * (4.0 * x + dx)));
        return std::pow(x, q) * std::expm1(q * std::log1p(dx / x));
    }
    return (y > 0.0 ? pow_abs(y, q) : 0.0) - (x > 0.0 ? pow_abs(x, q) : 0.0);
}

} // namespace

ProblemData::ProblemData(const FracParams& p, Field a, Field f) : p_(p), a_(std::move(a)), f_(std::move(f)) {
    p_.validate();
    require_same_grid(a_.grid(), f_.grid());
    if (a_.grid().N != p_.N) throw std::invalid_argument("dimension mismatch between grid and fractional parameters");
    if (!a_.all_finite() || !f_.all_finite()) throw std::invalid_argument("coefficient and forcing must be finite");
    a_argmax_ = a_.argmax();
    a_sup_ = a_[a_argmax_];
    const GridSpec& g = a_.grid();
    hyp_.a_positive = a_.min() > 0.0;
    if (!hyp_.a_positive) throw std::invalid_argument("coefficient a must be positive everywhere");
    hyp_.a_at_least_one = a_.min() >= 1.0;
    hyp_.a_identically_one = a_.min() == 1.0 && a_sup_ == 1.0;
    bool boundary_one = true;
    for (std::size_t i = 0; i < a_.size(); ++i) {
        const auto ijk = g.unflatten(i);
        bool on_boundary = false;
        for (int d = 0; d < g.N; ++d)
            if (ijk[d] == 0) on_boundary = true;
        if (on_boundary && std::abs(a_[i] - 1.0) > 1e-8) boundary_one = false;
    }
    hyp_.a_tends_to_one = boundary_one;
    hyp_.f_nonnegative = f_.min() >= 0.0;
    hyp_.f_nonzero = f_.max_abs() > 0.0;
}

double weighted_power_integral(const Field& a, const Field& u, double q) {
    require_same_grid(a.grid(), u.grid());
    double acc = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) acc += a[i] * pow_abs(u[i], q);
    return acc * u.grid().cell_volume();
}

double weighted_positive_power_integral(const Field& a, const Field& u, double q) {
    require_same_grid(a.grid(), u.grid());
    double acc = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i)
        if (u[i] > 0.0) acc += a[i] * pow_abs(u[i], q);
    return acc * u.grid().cell_volume();
}

double energy_bar(const ProblemData& d, const Field& u) {
    const double ts = d.params().two_star();
    return 0.5 * hs_norm2(u, d.params()) - weighted_power_integral(d.a(), u, ts) / ts - dual_pairing(d.f(), u);
}

double energy_I(const ProblemData& d, const Field& u) {
    const double ts = d.params().two_star();
    return 0.5 * hs_norm2(u, d.params()) - weighted_positive_power_integral(d.a(), u, ts) / ts -
           dual_pairing(d.f(), u);
}

double energy_I_difference(const ProblemData& d, const Field& u, const Field& delta) {
    const FracParams& p = d.params();
    const double ts = p.two_star();
    double pot = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) pot += d.a()[i] * positive_power_difference(u[i], delta[i], ts);
    pot *= u.grid().cell_volume();
    return hs_inner(u, delta, p) + 0.5 * hs_norm2(delta, p) - pot / ts - dual_pairing(d.f(), delta);
}

double energy_tilde(const ProblemData& d, const Field& u) {
    const double ts = d.params().two_star();
    return 0.5 * hs_norm2(u, d.params()) - d.a_sup() * std::pow(lp_norm(u, ts), ts) / ts - dual_pairing(d.f(), u);
}

double energy_tilde_slope(const ProblemData& d, const Field& u) {
    const double ts = d.params().two_star();
    return hs_norm2(u, d.params()) - d.a_sup() * std::pow(lp_norm(u, ts), ts) - dual_pairing(d.f(), u);
}

namespace {

Gradient assemble(const ProblemData& d, const Field& u, bool positive_part) {
    const FracParams& p = d.params();
    const double q = p.two_star() - 1.0;
    Field raw = frac_laplacian(u, p);
    for (std::size_t i = 0; i < u.size(); ++i) {
        double nl;
        if (positive_part)
            nl = u[i] > 0.0 ? pow_abs(u[i], q) : 0.0;
        else
            nl = std::copysign(pow_abs(u[i], q), u[i]);
        raw[i] -= d.a()[i] * nl + d.f()[i];
    }
    Gradient g{raw, riesz_inverse(raw, p), 0.0};
    g.dual_norm = std::sqrt(std::max(0.0, integrate_product(raw, g.preconditioned)));
    return g;
}

} // namespace

Gradient gradient_I(const ProblemData& d, const Field& u) { return assemble(d, u, true); }
Gradient gradient_bar(const ProblemData& d, const Field& u) { return assemble(d, u, false); }

double g_value(const ProblemData& d, const Field& u) {
    const double ts = d.params().two_star();
    return hs_norm2(u, d.params()) - (ts - 1.0) * d.a_sup() * std::pow(lp_norm(u, ts), ts);
}

const char* to_string(Region r) {
    switch (r) {
    case Region::U1: return "U1";
    case Region::U_boundary: return "U_boundary";
    case Region::U2: return "U2";
    }
    return "?";
}

RegionTag classify(const ProblemData& d, const Field& u, double tol) {
    RegionTag tag;
    const double n2 = hs_norm2(u, d.params());
    tag.tol = tol >= 0.0 ? tol : 1e-8 * n2;
    tag.g = g_value(d, u);
    if (u.max_abs() == 0.0 || tag.g > tag.tol)
        tag.region = Region::U1;
    else if (tag.g < -tag.tol)
        tag.region = Region::U2;
    else
        tag.region = Region::U_boundary;
    return tag;
}

double nehari_scale(const ProblemData& d, const Field& u) {
    if (u.max_abs() == 0.0) throw Error("degenerate-field", "Nehari scale of the zero field");
    require_nondegenerate(u);
    const double ts = d.params().two_star();
    const double num = hs_norm2(u, d.params());
    const double den = (ts - 1.0) * d.a_sup() * std::pow(lp_norm(u, ts), ts);
    return std::pow(num / den, 1.0 / (ts - 2.0));
}

double C0_constant(const FracParams& p, double a_sup) {
    const double ts = p.two_star();
    return (4.0 * p.s / (p.N + 2.0 * p.s)) * std::pow((ts - 1.0) * a_sup, -(p.N - 2.0 * p.s) / (4.0 * p.s));
}

double C0_constant(const ProblemData& d) { return C0_constant(d.params(), d.a_sup()); }

double phi(double t, const FracParams& p) {
    return (p.s / p.N) * std::pow(t, (p.N + 2.0 * p.s) / (2.0 * p.s)) - 0.5 * t * t + 1.0 / p.two_star();
}

double alpha_root(const FracParams& p) {
    double lo = 1.0 + 1e-6;
    double hi = 2.0;
    if (!(phi(lo, p) < 0.0)) throw std::runtime_error("phi is not negative just above 1");
    while (phi(hi, p) <= 0.0) {
        hi *= 2.0;
        if (hi > 1e12) throw std::runtime_error("phi bisection failed to bracket its second zero");
    }
    for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (phi(mid, p) > 0.0 ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
}

bool phi_sign_pattern(const FracParams& p, int n, double span) {
    const double alpha = alpha_root(p);
    for (int i = 1; i < n; ++i) {
        const double t_in = 1.0 + (alpha - 1.0) * i / n;
        const double t_out = alpha + span * i / n;
        if (!(phi(t_in, p) < 0.0) || !(phi(t_out, p) > 0.0)) return false;
    }
    return true;
}

double r1_radius(const ProblemData& d, double S_num) {
    const FracParams& p = d.params();
    const double ts = p.two_star();
    return std::pow((ts - 1.0) * d.a_sup(), -1.0 / (ts - 2.0)) * std::pow(S_num, p.N / (4.0 * p.s));
}

Smallness check_smallness(const ProblemData& d, double S_num) {
    Smallness sm;
    const FracParams& p = d.params();
    sm.lhs = dual_norm(d.f(), p);
    sm.rhs = C0_constant(d) * std::pow(S_num, p.N / (4.0 * p.s));
    sm.ok = sm.lhs < sm.rhs;
    sm.f_nonzero = d.f().max_abs() > 0.0;
    return sm;
}

bool multiplicity_hypothesis(const ProblemData& d) {
    return d.hypotheses().a_identically_one || d.a_sup() >= alpha_root(d.params());
}

} // namespace fracrit
