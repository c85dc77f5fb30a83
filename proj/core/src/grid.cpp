#include "fracrit/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace fracrit {

std::size_t GridSpec::size() const {
    std::size_t n = 1;
    for (int d = 0; d < N; ++d) n *= static_cast<std::size_t>(M);
    return n;
}

double GridSpec::cell_volume() const { return std::pow(h(), N); }
double GridSpec::box_volume() const { return std::pow(2.0 * L, N); }

void GridSpec::validate() const {
    if (N < 1 || N > 3) throw std::invalid_argument("grid dimension N must be 1, 2 or 3");
    if (M < 2 || M % 2 != 0) throw std::invalid_argument("points per axis M must be a positive even integer");
    if (!(L > 0.0) || !std::isfinite(L)) throw std::invalid_argument("half length L must be positive");
}

std::array<int, 3> GridSpec::unflatten(std::size_t idx) const {
    std::array<int, 3> ijk{0, 0, 0};
    for (int d = N - 1; d >= 0; --d) {
        ijk[d] = static_cast<int>(idx % static_cast<std::size_t>(M));
        idx /= static_cast<std::size_t>(M);
    }
    return ijk;
}

std::size_t GridSpec::flatten(const std::array<int, 3>& ijk) const {
    std::size_t idx = 0;
    for (int d = 0; d < N; ++d) {
        int i = ijk[d] % M;
        if (i < 0) i += M;
        idx = idx * static_cast<std::size_t>(M) + static_cast<std::size_t>(i);
    }
    return idx;
}

Point GridSpec::point(std::size_t idx) const {
    const auto ijk = unflatten(idx);
    Point p{0.0, 0.0, 0.0};
    for (int d = 0; d < N; ++d) p[d] = coord(ijk[d]);
    return p;
}

double wrap_delta(double d, double L) {
    const double period = 2.0 * L;
    d = std::fmod(d + L, period);
    if (d < 0) d += period;
    return d - L;
}

double periodic_distance(const Point& a, const Point& b, const GridSpec& g) {
    double r2 = 0.0;
    for (int d = 0; d < g.N; ++d) {
        const double dx = wrap_delta(a[d] - b[d], g.L);
        r2 += dx * dx;
    }
    return std::sqrt(r2);
}

void require_same_grid(const GridSpec& a, const GridSpec& b) {
    if (a != b) throw std::invalid_argument("grid mismatch between operands");
}

Field::Field(const GridSpec& g, double fill) : grid_(g) {
    g.validate();
    v_.assign(g.size(), fill);
}

Field::Field(const GridSpec& g, std::vector<double> values) : grid_(g), v_(std::move(values)) {
    g.validate();
    if (v_.size() != g.size())
        throw std::invalid_argument("field size " + std::to_string(v_.size()) + " does not match grid size " +
                                    std::to_string(g.size()));
}

Field Field::from_function(const GridSpec& g, const std::function<double(const Point&)>& fn) {
    Field f(g);
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = fn(g.point(i));
    return f;
}

double Field::min() const { return *std::min_element(v_.begin(), v_.end()); }
double Field::max() const { return *std::max_element(v_.begin(), v_.end()); }

double Field::max_abs() const {
    double m = 0.0;
    for (double x : v_) m = std::max(m, std::abs(x));
    return m;
}

bool Field::all_finite() const {
    return std::all_of(v_.begin(), v_.end(), [](double x) { return std::isfinite(x); });
}

bool Field::is_constant() const {
    return std::all_of(v_.begin(), v_.end(), [&](double x) { return x == v_.front(); });
}

std::size_t Field::argmax() const {
    return static_cast<std::size_t>(std::max_element(v_.begin(), v_.end()) - v_.begin());
}

Field& Field::operator+=(const Field& o) {
    require_same_grid(grid_, o.grid_);
    for (std::size_t i = 0; i < v_.size(); ++i) v_[i] += o.v_[i];
    return *this;
}

Field& Field::operator-=(const Field& o) {
    require_same_grid(grid_, o.grid_);
    for (std::size_t i = 0; i < v_.size(); ++i) v_[i] -= o.v_[i];
    return *this;
}

Field& Field::operator*=(double c) {
    for (double& x : v_) x *= c;
    return *this;
}

Field& Field::axpy(double c, const Field& x) {
    require_same_grid(grid_, x.grid_);
    for (std::size_t i = 0; i < v_.size(); ++i) v_[i] += c * x.v_[i];
    return *this;
}

Field Field::positive_part() const {
    Field r(*this);
    for (double& x : r.v_) x = std::max(x, 0.0);
    return r;
}

Field Field::negative_part() const {
    Field r(*this);
    for (double& x : r.v_) x = std::max(-x, 0.0);
    return r;
}

Field operator+(Field a, const Field& b) { return a += b; }
Field operator-(Field a, const Field& b) { return a -= b; }
Field operator*(double c, Field a) { return a *= c; }
Field operator*(Field a, double c) { return a *= c; }
Field operator-(Field a) { return a *= -1.0; }

double integrate_product(const Field& u, const Field& v) {
    require_same_grid(u.grid(), v.grid());
    double acc = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) acc += u[i] * v[i];
    return acc * u.grid().cell_volume();
}

double integrate(const Field& u) {
    double acc = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) acc += u[i];
    return acc * u.grid().cell_volume();
}

} // namespace fracrit
