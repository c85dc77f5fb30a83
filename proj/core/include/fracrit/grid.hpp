#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <vector>

namespace fracrit {

using Point = std::array<double, 3>;  // unused trailing coordinates are 0

// Periodic box [-L, L)^N sampled with M points per axis.
struct GridSpec {
    int N = 1;
    double L = 50.0;
    int M = 4096;

    double h() const { return 2.0 * L / M; }
    std::size_t size() const;
    double cell_volume() const;   // h^N
    double box_volume() const;    // (2L)^N
    void validate() const;        // throws std::invalid_argument

    // Coordinate of grid index i along one axis: -L + i h.
    double coord(int i) const { return -L + i * h(); }
    std::array<int, 3> unflatten(std::size_t idx) const;
    std::size_t flatten(const std::array<int, 3>& ijk) const;
    Point point(std::size_t idx) const;

    bool operator==(const GridSpec& o) const { return N == o.N && L == o.L && M == o.M; }
    bool operator!=(const GridSpec& o) const { return !(*this == o); }
};

// Signed minimum-image displacement on the torus of period 2L.
double wrap_delta(double d, double L);
double periodic_distance(const Point& a, const Point& b, const GridSpec& g);

void require_same_grid(const GridSpec& a, const GridSpec& b);

class Field {
public:
    Field() = default;
    explicit Field(const GridSpec& g, double fill = 0.0);
    Field(const GridSpec& g, std::vector<double> values);

    static Field from_function(const GridSpec& g, const std::function<double(const Point&)>& fn);

    const GridSpec& grid() const { return grid_; }
    std::size_t size() const { return v_.size(); }
    double& operator[](std::size_t i) { return v_[i]; }
    double operator[](std::size_t i) const { return v_[i]; }
    std::vector<double>& values() { return v_; }
    const std::vector<double>& values() const { return v_; }
    double* data() { return v_.data(); }
    const double* data() const { return v_.data(); }

    double min() const;
    double max() const;
    double max_abs() const;
    bool all_finite() const;
    bool is_constant() const;
    std::size_t argmax() const;  // lowest index among ties

    Field& operator+=(const Field& o);
    Field& operator-=(const Field& o);
    Field& operator*=(double c);
    Field& axpy(double c, const Field& x);  // this += c x

    Field positive_part() const;
    Field negative_part() const;  // max(-u, 0)

private:
    GridSpec grid_;
    std::vector<double> v_;
};

Field operator+(Field a, const Field& b);
Field operator-(Field a, const Field& b);
Field operator*(double c, Field a);
Field operator*(Field a, double c);
Field operator-(Field a);

// Quadrature h^N sum of u v.
double integrate_product(const Field& u, const Field& v);
double integrate(const Field& u);

} // namespace fracrit
