#pragma once
#include <array>
#include <map>
#include <string>
#include "heatlab/matrix.hpp"

namespace heatlab {

// Finite trigonometric polynomial in one or two periodic coordinates,
//   f(x) = sum_q c_q exp(i sum_j q_j w_j x_j),
// with integer harmonics q and a fixed frequency scale w_j per axis
// (w = 2*pi / circumference). All coefficient arithmetic is exact, so
// derivatives, products, and closedness checks carry no quadrature error.
struct TrigPoly {
    int dim = 1;
    std::array<double, 2> omega{1.0, 1.0};
    std::map<std::array<int, 2>, cplx> coef;

    static TrigPoly zero(int dim, std::array<double, 2> omega = {1.0, 1.0});
    static TrigPoly constant(int dim, cplx c, std::array<double, 2> omega = {1.0, 1.0});
    // c * cos(k x_axis) and c * sin(k x_axis) as harmonic pairs.
    static TrigPoly cosine(int dim, int axis, int k, cplx c, std::array<double, 2> omega = {1.0, 1.0});
    static TrigPoly sine(int dim, int axis, int k, cplx c, std::array<double, 2> omega = {1.0, 1.0});

    void add_harmonic(std::array<int, 2> q, cplx c);

    TrigPoly& operator+=(const TrigPoly& o);
    TrigPoly operator+(const TrigPoly& o) const;
    TrigPoly operator-(const TrigPoly& o) const;
    TrigPoly operator*(const TrigPoly& o) const; // harmonic convolution
    TrigPoly scaled(cplx s) const;

    // d/dx_axis in the chart coordinate (factor i q_axis w_axis).
    TrigPoly derivative(int axis) const;
    TrigPoly conjugated() const;

    cplx eval(double x, double y = 0.0) const;
    cplx constant_part() const;

    bool is_zero(double tol = 0.0) const;
    // Real-valued iff c_{-q} = conj(c_q) for every harmonic.
    bool is_real(double tol = 1e-14) const;
    int bandwidth(int axis) const;
    int bandwidth() const; // max over axes

    // Reinterpret a 1-variable polynomial as living on `axis` of a 2-variable chart.
    TrigPoly lifted(int axis, std::array<double, 2> omega2) const;

    void prune(double tol = 0.0);
};

// Parses the small twist/metric-entry grammar: a sum of terms
//   c | c*i | c*sin(k*v) | c*cos(k*v) | sin(v) | i*sin(v) | ...
// with v in {x, y} and integer harmonic k (default 1). The harmonic index k
// means k full oscillations per period of that axis.
TrigPoly parse_trig(const std::string& text, int dim, std::array<double, 2> omega = {1.0, 1.0});

} // namespace heatlab
