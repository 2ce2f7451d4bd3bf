#pragma once
#include <algorithm>
#include <vector>
#include "heatlab/errors.hpp"

namespace heatlab {

// Truncated Taylor data of a scalar quantity at a point: value plus partial
// derivatives up to `order` (at most 3) in m variables. Arithmetic propagates
// derivatives by the product rule, truncating to the smaller operand order.
// This is what lets curvature scalars and endomorphisms carry exactly the jet
// depth the closed-form heat invariants consume.
template <class T>
struct Jet {
    int m = 0;
    int order = 0;
    T v{};
    std::vector<T> d1; // [a]
    std::vector<T> d2; // [a*m+b], symmetric
    std::vector<T> d3; // [(a*m+b)*m+c], symmetric

    Jet() = default;
    Jet(int m_, int order_) : m(m_), order(order_), v{} {
        if (order >= 1) d1.assign(m, T{});
        if (order >= 2) d2.assign(static_cast<size_t>(m) * m, T{});
        if (order >= 3) d3.assign(static_cast<size_t>(m) * m * m, T{});
    }

    static Jet constant(int m, int order, T value) {
        Jet j(m, order);
        j.v = value;
        return j;
    }

    T& g1(int a) { return d1[a]; }
    const T& g1(int a) const { return d1[a]; }
    T& g2(int a, int b) { return d2[static_cast<size_t>(a) * m + b]; }
    const T& g2(int a, int b) const { return d2[static_cast<size_t>(a) * m + b]; }
    T& g3(int a, int b, int c) { return d3[(static_cast<size_t>(a) * m + b) * m + c]; }
    const T& g3(int a, int b, int c) const { return d3[(static_cast<size_t>(a) * m + b) * m + c]; }

    Jet truncated(int ord) const {
        Jet j(m, ord);
        j.v = v;
        for (int a = 0; a < m && ord >= 1; ++a) j.g1(a) = g1(a);
        for (int a = 0; a < m && ord >= 2; ++a)
            for (int b = 0; b < m; ++b) j.g2(a, b) = g2(a, b);
        for (int a = 0; a < m && ord >= 3; ++a)
            for (int b = 0; b < m; ++b)
                for (int c = 0; c < m; ++c) j.g3(a, b, c) = g3(a, b, c);
        return j;
    }

    // Jet of the partial derivative with respect to x_k; drops one order.
    Jet derivative(int k) const {
        if (order < 1) throw MissingJetError("jet order exhausted while differentiating");
        Jet j(m, order - 1);
        j.v = g1(k);
        for (int a = 0; a < m && j.order >= 1; ++a) j.g1(a) = g2(a, k);
        for (int a = 0; a < m && j.order >= 2; ++a)
            for (int b = 0; b < m; ++b) j.g2(a, b) = g3(a, b, k);
        return j;
    }

    Jet operator+(const Jet& o) const {
        Jet j = truncated(std::min(order, o.order));
        j.v += o.v;
        for (int a = 0; a < m && j.order >= 1; ++a) j.g1(a) += o.g1(a);
        for (int a = 0; a < m && j.order >= 2; ++a)
            for (int b = 0; b < m; ++b) j.g2(a, b) += o.g2(a, b);
        for (int a = 0; a < m && j.order >= 3; ++a)
            for (int b = 0; b < m; ++b)
                for (int c = 0; c < m; ++c) j.g3(a, b, c) += o.g3(a, b, c);
        return j;
    }

    Jet operator-() const {
        Jet j = *this;
        j.v = -j.v;
        for (auto& x : j.d1) x = -x;
        for (auto& x : j.d2) x = -x;
        for (auto& x : j.d3) x = -x;
        return j;
    }

    Jet operator-(const Jet& o) const { return *this + (-o); }

    Jet operator*(const Jet& f) const {
        const Jet& e = *this;
        Jet j(m, std::min(e.order, f.order));
        j.v = e.v * f.v;
        if (j.order >= 1)
            for (int a = 0; a < m; ++a) j.g1(a) = e.g1(a) * f.v + e.v * f.g1(a);
        if (j.order >= 2)
            for (int a = 0; a < m; ++a)
                for (int b = 0; b < m; ++b)
                    j.g2(a, b) = e.g2(a, b) * f.v + e.g1(a) * f.g1(b) + e.g1(b) * f.g1(a) +
                                 e.v * f.g2(a, b);
        if (j.order >= 3)
            for (int a = 0; a < m; ++a)
                for (int b = 0; b < m; ++b)
                    for (int c = 0; c < m; ++c)
                        j.g3(a, b, c) = e.g3(a, b, c) * f.v + e.g2(a, b) * f.g1(c) +
                                        e.g2(a, c) * f.g1(b) + e.g2(b, c) * f.g1(a) +
                                        e.g1(a) * f.g2(b, c) + e.g1(b) * f.g2(a, c) +
                                        e.g1(c) * f.g2(a, b) + e.v * f.g3(a, b, c);
        return j;
    }

    Jet scaled(T s) const {
        Jet j = *this;
        j.v *= s;
        for (auto& x : j.d1) x *= s;
        for (auto& x : j.d2) x *= s;
        for (auto& x : j.d3) x *= s;
        return j;
    }

    // 1/f, solved order by order from r*f = 1.
    Jet reciprocal() const {
        const Jet& f = *this;
        Jet r(m, order);
        r.v = T{1} / f.v;
        if (order >= 1)
            for (int a = 0; a < m; ++a) r.g1(a) = -(r.v * f.g1(a)) * r.v;
        if (order >= 2)
            for (int a = 0; a < m; ++a)
                for (int b = 0; b < m; ++b)
                    r.g2(a, b) =
                        -(r.g1(a) * f.g1(b) + r.g1(b) * f.g1(a) + r.v * f.g2(a, b)) * r.v;
        if (order >= 3)
            for (int a = 0; a < m; ++a)
                for (int b = 0; b < m; ++b)
                    for (int c = 0; c < m; ++c)
                        r.g3(a, b, c) = -(r.g2(a, b) * f.g1(c) + r.g2(a, c) * f.g1(b) +
                                          r.g2(b, c) * f.g1(a) + r.g1(a) * f.g2(b, c) +
                                          r.g1(b) * f.g2(a, c) + r.g1(c) * f.g2(a, b) +
                                          r.v * f.g3(a, b, c)) *
                                        r.v;
        return r;
    }
};

using JetR = Jet<double>;

} // namespace heatlab
