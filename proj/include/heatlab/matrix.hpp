#pragma once
#include <complex>
#include <vector>
#include <utility>
#include <cmath>
#include <cassert>

namespace heatlab {

using cplx = std::complex<double>;

// Dense row-major matrix. Kept deliberately small: the project needs storage,
// element access, and a handful of products, not a linear-algebra framework.
template <class T>
struct Dense {
    int rows = 0, cols = 0;
    std::vector<T> a;

    Dense() = default;
    Dense(int r, int c) : rows(r), cols(c), a(static_cast<size_t>(r) * c, T{}) {}

    T& operator()(int i, int j) { return a[static_cast<size_t>(i) * cols + j]; }
    const T& operator()(int i, int j) const { return a[static_cast<size_t>(i) * cols + j]; }

    static Dense identity(int n) {
        Dense m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = T{1};
        return m;
    }
};

using DenseR = Dense<double>;
using DenseC = Dense<cplx>;

template <class T>
Dense<T> operator*(const Dense<T>& x, const Dense<T>& y) {
    assert(x.cols == y.rows);
    Dense<T> z(x.rows, y.cols);
    for (int i = 0; i < x.rows; ++i)
        for (int k = 0; k < x.cols; ++k) {
            T v = x(i, k);
            if (v == T{}) continue;
            for (int j = 0; j < y.cols; ++j) z(i, j) += v * y(k, j);
        }
    return z;
}

template <class T>
Dense<T> operator+(const Dense<T>& x, const Dense<T>& y) {
    assert(x.rows == y.rows && x.cols == y.cols);
    Dense<T> z = x;
    for (size_t i = 0; i < z.a.size(); ++i) z.a[i] += y.a[i];
    return z;
}

template <class T>
Dense<T> operator-(const Dense<T>& x, const Dense<T>& y) {
    assert(x.rows == y.rows && x.cols == y.cols);
    Dense<T> z = x;
    for (size_t i = 0; i < z.a.size(); ++i) z.a[i] -= y.a[i];
    return z;
}

template <class T>
Dense<T> operator*(T s, const Dense<T>& x) {
    Dense<T> z = x;
    for (auto& v : z.a) v *= s;
    return z;
}

inline DenseC adjoint(const DenseC& x) {
    DenseC z(x.cols, x.rows);
    for (int i = 0; i < x.rows; ++i)
        for (int j = 0; j < x.cols; ++j) z(j, i) = std::conj(x(i, j));
    return z;
}

template <class T>
double max_abs(const Dense<T>& x) {
    double m = 0;
    for (const auto& v : x.a) m = std::max(m, std::abs(v));
    return m;
}

// Sparse matrix, one (col, value) list per row. Used for the Galerkin operators
// in mode space, which are banded convolutions.
template <class T>
struct SparseRows {
    int rows = 0, cols = 0;
    std::vector<std::vector<std::pair<int, T>>> row;

    SparseRows() = default;
    SparseRows(int r, int c) : rows(r), cols(c), row(r) {}

    void add(int i, int j, T v) {
        if (v == T{}) return;
        for (auto& e : row[i])
            if (e.first == j) { e.second += v; return; }
        row[i].emplace_back(j, v);
    }

    size_t nnz() const {
        size_t n = 0;
        for (const auto& r : row) n += r.size();
        return n;
    }

    Dense<T> dense() const {
        Dense<T> d(rows, cols);
        for (int i = 0; i < rows; ++i)
            for (const auto& [j, v] : row[i]) d(i, j) += v;
        return d;
    }
};

using SparseC = SparseRows<cplx>;

inline SparseC sp_adjoint(const SparseC& x) {
    SparseC z(x.cols, x.rows);
    for (int i = 0; i < x.rows; ++i)
        for (const auto& [j, v] : x.row[i]) z.row[j].emplace_back(i, std::conj(v));
    return z;
}

inline SparseC sp_mul(const SparseC& x, const SparseC& y) {
    assert(x.cols == y.rows);
    SparseC z(x.rows, y.cols);
    std::vector<cplx> acc(y.cols, cplx{});
    std::vector<int> touched;
    for (int i = 0; i < x.rows; ++i) {
        touched.clear();
        for (const auto& [k, xv] : x.row[i])
            for (const auto& [j, yv] : y.row[k]) {
                if (acc[j] == cplx{}) touched.push_back(j);
                acc[j] += xv * yv;
            }
        for (int j : touched) {
            if (acc[j] != cplx{}) z.row[i].emplace_back(j, acc[j]);
            acc[j] = cplx{};
        }
    }
    return z;
}

inline SparseC sp_add(const SparseC& x, const SparseC& y) {
    assert(x.rows == y.rows && x.cols == y.cols);
    SparseC z = x;
    for (int i = 0; i < y.rows; ++i)
        for (const auto& [j, v] : y.row[i]) z.add(i, j, v);
    return z;
}

inline SparseC sp_scale(cplx s, const SparseC& x) {
    SparseC z = x;
    for (auto& r : z.row)
        for (auto& e : r) e.second *= s;
    return z;
}

// [x; y] stacked vertically.
inline SparseC sp_vstack(const SparseC& x, const SparseC& y) {
    assert(x.cols == y.cols);
    SparseC z(x.rows + y.rows, x.cols);
    for (int i = 0; i < x.rows; ++i) z.row[i] = x.row[i];
    for (int i = 0; i < y.rows; ++i) z.row[x.rows + i] = y.row[i];
    return z;
}

// [x | y] side by side.
inline SparseC sp_hstack(const SparseC& x, const SparseC& y) {
    assert(x.rows == y.rows);
    SparseC z(x.rows, x.cols + y.cols);
    for (int i = 0; i < x.rows; ++i) {
        z.row[i] = x.row[i];
        for (const auto& [j, v] : y.row[i]) z.row[i].emplace_back(x.cols + j, v);
    }
    return z;
}

inline double sp_max_abs(const SparseC& x) {
    double m = 0;
    for (const auto& r : x.row)
        for (const auto& [j, v] : r) m = std::max(m, std::abs(v));
    return m;
}

} // namespace heatlab
