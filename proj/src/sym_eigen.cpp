#include "heatlab/sym_eigen.hpp"
#include "heatlab/errors.hpp"
#include "heatlab/parallel.hpp"

#include <algorithm>
#include <cmath>

namespace heatlab {
namespace {

// One Householder step: annihilate row i of the lower triangle beyond the
// subdiagonal. Returns the produced off-diagonal entry e[i]. The leading
// (i x i) block of `a` is updated in place: A <- H A H with H = I - v v^T / h.
// The reflector v lives in row i, columns 0..i-1, after the call.
//
// Serial and parallel variants share this exact arithmetic; the parallel one
// splits the symmetric matvec and the rank-2 update across threads.
template <bool Parallel>
double householder_step(DenseR& a, int i, std::vector<double>& p, std::vector<double>& scratch,
                        std::vector<int>& nz) {
    const int l = i - 1;
    double* ui = &a.a[static_cast<size_t>(i) * a.cols];

    double scale = 0;
    nz.clear();
    for (int k = 0; k <= l; ++k) {
        scale += std::abs(ui[k]);
        if (ui[k] != 0.0) nz.push_back(k);
    }
    if (scale == 0.0) return 0.0;

    double h = 0;
    for (int k : nz) {
        ui[k] /= scale;
        h += ui[k] * ui[k];
    }
    double f = ui[l];
    double g = (f >= 0) ? -std::sqrt(h) : std::sqrt(h);
    const double e_i = scale * g;
    h -= f * g;
    ui[l] = f - g;
    if (std::find(nz.begin(), nz.end(), l) == nz.end()) nz.push_back(l);

    // p = A v / h on the leading block, lower-triangle storage.
    std::fill(p.begin(), p.begin() + i, 0.0);
    if (nz.size() * 8 < static_cast<size_t>(i)) {
        // Few reflector entries: sweep only the touched columns/rows.
        for (int k : nz) {
            const double vk = ui[k];
            const double* rowk = &a.a[static_cast<size_t>(k) * a.cols];
            for (int j = 0; j <= k; ++j) p[j] += rowk[j] * vk;
            for (int j = k + 1; j <= l; ++j) p[j] += a.a[static_cast<size_t>(j) * a.cols + k] * vk;
        }
        for (int k = 0; k <= l; ++k) p[k] /= h;
    } else {
        bool done = false;
#ifdef _OPENMP
        if constexpr (Parallel) {
            const int nthreads = thread_count();
            if (nthreads > 1 && i > 128) {
                scratch.assign(static_cast<size_t>(nthreads) * i, 0.0);
#pragma omp parallel num_threads(nthreads)
                {
                    const int tid = omp_get_thread_num();
                    double* acc = &scratch[static_cast<size_t>(tid) * i];
#pragma omp for schedule(static, 32)
                    for (int j = 0; j <= l; ++j) {
                        const double* row = &a.a[static_cast<size_t>(j) * a.cols];
                        const double vj = ui[j];
                        double s = row[j] * vj;
                        for (int k = 0; k < j; ++k) {
                            s += row[k] * ui[k];
                            acc[k] += row[k] * vj;
                        }
                        acc[j] += s;
                    }
                }
                for (int k = 0; k <= l; ++k) {
                    double s = 0;
                    for (int t = 0; t < nthreads; ++t)
                        s += scratch[static_cast<size_t>(t) * i + k];
                    p[k] = s / h;
                }
                done = true;
            }
        }
#endif
        if (!done) {
            for (int j = 0; j <= l; ++j) {
                const double* row = &a.a[static_cast<size_t>(j) * a.cols];
                const double vj = ui[j];
                double s = row[j] * vj;
                for (int k = 0; k < j; ++k) {
                    s += row[k] * ui[k];
                    p[k] += row[k] * vj;
                }
                p[j] += s;
            }
            for (int k = 0; k <= l; ++k) p[k] /= h;
        }
    }

    double vp = 0;
    for (int k : nz) vp += ui[k] * p[k];
    const double kk = vp / (2 * h);
    for (int k : nz) p[k] -= kk * ui[k]; // p is now w

    // A <- A - v w^T - w v^T on the lower triangle. Rows where both v_j and
    // w_j vanish are untouched, which keeps banded inputs cheap.
    bool updated = false;
#ifdef _OPENMP
    if constexpr (Parallel) {
        const int nthreads = thread_count();
        if (nthreads > 1 && i > 128) {
#pragma omp parallel for schedule(static, 32) num_threads(nthreads)
            for (int j = 0; j <= l; ++j) {
                const double vj = ui[j], wj = p[j];
                if (vj == 0.0 && wj == 0.0) continue;
                double* row = &a.a[static_cast<size_t>(j) * a.cols];
                if (vj == 0.0) {
                    for (int k : nz)
                        if (k <= j) row[k] -= wj * ui[k];
                } else {
                    for (int k = 0; k <= j; ++k) row[k] -= vj * p[k] + wj * ui[k];
                }
            }
            updated = true;
        }
    }
#endif
    if (!updated) {
        for (int j = 0; j <= l; ++j) {
            const double vj = ui[j], wj = p[j];
            if (vj == 0.0 && wj == 0.0) continue;
            double* row = &a.a[static_cast<size_t>(j) * a.cols];
            if (vj == 0.0) {
                for (int k : nz)
                    if (k <= j) row[k] -= wj * ui[k];
            } else {
                for (int k = 0; k <= j; ++k) row[k] -= vj * p[k] + wj * ui[k];
            }
        }
    }
    return e_i;
}

template <bool Parallel>
void tridiagonalize(DenseR& a, std::vector<double>& d, std::vector<double>& e) {
    const int n = a.rows;
    d.assign(n, 0.0);
    e.assign(n, 0.0);
    std::vector<double> p(n), scratch;
    std::vector<int> nz;
    nz.reserve(n);
    for (int i = n - 1; i >= 1; --i) {
        if (i == 1) {
            e[1] = a(1, 0);
            continue;
        }
        e[i] = householder_step<Parallel>(a, i, p, scratch, nz);
    }
    for (int i = 0; i < n; ++i) d[i] = a(i, i);
}

} // namespace

std::vector<double> tridiag_eigenvalues(std::vector<double> d, std::vector<double> e) {
    const int n = static_cast<int>(d.size());
    if (n == 0) return {};
    // Implicit-shift QL with deflation.
    for (int i = 1; i < n; ++i) e[i - 1] = e[i];
    e[n - 1] = 0.0;
    for (int l = 0; l < n; ++l) {
        int iter = 0;
        int m;
        do {
            for (m = l; m < n - 1; ++m) {
                double dd = std::abs(d[m]) + std::abs(d[m + 1]);
                if (std::abs(e[m]) <= 1e-300 || std::abs(e[m]) <= 2.3e-16 * dd) break;
            }
            if (m != l) {
                if (iter++ == 60)
                    throw NumericalContractError("tridiagonal QL failed to converge");
                double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
                double r = std::hypot(g, 1.0);
                g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
                double s = 1.0, c = 1.0, pp = 0.0;
                int i;
                for (i = m - 1; i >= l; --i) {
                    double f = s * e[i];
                    double b = c * e[i];
                    r = std::hypot(f, g);
                    e[i + 1] = r;
                    if (r == 0.0) {
                        d[i + 1] -= pp;
                        e[m] = 0.0;
                        break;
                    }
                    s = f / r;
                    c = g / r;
                    g = d[i + 1] - pp;
                    r = (d[i] - g) * s + 2.0 * c * b;
                    pp = s * r;
                    d[i + 1] = g + pp;
                    g = c * r - b;
                }
                if (r == 0.0 && i >= l) continue;
                d[l] -= pp;
                e[l] = g;
                e[m] = 0.0;
            }
        } while (m != l);
    }
    std::sort(d.begin(), d.end());
    return d;
}

namespace {

// Exactly diagonal inputs (untwisted Galerkin blocks) skip the O(n^3) path.
bool is_diagonal(const DenseR& a) {
    for (int i = 0; i < a.rows; ++i) {
        const double* row = &a.a[static_cast<size_t>(i) * a.cols];
        for (int k = 0; k < i; ++k)
            if (row[k] != 0.0) return false;
    }
    return true;
}

template <bool Parallel>
std::vector<double> sym_eigenvalues_impl(DenseR a) {
    if (a.rows != a.cols) throw ConfigError("sym_eigenvalues: matrix not square");
    const int n = a.rows;
    if (n == 0) return {};
    if (is_diagonal(a)) {
        std::vector<double> d(n);
        for (int i = 0; i < n; ++i) d[i] = a(i, i);
        std::sort(d.begin(), d.end());
        return d;
    }
    std::vector<double> d, e;
    tridiagonalize<Parallel>(a, d, e);
    return tridiag_eigenvalues(std::move(d), std::move(e));
}

} // namespace

std::vector<double> sym_eigenvalues(DenseR a) {
#ifdef _OPENMP
    return sym_eigenvalues_impl<true>(std::move(a));
#else
    return sym_eigenvalues_impl<false>(std::move(a));
#endif
}

std::vector<double> sym_eigenvalues_serial(DenseR a) {
    return sym_eigenvalues_impl<false>(std::move(a));
}

std::vector<double> herm_eigenvalues(const DenseC& h) {
    if (h.rows != h.cols) throw ConfigError("herm_eigenvalues: matrix not square");
    const int n = h.rows;
    if (n == 0) return {};
    DenseR m(2 * n, 2 * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const cplx v = h(i, j);
            m(i, j) = v.real();
            m(n + i, n + j) = v.real();
            m(n + i, j) = v.imag();
            m(i, n + j) = -v.imag();
        }
    std::vector<double> doubled = sym_eigenvalues(std::move(m));
    std::vector<double> out(n);
    for (int i = 0; i < n; ++i) out[i] = 0.5 * (doubled[2 * i] + doubled[2 * i + 1]);
    return out;
}

} // namespace heatlab
