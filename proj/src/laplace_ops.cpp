#include "heatlab/laplace_ops.hpp"

#include <cmath>

namespace heatlab::laplace {

EndoJet::EndoJet(int m_, int n_, int order_) : m(m_), n(n_), order(order_), v(n_, n_) {
    if (order >= 1) d1.assign(m, DenseC(n, n));
    if (order >= 2) d2.assign(static_cast<size_t>(m) * m, DenseC(n, n));
}

EndoJet EndoJet::scalar(int m, int n, const Jet<cplx>& s) {
    EndoJet e(m, n, s.order);
    for (int i = 0; i < n; ++i) e.v(i, i) = s.v;
    for (int a = 0; a < m && s.order >= 1; ++a)
        for (int i = 0; i < n; ++i) e.d1[a](i, i) = s.g1(a);
    for (int a = 0; a < m && s.order >= 2; ++a)
        for (int b = 0; b < m; ++b)
            for (int i = 0; i < n; ++i) e.D2(a, b)(i, i) = s.g2(a, b);
    return e;
}

EndoJet EndoJet::truncated(int ord) const {
    EndoJet e(m, n, ord);
    e.v = v;
    for (int a = 0; a < m && ord >= 1; ++a) e.d1[a] = d1[a];
    for (int a = 0; a < m && ord >= 2; ++a)
        for (int b = 0; b < m; ++b) e.D2(a, b) = D2(a, b);
    return e;
}

EndoJet EndoJet::derivative(int k) const {
    if (order < 1) throw MissingJetError("endomorphism jet exhausted while differentiating");
    EndoJet e(m, n, order - 1);
    e.v = d1[k];
    for (int a = 0; a < m && e.order >= 1; ++a) e.d1[a] = D2(a, k);
    return e;
}

EndoJet EndoJet::operator+(const EndoJet& o) const {
    EndoJet e = truncated(std::min(order, o.order));
    e.v = e.v + o.v;
    for (int a = 0; a < m && e.order >= 1; ++a) e.d1[a] = e.d1[a] + o.d1[a];
    for (int a = 0; a < m && e.order >= 2; ++a)
        for (int b = 0; b < m; ++b) e.D2(a, b) = e.D2(a, b) + o.D2(a, b);
    return e;
}

EndoJet EndoJet::operator-(const EndoJet& o) const { return *this + o.scaled(-1.0); }

EndoJet EndoJet::mul(const EndoJet& o) const {
    EndoJet e(m, n, std::min(order, o.order));
    e.v = v * o.v;
    if (e.order >= 1)
        for (int a = 0; a < m; ++a) e.d1[a] = d1[a] * o.v + v * o.d1[a];
    if (e.order >= 2)
        for (int a = 0; a < m; ++a)
            for (int b = 0; b < m; ++b)
                e.D2(a, b) = D2(a, b) * o.v + d1[a] * o.d1[b] + d1[b] * o.d1[a] + v * o.D2(a, b);
    return e;
}

EndoJet EndoJet::scale_by(const JetR& s) const {
    EndoJet e(m, n, std::min(order, s.order));
    auto axpy = [&](DenseC& dst, double c, const DenseC& src) {
        for (size_t i = 0; i < dst.a.size(); ++i) dst.a[i] += c * src.a[i];
    };
    e.v = cplx(s.v, 0) * v;
    if (e.order >= 1)
        for (int a = 0; a < m; ++a) {
            e.d1[a] = cplx(s.v, 0) * d1[a];
            axpy(e.d1[a], s.g1(a), v);
        }
    if (e.order >= 2)
        for (int a = 0; a < m; ++a)
            for (int b = 0; b < m; ++b) {
                DenseC& t = e.D2(a, b);
                t = cplx(s.v, 0) * D2(a, b);
                axpy(t, s.g1(a), d1[b]);
                axpy(t, s.g1(b), d1[a]);
                axpy(t, s.g2(a, b), v);
            }
    return e;
}

EndoJet EndoJet::scaled(cplx s) const {
    EndoJet e = *this;
    for (auto& x : e.v.a) x *= s;
    for (auto& mat : e.d1)
        for (auto& x : mat.a) x *= s;
    for (auto& mat : e.d2)
        for (auto& x : mat.a) x *= s;
    return e;
}

bool EndoJet::is_zero(double tol) const {
    auto z = [&](const DenseC& mat) {
        for (const auto& x : mat.a)
            if (std::abs(x) > tol) return false;
        return true;
    };
    if (!z(v)) return false;
    for (const auto& mat : d1)
        if (!z(mat)) return false;
    for (const auto& mat : d2)
        if (!z(mat)) return false;
    return true;
}

namespace {

DenseC commutator(const DenseC& x, const DenseC& y) { return x * y - y * x; }

cplx trace(const DenseC& x) {
    cplx t{};
    for (int i = 0; i < x.rows; ++i) t += x(i, i);
    return t;
}

double real_trace(const DenseC& x, const char* what) {
    const cplx t = trace(x);
    if (std::abs(t.imag()) > 1e-9 * std::max(1.0, std::abs(t.real())))
        throw NumericalContractError(std::string(what) + ": trace has a non-real part");
    return t.real();
}

// Transform derivative slots of an EndoJet under x = T y (covariant slots).
EndoJet transform_endo(const EndoJet& e, const DenseR& T) {
    EndoJet out(e.m, e.n, e.order);
    out.v = e.v;
    if (e.order >= 1)
        for (int a = 0; a < e.m; ++a) {
            DenseC s(e.n, e.n);
            for (int i = 0; i < e.m; ++i) {
                const double t = T(i, a);
                if (t == 0) continue;
                for (size_t q = 0; q < s.a.size(); ++q) s.a[q] += t * e.d1[i].a[q];
            }
            out.d1[a] = s;
        }
    if (e.order >= 2)
        for (int a = 0; a < e.m; ++a)
            for (int b = 0; b < e.m; ++b) {
                DenseC s(e.n, e.n);
                for (int i = 0; i < e.m; ++i)
                    for (int j = 0; j < e.m; ++j) {
                        const double t = T(i, a) * T(j, b);
                        if (t == 0) continue;
                        for (size_t q = 0; q < s.a.size(); ++q) s.a[q] += t * e.D2(i, j).a[q];
                    }
                out.D2(a, b) = s;
            }
    return out;
}

} // namespace

CanonicalData canonicalize(const LaplaceCoefficients& op, const tensor::MetricJet& jet) {
    if (op.m != jet.m) throw ConfigError("canonicalize: operator and jet dimensions differ");
    if (static_cast<int>(op.A.size()) != op.m)
        throw ConfigError("canonicalize: need one A^k per coordinate");
    const int m = op.m;
    const int n = op.fiberDim;

    // Orthonormalize the chart; the label index of A^k transforms against the
    // derivative slots.
    const DenseR T = tensor::orthonormal_frame(jet);
    const tensor::MetricJet jj = tensor::transform_jet(jet, T);

    // T^{-1} = L^t recovered by inverting T directly (m <= 5).
    DenseR Tinv(m, m);
    {
        // Solve T X = I by Gaussian elimination.
        DenseR w = T;
        Tinv = DenseR::identity(m);
        for (int col = 0; col < m; ++col) {
            int piv = col;
            for (int r = col + 1; r < m; ++r)
                if (std::abs(w(r, col)) > std::abs(w(piv, col))) piv = r;
            for (int c = 0; c < m; ++c) {
                std::swap(w(piv, c), w(col, c));
                std::swap(Tinv(piv, c), Tinv(col, c));
            }
            const double d = w(col, col);
            for (int c = 0; c < m; ++c) {
                w(col, c) /= d;
                Tinv(col, c) /= d;
            }
            for (int r = 0; r < m; ++r) {
                if (r == col) continue;
                const double f = w(r, col);
                for (int c = 0; c < m; ++c) {
                    w(r, c) -= f * w(col, c);
                    Tinv(r, c) -= f * Tinv(col, c);
                }
            }
        }
    }

    int aOrder = 3;
    for (const auto& e : op.A) aOrder = std::min(aOrder, e.order);
    // A'^a = (T^{-1})_{a i} A^i, then derivative slots with T.
    std::vector<EndoJet> At(m, EndoJet(m, n, aOrder));
    for (int a = 0; a < m; ++a) {
        EndoJet s(m, n, aOrder);
        for (int i = 0; i < m; ++i) {
            const double c = Tinv(a, i);
            if (c == 0) continue;
            s = s + op.A[i].truncated(aOrder).scaled(c);
        }
        At[a] = transform_endo(s, T);
    }
    const EndoJet Bt = transform_endo(op.B, T);

    const int gamOrder = std::min(jj.order() - 1, 3);
    const auto gam = tensor::christoffel_jets(jj, std::min(gamOrder, aOrder));
    const auto gentry = tensor::metric_entry_jets(jj, std::min({jj.order(), 3, aOrder + 1}));
    const auto ginv = tensor::inverse_metric_jets(jj, std::min({jj.order(), 3, aOrder + 1}));
    auto Gam = [&](int i, int j, int k) -> const JetR& {
        return gam[(static_cast<size_t>(i) * m + j) * m + k];
    };
    auto Gv = [&](int i, int j) -> const JetR& { return gentry[static_cast<size_t>(i) * m + j]; };
    auto Gi = [&](int i, int j) -> const JetR& { return ginv[static_cast<size_t>(i) * m + j]; };

    CanonicalData can;
    can.m = m;
    can.fiberDim = n;
    can.frame = T;
    can.gammaAtPoint.assign(static_cast<size_t>(m) * m * m, 0.0);
    for (size_t q = 0; q < can.gammaAtPoint.size(); ++q) can.gammaAtPoint[q] = gam[q].v;
    {
        double dgMax = 0;
        for (double x : jj.dg) dgMax = std::max(dgMax, std::abs(x));
        for (double x : jj.d2g) dgMax = std::max(dgMax, std::abs(x));
        can.flatChart = dgMax < 1e-13;
    }

    // omega_a = (1/2) g_ab (A^b + g^{cd} Gamma_cd^b id)
    const int omOrder = std::min(aOrder, gamOrder);
    can.omega.assign(m, EndoJet(m, n, omOrder));
    for (int a = 0; a < m; ++a) {
        EndoJet acc(m, n, omOrder);
        for (int b = 0; b < m; ++b) {
            JetR tr(m, omOrder);
            for (int c = 0; c < m; ++c)
                for (int d = 0; d < m; ++d)
                    tr = tr + Gi(c, d).truncated(omOrder) * Gam(c, d, b).truncated(omOrder);
            // inner = A^b + (g^{cd} Gamma_cd^b) id
            EndoJet inner = At[b].truncated(omOrder);
            EndoJet idj(m, n, omOrder);
            for (int i = 0; i < n; ++i) idj.v(i, i) = 1.0;
            inner = inner + idj.scale_by(tr);
            acc = acc + inner.scale_by(Gv(a, b).truncated(omOrder));
        }
        can.omega[a] = acc.scaled(0.5);
    }

    const bool omegaZero = [&] {
        for (const auto& w : can.omega)
            if (!w.is_zero(1e-14)) return false;
        return true;
    }();

    // E = B - g^{ij}(d_i omega_j + omega_i omega_j - omega_k Gamma_ij^k id)
    if (omegaZero) {
        can.E = Bt;
    } else {
        const int eOrder = std::min(Bt.order, omOrder - 1);
        if (eOrder < 0) throw MissingJetError("canonicalize: A jets too shallow for E");
        EndoJet acc(m, n, eOrder);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) {
                EndoJet term = can.omega[j].derivative(i).truncated(eOrder) +
                               can.omega[i].truncated(eOrder).mul(can.omega[j].truncated(eOrder));
                for (int k = 0; k < m; ++k)
                    term = term - can.omega[k].truncated(eOrder).scale_by(
                                      Gam(i, j, k).truncated(eOrder));
                acc = acc + term.scale_by(Gi(i, j).truncated(eOrder));
            }
        can.E = Bt.truncated(eOrder) - acc;
    }

    // Omega_ij = d_i omega_j - d_j omega_i + [omega_i, omega_j]
    can.Omega.assign(static_cast<size_t>(m) * m, DenseC(n, n));
    if (omOrder >= 1)
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j)
                can.Omega[static_cast<size_t>(i) * m + j] =
                    can.omega[j].d1[i] - can.omega[i].d1[j] +
                    commutator(can.omega[i].v, can.omega[j].v);
    return can;
}

RecomposedCoefficients recompose(const CanonicalData& can) {
    const int m = can.m, n = can.fiberDim;
    auto Gam = [&](int i, int j, int k) {
        return can.gammaAtPoint[(static_cast<size_t>(i) * m + j) * m + k];
    };
    // In the orthonormal frame: A'^a = 2 omega_a - Gamma_jj^a id,
    // B = E + (d_a omega_a + omega_a omega_a - omega_k Gamma_aa^k).
    std::vector<DenseC> Aprime(m, DenseC(n, n));
    for (int a = 0; a < m; ++a) {
        DenseC s = cplx(2.0, 0) * can.omega[a].v;
        double tr = 0;
        for (int j = 0; j < m; ++j) tr += Gam(j, j, a);
        for (int i = 0; i < n; ++i) s(i, i) -= tr;
        Aprime[a] = s;
    }
    DenseC B = can.E.v;
    for (int a = 0; a < m; ++a) {
        B = B + can.omega[a].d1[a] + can.omega[a].v * can.omega[a].v;
        for (int k = 0; k < m; ++k) {
            const double c = Gam(a, a, k);
            if (c == 0) continue;
            B = B - cplx(c, 0) * can.omega[k].v;
        }
    }
    // Back to the original chart: A^i = sum_a T(i, a) A'^a.
    RecomposedCoefficients out;
    out.A.assign(m, DenseC(n, n));
    for (int i = 0; i < m; ++i)
        for (int a = 0; a < m; ++a) {
            const double c = can.frame(i, a);
            if (c == 0) continue;
            out.A[i] = out.A[i] + cplx(c, 0) * Aprime[a];
        }
    out.B = B;
    return out;
}

double a0_density(const CanonicalData& can) {
    return std::pow(4 * M_PI, -0.5 * can.m) * can.fiberDim;
}

double a2_density(const CanonicalData& can, const tensor::CurvaturePack& pack) {
    const int n = can.fiberDim;
    DenseC t = cplx(6.0, 0) * can.E.v;
    for (int i = 0; i < n; ++i) t(i, i) += pack.tau;
    return std::pow(4 * M_PI, -0.5 * can.m) / 6.0 * real_trace(t, "a2");
}

double a4_density(const CanonicalData& can, const tensor::CurvaturePack& pack) {
    const int m = can.m, n = can.fiberDim;
    if (can.E.order < 2) throw MissingJetError("a4: E jets to order 2 required");
    for (const auto& w : can.omega)
        if (w.order < 1) throw MissingJetError("a4: omega jets to order 1 required");
    if (!pack.tauLaplacian)
        throw MissingJetError("a4: tau_;kk requires metric jets to order 4");

    // E_;k = dE_k + [omega_k, E];  E_;kl = d_l(E_;k) + [omega_l, E_;k] - Gamma_lk^s E_;s
    auto Gam = [&](int i, int j, int k) {
        return can.gammaAtPoint[(static_cast<size_t>(i) * m + j) * m + k];
    };
    std::vector<DenseC> Ek(m, DenseC(n, n));
    for (int k = 0; k < m; ++k) Ek[k] = can.E.d1[k] + commutator(can.omega[k].v, can.E.v);
    DenseC Ekk(n, n);
    for (int k = 0; k < m; ++k) {
        DenseC dEk = can.E.D2(k, k) + commutator(can.omega[k].d1[k], can.E.v) +
                     commutator(can.omega[k].v, can.E.d1[k]);
        DenseC t = dEk + commutator(can.omega[k].v, Ek[k]);
        for (int s = 0; s < m; ++s) {
            const double c = Gam(k, k, s);
            if (c != 0) t = t - cplx(c, 0) * Ek[s];
        }
        Ekk = Ekk + t;
    }

    DenseC acc = cplx(60.0, 0) * Ekk + cplx(60.0 * pack.tau, 0) * can.E.v +
                 cplx(180.0, 0) * (can.E.v * can.E.v);
    const double idCoef = 12.0 * *pack.tauLaplacian + 5.0 * pack.tau * pack.tau -
                          2.0 * pack.normRho2 + 2.0 * pack.normR2;
    for (int i = 0; i < n; ++i) acc(i, i) += idCoef;
    DenseC om(n, n);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            const DenseC& o = can.Omega[static_cast<size_t>(i) * m + j];
            om = om + o * o;
        }
    acc = acc + cplx(30.0, 0) * om;
    return std::pow(4 * M_PI, -0.5 * m) / 360.0 * real_trace(acc, "a4");
}

double a2n_leading_density(const CanonicalData& can, int n) {
    if (n < 1) throw ConfigError("a2n_leading: n >= 1 required");
    if (!can.flatChart)
        throw UnsupportedError("a2n_leading: only flat charts are supported");
    for (const auto& w : can.omega)
        if (!w.is_zero(1e-13))
            throw UnsupportedError("a2n_leading: nonvanishing connection unsupported");

    // (4 pi)^{-m/2} / (2^{n+1} (2n+1)!!) Tr{(8n+4) E + 2n tau}_{;k...k}; tau = 0 here.
    double dfact = 1;
    for (int k = 3; k <= 2 * n + 1; k += 2) dfact *= k;
    const double norm = std::pow(4 * M_PI, -0.5 * can.m) / (std::pow(2.0, n + 1) * dfact);

    DenseC lap = can.E.v;
    if (n >= 2) {
        bool constantE = true;
        for (const auto& d : can.E.d1)
            for (const auto& x : d.a) constantE &= (std::abs(x) < 1e-300);
        if (constantE) {
            bool const2 = true;
            for (const auto& d : can.E.d2)
                for (const auto& x : d.a) const2 &= (std::abs(x) < 1e-300);
            if (const2) return 0.0; // all derivatives of a constant vanish
        }
        if (n > 2) throw MissingJetError("a2n_leading: jets beyond order 2 unavailable");
        DenseC s(can.fiberDim, can.fiberDim);
        for (int k = 0; k < can.m; ++k) s = s + can.E.D2(k, k);
        lap = s;
    }
    const cplx t = [&] {
        cplx r{};
        for (int i = 0; i < can.fiberDim; ++i) r += lap(i, i);
        return r;
    }();
    return norm * (8.0 * n + 4.0) * t.real();
}

namespace {

// Signed permutations of {0, .., k-1}.
void permutations(int k, std::vector<std::pair<std::vector<int>, int>>& out) {
    std::vector<int> idx(k);
    for (int i = 0; i < k; ++i) idx[i] = i;
    std::vector<bool> used(k, false);
    std::vector<int> cur;
    struct Rec {
        int k;
        std::vector<bool>& used;
        std::vector<int>& cur;
        std::vector<std::pair<std::vector<int>, int>>& out;
        void go(int sign) {
            if (static_cast<int>(cur.size()) == k) {
                out.emplace_back(cur, sign);
                return;
            }
            for (int i = 0; i < k; ++i) {
                if (used[i]) continue;
                int flips = 0;
                for (int j : cur)
                    if (j > i) ++flips;
                used[i] = true;
                cur.push_back(i);
                go(sign * ((flips % 2) ? -1 : 1));
                cur.pop_back();
                used[i] = false;
            }
        }
    } rec{k, used, cur, out};
    rec.go(1);
}

} // namespace

double euler_form(const tensor::CurvaturePack& pack) {
    const int m = pack.m;
    if (m % 2 == 1) return 0.0;
    if (m == 0) return 0.0;
    const int half = m / 2;
    std::vector<std::pair<std::vector<int>, int>> perms;
    permutations(m, perms);
    double sum = 0;
    for (const auto& [I, sI] : perms)
        for (const auto& [J, sJ] : perms) {
            double prod = 1;
            for (int t = 0; t < half; ++t) {
                prod *= pack.R(I[2 * t], I[2 * t + 1], J[2 * t], J[2 * t + 1]);
                if (prod == 0) break;
            }
            sum += sI * sJ * prod;
        }
    double fact = 1;
    for (int k = 2; k <= half; ++k) fact *= k;
    const double sign = (half % 2) ? -1.0 : 1.0;
    return sign / (std::pow(8.0 * M_PI, half) * fact) * sum;
}

namespace {

double sphere_volume(int dim) {
    // vol(S^{2j-1}) = 2 pi^j / (j-1)!,  vol(S^{2j}) = j! pi^j 2^{2j+1} / (2j)!
    if (dim < 0) throw ConfigError("sphere_volume: negative dimension");
    if (dim % 2 == 1) {
        const int j = (dim + 1) / 2;
        double f = 1;
        for (int k = 2; k <= j - 1; ++k) f *= k;
        return 2.0 * std::pow(M_PI, j) / f;
    }
    const int j = dim / 2;
    double jf = 1;
    for (int k = 2; k <= j; ++k) jf *= k;
    double f2j = 1;
    for (int k = 2; k <= 2 * j; ++k) f2j *= k;
    return jf * std::pow(M_PI, j) * std::pow(2.0, 2 * j + 1) / f2j;
}

} // namespace

double boundary_Q(const tensor::CurvaturePack& pack, const DenseR& L, int k, int m) {
    if (k < 0 || 2 * k > m - 1) throw ConfigError("boundary_Q: need 0 <= 2k <= m-1");
    const int nt = m - 1;
    if (L.rows != nt || L.cols != nt) throw ConfigError("boundary_Q: L has wrong shape");
    if (nt == 0) return 0.0;
    std::vector<std::pair<std::vector<int>, int>> perms;
    permutations(nt, perms);
    double sum = 0;
    for (const auto& [A, sA] : perms)
        for (const auto& [B, sB] : perms) {
            double prod = 1;
            for (int t = 0; t < k && prod != 0; ++t)
                prod *= pack.R(A[2 * t], A[2 * t + 1], B[2 * t], B[2 * t + 1]);
            for (int t = 2 * k; t < nt && prod != 0; ++t) prod *= L(A[t], B[t]);
            sum += sA * sB * prod;
        }
    double kf = 1;
    for (int t = 2; t <= k; ++t) kf *= t;
    double lf = 1;
    for (int t = 2; t <= nt - 2 * k; ++t) lf *= t;
    const double denom = std::pow(-8.0 * M_PI, k) * kf * lf * sphere_volume(nt - 2 * k);
    return sum / denom;
}

DenseC BoundaryData::psi() const { return piN - piD; }

void BoundaryData::validate() const {
    const int n = fiberDim;
    DenseC sum = piD + piN;
    DenseC prod = piD * piN;
    DenseC p = psi();
    DenseC p2 = p * p;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const cplx id = (i == j) ? cplx(1, 0) : cplx(0, 0);
            if (std::abs(sum(i, j) - id) > 1e-12)
                throw ConfigError("BoundaryData: piD + piN != identity");
            if (std::abs(prod(i, j)) > 1e-12)
                throw ConfigError("BoundaryData: piD piN != 0");
            if (std::abs(p2(i, j) - id) > 1e-12)
                throw ConfigError("BoundaryData: psi^2 != identity");
        }
}

double boundary_a(int ell, const BoundaryData& bd, const CanonicalData& can,
                  const tensor::CurvaturePack& pack) {
    if (ell < 0 || ell > 2)
        throw UnsupportedError("boundary_a: only orders 0, 1, 2 are available");
    bd.validate();
    const int m = bd.m;
    const int nt = m - 1;
    const DenseC psi = bd.psi();

    if (ell == 0) return 0.25 * std::pow(4 * M_PI, -0.5 * nt) * real_trace(psi, "a0bd");

    double Laa = 0;
    for (int a = 0; a < nt; ++a) Laa += bd.L(a, a);

    if (ell == 1) {
        DenseC t = cplx(12.0, 0) * bd.S;
        for (int i = 0; i < bd.fiberDim; ++i) t(i, i) += 2.0 * Laa;
        return std::pow(4 * M_PI, -0.5 * m) / 6.0 * real_trace(t, "a1bd");
    }

    // ell == 2
    double LabLab = 0;
    for (int a = 0; a < nt; ++a)
        for (int b = 0; b < nt; ++b) LabLab += bd.L(a, b) * bd.L(a, b);
    double Ramam = 0;
    for (int a = 0; a < nt; ++a) Ramam += pack.R(a, m - 1, a, m - 1);

    DenseC acc = cplx(96.0, 0) * (psi * can.E.v) + cplx(16.0 * pack.tau + 8.0 * Ramam, 0) * psi;
    acc = acc + cplx(Laa * Laa, 0) * (cplx(13.0, 0) * bd.piN - cplx(7.0, 0) * bd.piD);
    acc = acc + cplx(LabLab, 0) * (cplx(2.0, 0) * bd.piN + cplx(10.0, 0) * bd.piD);
    acc = acc + cplx(96.0 * Laa, 0) * bd.S + cplx(192.0, 0) * (bd.S * bd.S);
    if (!bd.psiTangentialJets.empty()) {
        for (int a = 0; a < nt; ++a)
            acc = acc - cplx(12.0, 0) * (bd.psiTangentialJets[a] * bd.psiTangentialJets[a]);
    }
    // psi_{:a} defaults to zero when jets are not supplied; every in-scope
    // boundary structure has tangentially constant psi.
    return std::pow(4 * M_PI, -0.5 * nt) / 384.0 * real_trace(acc, "a2bd");
}

double dolbeault_a2(const tensor::CurvaturePack& pack, double deltaReTheta) {
    if (pack.m != 2) throw UnsupportedError("dolbeault_a2: surface case only (m = 2)");
    return pack.tau / (8 * M_PI) - deltaReTheta / M_PI;
}

double dolbeault_a2_flat(const tensor::CurvaturePack& pack, cplx dthetaDx, cplx dthetaDy) {
    // delta(Re Theta) = -(d_x Re theta + d_y Im theta) on a flat chart
    return dolbeault_a2(pack, -(dthetaDx.real() + dthetaDy.imag()));
}

} // namespace heatlab::laplace
