#include "heatlab/tensor_core.hpp"

#include <cmath>
#include <cstring>

#include <json.hpp>

namespace heatlab::tensor {

using nlohmann::json;

MetricJet::MetricJet(int m_, int order) : m(m_) {
    if (order < 2 || order > 4) throw ConfigError("MetricJet: order must be between 2 and 4");
    const size_t mm = static_cast<size_t>(m) * m;
    g.assign(mm, 0.0);
    dg.assign(mm * m, 0.0);
    d2g.assign(mm * m * m, 0.0);
    if (order >= 3) d3g.assign(mm * m * m * m, 0.0);
    if (order >= 4) d4g.assign(mm * m * m * m * m, 0.0);
}

int MetricJet::order() const {
    if (!d4g.empty()) return 4;
    if (!d3g.empty()) return 3;
    return 2;
}

namespace {

DenseR to_dense(const std::vector<double>& g, int m) {
    DenseR d(m, m);
    d.a = g;
    return d;
}

// Cholesky factor of a symmetric positive definite matrix; throws otherwise.
DenseR cholesky(const DenseR& g) {
    const int m = g.rows;
    DenseR L(m, m);
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j <= i; ++j) {
            double s = g(i, j);
            for (int k = 0; k < j; ++k) s -= L(i, k) * L(j, k);
            if (i == j) {
                if (s <= 0) throw SingularMetricError("metric is not positive definite");
                L(i, i) = std::sqrt(s);
            } else {
                L(i, j) = s / L(j, j);
            }
        }
    }
    return L;
}

DenseR invert(const DenseR& a) {
    const int n = a.rows;
    DenseR w = a, inv = DenseR::identity(n);
    for (int col = 0; col < n; ++col) {
        int piv = col;
        for (int r = col + 1; r < n; ++r)
            if (std::abs(w(r, col)) > std::abs(w(piv, col))) piv = r;
        if (std::abs(w(piv, col)) < 1e-300) throw SingularMetricError("metric is singular");
        if (piv != col)
            for (int c = 0; c < n; ++c) {
                std::swap(w(piv, c), w(col, c));
                std::swap(inv(piv, c), inv(col, c));
            }
        const double d = w(col, col);
        for (int c = 0; c < n; ++c) {
            w(col, c) /= d;
            inv(col, c) /= d;
        }
        for (int r = 0; r < n; ++r) {
            if (r == col) continue;
            const double f = w(r, col);
            if (f == 0) continue;
            for (int c = 0; c < n; ++c) {
                w(r, c) -= f * w(col, c);
                inv(r, c) -= f * inv(col, c);
            }
        }
    }
    return inv;
}

// out[..., a, ...] = sum_i T(i, a) in[..., i, ...] over the given slot of a
// rank-k tensor with every index of range m.
std::vector<double> contract_slot(const std::vector<double>& in, int m, int k, int slot,
                                  const DenseR& T) {
    size_t size = 1;
    for (int i = 0; i < k; ++i) size *= m;
    size_t stride = 1;
    for (int i = slot + 1; i < k; ++i) stride *= m;
    std::vector<double> out(size, 0.0);
    for (size_t q = 0; q < size; ++q) {
        const double v = in[q];
        if (v == 0.0) continue;
        const int is = static_cast<int>((q / stride) % m);
        const size_t base = q - static_cast<size_t>(is) * stride;
        for (int a = 0; a < m; ++a) out[base + static_cast<size_t>(a) * stride] += T(is, a) * v;
    }
    return out;
}

std::vector<double> transform_rank(const std::vector<double>& in, int m, int k, const DenseR& T) {
    std::vector<double> cur = in;
    for (int slot = 0; slot < k; ++slot) cur = contract_slot(cur, m, k, slot, T);
    return cur;
}

} // namespace

void MetricJet::validate() const {
    const double tol = 1e-12;
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < i; ++j)
            if (std::abs(Gv(i, j) - Gv(j, i)) > tol)
                throw ConfigError("MetricJet: g is not symmetric");
    cholesky(to_dense(g, m));
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < i; ++j)
            for (int k = 0; k < m; ++k)
                if (std::abs(D1v(i, j, k) - D1v(j, i, k)) > tol)
                    throw ConfigError("MetricJet: dg lacks i<->j symmetry");
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            for (int k = 0; k < m; ++k)
                for (int l = 0; l < k; ++l)
                    if (std::abs(D2v(i, j, k, l) - D2v(i, j, l, k)) > tol ||
                        std::abs(D2v(i, j, k, l) - D2v(j, i, k, l)) > tol)
                        throw ConfigError("MetricJet: d2g lacks required symmetry");
}

OneFormJet::OneFormJet(int m_, int order) : m(m_) {
    const size_t mm = static_cast<size_t>(m) * m;
    theta.assign(m, 0.0);
    dtheta.assign(mm, 0.0);
    if (order >= 2) d2theta.assign(mm * m, 0.0);
    if (order >= 3) d3theta.assign(mm * m * m, 0.0);
}

int OneFormJet::order() const {
    if (!d3theta.empty()) return 3;
    if (!d2theta.empty()) return 2;
    return 1;
}

void OneFormJet::validate() const {
    if (closed) {
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < i; ++j)
                if (std::abs(dtheta[static_cast<size_t>(i) * m + j] -
                             dtheta[static_cast<size_t>(j) * m + i]) > 1e-12)
                    throw ConfigError("OneFormJet: flagged closed but dtheta is not symmetric");
    }
}

std::vector<JetR> metric_entry_jets(const MetricJet& jet, int order) {
    const int m = jet.m;
    if (order > jet.order()) throw MissingJetError("metric jets of requested order unavailable");
    std::vector<JetR> out(static_cast<size_t>(m) * m, JetR(m, std::min(order, 3)));
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            JetR& e = out[static_cast<size_t>(i) * m + j];
            e.v = jet.Gv(i, j);
            if (e.order >= 1)
                for (int a = 0; a < m; ++a) e.g1(a) = jet.D1v(i, j, a);
            if (e.order >= 2)
                for (int a = 0; a < m; ++a)
                    for (int b = 0; b < m; ++b) e.g2(a, b) = jet.D2v(i, j, a, b);
            if (e.order >= 3)
                for (int a = 0; a < m; ++a)
                    for (int b = 0; b < m; ++b)
                        for (int c = 0; c < m; ++c) e.g3(a, b, c) = jet.D3v(i, j, a, b, c);
        }
    return out;
}

namespace {

// Jets of the first metric derivatives g_ij/k; one order below the stored jet.
std::vector<JetR> metric_d1_jets(const MetricJet& jet, int order) {
    const int m = jet.m;
    if (order > jet.order() - 1)
        throw MissingJetError("metric derivative jets of requested order unavailable");
    std::vector<JetR> out(static_cast<size_t>(m) * m * m, JetR(m, std::min(order, 3)));
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            for (int k = 0; k < m; ++k) {
                JetR& e = out[(static_cast<size_t>(i) * m + j) * m + k];
                e.v = jet.D1v(i, j, k);
                if (e.order >= 1)
                    for (int a = 0; a < m; ++a) e.g1(a) = jet.D2v(i, j, k, a);
                if (e.order >= 2)
                    for (int a = 0; a < m; ++a)
                        for (int b = 0; b < m; ++b) e.g2(a, b) = jet.D3v(i, j, k, a, b);
                if (e.order >= 3)
                    for (int a = 0; a < m; ++a)
                        for (int b = 0; b < m; ++b)
                            for (int c = 0; c < m; ++c) e.g3(a, b, c) = jet.D4v(i, j, k, a, b, c);
            }
    return out;
}

std::vector<JetR> invert_jet_matrix(const std::vector<JetR>& G, int m) {
    std::vector<JetR> w = G;
    std::vector<JetR> inv(static_cast<size_t>(m) * m, JetR(G[0].m, G[0].order));
    for (int i = 0; i < m; ++i) inv[static_cast<size_t>(i) * m + i].v = 1.0;
    auto W = [&](std::vector<JetR>& mat, int i, int j) -> JetR& {
        return mat[static_cast<size_t>(i) * m + j];
    };
    for (int col = 0; col < m; ++col) {
        int piv = col;
        for (int r = col + 1; r < m; ++r)
            if (std::abs(W(w, r, col).v) > std::abs(W(w, piv, col).v)) piv = r;
        if (std::abs(W(w, piv, col).v) < 1e-300) throw SingularMetricError("metric is singular");
        if (piv != col)
            for (int c = 0; c < m; ++c) {
                std::swap(W(w, piv, c), W(w, col, c));
                std::swap(W(inv, piv, c), W(inv, col, c));
            }
        const JetR r = W(w, col, col).reciprocal();
        for (int c = 0; c < m; ++c) {
            W(w, col, c) = W(w, col, c) * r;
            W(inv, col, c) = W(inv, col, c) * r;
        }
        for (int rr = 0; rr < m; ++rr) {
            if (rr == col) continue;
            const JetR f = W(w, rr, col);
            if (f.v == 0.0) {
                bool zero = true;
                for (double x : f.d1) zero &= (x == 0.0);
                for (double x : f.d2) zero &= (x == 0.0);
                for (double x : f.d3) zero &= (x == 0.0);
                if (zero) continue;
            }
            for (int c = 0; c < m; ++c) {
                W(w, rr, c) = W(w, rr, c) - f * W(w, col, c);
                W(inv, rr, c) = W(inv, rr, c) - f * W(inv, col, c);
            }
        }
    }
    return inv;
}

} // namespace

std::vector<JetR> inverse_metric_jets(const MetricJet& jet, int order) {
    return invert_jet_matrix(metric_entry_jets(jet, order), jet.m);
}

std::vector<JetR> christoffel_jets(const MetricJet& jet, int order) {
    const int m = jet.m;
    const auto ginv = inverse_metric_jets(jet, order);
    const auto dgj = metric_d1_jets(jet, order);
    auto DG = [&](int i, int j, int k) -> const JetR& {
        return dgj[(static_cast<size_t>(i) * m + j) * m + k];
    };
    std::vector<JetR> out(static_cast<size_t>(m) * m * m, JetR(m, order));
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            for (int k = 0; k < m; ++k) {
                JetR s(m, order);
                for (int l = 0; l < m; ++l) {
                    const JetR first = DG(j, l, i) + DG(i, l, j) - DG(i, j, l);
                    s = s + ginv[static_cast<size_t>(k) * m + l] * first;
                }
                out[(static_cast<size_t>(i) * m + j) * m + k] = s.scaled(0.5);
            }
    return out;
}

std::vector<double> christoffel(const MetricJet& jet) {
    const int m = jet.m;
    cholesky(to_dense(jet.g, m)); // positive definiteness gate
    const DenseR ginv = invert(to_dense(jet.g, m));
    std::vector<double> out(static_cast<size_t>(m) * m * m, 0.0);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            for (int k = 0; k < m; ++k) {
                double s = 0;
                for (int l = 0; l < m; ++l)
                    s += ginv(k, l) * (jet.D1v(j, l, i) + jet.D1v(i, l, j) - jet.D1v(i, j, l));
                out[(static_cast<size_t>(i) * m + j) * m + k] = 0.5 * s;
            }
    return out;
}

DenseR orthonormal_frame(const MetricJet& jet) {
    const DenseR L = cholesky(to_dense(jet.g, jet.m));
    // T = L^{-T}: solve L^T T = I column by column (back substitution).
    const int m = jet.m;
    DenseR T(m, m);
    for (int col = 0; col < m; ++col) {
        for (int i = m - 1; i >= 0; --i) {
            double s = (i == col) ? 1.0 : 0.0;
            for (int k = i + 1; k < m; ++k) s -= L(k, i) * T(k, col);
            T(i, col) = s / L(i, i);
        }
    }
    return T;
}

MetricJet transform_jet(const MetricJet& jet, const DenseR& T) {
    MetricJet out(jet.m, jet.order());
    out.g = transform_rank(jet.g, jet.m, 2, T);
    out.dg = transform_rank(jet.dg, jet.m, 3, T);
    out.d2g = transform_rank(jet.d2g, jet.m, 4, T);
    if (!jet.d3g.empty()) out.d3g = transform_rank(jet.d3g, jet.m, 5, T);
    if (!jet.d4g.empty()) out.d4g = transform_rank(jet.d4g, jet.m, 6, T);
    return out;
}

OneFormJet transform_form(const OneFormJet& theta, const DenseR& T) {
    OneFormJet out(theta.m, theta.order());
    out.closed = theta.closed;
    out.theta = transform_rank(theta.theta, theta.m, 1, T);
    out.dtheta = transform_rank(theta.dtheta, theta.m, 2, T);
    if (!theta.d2theta.empty()) out.d2theta = transform_rank(theta.d2theta, theta.m, 3, T);
    if (!theta.d3theta.empty()) out.d3theta = transform_rank(theta.d3theta, theta.m, 4, T);
    return out;
}

MetricJet block_sum(const MetricJet& a, const MetricJet& b) {
    const int m = a.m + b.m;
    MetricJet out(m, std::min(a.order(), b.order()));
    auto fill = [&](const MetricJet& src, int off) {
        for (int i = 0; i < src.m; ++i)
            for (int j = 0; j < src.m; ++j) {
                out.G(off + i, off + j) = src.Gv(i, j);
                for (int k = 0; k < src.m; ++k) {
                    out.D1(off + i, off + j, off + k) = src.D1v(i, j, k);
                    for (int l = 0; l < src.m; ++l) {
                        out.D2(off + i, off + j, off + k, off + l) = src.D2v(i, j, k, l);
                        if (out.order() >= 3)
                            for (int p = 0; p < src.m; ++p) {
                                out.D3(off + i, off + j, off + k, off + l, off + p) =
                                    src.D3v(i, j, k, l, p);
                                if (out.order() >= 4)
                                    for (int q = 0; q < src.m; ++q)
                                        out.D4(off + i, off + j, off + k, off + l, off + p,
                                               off + q) = src.D4v(i, j, k, l, p, q);
                            }
                    }
                }
            }
    };
    fill(a, 0);
    fill(b, a.m);
    return out;
}

MetricJet MetricJet::truncated(int order) const {
    if (order >= this->order()) return *this;
    MetricJet out(m, order);
    out.g = g;
    out.dg = dg;
    out.d2g = d2g;
    if (order >= 3) out.d3g = d3g;
    if (order >= 4) out.d4g = d4g;
    return out;
}

namespace {

// Allocation-free value path for quadrature loops: curvature components at the
// point from g, dg, d2g, in the orthonormalized chart.
CurvaturePack curvature_values(const MetricJet& jj) {
    const int m = jj.m;
    const DenseR ginv = invert(to_dense(jj.g, m));
    std::vector<double> gamma(static_cast<size_t>(m) * m * m, 0.0);       // (i,j,k)
    std::vector<double> dgamma(static_cast<size_t>(m) * m * m * m, 0.0);  // (a,i,j,k) = d_a Gamma_ij^k
    auto G = [&](int i, int j, int k) -> double& {
        return gamma[(static_cast<size_t>(i) * m + j) * m + k];
    };
    auto DG = [&](int a, int i, int j, int k) -> double& {
        return dgamma[((static_cast<size_t>(a) * m + i) * m + j) * m + k];
    };
    // d_a g^{kl} = -(ginv dg_a ginv)^{kl}
    std::vector<double> dginv(static_cast<size_t>(m) * m * m, 0.0); // (a,k,l)
    for (int a = 0; a < m; ++a)
        for (int k = 0; k < m; ++k)
            for (int l = 0; l < m; ++l) {
                double s = 0;
                for (int p = 0; p < m; ++p)
                    for (int q = 0; q < m; ++q)
                        s += ginv(k, p) * jj.D1v(p, q, a) * ginv(q, l);
                dginv[(static_cast<size_t>(a) * m + k) * m + l] = -s;
            }
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            for (int k = 0; k < m; ++k) {
                double s = 0;
                for (int l = 0; l < m; ++l)
                    s += ginv(k, l) * (jj.D1v(j, l, i) + jj.D1v(i, l, j) - jj.D1v(i, j, l));
                G(i, j, k) = 0.5 * s;
                for (int a = 0; a < m; ++a) {
                    double t = 0;
                    for (int l = 0; l < m; ++l) {
                        t += dginv[(static_cast<size_t>(a) * m + k) * m + l] *
                             (jj.D1v(j, l, i) + jj.D1v(i, l, j) - jj.D1v(i, j, l));
                        t += ginv(k, l) * (jj.D2v(j, l, i, a) + jj.D2v(i, l, j, a) -
                                           jj.D2v(i, j, l, a));
                    }
                    DG(a, i, j, k) = 0.5 * t;
                }
            }

    CurvaturePack pack;
    pack.m = m;
    pack.riemann.assign(static_cast<size_t>(m) * m * m * m, 0.0);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            if (j == i) continue;
            for (int k = 0; k < m; ++k)
                for (int l = 0; l < m; ++l) {
                    double s = 0;
                    for (int ss = 0; ss < m; ++ss) {
                        double inner = DG(i, j, k, ss) - DG(j, i, k, ss);
                        for (int p = 0; p < m; ++p)
                            inner += G(i, p, ss) * G(j, k, p) - G(j, p, ss) * G(i, k, p);
                        s += jj.Gv(l, ss) * inner;
                    }
                    pack.riemann[((static_cast<size_t>(i) * m + j) * m + k) * m + l] = s;
                }
        }
    pack.ricci.assign(static_cast<size_t>(m) * m, 0.0);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            double s = 0;
            for (int k = 0; k < m; ++k)
                for (int l = 0; l < m; ++l)
                    s += ginv(k, l) * pack.R(i, k, l, j);
            pack.ricci[static_cast<size_t>(i) * m + j] = s;
        }
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            pack.tau += ginv(i, j) * pack.rho(i, j);
            pack.normRho2 += pack.rho(i, j) * pack.rho(i, j);
        }
    for (double x : pack.riemann) pack.normR2 += x * x;
    return pack;
}

} // namespace

CurvaturePack curvature(const MetricJet& jetIn, int derivOrder) {
    const int maxDeriv = std::min(2, jetIn.order() - 2);
    if (derivOrder < 0 || derivOrder > maxDeriv) derivOrder = maxDeriv;
    const MetricJet jet = jetIn.truncated(derivOrder + 2);
    const int m = jet.m;
    const DenseR T = orthonormal_frame(jet);
    const MetricJet jj = transform_jet(jet, T);
    if (derivOrder == 0) return curvature_values(jj);

    const int gammaOrder = std::min(jj.order() - 1, 3);
    const auto gam = christoffel_jets(jj, gammaOrder);
    auto Gam = [&](int i, int j, int k) -> const JetR& {
        return gam[(static_cast<size_t>(i) * m + j) * m + k];
    };
    const int rOrder = gammaOrder - 1;
    const auto gentry = metric_entry_jets(jj, std::min(jj.order(), 3));
    const auto ginv = inverse_metric_jets(jj, std::min(jj.order(), 3));

    // R_ijkl = g_ls (d_i Gamma_jk^s - d_j Gamma_ik^s + Gamma_ip^s Gamma_jk^p
    //                - Gamma_jp^s Gamma_ik^p)
    std::vector<JetR> R(static_cast<size_t>(m) * m * m * m, JetR(m, rOrder));
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            if (j == i) continue;
            for (int k = 0; k < m; ++k)
                for (int l = 0; l < m; ++l) {
                    JetR s(m, rOrder);
                    for (int ss = 0; ss < m; ++ss) {
                        JetR inner = Gam(j, k, ss).derivative(i) - Gam(i, k, ss).derivative(j);
                        for (int p = 0; p < m; ++p)
                            inner = inner + Gam(i, p, ss) * Gam(j, k, p) -
                                    Gam(j, p, ss) * Gam(i, k, p);
                        s = s + gentry[static_cast<size_t>(l) * m + ss] * inner;
                    }
                    R[((static_cast<size_t>(i) * m + j) * m + k) * m + l] = s;
                }
        }

    CurvaturePack pack;
    pack.m = m;
    pack.riemann.assign(static_cast<size_t>(m) * m * m * m, 0.0);
    for (size_t q = 0; q < R.size(); ++q) pack.riemann[q] = R[q].v;

    // rho_ij = g^{kl} R_iklj, tau = g^{ij} rho_ij; jets kept for tau_;kk.
    std::vector<JetR> rho(static_cast<size_t>(m) * m, JetR(m, rOrder));
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            JetR s(m, rOrder);
            for (int k = 0; k < m; ++k)
                for (int l = 0; l < m; ++l)
                    s = s + ginv[static_cast<size_t>(k) * m + l] *
                                R[((static_cast<size_t>(i) * m + k) * m + l) * m + j];
            rho[static_cast<size_t>(i) * m + j] = s;
        }
    JetR tau(m, rOrder);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            tau = tau + ginv[static_cast<size_t>(i) * m + j] * rho[static_cast<size_t>(i) * m + j];

    pack.ricci.assign(static_cast<size_t>(m) * m, 0.0);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) pack.ricci[static_cast<size_t>(i) * m + j] =
            rho[static_cast<size_t>(i) * m + j].v;
    pack.tau = tau.v;
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) pack.normRho2 += pack.rho(i, j) * pack.rho(i, j);
    for (double x : pack.riemann) pack.normR2 += x * x;

    if (tau.order >= 2) {
        double lap = 0;
        for (int k = 0; k < m; ++k) lap += tau.g2(k, k);
        for (int k = 0; k < m; ++k)
            for (int s = 0; s < m; ++s) lap -= Gam(k, k, s).v * tau.g1(s);
        pack.tauLaplacian = lap;
    }
    return pack;
}

CovariantThetaDerivs covariant_derivatives(const OneFormJet& theta, const MetricJet& jet,
                                           int order) {
    if (order < 1 || order > 2)
        throw UnsupportedError("covariant_derivatives: order must be 1 or 2");
    if (theta.m != jet.m) throw ConfigError("covariant_derivatives: dimension mismatch");
    if (theta.order() < order)
        throw MissingJetError("covariant_derivatives: 1-form jets too shallow");
    theta.validate();
    const int m = jet.m;
    const DenseR T = orthonormal_frame(jet);
    const MetricJet jj = transform_jet(jet, T);
    const OneFormJet th = transform_form(theta, T);

    const int gamOrder = std::min({order - 1, jj.order() - 1, 3});
    const auto gam = christoffel_jets(jj, gamOrder);
    auto Gam = [&](int i, int j, int k) -> const JetR& {
        return gam[(static_cast<size_t>(i) * m + j) * m + k];
    };

    // Theta_i as jets in the orthonormal chart.
    std::vector<JetR> thj(m, JetR(m, std::min(th.order(), order)));
    for (int i = 0; i < m; ++i) {
        JetR& e = thj[i];
        e.v = th.theta[i];
        if (e.order >= 1)
            for (int a = 0; a < m; ++a) e.g1(a) = th.dtheta[static_cast<size_t>(i) * m + a];
        if (e.order >= 2)
            for (int a = 0; a < m; ++a)
                for (int b = 0; b < m; ++b)
                    e.g2(a, b) = th.d2theta[(static_cast<size_t>(i) * m + a) * m + b];
    }

    CovariantThetaDerivs out;
    out.m = m;
    out.theta = th.theta;
    out.first.assign(static_cast<size_t>(m) * m, 0.0);

    std::vector<JetR> tij(static_cast<size_t>(m) * m, JetR(m, gamOrder));
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            JetR s = thj[i].derivative(j).truncated(gamOrder);
            for (int k = 0; k < m; ++k) s = s - Gam(j, i, k) * thj[k].truncated(gamOrder);
            tij[static_cast<size_t>(i) * m + j] = s;
            out.first[static_cast<size_t>(i) * m + j] = s.v;
        }

    if (order >= 2) {
        out.second.assign(static_cast<size_t>(m) * m * m, 0.0);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j)
                for (int k = 0; k < m; ++k) {
                    double v = tij[static_cast<size_t>(i) * m + j].g1(k);
                    for (int s = 0; s < m; ++s) {
                        v -= Gam(k, i, s).v * out.first[static_cast<size_t>(s) * m + j];
                        v -= Gam(k, j, s).v * out.first[static_cast<size_t>(i) * m + s];
                    }
                    out.second[(static_cast<size_t>(i) * m + j) * m + k] = v;
                }
    }

    for (int i = 0; i < m; ++i) out.deltaTheta -= out.first[static_cast<size_t>(i) * m + i];
    return out;
}

// ---- charts -----------------------------------------------------------------

namespace {

// sin^2 and its first four derivatives, for round-sphere factors.
std::array<double, 5> sin2_ders(double t) {
    return {std::sin(t) * std::sin(t), std::sin(2 * t), 2 * std::cos(2 * t), -4 * std::sin(2 * t),
            -8 * std::cos(2 * t)};
}

// Diagonal metric whose entries are products of one-variable factors,
// g_ii = scale_i * prod_j f_ij(x_j); every derivative is exact.
struct DiagonalProductMetric {
    int m = 0;
    std::vector<double> scale;
    // factor[i][j]: derivatives 0..4 of the j-th coordinate factor of g_ii,
    // or empty meaning the constant 1.
    std::vector<std::vector<std::function<std::array<double, 5>(double)>>> factor;

    MetricJet jet_at(const std::vector<double>& x) const {
        MetricJet out(m, 4);
        std::vector<std::array<double, 5>> f(static_cast<size_t>(m) * m,
                                             {1.0, 0.0, 0.0, 0.0, 0.0});
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j)
                if (factor[i][j]) f[static_cast<size_t>(i) * m + j] = factor[i][j](x[j]);

        auto entry = [&](int i, const std::array<int, 4>& dcount) -> double {
            double v = scale[i];
            std::array<int, 8> per{};
            for (int s = 0; s < 4; ++s)
                if (dcount[s] >= 0) per[dcount[s]]++;
            for (int j = 0; j < m; ++j) {
                const int k = per[j];
                v *= f[static_cast<size_t>(i) * m + j][k];
            }
            return v;
        };
        for (int i = 0; i < m; ++i) {
            out.G(i, i) = entry(i, {-1, -1, -1, -1});
            for (int k = 0; k < m; ++k) {
                out.D1(i, i, k) = entry(i, {k, -1, -1, -1});
                for (int l = 0; l < m; ++l) {
                    out.D2(i, i, k, l) = entry(i, {k, l, -1, -1});
                    for (int p = 0; p < m; ++p) {
                        out.D3(i, i, k, l, p) = entry(i, {k, l, p, -1});
                        for (int q = 0; q < m; ++q)
                            out.D4(i, i, k, l, p, q) = entry(i, {k, l, p, q});
                    }
                }
            }
        }
        return out;
    }
};

OneFormJet theta_jet_from_polys(const std::vector<TrigPoly>& comps,
                                const std::vector<double>& x) {
    const int m = static_cast<int>(comps.size());
    OneFormJet out(m, 3);
    const double xx = x.empty() ? 0.0 : x[0];
    const double yy = x.size() > 1 ? x[1] : 0.0;
    auto re = [](cplx c) { return c.real(); };
    for (int i = 0; i < m; ++i) {
        const TrigPoly& p = comps[i];
        if (!p.is_real()) throw ConfigError("chart theta must be real-valued");
        out.theta[i] = re(p.eval(xx, yy));
        std::vector<TrigPoly> d1(m);
        for (int a = 0; a < std::min(m, 2); ++a) d1[a] = p.derivative(a);
        for (int a = 0; a < m; ++a) {
            if (a >= 2) continue;
            out.dtheta[static_cast<size_t>(i) * m + a] = re(d1[a].eval(xx, yy));
            for (int b = 0; b < std::min(m, 2); ++b) {
                out.d2theta[(static_cast<size_t>(i) * m + a) * m + b] =
                    re(d1[a].derivative(b).eval(xx, yy));
                for (int c = 0; c < std::min(m, 2); ++c)
                    out.d3theta[((static_cast<size_t>(i) * m + a) * m + b) * m + c] =
                        re(d1[a].derivative(b).derivative(c).eval(xx, yy));
            }
        }
    }
    return out;
}

} // namespace

Chart euclidean_chart(int m) {
    Chart c;
    c.dim = m;
    c.metric_jet = [m](const std::vector<double>&) {
        MetricJet j(m, 4);
        for (int i = 0; i < m; ++i) j.G(i, i) = 1.0;
        return j;
    };
    return c;
}

Chart flat_torus_chart(const std::vector<double>& circumferences) {
    // arc-length coordinates: the metric is the identity.
    return euclidean_chart(static_cast<int>(circumferences.size()));
}

Chart round_sphere_chart(int sphereDim, double radius) {
    DiagonalProductMetric dm;
    dm.m = sphereDim;
    dm.scale.assign(sphereDim, radius * radius);
    dm.factor.assign(sphereDim, std::vector<std::function<std::array<double, 5>(double)>>(
                                    sphereDim, nullptr));
    for (int i = 0; i < sphereDim; ++i)
        for (int j = 0; j < i; ++j) dm.factor[i][j] = sin2_ders;
    Chart c;
    c.dim = sphereDim;
    c.metric_jet = [dm](const std::vector<double>& x) { return dm.jet_at(x); };
    return c;
}

Chart chart_from_json(const std::string& jsonText) {
    json j = json::parse(jsonText);
    if (!j.contains("dim")) throw ConfigError("chart: missing dim");
    const int dim = j.at("dim").get<int>();
    if (dim < 1 || dim > 5) throw ConfigError("chart: dim out of range");

    Chart chart;
    if (!j.contains("metric")) throw ConfigError("chart: missing metric");
    const json& metric = j.at("metric");
    if (metric.is_string()) {
        const std::string name = metric.get<std::string>();
        const double radius = j.value("radius", 1.0);
        if (name == "euclidean") {
            chart = euclidean_chart(dim);
        } else if (name == "round_sphere_2") {
            if (dim != 2) throw ConfigError("chart: round_sphere_2 needs dim 2");
            chart = round_sphere_chart(2, radius);
        } else if (name == "round_sphere_4") {
            if (dim != 4) throw ConfigError("chart: round_sphere_4 needs dim 4");
            chart = round_sphere_chart(4, radius);
        } else if (name == "flat_torus") {
            std::vector<double> circ(dim, 2 * M_PI);
            if (j.contains("circumferences")) circ = j.at("circumferences").get<std::vector<double>>();
            if (static_cast<int>(circ.size()) != dim)
                throw ConfigError("chart: circumference list does not match dim");
            chart = flat_torus_chart(circ);
        } else {
            throw ConfigError("chart: unknown builtin metric '" + name + "'");
        }
    } else if (metric.is_object()) {
        if (dim > 2) throw ConfigError("chart: expression metrics support dim <= 2");
        std::vector<double> circ(dim, 2 * M_PI);
        if (j.contains("circumferences")) circ = j.at("circumferences").get<std::vector<double>>();
        std::array<double, 2> omega{2 * M_PI / circ[0], dim > 1 ? 2 * M_PI / circ[1] : 1.0};
        std::vector<TrigPoly> entries(static_cast<size_t>(dim) * dim,
                                      TrigPoly::zero(dim, omega));
        for (int a = 0; a < dim; ++a)
            for (int b = 0; b < dim; ++b) {
                const std::string key = "g" + std::to_string(a + 1) + std::to_string(b + 1);
                const std::string keyT = "g" + std::to_string(b + 1) + std::to_string(a + 1);
                if (metric.contains(key))
                    entries[static_cast<size_t>(a) * dim + b] =
                        parse_trig(metric.at(key).get<std::string>(), dim, omega);
                else if (metric.contains(keyT))
                    entries[static_cast<size_t>(a) * dim + b] =
                        parse_trig(metric.at(keyT).get<std::string>(), dim, omega);
                else if (a == b)
                    entries[static_cast<size_t>(a) * dim + b] = TrigPoly::constant(dim, 1.0, omega);
            }
        chart.dim = dim;
        chart.metric_jet = [entries, dim](const std::vector<double>& x) {
            MetricJet out(dim, 4);
            const double xx = x.empty() ? 0.0 : x[0];
            const double yy = x.size() > 1 ? x[1] : 0.0;
            for (int a = 0; a < dim; ++a)
                for (int b = 0; b < dim; ++b) {
                    const TrigPoly& p = entries[static_cast<size_t>(a) * dim + b];
                    if (!p.is_real()) throw ConfigError("chart: metric entries must be real");
                    out.G(a, b) = p.eval(xx, yy).real();
                    for (int k = 0; k < dim; ++k) {
                        TrigPoly dk = p.derivative(k);
                        out.D1(a, b, k) = dk.eval(xx, yy).real();
                        for (int l = 0; l < dim; ++l) {
                            TrigPoly dkl = dk.derivative(l);
                            out.D2(a, b, k, l) = dkl.eval(xx, yy).real();
                            for (int pp = 0; pp < dim; ++pp) {
                                TrigPoly d3 = dkl.derivative(pp);
                                out.D3(a, b, k, l, pp) = d3.eval(xx, yy).real();
                                for (int q = 0; q < dim; ++q)
                                    out.D4(a, b, k, l, pp, q) = d3.derivative(q).eval(xx, yy).real();
                            }
                        }
                    }
                }
            return out;
        };
    } else {
        throw ConfigError("chart: metric must be a builtin name or an expression table");
    }

    if (j.contains("theta")) {
        const json& th = j.at("theta");
        std::vector<double> circ(dim, 2 * M_PI);
        if (j.contains("circumferences")) circ = j.at("circumferences").get<std::vector<double>>();
        std::array<double, 2> omega{2 * M_PI / circ[0],
                                    dim > 1 ? 2 * M_PI / circ[1] : 1.0};
        std::vector<TrigPoly> comps(dim, TrigPoly::zero(std::min(dim, 2), omega));
        const char* names[2] = {"x", "y"};
        for (int i = 0; i < std::min(dim, 2); ++i)
            if (th.contains(names[i]))
                comps[i] = parse_trig(th.at(names[i]).get<std::string>(), std::min(dim, 2), omega);
        chart.theta_jet = [comps](const std::vector<double>& x) {
            return theta_jet_from_polys(comps, x);
        };
    }
    return chart;
}

MetricJet fd_metric_jet(const std::function<double(int, int, const std::vector<double>&)>& g,
                        int m, const std::vector<double>& x, double h) {
    MetricJet out(m, 2);
    // 4th-order central stencils.
    const double c1[4] = {-1.0, 8.0, -8.0, 1.0}; // offsets +2h, +h, -h, -2h over 12h
    const double off[4] = {2.0, 1.0, -1.0, -2.0};
    auto at = [&](int i, int j, int axis, double shift, int axis2 = -1, double shift2 = 0.0) {
        std::vector<double> p = x;
        p[axis] += shift * h;
        if (axis2 >= 0) p[axis2] += shift2 * h;
        return g(i, j, p);
    };
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            out.G(i, j) = g(i, j, x);
            for (int k = 0; k < m; ++k) {
                double s = 0;
                for (int t = 0; t < 4; ++t) s += c1[t] * at(i, j, k, off[t]);
                out.D1(i, j, k) = s / (12 * h);
            }
            for (int k = 0; k < m; ++k) {
                // pure second derivative
                double s = -at(i, j, k, 2.0) + 16 * at(i, j, k, 1.0) - 30 * out.G(i, j) +
                           16 * at(i, j, k, -1.0) - at(i, j, k, -2.0);
                out.D2(i, j, k, k) = s / (12 * h * h);
                for (int l = 0; l < k; ++l) {
                    double sm = 0;
                    for (int t1 = 0; t1 < 4; ++t1)
                        for (int t2 = 0; t2 < 4; ++t2)
                            sm += c1[t1] * c1[t2] * at(i, j, k, off[t1], l, off[t2]);
                    const double v = sm / (144 * h * h);
                    out.D2(i, j, k, l) = v;
                    out.D2(i, j, l, k) = v;
                }
            }
        }
    return out;
}

} // namespace heatlab::tensor
