#include "heatlab/complexes.hpp"
#include "heatlab/errors.hpp"

#include <cmath>
#include <fstream>

#include <json.hpp>

namespace heatlab::complexes {

using models::ModelKind;
using models::ModelManifold;
using models::TwistForm;
using nlohmann::json;

int GradedOperatorSet::max_degree() const {
    int d = 0;
    for (const auto& b : blocks) d = std::max(d, b.degree);
    return d;
}

namespace {

// Frequency-space building blocks on one circle axis: derivative + twist
// convolution, truncated to |n| <= N.
struct CircleModes {
    int N = 0;
    int count() const { return 2 * N + 1; }
    int id(int n) const { return n + N; }
};

// d/dx + multiplication by theta on the 1d mode space.
SparseC shift_operator_1d(const CircleModes& modes, double kappa, const TrigPoly& theta) {
    SparseC D(modes.count(), modes.count());
    for (int n = -modes.N; n <= modes.N; ++n) {
        D.add(modes.id(n), modes.id(n), cplx(0, kappa * n));
        for (const auto& [q, c] : theta.coef) {
            const int k = n + q[0];
            if (std::abs(k) <= modes.N) D.add(modes.id(k), modes.id(n), c);
        }
    }
    return D;
}

struct TorusModes {
    int N = 0;
    int count() const { return (2 * N + 1) * (2 * N + 1); }
    int id(int n, int m) const { return (n + N) * (2 * N + 1) + (m + N); }
};

// axis-derivative (scaled by i kappa freq) plus 2d twist convolution
SparseC shift_operator_2d(const TorusModes& modes, int axis, double kappa,
                          const TrigPoly& theta, cplx derivCoef = cplx(0, 1),
                          cplx convCoef = cplx(1, 0)) {
    SparseC D(modes.count(), modes.count());
    for (int n = -modes.N; n <= modes.N; ++n)
        for (int m = -modes.N; m <= modes.N; ++m) {
            const int col = modes.id(n, m);
            const int freq = axis == 0 ? n : m;
            D.add(col, col, derivCoef * (kappa * freq));
            for (const auto& [q, c] : theta.coef) {
                const int nn = n + q[0], mm = m + q[1];
                if (std::abs(nn) <= modes.N && std::abs(mm) <= modes.N)
                    D.add(modes.id(nn, mm), col, convCoef * c);
            }
        }
    return D;
}

std::vector<int> circle_partners(const CircleModes& modes) {
    std::vector<int> p(modes.count());
    for (int n = -modes.N; n <= modes.N; ++n) p[modes.id(n)] = modes.id(-n);
    return p;
}

std::vector<int> circle_norms(const CircleModes& modes) {
    std::vector<int> v(modes.count());
    for (int n = -modes.N; n <= modes.N; ++n) v[modes.id(n)] = std::abs(n);
    return v;
}

std::vector<int> torus_partners(const TorusModes& modes) {
    std::vector<int> p(modes.count());
    for (int n = -modes.N; n <= modes.N; ++n)
        for (int m = -modes.N; m <= modes.N; ++m) p[modes.id(n, m)] = modes.id(-n, -m);
    return p;
}

std::vector<int> torus_norms(const TorusModes& modes) {
    std::vector<int> v(modes.count());
    for (int n = -modes.N; n <= modes.N; ++n)
        for (int m = -modes.N; m <= modes.N; ++m)
            v[modes.id(n, m)] = std::max(std::abs(n), std::abs(m));
    return v;
}

std::vector<int> stacked(const std::vector<int>& a, const std::vector<int>& b, int offsetForPartners) {
    std::vector<int> out = a;
    out.reserve(a.size() + b.size());
    for (int x : b) out.push_back(x >= 0 ? x + offsetForPartners : x);
    return out;
}

} // namespace

GradedOperatorSet assemble_circle(const ModelManifold& model, const TwistForm& theta, int N) {
    if (model.kind != ModelKind::Circle) throw ConfigError("assemble_circle: model is not a circle");
    if (theta.dim != 1) throw ConfigError("assemble_circle: twist dimension mismatch");
    if (theta.bandwidth() > N)
        throw ConfigError("assemble_circle: truncation below twist bandwidth (aliasing)");
    const double kappa = 2 * M_PI / model.circumferences[0];

    CircleModes modes{N};
    const SparseC D = shift_operator_1d(modes, kappa, theta.comp[0]);
    const SparseC Dh = sp_adjoint(D);

    GradedOperatorSet ops;
    ops.dim = 1;
    ops.truncation = N;
    ops.twistBandwidth = theta.bandwidth();

    DegreeBlock b0;
    b0.degree = 0;
    b0.label = "functions";
    b0.size = modes.count();
    b0.laplacian = sp_mul(Dh, D);
    b0.conjPartner = circle_partners(modes);
    b0.modeNorm = circle_norms(modes);

    DegreeBlock b1;
    b1.degree = 1;
    b1.label = "1-forms";
    b1.size = modes.count();
    b1.laplacian = sp_mul(D, Dh);
    b1.conjPartner = b0.conjPartner;
    b1.modeNorm = b0.modeNorm;

    ops.blocks = {std::move(b0), std::move(b1)};
    ops.chains.push_back({0, 1, D});
    return ops;
}

GradedOperatorSet assemble_torus(const ModelManifold& model, const TwistForm& theta, int N) {
    if (model.dim != 2 || model.circumferences.size() != 2)
        throw ConfigError("assemble_torus: model is not a 2-torus");
    if (theta.dim != 2) throw ConfigError("assemble_torus: twist dimension mismatch");
    if (!theta.verify_closed())
        throw ConfigError("assemble_torus: twist is not closed (d_Theta^2 != 0)");
    if (theta.bandwidth() > N)
        throw ConfigError("assemble_torus: truncation below twist bandwidth (aliasing)");

    TorusModes modes{N};
    const double k1 = 2 * M_PI / model.circumferences[0];
    const double k2 = 2 * M_PI / model.circumferences[1];
    const SparseC Dx = shift_operator_2d(modes, 0, k1, theta.comp[0]);
    const SparseC Dy = shift_operator_2d(modes, 1, k2, theta.comp[1]);

    const SparseC d0 = sp_vstack(Dx, Dy);
    const SparseC d1 = sp_hstack(sp_scale(cplx(-1, 0), Dy), Dx);
    const SparseC d0h = sp_adjoint(d0);
    const SparseC d1h = sp_adjoint(d1);

    GradedOperatorSet ops;
    ops.dim = 2;
    ops.truncation = N;
    ops.twistBandwidth = theta.bandwidth();

    const auto partners = torus_partners(modes);
    const auto norms = torus_norms(modes);

    DegreeBlock b0;
    b0.degree = 0;
    b0.label = "functions";
    b0.size = modes.count();
    b0.laplacian = sp_mul(d0h, d0);
    b0.conjPartner = partners;
    b0.modeNorm = norms;

    DegreeBlock b1;
    b1.degree = 1;
    b1.label = "1-forms(dx,dy)";
    b1.size = 2 * modes.count();
    b1.laplacian = sp_add(sp_mul(d0, d0h), sp_mul(d1h, d1));
    b1.conjPartner = stacked(partners, partners, modes.count());
    b1.modeNorm = stacked(norms, norms, 0);

    DegreeBlock b2;
    b2.degree = 2;
    b2.label = "2-forms";
    b2.size = modes.count();
    b2.laplacian = sp_mul(d1, d1h);
    b2.conjPartner = partners;
    b2.modeNorm = norms;

    ops.blocks = {std::move(b0), std::move(b1), std::move(b2)};
    ops.chains.push_back({0, 1, d0});
    ops.chains.push_back({1, 2, d1});
    return ops;
}

GradedOperatorSet assemble_interval(const ModelManifold& model, BoundaryFlavor bc, int N) {
    if (model.kind != ModelKind::Interval)
        throw ConfigError("assemble_interval: model is not an interval");
    const double L = model.length;
    const double k = M_PI / L;

    // Relative: Dirichlet functions (sin, n >= 1), Neumann 1-forms (cos, n >= 0).
    // Absolute swaps the pattern. Twisted intervals are out of scope.
    SparseC D;
    int size0, size1;
    if (bc == BoundaryFlavor::Relative) {
        size0 = N;
        size1 = N + 1;
        D = SparseC(size1, size0);
        for (int n = 1; n <= N; ++n) D.add(n, n - 1, cplx(n * k, 0));
    } else {
        size0 = N + 1;
        size1 = N;
        D = SparseC(size1, size0);
        for (int n = 1; n <= N; ++n) D.add(n - 1, n, cplx(-n * k, 0));
    }
    const SparseC Dh = sp_adjoint(D);

    GradedOperatorSet ops;
    ops.dim = 1;
    ops.truncation = N;

    DegreeBlock b0;
    b0.degree = 0;
    b0.label = bc == BoundaryFlavor::Relative ? "functions(DIR)" : "functions(NEU)";
    b0.size = size0;
    b0.laplacian = sp_mul(Dh, D);
    b0.conjPartner.assign(size0, -1);
    b0.modeNorm.resize(size0);
    for (int i = 0; i < size0; ++i) b0.modeNorm[i] = bc == BoundaryFlavor::Relative ? i + 1 : i;
    b0.realBasis = true;

    DegreeBlock b1;
    b1.degree = 1;
    b1.label = bc == BoundaryFlavor::Relative ? "1-forms(NEU)" : "1-forms(DIR)";
    b1.size = size1;
    b1.laplacian = sp_mul(D, Dh);
    b1.conjPartner.assign(size1, -1);
    b1.modeNorm.resize(size1);
    for (int i = 0; i < size1; ++i) b1.modeNorm[i] = bc == BoundaryFlavor::Relative ? i : i + 1;
    b1.realBasis = true;

    ops.blocks = {std::move(b0), std::move(b1)};
    ops.chains.push_back({0, 1, D});
    return ops;
}

GradedOperatorSet assemble_dolbeault_torus(const TrigPoly& theta, int N) {
    if (theta.bandwidth() > N)
        throw ConfigError("assemble_dolbeault_torus: truncation below twist bandwidth");
    TorusModes modes{N};
    // A = 2(d_zbar + theta); d_zbar e_{n,m} = i pi (n + i m) e_{n,m} on unit periods.
    SparseC A(modes.count(), modes.count());
    for (int n = -N; n <= N; ++n)
        for (int m = -N; m <= N; ++m) {
            const int col = modes.id(n, m);
            A.add(col, col, cplx(0, 2 * M_PI) * cplx(n, m));
            for (const auto& [q, c] : theta.coef) {
                const int nn = n + q[0], mm = m + q[1];
                if (std::abs(nn) <= N && std::abs(mm) <= N)
                    A.add(modes.id(nn, mm), col, 2.0 * c);
            }
        }
    const SparseC Ah = sp_adjoint(A);

    GradedOperatorSet ops;
    ops.dim = 2;
    ops.truncation = N;
    ops.twistBandwidth = theta.bandwidth();

    DegreeBlock b0;
    b0.degree = 0;
    b0.label = "(0,0)";
    b0.size = modes.count();
    b0.laplacian = sp_mul(Ah, A);
    b0.conjPartner.assign(b0.size, -1); // complex twists break the pairing in general
    b0.modeNorm = torus_norms(modes);

    DegreeBlock b1;
    b1.degree = 1;
    b1.label = "(0,1)";
    b1.size = modes.count();
    b1.laplacian = sp_mul(A, Ah);
    b1.conjPartner.assign(b1.size, -1);
    b1.modeNorm = b0.modeNorm;

    ops.blocks = {std::move(b0), std::move(b1)};
    ops.chains.push_back({0, 1, A});
    return ops;
}

namespace {

SparseC sp_kron(const SparseC& a, const SparseC& b) {
    SparseC z(a.rows * b.rows, a.cols * b.cols);
    for (int ia = 0; ia < a.rows; ++ia)
        for (const auto& [ja, va] : a.row[ia])
            for (int ib = 0; ib < b.rows; ++ib)
                for (const auto& [jb, vb] : b.row[ib])
                    z.row[ia * b.rows + ib].emplace_back(ja * b.cols + jb, va * vb);
    return z;
}

SparseC sp_identity(int n) {
    SparseC z(n, n);
    for (int i = 0; i < n; ++i) z.row[i].emplace_back(i, cplx(1, 0));
    return z;
}

} // namespace

GradedOperatorSet product_complex(const GradedOperatorSet& a, const GradedOperatorSet& b,
                                  int sizeCap) {
    GradedOperatorSet ops;
    ops.dim = a.dim + b.dim;
    ops.truncation = std::min(a.truncation, b.truncation);
    ops.twistBandwidth = std::max(a.twistBandwidth, b.twistBandwidth);

    std::vector<std::pair<int, int>> blockIndex; // (ia, ib) per product block
    for (size_t ia = 0; ia < a.blocks.size(); ++ia)
        for (size_t ib = 0; ib < b.blocks.size(); ++ib) {
            const auto& ba = a.blocks[ia];
            const auto& bb = b.blocks[ib];
            const long size = static_cast<long>(ba.size) * bb.size;
            if (size > sizeCap)
                throw UnsupportedError("product_complex: truncated product size cap exceeded");
            DegreeBlock nb;
            nb.degree = ba.degree + bb.degree;
            nb.label = ba.label + " x " + bb.label;
            nb.size = static_cast<int>(size);
            nb.laplacian = sp_add(sp_kron(ba.laplacian, sp_identity(bb.size)),
                                  sp_kron(sp_identity(ba.size), bb.laplacian));
            nb.realBasis = ba.realBasis && bb.realBasis;
            nb.conjPartner.resize(nb.size);
            nb.modeNorm.resize(nb.size);
            for (int qa = 0; qa < ba.size; ++qa)
                for (int qb = 0; qb < bb.size; ++qb) {
                    const int q = qa * bb.size + qb;
                    const int pa = ba.conjPartner[qa], pb = bb.conjPartner[qb];
                    nb.conjPartner[q] = (pa >= 0 && pb >= 0) ? pa * bb.size + pb : -1;
                    nb.modeNorm[q] = std::max(ba.modeNorm[qa], bb.modeNorm[qb]);
                }
            blockIndex.emplace_back(static_cast<int>(ia), static_cast<int>(ib));
            ops.blocks.push_back(std::move(nb));
        }

    auto productBlock = [&](int ia, int ib) {
        for (size_t q = 0; q < blockIndex.size(); ++q)
            if (blockIndex[q].first == ia && blockIndex[q].second == ib)
                return static_cast<int>(q);
        return -1;
    };

    // alpha = alpha_1 x id + (-1)^p id x alpha_2 blockwise
    for (const auto& ca : a.chains)
        for (size_t ib = 0; ib < b.blocks.size(); ++ib) {
            const int from = productBlock(ca.fromBlock, static_cast<int>(ib));
            const int to = productBlock(ca.toBlock, static_cast<int>(ib));
            if (from < 0 || to < 0) continue;
            ops.chains.push_back({from, to, sp_kron(ca.d, sp_identity(b.blocks[ib].size))});
        }
    for (size_t ia = 0; ia < a.blocks.size(); ++ia)
        for (const auto& cb : b.chains) {
            const int from = productBlock(static_cast<int>(ia), cb.fromBlock);
            const int to = productBlock(static_cast<int>(ia), cb.toBlock);
            if (from < 0 || to < 0) continue;
            const double sign = (a.blocks[ia].degree % 2) ? -1.0 : 1.0;
            ops.chains.push_back(
                {from, to, sp_kron(sp_identity(a.blocks[ia].size), sp_scale(sign, cb.d))});
        }
    return ops;
}

SparseC delta_of(const ChainMap& chain) { return sp_adjoint(chain.d); }

double chain_residual(const GradedOperatorSet& ops) {
    const int margin = ops.truncation - 2 * ops.twistBandwidth;
    double worst = 0;
    for (const auto& c1 : ops.chains)
        for (const auto& c2 : ops.chains) {
            if (c2.fromBlock != c1.toBlock) continue;
            const SparseC dd = sp_mul(c2.d, c1.d);
            const auto& srcNorm = ops.blocks[c1.fromBlock].modeNorm;
            for (int i = 0; i < dd.rows; ++i)
                for (const auto& [j, v] : dd.row[i])
                    if (srcNorm[j] <= margin) worst = std::max(worst, std::abs(v));
        }
    return worst;
}

void export_bundle(const GradedOperatorSet& ops, const std::string& path) {
    json header;
    header["format"] = "heatlab-operator-bundle-v1";
    header["dim"] = ops.dim;
    header["truncation"] = ops.truncation;
    header["twist_bandwidth"] = ops.twistBandwidth;
    header["layout"] = "dense column-major complex128 per block";
    json jb = json::array();
    for (const auto& b : ops.blocks)
        jb.push_back({{"degree", b.degree}, {"label", b.label}, {"size", b.size}});
    header["blocks"] = jb;
    json jc = json::array();
    for (const auto& c : ops.chains) jc.push_back({{"from", c.fromBlock}, {"to", c.toBlock}});
    header["chains"] = jc;

    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("export_bundle: cannot open " + path);
    out << header.dump() << "\n";
    auto writeDense = [&](const SparseC& sp) {
        const DenseC d = sp.dense();
        std::vector<double> col(static_cast<size_t>(d.rows) * d.cols * 2);
        size_t q = 0;
        for (int j = 0; j < d.cols; ++j)
            for (int i = 0; i < d.rows; ++i) {
                col[q++] = d(i, j).real();
                col[q++] = d(i, j).imag();
            }
        out.write(reinterpret_cast<const char*>(col.data()),
                  static_cast<std::streamsize>(col.size() * sizeof(double)));
    };
    for (const auto& b : ops.blocks) writeDense(b.laplacian);
    for (const auto& c : ops.chains) writeDense(c.d);
}

GradedOperatorSet import_bundle(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("import_bundle: cannot open " + path);
    std::string headerLine;
    std::getline(in, headerLine);
    json header = json::parse(headerLine);
    GradedOperatorSet ops;
    ops.dim = header.at("dim").get<int>();
    ops.truncation = header.at("truncation").get<int>();
    ops.twistBandwidth = header.value("twist_bandwidth", 0);

    auto readDense = [&](int rows, int cols) {
        std::vector<double> buf(static_cast<size_t>(rows) * cols * 2);
        in.read(reinterpret_cast<char*>(buf.data()),
                static_cast<std::streamsize>(buf.size() * sizeof(double)));
        SparseC sp(rows, cols);
        size_t q = 0;
        for (int j = 0; j < cols; ++j)
            for (int i = 0; i < rows; ++i) {
                const cplx v(buf[q], buf[q + 1]);
                q += 2;
                if (v != cplx{}) sp.row[i].emplace_back(j, v);
            }
        return sp;
    };

    std::vector<std::pair<int, int>> chainShapes;
    for (const auto& jb : header.at("blocks")) {
        DegreeBlock b;
        b.degree = jb.at("degree").get<int>();
        b.label = jb.at("label").get<std::string>();
        b.size = jb.at("size").get<int>();
        b.conjPartner.assign(b.size, -1);
        b.modeNorm.assign(b.size, 0);
        ops.blocks.push_back(std::move(b));
    }
    for (auto& b : ops.blocks) b.laplacian = readDense(b.size, b.size);
    for (const auto& jc : header.at("chains")) {
        ChainMap c;
        c.fromBlock = jc.at("from").get<int>();
        c.toBlock = jc.at("to").get<int>();
        c.d = readDense(ops.blocks[c.toBlock].size, ops.blocks[c.fromBlock].size);
        ops.chains.push_back(std::move(c));
    }
    return ops;
}

} // namespace heatlab::complexes
