#include "heatlab/spectral.hpp"
#include "heatlab/errors.hpp"
#include "heatlab/sym_eigen.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include <json.hpp>

namespace heatlab::spectral {

using complexes::DegreeBlock;
using complexes::GradedOperatorSet;
using nlohmann::json;

namespace {

// Checks M[p(i)][p(j)] = conj(M[i][j]); such blocks commute with conjugation
// and diagonalize over the real sine/cosine combinations.
bool conjugation_symmetric(const DegreeBlock& b, double tol) {
    if (b.conjPartner.empty()) return false;
    for (int i = 0; i < b.size; ++i)
        if (b.conjPartner[i] < 0) return false;
    std::map<std::pair<int, int>, cplx> entries;
    double scale = 0;
    for (int i = 0; i < b.size; ++i)
        for (const auto& [j, v] : b.laplacian.row[i]) {
            entries[{i, j}] += v;
            scale = std::max(scale, std::abs(v));
        }
    for (const auto& [key, v] : entries) {
        const int pi = b.conjPartner[key.first];
        const int pj = b.conjPartner[key.second];
        auto it = entries.find({pi, pj});
        const cplx mirror = it == entries.end() ? cplx{} : it->second;
        if (std::abs(mirror - std::conj(v)) > tol * std::max(1.0, scale)) return false;
    }
    return true;
}

// Real symmetric form of a conjugation-symmetric block: basis vectors
// (e_k + e_{pk})/sqrt2 and (e_k - e_{pk})/(i sqrt2), self-paired modes as is.
DenseR real_reduction(const DegreeBlock& b) {
    const double inv = 1.0 / std::sqrt(2.0);
    // per complex index: up to 2 (realIndex, coefficient) pairs of U
    std::vector<std::array<std::pair<int, cplx>, 2>> cols(b.size);
    std::vector<int> nCols(b.size, 0);
    int next = 0;
    for (int k = 0; k < b.size; ++k) {
        const int p = b.conjPartner[k];
        if (p == k) {
            cols[k][nCols[k]++] = {next, cplx(1, 0)};
            ++next;
        } else if (k < p) {
            const int c = next++, s = next++;
            cols[k][nCols[k]++] = {c, cplx(inv, 0)};
            cols[k][nCols[k]++] = {s, cplx(0, -inv)}; // 1/(i sqrt2)
            cols[p][nCols[p]++] = {c, cplx(inv, 0)};
            cols[p][nCols[p]++] = {s, cplx(0, inv)};
        }
    }
    DenseR out(b.size, b.size);
    double imagWorst = 0;
    for (int i = 0; i < b.size; ++i)
        for (const auto& [j, v] : b.laplacian.row[i])
            for (int a = 0; a < nCols[i]; ++a)
                for (int c = 0; c < nCols[j]; ++c) {
                    const cplx contrib = std::conj(cols[i][a].second) * v * cols[j][c].second;
                    out(cols[i][a].first, cols[j][c].first) += contrib.real();
                    imagWorst = std::max(imagWorst, std::abs(contrib.imag()));
                }
    // entries appear once per sparse element; imaginary parts cancel pairwise
    // between (i,j) and (pi,pj), so no single-entry check is meaningful here.
    (void)imagWorst;
    return out;
}

void hermiticity_check(const DegreeBlock& b) {
    std::map<std::pair<int, int>, cplx> entries;
    double scale = 0;
    for (int i = 0; i < b.size; ++i)
        for (const auto& [j, v] : b.laplacian.row[i]) {
            entries[{i, j}] += v;
            scale = std::max(scale, std::abs(v));
        }
    for (const auto& [key, v] : entries) {
        auto it = entries.find({key.second, key.first});
        const cplx mirror = it == entries.end() ? cplx{} : it->second;
        if (std::abs(mirror - std::conj(v)) > 1e-8 * std::max(1.0, scale))
            throw NumericalContractError("eigensolve: block '" + b.label +
                                         "' is not Hermitian (residual > 1e-8)");
    }
}

std::vector<double> block_eigenvalues(const DegreeBlock& b) {
    hermiticity_check(b);
    if (b.realBasis) {
        DenseR m(b.size, b.size);
        for (int i = 0; i < b.size; ++i)
            for (const auto& [j, v] : b.laplacian.row[i]) m(i, j) += v.real();
        return sym_eigenvalues(std::move(m));
    }
    if (conjugation_symmetric(b, 1e-12)) return sym_eigenvalues(real_reduction(b));
    return herm_eigenvalues(b.laplacian.dense());
}

} // namespace

SpectrumSet eigensolve(const GradedOperatorSet& ops) {
    SpectrumSet out;
    out.dim = ops.dim;
    out.truncation = ops.truncation;
    std::map<int, DegreeSpectrum> byDegree;
    for (const auto& b : ops.blocks) {
        std::vector<double> eigs = block_eigenvalues(b);
        const double scale = eigs.empty() ? 0.0 : std::max(std::abs(eigs.front()), eigs.back());
        for (double e : eigs)
            if (e < -1e-9 * std::max(1.0, scale))
                throw NumericalContractError("eigensolve: negative eigenvalue beyond roundoff in '" +
                                             b.label + "'");
        DegreeSpectrum& d = byDegree[b.degree];
        if (d.label.empty()) {
            d.degree = b.degree;
            d.label = b.label;
        } else {
            d.label += " + " + b.label;
        }
        d.eigs.insert(d.eigs.end(), eigs.begin(), eigs.end());
        d.totalModes += b.size;
    }
    for (auto& [deg, d] : byDegree) {
        std::sort(d.eigs.begin(), d.eigs.end());
        const size_t idx = static_cast<size_t>(0.6 * (d.eigs.size() - 1));
        d.lambdaMax = d.eigs.empty() ? 0.0 : d.eigs[idx];
        out.degrees.push_back(std::move(d));
    }
    return out;
}

double SpectrumSet::shared_cutoff() const {
    double c = std::numeric_limits<double>::infinity();
    for (const auto& d : degrees) c = std::min(c, d.lambdaMax);
    return c;
}

int SpectrumSet::discarded_above(double cutoff) const {
    int n = 0;
    for (const auto& d : degrees)
        n += static_cast<int>(d.eigs.end() -
                              std::upper_bound(d.eigs.begin(), d.eigs.end(), cutoff));
    return n;
}

double t_min_reliable(const SpectrumSet& spec) {
    const double cutoff = spec.shared_cutoff();
    const int discarded = spec.discarded_above(cutoff);
    if (discarded == 0 || cutoff <= 0) return 0.0;
    // discarded * exp(-t cutoff) < 1e-12
    return (std::log(static_cast<double>(discarded)) + 27.631) / cutoff;
}

namespace {

void check_window(const SpectrumSet& spec, double t) {
    if (t <= 0) throw ConfigError("heat trace: t must be positive");
    const double tmin = t_min_reliable(spec);
    if (t < tmin) {
        std::ostringstream os;
        os << "heat trace: t = " << t << " below reliability window; use t >= " << tmin;
        throw NumericalContractError(os.str());
    }
}

double trace_sum(const DegreeSpectrum& d, double cutoff, double t) {
    double s = 0;
    for (double e : d.eigs) {
        if (e > cutoff) break;
        s += std::exp(-t * e);
    }
    return s;
}

} // namespace

std::vector<double> heat_traces(const SpectrumSet& spec, double t) {
    check_window(spec, t);
    const double cutoff = spec.shared_cutoff();
    std::vector<double> out;
    for (const auto& d : spec.degrees) out.push_back(trace_sum(d, cutoff, t));
    return out;
}

double heat_trace(const SpectrumSet& spec, int degree, double t) {
    check_window(spec, t);
    const double cutoff = spec.shared_cutoff();
    for (const auto& d : spec.degrees)
        if (d.degree == degree) return trace_sum(d, cutoff, t);
    throw ConfigError("heat_trace: no such degree");
}

double supertrace(const SpectrumSet& spec, double t) {
    check_window(spec, t);
    const double cutoff = spec.shared_cutoff();
    double s = 0;
    for (const auto& d : spec.degrees)
        s += ((d.degree % 2) ? -1.0 : 1.0) * trace_sum(d, cutoff, t);
    return s;
}

namespace {

// Scaled-design condition estimate through the normal-equation spectrum.
double design_condition(const DenseR& X, int points, int cols) {
    DenseR xtx(cols, cols);
    for (int a = 0; a < cols; ++a)
        for (int b = 0; b < cols; ++b) {
            double s = 0;
            for (int i = 0; i < points; ++i) s += X(i, a) * X(i, b);
            xtx(a, b) = s;
        }
    const std::vector<double> ev = sym_eigenvalues(std::move(xtx));
    return std::sqrt(ev.back() / std::max(ev.front(), 1e-300));
}

struct LsSolution {
    std::vector<double> coeffs;
    double residual = 0;
};

// Householder QR least squares; X is consumed.
LsSolution qr_least_squares(DenseR X, std::vector<double> rhs, int points, int cols) {
    for (int col = 0; col < cols; ++col) {
        double norm = 0;
        for (int i = col; i < points; ++i) norm += X(i, col) * X(i, col);
        norm = std::sqrt(norm);
        if (X(col, col) > 0) norm = -norm;
        std::vector<double> v(points, 0.0);
        for (int i = col; i < points; ++i) v[i] = X(i, col);
        v[col] -= norm;
        double vv = 0;
        for (int i = col; i < points; ++i) vv += v[i] * v[i];
        if (vv < 1e-300) continue;
        for (int c2 = col; c2 < cols; ++c2) {
            double dot = 0;
            for (int i = col; i < points; ++i) dot += v[i] * X(i, c2);
            const double f = 2 * dot / vv;
            for (int i = col; i < points; ++i) X(i, c2) -= f * v[i];
        }
        double dot = 0;
        for (int i = col; i < points; ++i) dot += v[i] * rhs[i];
        const double f = 2 * dot / vv;
        for (int i = col; i < points; ++i) rhs[i] -= f * v[i];
    }
    LsSolution out;
    out.coeffs.assign(cols, 0.0);
    for (int i = cols - 1; i >= 0; --i) {
        double s = rhs[i];
        for (int j = i + 1; j < cols; ++j) s -= X(i, j) * out.coeffs[j];
        out.coeffs[i] = s / X(i, i);
    }
    double res2 = 0;
    for (int i = cols; i < points; ++i) res2 += rhs[i] * rhs[i];
    out.residual = std::sqrt(std::max(res2, 0.0));
    return out;
}

} // namespace

HeatFit fit_asymptotics(const std::function<double(double)>& fn, int m, int K, double t0,
                        double t1, int points) {
    if (K < 0 || K > 12) throw ConfigError("fit_asymptotics: K out of range");
    if (!(t1 > t0 && t0 > 0)) throw ConfigError("fit_asymptotics: bad t-window");
    HeatFit fit;
    fit.dim = m;
    fit.tGrid.resize(points);
    const double ratio = std::pow(t1 / t0, 1.0 / (points - 1));
    for (int i = 0; i < points; ++i) fit.tGrid[i] = t0 * std::pow(ratio, i);

    std::vector<double> y(points);
    for (int i = 0; i < points; ++i) y[i] = fn(fit.tGrid[i]);

    // Guard columns absorb the first unmodeled orders of the expansion, which
    // otherwise bleed into the reported coefficients; they are dropped from the
    // output. Fall back to fewer guards when the window cannot condition them.
    for (int guard = 3; guard >= 0; --guard) {
        const int cols = K + 1 + guard;
        if (cols > points) continue;
        DenseR X(points, cols);
        for (int i = 0; i < points; ++i)
            for (int n = 0; n < cols; ++n) X(i, n) = std::pow(fit.tGrid[i], 0.5 * (n - m));
        std::vector<double> colScale(cols, 0.0);
        for (int n = 0; n < cols; ++n) {
            for (int i = 0; i < points; ++i)
                colScale[n] = std::max(colScale[n], std::abs(X(i, n)));
            for (int i = 0; i < points; ++i) X(i, n) /= colScale[n];
        }
        const double cond = design_condition(X, points, cols);
        if (cond > 1e10) {
            if (guard > 0) continue;
            std::ostringstream os;
            os << "fit_asymptotics: design matrix condition " << cond
               << " exceeds 1e10; widen the t-grid or lower K";
            throw NumericalContractError(os.str());
        }
        const LsSolution sol = qr_least_squares(std::move(X), y, points, cols);
        fit.powers.resize(K + 1);
        fit.coeffs.resize(K + 1);
        for (int n = 0; n <= K; ++n) {
            fit.powers[n] = 0.5 * (n - m);
            fit.coeffs[n] = sol.coeffs[n] / colScale[n];
        }
        fit.residual = sol.residual;
        return fit;
    }
    throw NumericalContractError("fit_asymptotics: no conditioned design found");
}

HeatFit fit_supertrace(const SpectrumSet& spec, int K, double t0, double t1, int points) {
    HeatFit f = fit_asymptotics([&](double t) { return supertrace(spec, t); }, spec.dim, K, t0,
                                t1, points);
    f.truncationBound = spec.discarded_above(spec.shared_cutoff()) *
                        std::exp(-t0 * spec.shared_cutoff());
    return f;
}

HeatFit fit_degree_trace(const SpectrumSet& spec, int degree, int K, double t0, double t1,
                         int points) {
    HeatFit f = fit_asymptotics([&](double t) { return heat_trace(spec, degree, t); }, spec.dim,
                                K, t0, t1, points);
    f.truncationBound = spec.discarded_above(spec.shared_cutoff()) *
                        std::exp(-t0 * spec.shared_cutoff());
    return f;
}

std::vector<int> betti(const SpectrumSet& spec) {
    const double cutoff = spec.shared_cutoff();
    const double tau = 1e-8 * std::max(1.0, cutoff);
    std::vector<int> out;
    for (const auto& d : spec.degrees) {
        int k = 0;
        for (double e : d.eigs) {
            if (e < tau) {
                ++k;
            } else {
                if (e < 100 * tau) {
                    std::ostringstream os;
                    os << "betti: eigenvalue " << e << " inside the ambiguity band [" << tau
                       << ", " << 100 * tau << ") in degree " << d.degree
                       << "; spectral gap ratio below 100";
                    throw NumericalContractError(os.str());
                }
                break;
            }
        }
        out.push_back(k);
    }
    return out;
}

int index(const SpectrumSet& spec) {
    const std::vector<int> b = betti(spec);
    int s = 0;
    for (size_t i = 0; i < b.size(); ++i)
        s += ((spec.degrees[i].degree % 2) ? -1 : 1) * b[i];
    return s;
}

std::string spectrum_to_json(const SpectrumSet& spec, int maxEigs) {
    json j;
    j["dim"] = spec.dim;
    j["truncation"] = spec.truncation;
    json degs = json::array();
    for (const auto& d : spec.degrees) {
        json e;
        e["degree"] = d.degree;
        e["label"] = d.label;
        e["lambda_max"] = d.lambdaMax;
        e["modes"] = d.totalModes;
        const size_t n =
            maxEigs < 0 ? d.eigs.size() : std::min<size_t>(d.eigs.size(), maxEigs);
        e["eigenvalues"] = std::vector<double>(d.eigs.begin(), d.eigs.begin() + n);
        degs.push_back(std::move(e));
    }
    j["degrees"] = std::move(degs);
    return j.dump(2);
}

std::string heatfit_to_json(const HeatFit& fit) {
    json j;
    j["dim"] = fit.dim;
    j["powers"] = fit.powers;
    j["coefficients"] = fit.coeffs;
    j["residual"] = fit.residual;
    j["t_grid"] = fit.tGrid;
    j["truncation_error_bound"] = fit.truncationBound;
    return j.dump(2);
}

std::string trace_curve_csv(const SpectrumSet& spec, const std::vector<double>& ts) {
    std::ostringstream os;
    os.precision(17);
    os << "t";
    for (const auto& d : spec.degrees) os << ",trace_p" << d.degree;
    os << ",supertrace\n";
    for (double t : ts) {
        const std::vector<double> tr = heat_traces(spec, t);
        os << t;
        double super = 0;
        for (size_t i = 0; i < tr.size(); ++i) {
            os << "," << tr[i];
            super += ((spec.degrees[i].degree % 2) ? -1.0 : 1.0) * tr[i];
        }
        os << "," << super << "\n";
    }
    return os.str();
}

} // namespace heatlab::spectral
