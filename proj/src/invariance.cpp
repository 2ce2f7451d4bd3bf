#include "heatlab/invariance.hpp"
#include "heatlab/errors.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <sstream>

#include <json.hpp>

namespace heatlab::invariance {

using nlohmann::json;

int JetVariable::order() const {
    const int a = std::accumulate(alpha.begin(), alpha.end(), 0);
    return kind == Kind::Metric ? a : a + 1;
}

int JetVariable::deg(int mu) const {
    int d = alpha[mu];
    if (i == mu) ++d;
    if (kind == Kind::Metric && j == mu) ++d;
    return d;
}

bool JetVariable::is_second_fundamental() const {
    if (!boundary || kind != Kind::Metric) return false;
    const int normal = m - 1;
    if (alpha[normal] != 1) return false;
    return order() == 1;
}

std::string JetVariable::display() const {
    std::ostringstream os;
    os << (kind == Kind::Metric ? "g(" : "th(");
    os << i + 1;
    if (kind == Kind::Metric) os << "," << j + 1;
    os << "|";
    bool first = true;
    for (int mu = 0; mu < m; ++mu)
        for (int c = 0; c < alpha[mu]; ++c) {
            if (!first) os << " ";
            os << mu + 1;
            first = false;
        }
    os << ")";
    return os.str();
}

int JetMonomial::order() const {
    int o = 0;
    for (const auto& v : vars) o += v.order();
    return o;
}

int JetMonomial::deg(int mu) const {
    int d = 0;
    for (const auto& v : vars) d += v.deg(mu);
    return d;
}

bool JetMonomial::theta_free() const {
    for (const auto& v : vars)
        if (v.kind == JetVariable::Kind::OneForm) return false;
    return true;
}

std::string JetMonomial::display() const {
    if (vars.empty()) return "1";
    std::ostringstream os;
    for (size_t q = 0; q < vars.size(); ++q) {
        if (q) os << " ";
        os << vars[q].display();
    }
    return os.str();
}

namespace {

void check_budget(int m, int n) {
    if (m < 1 || m > 5 || n < 0 || n > 6)
        throw ConfigError("jet enumeration budget exceeded (m <= 5, n <= 6)");
}

// All multi-indices over m coordinates with |alpha| = w, lexicographic.
void multi_indices(int m, int w, std::vector<std::vector<int>>& out) {
    std::vector<int> cur(m, 0);
    struct Rec {
        int m, w;
        std::vector<int>& cur;
        std::vector<std::vector<int>>& out;
        void go(int pos, int left) {
            if (pos == m - 1) {
                cur[pos] = left;
                out.push_back(cur);
                return;
            }
            for (int c = left; c >= 0; --c) {
                cur[pos] = c;
                go(pos + 1, left - c);
            }
        }
    } rec{m, w, cur, out};
    rec.go(0, w);
}

// Canonical variable pool of each exact order 1..n for the given context.
std::vector<JetVariable> variable_pool(int m, int maxOrder, bool withTheta, bool boundary) {
    std::vector<JetVariable> pool;
    const int normal = m - 1;
    const int tangential = boundary ? m - 1 : m;

    for (int w = 1; w <= maxOrder; ++w) {
        // metric variables of order w
        std::vector<std::vector<int>> alphas;
        multi_indices(m, w, alphas);
        const int pairRange = boundary ? tangential : m;
        for (int i = 0; i < pairRange; ++i)
            for (int j = i; j < pairRange; ++j)
                for (const auto& a : alphas) {
                    if (w == 1) {
                        // only the second fundamental form survives the
                        // boundary normalization at order 1
                        if (!(boundary && a[normal] == 1)) continue;
                    }
                    JetVariable v;
                    v.kind = JetVariable::Kind::Metric;
                    v.i = i;
                    v.j = j;
                    v.alpha = a;
                    v.m = m;
                    v.boundary = boundary;
                    pool.push_back(std::move(v));
                }
        if (withTheta) {
            // 1-form variables of order w have |beta| = w - 1
            std::vector<std::vector<int>> betas;
            multi_indices(m, w - 1, betas);
            for (int i = 0; i < m; ++i)
                for (const auto& b : betas) {
                    JetVariable v;
                    v.kind = JetVariable::Kind::OneForm;
                    v.i = i;
                    v.j = 0;
                    v.alpha = b;
                    v.m = m;
                    v.boundary = boundary;
                    pool.push_back(std::move(v));
                }
        }
    }
    std::sort(pool.begin(), pool.end());
    return pool;
}

void pick_multisets(const std::vector<JetVariable>& pool, int startIdx, int left,
                    std::vector<JetVariable>& cur, std::vector<JetMonomial>& out, int m,
                    bool boundary) {
    if (left == 0) {
        JetMonomial mono;
        mono.m = m;
        mono.boundary = boundary;
        mono.vars = cur;
        out.push_back(std::move(mono));
        return;
    }
    for (size_t q = startIdx; q < pool.size(); ++q) {
        const int w = pool[q].order();
        if (w > left) continue;
        cur.push_back(pool[q]);
        pick_multisets(pool, static_cast<int>(q), left - w, cur, out, m, boundary);
        cur.pop_back();
    }
}

} // namespace

std::vector<JetMonomial> enumerate_monomials(int m, int n, bool withTheta, bool boundary) {
    check_budget(m, n);
    std::vector<JetMonomial> out;
    if (n == 0) {
        JetMonomial empty;
        empty.m = m;
        empty.boundary = boundary;
        out.push_back(empty);
        return out;
    }
    const std::vector<JetVariable> pool = variable_pool(m, n, withTheta, boundary);
    std::vector<JetVariable> cur;
    pick_multisets(pool, 0, n, cur, out, m, boundary);
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<JetMonomial> enumerate_monomials_bruteforce(int m, int n, bool withTheta,
                                                        bool boundary) {
    check_budget(m, n);
    std::set<JetMonomial> set;
    if (n == 0) {
        JetMonomial empty;
        empty.m = m;
        empty.boundary = boundary;
        set.insert(empty);
    }

    // Raw variables: unordered index pairs and derivative sequences, then
    // canonicalized. Deliberately redundant generation.
    std::vector<JetVariable> raw;
    const int normal = m - 1;
    const int pairRange = boundary ? m - 1 : m;
    for (int w = 1; w <= n; ++w) {
        // derivative sequences of length w over m coordinates
        std::vector<std::vector<int>> seqs;
        std::vector<int> cur(w, 0);
        while (true) {
            seqs.push_back(cur);
            int pos = w - 1;
            while (pos >= 0 && ++cur[pos] == m) cur[pos--] = 0;
            if (pos < 0) break;
        }
        for (int i = 0; i < pairRange; ++i)
            for (int j = 0; j < pairRange; ++j)
                for (const auto& s : seqs) {
                    std::vector<int> alpha(m, 0);
                    for (int c : s) alpha[c]++;
                    if (w == 1 && !(boundary && alpha[normal] == 1)) continue;
                    JetVariable v;
                    v.kind = JetVariable::Kind::Metric;
                    v.i = std::min(i, j);
                    v.j = std::max(i, j);
                    v.alpha = alpha;
                    v.m = m;
                    v.boundary = boundary;
                    raw.push_back(std::move(v));
                }
        if (withTheta && w >= 1) {
            std::vector<std::vector<int>> seqsB;
            if (w - 1 == 0) {
                seqsB.push_back({});
            } else {
                std::vector<int> cb(w - 1, 0);
                while (true) {
                    seqsB.push_back(cb);
                    int pos = w - 2;
                    while (pos >= 0 && ++cb[pos] == m) cb[pos--] = 0;
                    if (pos < 0) break;
                }
            }
            for (int i = 0; i < m; ++i)
                for (const auto& s : seqsB) {
                    std::vector<int> beta(m, 0);
                    for (int c : s) beta[c]++;
                    JetVariable v;
                    v.kind = JetVariable::Kind::OneForm;
                    v.i = i;
                    v.j = 0;
                    v.alpha = beta;
                    v.m = m;
                    v.boundary = boundary;
                    raw.push_back(std::move(v));
                }
        }
    }
    std::sort(raw.begin(), raw.end());
    raw.erase(std::unique(raw.begin(), raw.end()), raw.end());

    // multisets by exhaustive recursion with set-canonicalization
    struct Rec {
        const std::vector<JetVariable>& raw;
        int m, n;
        bool boundary;
        std::set<JetMonomial>& set;
        std::vector<JetVariable> cur;
        void go(size_t start, int left) {
            if (left == 0) {
                JetMonomial mono;
                mono.m = m;
                mono.boundary = boundary;
                mono.vars = cur;
                std::sort(mono.vars.begin(), mono.vars.end());
                set.insert(std::move(mono));
                return;
            }
            for (size_t q = start; q < raw.size(); ++q) {
                if (raw[q].order() > left) continue;
                cur.push_back(raw[q]);
                go(q, left - raw[q].order());
                cur.pop_back();
            }
        }
    } rec{raw, m, n, boundary, set, {}};
    if (n > 0) rec.go(0, n);

    return std::vector<JetMonomial>(set.begin(), set.end());
}

RestrictionResult restriction(const JetMonomial& mono) {
    RestrictionResult out;
    const int m = mono.m;
    if (!mono.boundary) {
        const int last = m - 1;
        if (mono.deg(last) > 0) return out; // zero
        out.zero = false;
        out.image.m = m - 1;
        out.image.boundary = false;
        for (const auto& v : mono.vars) {
            JetVariable w = v;
            w.m = m - 1;
            w.alpha.pop_back();
            w.boundary = false;
            out.image.vars.push_back(std::move(w));
        }
        std::sort(out.image.vars.begin(), out.image.vars.end());
        return out;
    }
    // boundary: kill anything touching the first tangential coordinate, then
    // shift tangential indices down; the normal slot stays last.
    if (mono.deg(0) > 0) return out;
    out.zero = false;
    out.image.m = m - 1;
    out.image.boundary = true;
    for (const auto& v : mono.vars) {
        JetVariable w;
        w.kind = v.kind;
        w.m = m - 1;
        w.boundary = true;
        w.i = (v.i == m - 1) ? m - 2 : v.i - 1;
        w.j = (v.kind == JetVariable::Kind::Metric) ? ((v.j == m - 1) ? m - 2 : v.j - 1) : 0;
        w.alpha.assign(m - 1, 0);
        for (int mu = 1; mu < m - 1; ++mu) w.alpha[mu - 1] = v.alpha[mu];
        w.alpha[m - 2] = v.alpha[m - 1];
        if (w.kind == JetVariable::Kind::Metric && w.i > w.j) std::swap(w.i, w.j);
        out.image.vars.push_back(std::move(w));
    }
    std::sort(out.image.vars.begin(), out.image.vars.end());
    return out;
}

ScanResult kernel_scan(int m, int n, bool withTheta, bool boundary) {
    check_budget(m, n);
    ScanResult scan;
    scan.m = m;
    scan.n = n;
    scan.withTheta = withTheta;
    scan.boundary = boundary;

    const int scanned = boundary ? m - 1 : m;
    for (const JetMonomial& mono : enumerate_monomials(m, n, withTheta, boundary)) {
        ScanEntry e;
        e.mono = mono;
        e.survives = true;
        for (int mu = 0; mu < scanned && e.survives; ++mu) {
            const int d = mono.deg(mu);
            if (d == 0) {
                e.survives = false;
                std::ostringstream os;
                os << "coordinate " << mu + 1 << " untouched (restriction after permutation)";
                e.eliminatedBy = os.str();
            } else if (d % 2 == 1) {
                e.survives = false;
                std::ostringstream os;
                os << "odd degree in coordinate " << mu + 1 << " (reflection parity)";
                e.eliminatedBy = os.str();
            }
        }
        for (int mu = 0; mu < scanned; ++mu) e.degSum += mono.deg(mu);
        // equality case of 2*scanned <= sum deg <= 2*order
        e.tight = e.survives && e.degSum == 2 * scanned && e.degSum == 2 * mono.order();
        scan.entries.push_back(std::move(e));
    }
    return scan;
}

std::vector<JetMonomial> ScanResult::survivors() const {
    std::vector<JetMonomial> out;
    for (const auto& e : entries)
        if (e.survives) out.push_back(e.mono);
    return out;
}

std::string scan_to_json(const ScanResult& scan) {
    json j;
    j["m"] = scan.m;
    j["n"] = scan.n;
    j["with_theta"] = scan.withTheta;
    j["boundary"] = scan.boundary;
    json rows = json::array();
    int nSurv = 0;
    for (const auto& e : scan.entries) {
        json r;
        r["monomial"] = e.mono.display();
        r["order"] = e.mono.order();
        std::vector<int> degs;
        for (int mu = 0; mu < scan.m; ++mu) degs.push_back(e.mono.deg(mu));
        r["deg"] = degs;
        r["survives"] = e.survives;
        if (!e.survives) r["eliminated_by"] = e.eliminatedBy;
        if (e.survives) {
            r["tight"] = e.tight;
            ++nSurv;
        }
        rows.push_back(std::move(r));
    }
    j["monomials"] = std::move(rows);
    json survivors = json::array();
    for (const auto& e : scan.entries)
        if (e.survives) survivors.push_back(e.mono.display());
    j["survivors"] = std::move(survivors);
    j["survivor_count"] = nSurv;
    j["note"] = "degree filters act monomial-wise; survivors bound the restriction kernel "
                "from above, and the tightness report shows when the order inequality pins "
                "them down exactly";
    return j.dump(2);
}

} // namespace heatlab::invariance
