#pragma once
#include <string>
#include <vector>

namespace heatlab::invariance {

// Formal jet variable: a metric derivative g_{ij/alpha} or a 1-form derivative
// Theta_{i/beta}. Indices are 0-based internally; in boundary context the last
// coordinate is the inward normal and index pairs (i, j) are tangential.
// Canonical form keeps i <= j for metric variables.
//
// Normalizations baked into the generators: g_ij = delta_ij and g_{ij/k} = 0 at
// the point, so interior metric variables need |alpha| >= 2; on the boundary
// the only order-1 metric variables are the second-fundamental-form components
// g_{ab/normal}.
struct JetVariable {
    enum class Kind { Metric, OneForm };
    Kind kind = Kind::Metric;
    int i = 0, j = 0;       // j unused for OneForm
    std::vector<int> alpha; // per-coordinate derivative counts, size m
    int m = 0;
    bool boundary = false;

    int order() const;
    int deg(int mu) const;
    bool is_second_fundamental() const; // boundary metric variable with alpha = e_normal
    std::string display() const;

    friend auto operator<=>(const JetVariable&, const JetVariable&) = default;
};

struct JetMonomial {
    int m = 0;
    bool boundary = false;
    std::vector<JetVariable> vars; // sorted

    int order() const;
    int deg(int mu) const;
    bool theta_free() const;
    std::string display() const;

    friend auto operator<=>(const JetMonomial&, const JetMonomial&) = default;
};

// Complete duplicate-free enumeration of canonical monomials of exact total
// order n. Budget: n <= 6, m <= 5.
std::vector<JetMonomial> enumerate_monomials(int m, int n, bool withTheta, bool boundary);

// Independent generator: raw index assignments canonicalized and de-duplicated.
// Kept separate from the optimized enumerator as its completeness oracle.
std::vector<JetMonomial> enumerate_monomials_bruteforce(int m, int n, bool withTheta,
                                                        bool boundary);

struct RestrictionResult {
    bool zero = true;
    JetMonomial image;
};

// Interior: zero iff any variable touches the last coordinate, else the same
// monomial in the (m-1)-context. Boundary: zero iff any variable touches the
// first tangential coordinate, else every tangential index shifts down by one
// and the normal slot follows the context.
RestrictionResult restriction(const JetMonomial& mono);

struct ScanEntry {
    JetMonomial mono;
    bool survives = false;
    std::string eliminatedBy; // empty for survivors
    int degSum = 0;           // sum of degrees over scanned coordinates
    bool tight = false;       // every inequality in the order bound is an equality
};

struct ScanResult {
    int m = 0, n = 0;
    bool withTheta = false, boundary = false;
    std::vector<ScanEntry> entries;

    std::vector<JetMonomial> survivors() const;
};

// Filters the enumeration by the degree bounds that force restriction-kernel
// membership: every scanned coordinate degree nonzero (coordinate permutation)
// and even (coordinate reflection), hence >= 2. Survivors carry the tightness
// report of the resulting order inequality.
ScanResult kernel_scan(int m, int n, bool withTheta, bool boundary);

std::string scan_to_json(const ScanResult& scan);

} // namespace heatlab::invariance
