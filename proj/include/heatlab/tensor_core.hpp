#pragma once
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "heatlab/jets.hpp"
#include "heatlab/matrix.hpp"
#include "heatlab/trig.hpp"

namespace heatlab::tensor {

// Metric components and their partial derivatives at a point. Derivative
// indices come last: dg(i,j,k) = d_k g_ij, d2g(i,j,k,l) = d_k d_l g_ij, and so
// on up to order 4. Orders above 4 are rejected rather than truncated.
struct MetricJet {
    int m = 0;
    std::vector<double> g;   // m*m
    std::vector<double> dg;  // m*m*m
    std::vector<double> d2g; // m*m*m*m
    std::vector<double> d3g; // optional, m^5
    std::vector<double> d4g; // optional, m^6

    MetricJet() = default;
    explicit MetricJet(int m_, int order = 2);

    int order() const;
    double& G(int i, int j) { return g[static_cast<size_t>(i) * m + j]; }
    double Gv(int i, int j) const { return g[static_cast<size_t>(i) * m + j]; }
    double& D1(int i, int j, int k) { return dg[(static_cast<size_t>(i) * m + j) * m + k]; }
    double D1v(int i, int j, int k) const { return dg[(static_cast<size_t>(i) * m + j) * m + k]; }
    double& D2(int i, int j, int k, int l) {
        return d2g[((static_cast<size_t>(i) * m + j) * m + k) * m + l];
    }
    double D2v(int i, int j, int k, int l) const {
        return d2g[((static_cast<size_t>(i) * m + j) * m + k) * m + l];
    }
    double& D3(int i, int j, int k, int l, int p) {
        return d3g[(((static_cast<size_t>(i) * m + j) * m + k) * m + l) * m + p];
    }
    double D3v(int i, int j, int k, int l, int p) const {
        return d3g[(((static_cast<size_t>(i) * m + j) * m + k) * m + l) * m + p];
    }
    double& D4(int i, int j, int k, int l, int p, int q) {
        return d4g[((((static_cast<size_t>(i) * m + j) * m + k) * m + l) * m + p) * m + q];
    }
    double D4v(int i, int j, int k, int l, int p, int q) const {
        return d4g[((((static_cast<size_t>(i) * m + j) * m + k) * m + l) * m + p) * m + q];
    }

    // Throws unless g is symmetric positive definite and the stored derivative
    // blocks have the required symmetries.
    void validate() const;

    MetricJet truncated(int order) const;
};

// Components of a real 1-form and partials at a point: dtheta(i,j) = d_j Theta_i.
struct OneFormJet {
    int m = 0;
    std::vector<double> theta;   // m
    std::vector<double> dtheta;  // m*m
    std::vector<double> d2theta; // m*m*m, (i,j,k) = d_j d_k Theta_i
    std::vector<double> d3theta; // optional
    bool closed = false;         // when set, dtheta must be symmetric

    OneFormJet() = default;
    explicit OneFormJet(int m_, int order = 2);
    int order() const;
    void validate() const;
};

// Curvature data at a point, expressed in an orthonormal frame obtained by a
// Gram congruence of g. Sign convention fixed by R_1221 = +1 on the unit
// 2-sphere; tau = R_ijji, rho_ij = R_ikkj.
struct CurvaturePack {
    int m = 0;
    std::vector<double> riemann; // m^4, R_ijkl
    std::vector<double> ricci;   // m*m
    double tau = 0;
    double normRho2 = 0;
    double normR2 = 0;
    std::optional<double> tauLaplacian; // tau_;kk, present when 4-jets are available

    double R(int i, int j, int k, int l) const {
        return riemann[((static_cast<size_t>(i) * m + j) * m + k) * m + l];
    }
    double rho(int i, int j) const { return ricci[static_cast<size_t>(i) * m + j]; }
};

// Christoffel symbols of the Levi-Civita connection in the chart frame of the
// given jet: value gamma(i,j,k) = Gamma_ij^k.
std::vector<double> christoffel(const MetricJet& jet);

// derivOrder caps how many derivative orders of the curvature are carried
// (0 = values only, 2 = enough for tau_;kk); -1 takes what the jets allow.
// Quadrature loops pass 0 to keep pointwise evaluation cheap.
CurvaturePack curvature(const MetricJet& jet, int derivOrder = -1);

struct CovariantThetaDerivs {
    int m = 0;
    std::vector<double> theta;  // frame components
    std::vector<double> first;  // (i,j) = Theta_i;j
    std::vector<double> second; // (i,j,k) = Theta_i;jk, present for order >= 2
    double deltaTheta = 0;      // -Theta_i;i
};

// Covariant derivatives of a 1-form in the orthonormal frame at the point.
// order is 1 or 2.
CovariantThetaDerivs covariant_derivatives(const OneFormJet& theta, const MetricJet& jet, int order);

// Congruence transform of a jet under the constant linear change x = T y; used
// for the orthonormalizing reduction and for equivariance tests.
MetricJet transform_jet(const MetricJet& jet, const DenseR& T);
OneFormJet transform_form(const OneFormJet& theta, const DenseR& T);

// T with T^t g T = I at the point (inverse-transpose Cholesky factor).
DenseR orthonormal_frame(const MetricJet& jet);

// Block-diagonal juxtaposition of two charts, for product metrics.
MetricJet block_sum(const MetricJet& a, const MetricJet& b);

// Jet-valued internals shared with the canonicalization layer.
std::vector<JetR> metric_entry_jets(const MetricJet& jet, int order);     // m*m
std::vector<JetR> inverse_metric_jets(const MetricJet& jet, int order);   // m*m
std::vector<JetR> christoffel_jets(const MetricJet& jet, int order);      // (i,j,k) -> Gamma_ij^k

// ---- charts ----------------------------------------------------------------

// A chart produces exact metric/1-form jets at any point of its domain.
struct Chart {
    int dim = 0;
    std::function<MetricJet(const std::vector<double>&)> metric_jet;  // to max order
    std::function<OneFormJet(const std::vector<double>&)> theta_jet;  // may be null
};

Chart euclidean_chart(int m);
Chart round_sphere_chart(int sphereDim, double radius); // polar angles + azimuth
Chart flat_torus_chart(const std::vector<double>& circumferences);

// Declarative chart description:
//   {"dim": 2, "metric": "round_sphere_2", "theta": {"x": "0.7*sin(x)"}}
// or an expression table {"g11": "...", "g12": "...", ...} over periodic
// coordinates. Expressions use the twist grammar.
Chart chart_from_json(const std::string& jsonText);

// Central finite-difference jet builder (4th-order stencils, default step
// 1e-4) for charts given only as pointwise metric evaluators. Accuracy is
// about 1e-8 on second derivatives; orders beyond 2 are not produced.
MetricJet fd_metric_jet(const std::function<double(int, int, const std::vector<double>&)>& g,
                        int m, const std::vector<double>& x, double h = 1e-4);

} // namespace heatlab::tensor
