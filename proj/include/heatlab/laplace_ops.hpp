#pragma once
#include <optional>
#include <vector>

#include "heatlab/jets.hpp"
#include "heatlab/matrix.hpp"
#include "heatlab/tensor_core.hpp"

namespace heatlab::laplace {

// Fiber endomorphism with partial-derivative jets at the point: value matrix
// plus d1[a] and d2[a*m+b]. Complex entries so first-order terms of Dolbeault
// operators fit without a parallel real code path.
struct EndoJet {
    int m = 0, n = 0, order = 0;
    DenseC v;
    std::vector<DenseC> d1;
    std::vector<DenseC> d2;

    EndoJet() = default;
    EndoJet(int m_, int n_, int order_);

    static EndoJet scalar(int m, int n, const Jet<cplx>& s); // s * identity
    DenseC& D1(int a) { return d1[a]; }
    const DenseC& D1(int a) const { return d1[a]; }
    DenseC& D2(int a, int b) { return d2[static_cast<size_t>(a) * m + b]; }
    const DenseC& D2(int a, int b) const { return d2[static_cast<size_t>(a) * m + b]; }

    EndoJet truncated(int ord) const;
    EndoJet derivative(int k) const;
    EndoJet operator+(const EndoJet& o) const;
    EndoJet operator-(const EndoJet& o) const;
    EndoJet mul(const EndoJet& o) const;          // matrix product, jet rule
    EndoJet scale_by(const JetR& s) const;        // scalar-jet times matrix-jet
    EndoJet scaled(cplx s) const;
    bool is_zero(double tol = 0.0) const;
};

// Coefficients of -(g^{ij} id d_i d_j + A^k d_k + B) in a chart, with jets of
// A and B deep enough for whatever invariants will be requested.
struct LaplaceCoefficients {
    int m = 0;
    int fiberDim = 0;
    DenseR ginv;             // leading symbol at the point
    std::vector<EndoJet> A;  // m entries
    EndoJet B;
};

// The unique connection 1-form / endomorphism / connection-curvature triple of
// a Laplace-type operator, expressed in the orthonormal frame at the point.
struct CanonicalData {
    int m = 0;
    int fiberDim = 0;
    std::vector<EndoJet> omega;      // order >= 1 when the inputs allow
    EndoJet E;                       // order up to 2
    std::vector<DenseC> Omega;       // m*m values Omega_ij
    std::vector<double> gammaAtPoint; // Gamma_ij^k of the orthonormalized jet
    DenseR frame;                    // the congruence T used (x = T y)
    bool flatChart = false;          // all metric derivatives vanish
};

CanonicalData canonicalize(const LaplaceCoefficients& op, const tensor::MetricJet& jet);

// Rebuilds (A^k, B) at the point in the original chart; canonicalize followed
// by recompose reproduces the inputs up to roundoff.
struct RecomposedCoefficients {
    std::vector<DenseC> A;
    DenseC B;
};
RecomposedCoefficients recompose(const CanonicalData& can);

// Pointwise heat-trace coefficient densities with respect to the Riemannian
// measure; integration is the caller's job.
double a0_density(const CanonicalData& can);
double a2_density(const CanonicalData& can, const tensor::CurvaturePack& pack);
double a4_density(const CanonicalData& can, const tensor::CurvaturePack& pack);

// Leading (highest-derivative) term of a_{2n} on flat charts with vanishing
// connection: the iterated-Laplacian term with its normalizing constant, lower
// order terms excluded by contract.
double a2n_leading_density(const CanonicalData& can, int n);

// Pfaffian-type curvature polynomial integrating to the Euler characteristic;
// zero in odd dimensions.
double euler_form(const tensor::CurvaturePack& pack);

// Boundary transgression polynomial of degree k in the curvature and m-1-2k in
// the second fundamental form.
double boundary_Q(const tensor::CurvaturePack& pack, const DenseR& L, int k, int m);

// Mixed Dirichlet/Robin boundary data on the fiber over a boundary point.
struct BoundaryData {
    int m = 0;
    int fiberDim = 0;
    DenseR L;     // (m-1) x (m-1) second fundamental form
    DenseC piD, piN;
    DenseC S;
    std::vector<DenseC> psiTangentialJets; // optional psi_{:a}; default zero

    DenseC psi() const;
    void validate() const;
};

// Boundary heat-coefficient density of order ell in {0, 1, 2}.
double boundary_a(int ell, const BoundaryData& bd, const CanonicalData& can,
                  const tensor::CurvaturePack& pack);

// Index density of the twisted Dolbeault complex on a surface:
// tau/(8 pi) - delta(Re Theta)/pi.
double dolbeault_a2(const tensor::CurvaturePack& pack, double deltaReTheta);
// Flat-chart convenience taking the partials of the complex component.
double dolbeault_a2_flat(const tensor::CurvaturePack& pack, cplx dthetaDx, cplx dthetaDy);

} // namespace heatlab::laplace
