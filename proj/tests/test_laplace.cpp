#include <doctest.h>

#include <cmath>
#include <random>

#include "heatlab/laplace_ops.hpp"
#include "heatlab/models.hpp"
#include "heatlab/trig.hpp"

using namespace heatlab;
using namespace heatlab::laplace;
using tensor::Chart;
using tensor::CurvaturePack;
using tensor::MetricJet;

namespace {

constexpr double kRoot4Pi = 3.5449077018110318;

double urand(std::mt19937& rng, double lo, double hi) {
    return lo + (hi - lo) * (rng() * (1.0 / 4294967296.0));
}

// Scalar B-coefficient jets of the circle operators: B = sign * theta' - theta^2.
EndoJet circle_B(const TrigPoly& theta, double x, int sign) {
    const TrigPoly b = theta.derivative(0).scaled(sign) - theta * theta;
    Jet<cplx> j(1, 2);
    j.v = b.eval(x);
    j.g1(0) = b.derivative(0).eval(x);
    j.g2(0, 0) = b.derivative(0).derivative(0).eval(x);
    return EndoJet::scalar(1, 1, j);
}

LaplaceCoefficients circle_op(const TrigPoly& theta, double x, int sign) {
    LaplaceCoefficients op;
    op.m = 1;
    op.fiberDim = 1;
    op.ginv = DenseR::identity(1);
    op.A.assign(1, EndoJet(1, 1, 3));
    op.B = circle_B(theta, x, sign);
    return op;
}

MetricJet random_metric_jet(int m, std::mt19937& rng) {
    MetricJet jet(m, 3);
    for (int i = 0; i < m; ++i) jet.G(i, i) = 1.0 + 0.2 * urand(rng, 0, 1);
    for (int i = 0; i < m; ++i)
        for (int j = i; j < m; ++j)
            for (int k = 0; k < m; ++k) {
                const double v = urand(rng, -0.2, 0.2);
                jet.D1(i, j, k) = v;
                jet.D1(j, i, k) = v;
                for (int l = k; l < m; ++l) {
                    const double w = urand(rng, -0.2, 0.2);
                    jet.D2(i, j, k, l) = w;
                    jet.D2(j, i, k, l) = w;
                    jet.D2(i, j, l, k) = w;
                    jet.D2(j, i, l, k) = w;
                }
            }
    return jet;
}

// Random metric jet with second derivatives only; keeps all curvature
// symmetries while exercising generic curvature values.
MetricJet random_curvature_jet(int m, std::mt19937& rng) {
    MetricJet jet(m, 2);
    for (int i = 0; i < m; ++i) jet.G(i, i) = 1.0;
    for (int i = 0; i < m; ++i)
        for (int j = i; j < m; ++j)
            for (int k = 0; k < m; ++k)
                for (int l = k; l < m; ++l) {
                    const double w = urand(rng, -0.4, 0.4);
                    jet.D2(i, j, k, l) = w;
                    jet.D2(j, i, k, l) = w;
                    jet.D2(i, j, l, k) = w;
                    jet.D2(j, i, l, k) = w;
                }
    return jet;
}

DenseC random_endo(int n, std::mt19937& rng) {
    DenseC e(n, n);
    for (auto& v : e.a) v = cplx(urand(rng, -1, 1), urand(rng, -1, 1));
    return e;
}

} // namespace

TEST_CASE("canonicalize: free Laplacian has omega = 0, E = 0") {
    const Chart flat = tensor::euclidean_chart(1);
    LaplaceCoefficients op;
    op.m = 1;
    op.fiberDim = 1;
    op.ginv = DenseR::identity(1);
    op.A.assign(1, EndoJet(1, 1, 2));
    op.B = EndoJet(1, 1, 2);
    const CanonicalData can = canonicalize(op, flat.metric_jet({0.3}));
    CHECK(can.omega[0].is_zero());
    CHECK(can.E.is_zero());
    CHECK(can.flatChart);
}

TEST_CASE("canonicalize: twisted circle operators have E = +-theta' - theta^2") {
    const TrigPoly theta = parse_trig("0.7*sin(x)", 1);
    const Chart flat = tensor::euclidean_chart(1);
    const double x = 0.9;
    for (int sign : {+1, -1}) {
        const CanonicalData can = canonicalize(circle_op(theta, x, sign), flat.metric_jet({x}));
        CHECK(can.omega[0].is_zero(1e-15));
        const double expected = sign * 0.7 * std::cos(x) - 0.49 * std::sin(x) * std::sin(x);
        CHECK(can.E.v(0, 0).real() == doctest::Approx(expected).epsilon(1e-13));
    }
}

TEST_CASE("canonicalize: first-order Dolbeault pair has nonzero omega and supertraced E "
          "equal to 4 theta'") {
    const std::array<double, 2> omega{2 * M_PI, 2 * M_PI};
    const TrigPoly theta = TrigPoly::sine(2, 0, 1, 0.5, omega);
    const Chart flat = tensor::euclidean_chart(2);
    const double x = 0.23, y = 0.61;
    const MetricJet jet = flat.metric_jet({x, y});

    auto jetOf = [&](const TrigPoly& p) {
        Jet<cplx> j(2, 2);
        j.v = p.eval(x, y);
        for (int a = 0; a < 2; ++a) j.g1(a) = p.derivative(a).eval(x, y);
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) j.g2(a, b) = p.derivative(a).derivative(b).eval(x, y);
        return j;
    };
    auto build = [&](int degree) {
        LaplaceCoefficients op;
        op.m = 2;
        op.fiberDim = 1;
        op.ginv = DenseR::identity(2);
        const TrigPoly thC = theta.conjugated();
        const TrigPoly ax = (theta - thC).scaled(2.0);
        const TrigPoly ay = (theta + thC).scaled(cplx(0, -2.0));
        op.A.assign(2, EndoJet(2, 1, 2));
        op.A[0] = EndoJet::scalar(2, 1, jetOf(ax));
        op.A[1] = EndoJet::scalar(2, 1, jetOf(ay));
        const TrigPoly dzTheta =
            (theta.derivative(0) - theta.derivative(1).scaled(cplx(0, 1))).scaled(0.5);
        const TrigPoly dzbThC =
            (thC.derivative(0) + thC.derivative(1).scaled(cplx(0, 1))).scaled(0.5);
        const TrigPoly norm2 = theta * thC;
        const TrigPoly b = degree == 0 ? dzTheta.scaled(4.0) - norm2.scaled(4.0)
                                       : dzbThC.scaled(-4.0) - norm2.scaled(4.0);
        op.B = EndoJet::scalar(2, 1, jetOf(b));
        return op;
    };
    const CanonicalData c0 = canonicalize(build(0), jet);
    const CanonicalData c1 = canonicalize(build(1), jet);
    // real theta: A^x = 2(theta - conj theta) vanishes, the dy leg carries the twist
    CHECK(c0.omega[0].is_zero(1e-12));
    CHECK_FALSE(c0.omega[1].is_zero(1e-12));
    const cplx diff = c0.E.v(0, 0) - c1.E.v(0, 0);
    const double expected = 4.0 * (0.5 * 2 * M_PI * std::cos(2 * M_PI * x));
    CHECK(diff.real() == doctest::Approx(expected).epsilon(1e-12));
    CHECK(std::abs(diff.imag()) < 1e-13);
}

TEST_CASE("canonicalize round trip over random Laplace coefficients") {
    std::mt19937 rng(60621);
    double worst = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const int m = 1 + trial % 3;
        const int n = 1 + (trial / 3) % 3;
        const MetricJet jet = random_metric_jet(m, rng);
        LaplaceCoefficients op;
        op.m = m;
        op.fiberDim = n;
        op.ginv = DenseR::identity(m);
        for (int k = 0; k < m; ++k) {
            EndoJet a(m, n, 1);
            a.v = random_endo(n, rng);
            for (int q = 0; q < m; ++q) a.d1[q] = random_endo(n, rng);
            op.A.push_back(std::move(a));
        }
        op.B = EndoJet(m, n, 0);
        op.B.v = random_endo(n, rng);

        const CanonicalData can = canonicalize(op, jet);
        const RecomposedCoefficients rec = recompose(can);
        for (int k = 0; k < m; ++k) worst = std::max(worst, max_abs(rec.A[k] - op.A[k].v));
        worst = std::max(worst, max_abs(rec.B - op.B.v));
    }
    CHECK(worst < 1e-9);
}

TEST_CASE("canonicalize rejects mismatched dimensions") {
    const Chart flat = tensor::euclidean_chart(2);
    LaplaceCoefficients op;
    op.m = 1;
    op.fiberDim = 1;
    op.ginv = DenseR::identity(1);
    op.A.assign(1, EndoJet(1, 1, 2));
    op.B = EndoJet(1, 1, 2);
    CHECK_THROWS_AS(canonicalize(op, flat.metric_jet({0, 0})), ConfigError);
}

TEST_CASE("a0/a2/a4 densities") {
    const Chart flat = tensor::euclidean_chart(1);
    const MetricJet jet = flat.metric_jet({0.0});
    const CurvaturePack pack = tensor::curvature(jet);

    SUBCASE("flat trivial operator: a2 = a4 = 0, a0 = (4 pi)^{-m/2} fiberDim") {
        LaplaceCoefficients op;
        op.m = 1;
        op.fiberDim = 1;
        op.ginv = DenseR::identity(1);
        op.A.assign(1, EndoJet(1, 1, 3));
        op.B = EndoJet(1, 1, 2);
        const CanonicalData can = canonicalize(op, jet);
        CHECK(a0_density(can) == doctest::Approx(1.0 / kRoot4Pi).epsilon(1e-15));
        CHECK(a2_density(can, pack) == 0.0);
        CHECK(a4_density(can, pack) == 0.0);
    }

    SUBCASE("twisted circle: a2 = (4 pi)^{-1/2}(theta' - theta^2)") {
        const TrigPoly theta = parse_trig("0.7*sin(x)", 1);
        for (double x : {0.0, 0.7, 2.9}) {
            const CanonicalData can =
                canonicalize(circle_op(theta, x, +1), flat.metric_jet({x}));
            const double expect =
                (0.7 * std::cos(x) - 0.49 * std::sin(x) * std::sin(x)) / kRoot4Pi;
            CHECK(a2_density(can, pack) == doctest::Approx(expect).epsilon(1e-13));
        }
    }

    SUBCASE("supertraced a4 on the circle equals (4 pi)^{-1/2}(theta'''/3 - 2 theta' theta^2)") {
        const TrigPoly theta = parse_trig("0.7*sin(x)+0.2*cos(2*x)", 1);
        for (double x : {0.0, 1.1, 4.0}) {
            const MetricJet j = flat.metric_jet({x});
            const double d0 = a4_density(canonicalize(circle_op(theta, x, +1), j), pack);
            const double d1 = a4_density(canonicalize(circle_op(theta, x, -1), j), pack);
            const double th1 = theta.derivative(0).eval(x).real();
            const double th3 = theta.derivative(0).derivative(0).derivative(0).eval(x).real();
            const double th = theta.eval(x).real();
            const double expect = (th3 / 3.0 - 2.0 * th1 * th * th) / kRoot4Pi;
            CHECK(d0 - d1 == doctest::Approx(expect).epsilon(1e-12));
        }
    }

    SUBCASE("a4 refuses shallow jets") {
        LaplaceCoefficients op;
        op.m = 1;
        op.fiberDim = 1;
        op.ginv = DenseR::identity(1);
        op.A.assign(1, EndoJet(1, 1, 2));
        op.B = EndoJet(1, 1, 1); // B jets only to order 1
        op.B.v(0, 0) = 1.0;
        const CanonicalData can = canonicalize(op, jet);
        CHECK_THROWS_AS(a4_density(can, pack), MissingJetError);
    }
}

TEST_CASE("a2 supertrace identity on the circle for 20 random twists") {
    std::mt19937 rng(5150);
    const Chart flat = tensor::euclidean_chart(1);
    const CurvaturePack pack = tensor::curvature(flat.metric_jet({0.0}));
    for (int trial = 0; trial < 20; ++trial) {
        TrigPoly theta = TrigPoly::constant(1, urand(rng, -1, 1));
        for (int k = 1; k <= 3; ++k) {
            theta += TrigPoly::sine(1, 0, k, urand(rng, -0.7, 0.7));
            theta += TrigPoly::cosine(1, 0, k, urand(rng, -0.7, 0.7));
        }
        const double x = urand(rng, 0, 2 * M_PI);
        const MetricJet j = flat.metric_jet({x});
        const double super = a2_density(canonicalize(circle_op(theta, x, +1), j), pack) -
                             a2_density(canonicalize(circle_op(theta, x, -1), j), pack);
        const double expect = theta.derivative(0).eval(x).real() / std::sqrt(M_PI);
        CHECK(super == doctest::Approx(expect).epsilon(1e-10));
    }
}

TEST_CASE("a0 supertrace cancellation over binomial fiber dimensions") {
    for (int m = 1; m <= 5; ++m) {
        double sum = 0;
        double binom = 1;
        for (int p = 0; p <= m; ++p) {
            CanonicalData can;
            can.m = m;
            can.fiberDim = static_cast<int>(binom + 0.5);
            sum += ((p % 2) ? -1.0 : 1.0) * a0_density(can);
            binom = binom * (m - p) / (p + 1);
        }
        CHECK(std::abs(sum) < 1e-14);
    }
}

TEST_CASE("a2n leading term") {
    const Chart flat = tensor::euclidean_chart(1);
    const MetricJet jet = flat.metric_jet({0.0});
    const CurvaturePack pack = tensor::curvature(jet);
    const TrigPoly theta = parse_trig("0.7*sin(x)", 1);

    SUBCASE("n = 1 reduces to the a2 endomorphism term on flat charts") {
        const CanonicalData can = canonicalize(circle_op(theta, 0.4, +1), jet);
        CHECK(a2n_leading_density(can, 1) ==
              doctest::Approx(a2_density(can, pack)).epsilon(1e-14));
    }

    SUBCASE("constant E gives zero for n >= 2") {
        LaplaceCoefficients op;
        op.m = 1;
        op.fiberDim = 1;
        op.ginv = DenseR::identity(1);
        op.A.assign(1, EndoJet(1, 1, 3));
        op.B = EndoJet(1, 1, 2);
        op.B.v(0, 0) = 2.5;
        const CanonicalData can = canonicalize(op, jet);
        CHECK(a2n_leading_density(can, 2) == 0.0);
        CHECK(a2n_leading_density(can, 3) == 0.0);
    }

    SUBCASE("E = theta' at n = 2 gives (4 pi)^{-1/2} (20/120) theta'''") {
        const double x = 0.9;
        LaplaceCoefficients op;
        op.m = 1;
        op.fiberDim = 1;
        op.ginv = DenseR::identity(1);
        op.A.assign(1, EndoJet(1, 1, 3));
        const TrigPoly b = theta.derivative(0);
        Jet<cplx> j(1, 2);
        j.v = b.eval(x);
        j.g1(0) = b.derivative(0).eval(x);
        j.g2(0, 0) = b.derivative(0).derivative(0).eval(x);
        op.B = EndoJet::scalar(1, 1, j);
        const CanonicalData can = canonicalize(op, jet);
        const double th3 = theta.derivative(0).derivative(0).derivative(0).eval(x).real();
        CHECK(a2n_leading_density(can, 2) ==
              doctest::Approx((20.0 / 120.0) * th3 / kRoot4Pi).epsilon(1e-13));
    }

    SUBCASE("supertraced leading term carries the odd top derivative") {
        const double x = 0.0; // theta(0) = 0 isolates theta'''
        const CanonicalData cp = canonicalize(circle_op(theta, x, +1), jet);
        const CanonicalData cm = canonicalize(circle_op(theta, x, -1), jet);
        const double diff = a2n_leading_density(cp, 2) - a2n_leading_density(cm, 2);
        const double th3 = theta.derivative(0).derivative(0).derivative(0).eval(x).real();
        CHECK(diff == doctest::Approx(2.0 * (20.0 / 120.0) * th3 / kRoot4Pi).epsilon(1e-13));
        CHECK(std::abs(diff) > 1e-3);
    }

    SUBCASE("curved charts are refused") {
        const Chart s2 = tensor::round_sphere_chart(2, 1.0);
        LaplaceCoefficients op;
        op.m = 2;
        op.fiberDim = 1;
        op.ginv = DenseR::identity(2);
        op.A.assign(2, EndoJet(2, 1, 2));
        op.B = EndoJet(2, 1, 2);
        const CanonicalData can = canonicalize(op, s2.metric_jet({1.0, 0.2}));
        CHECK_THROWS_AS(a2n_leading_density(can, 2), UnsupportedError);
    }
}

TEST_CASE("Euler form") {
    SUBCASE("flat torus vanishes; odd dimensions vanish by convention") {
        const Chart flat = tensor::euclidean_chart(2);
        CHECK(laplace::euler_form(tensor::curvature(flat.metric_jet({0, 0}))) == 0.0);
        const Chart flat3 = tensor::euclidean_chart(3);
        CHECK(laplace::euler_form(tensor::curvature(flat3.metric_jet({0, 0, 0}))) == 0.0);
    }

    SUBCASE("unit sphere density 1/(2 pi)") {
        const Chart s2 = tensor::round_sphere_chart(2, 1.0);
        const CurvaturePack pack = tensor::curvature(s2.metric_jet({1.2, 0.4}));
        CHECK(laplace::euler_form(pack) == doctest::Approx(1.0 / (2 * M_PI)).epsilon(1e-12));
    }

    SUBCASE("permutation sum agrees with the displayed 2d and 4d reductions") {
        std::mt19937 rng(4242);
        for (int trial = 0; trial < 12; ++trial) {
            const int m = (trial % 2) ? 2 : 4;
            const CurvaturePack pack = tensor::curvature(random_curvature_jet(m, rng));
            const double pf = laplace::euler_form(pack);
            const double display =
                m == 2 ? pack.tau / (4 * M_PI)
                       : (pack.tau * pack.tau - 4 * pack.normRho2 + pack.normR2) /
                             (32 * M_PI * M_PI);
            CHECK(pf == doctest::Approx(display).epsilon(1e-11));
        }
    }

    SUBCASE("products with a flat factor kill the form") {
        std::mt19937 rng(11);
        const MetricJet a = random_curvature_jet(3, rng);
        const MetricJet flat1 = tensor::euclidean_chart(1).metric_jet({0.0});
        const CurvaturePack pack = tensor::curvature(tensor::block_sum(a, flat1));
        CHECK(std::abs(laplace::euler_form(pack)) < 1e-12);
    }
}

TEST_CASE("boundary transgression polynomial") {
    SUBCASE("m = 2: Q_{0,2} = L_11 / (2 pi)") {
        const CurvaturePack pack =
            tensor::curvature(tensor::euclidean_chart(2).metric_jet({0, 0}));
        DenseR L(1, 1);
        L(0, 0) = 0.8;
        CHECK(boundary_Q(pack, L, 0, 2) == doctest::Approx(0.8 / (2 * M_PI)).epsilon(1e-14));
    }

    SUBCASE("m = 3 sum matches the displayed integrand") {
        std::mt19937 rng(909);
        for (int trial = 0; trial < 8; ++trial) {
            const CurvaturePack pack = tensor::curvature(random_curvature_jet(3, rng));
            DenseR L(2, 2);
            L(0, 0) = urand(rng, -1, 1);
            L(1, 1) = urand(rng, -1, 1);
            L(0, 1) = L(1, 0) = urand(rng, -1, 1);
            const double laa = L(0, 0) + L(1, 1);
            double lab2 = 0, raab = 0;
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b) {
                    lab2 += L(a, b) * L(a, b);
                    raab += pack.R(a, b, b, a);
                }
            const double display = (raab + laa * laa - lab2) / (8 * M_PI);
            const double q = boundary_Q(pack, L, 0, 3) + boundary_Q(pack, L, 1, 3);
            CHECK(q == doctest::Approx(display).epsilon(1e-11));
        }
    }

    SUBCASE("m = 4 sum matches the displayed boundary polynomial") {
        std::mt19937 rng(808);
        for (int trial = 0; trial < 6; ++trial) {
            const CurvaturePack pack = tensor::curvature(random_curvature_jet(4, rng));
            DenseR L(3, 3);
            for (int a = 0; a < 3; ++a)
                for (int b = a; b < 3; ++b) L(a, b) = L(b, a) = urand(rng, -1, 1);

            double laa = 0, labab = 0, labbcac = 0, racbcab = 0, ramamLbb = 0;
            for (int a = 0; a < 3; ++a) laa += L(a, a);
            for (int a = 0; a < 3; ++a)
                for (int b = 0; b < 3; ++b) labab += L(a, b) * L(a, b);
            for (int a = 0; a < 3; ++a)
                for (int b = 0; b < 3; ++b)
                    for (int c = 0; c < 3; ++c) labbcac += L(a, b) * L(b, c) * L(a, c);
            for (int a = 0; a < 3; ++a)
                for (int b = 0; b < 3; ++b)
                    for (int c = 0; c < 3; ++c) racbcab += pack.R(a, c, b, c) * L(a, b);
            for (int a = 0; a < 3; ++a)
                for (int b = 0; b < 3; ++b) ramamLbb += pack.R(a, 3, a, 3) * L(b, b);
            const double display =
                (3 * pack.tau * laa + 6 * ramamLbb + 6 * racbcab + 2 * laa * laa * laa -
                 6 * labab * laa + 4 * labbcac) /
                (24 * M_PI * M_PI);
            const double q = boundary_Q(pack, L, 0, 4) + boundary_Q(pack, L, 1, 4);
            CHECK(q == doctest::Approx(display).epsilon(1e-10));
        }
    }

    SUBCASE("argument validation") {
        const CurvaturePack pack =
            tensor::curvature(tensor::euclidean_chart(4).metric_jet({0, 0, 0, 0}));
        DenseR L(3, 3);
        CHECK_THROWS_AS(boundary_Q(pack, L, 2, 4), ConfigError);
    }
}

TEST_CASE("boundary heat coefficients") {
    const Chart flat1 = tensor::euclidean_chart(1);
    const MetricJet jet1 = flat1.metric_jet({0.0});
    const CurvaturePack pack1 = tensor::curvature(jet1);
    LaplaceCoefficients trivial;
    trivial.m = 1;
    trivial.fiberDim = 1;
    trivial.ginv = DenseR::identity(1);
    trivial.A.assign(1, EndoJet(1, 1, 2));
    trivial.B = EndoJet(1, 1, 2);
    const CanonicalData can1 = canonicalize(trivial, jet1);

    SUBCASE("interval endpoint, Dirichlet scalar: a0 = -1/4") {
        BoundaryData bd;
        bd.m = 1;
        bd.fiberDim = 1;
        bd.L = DenseR(0, 0);
        bd.piD = DenseC::identity(1);
        bd.piN = DenseC(1, 1);
        bd.S = DenseC(1, 1);
        CHECK(boundary_a(0, bd, can1, pack1) == doctest::Approx(-0.25).epsilon(1e-15));
    }

    SUBCASE("interval endpoint, Neumann with S = 0: a1 = 0") {
        BoundaryData bd;
        bd.m = 1;
        bd.fiberDim = 1;
        bd.L = DenseR(0, 0);
        bd.piD = DenseC(1, 1);
        bd.piN = DenseC::identity(1);
        bd.S = DenseC(1, 1);
        CHECK(boundary_a(1, bd, can1, pack1) == 0.0);
        CHECK(boundary_a(0, bd, can1, pack1) == doctest::Approx(+0.25).epsilon(1e-15));
    }

    SUBCASE("half-space Robin: a2 = (384)^{-1}(4 pi)^{-(m-1)/2} 192 s^2 fiberDim") {
        const int m = 3;
        const Chart flat3 = tensor::euclidean_chart(m);
        const MetricJet jet3 = flat3.metric_jet({0, 0, 0});
        const CurvaturePack pack3 = tensor::curvature(jet3);
        LaplaceCoefficients op3;
        op3.m = m;
        op3.fiberDim = 2;
        op3.ginv = DenseR::identity(m);
        op3.A.assign(m, EndoJet(m, 2, 2));
        op3.B = EndoJet(m, 2, 2);
        const CanonicalData can3 = canonicalize(op3, jet3);
        const double s = 0.37;
        BoundaryData bd;
        bd.m = m;
        bd.fiberDim = 2;
        bd.L = DenseR(m - 1, m - 1);
        bd.piD = DenseC(2, 2);
        bd.piN = DenseC::identity(2);
        bd.S = cplx(s, 0) * DenseC::identity(2);
        const double expect = (1.0 / 384.0) * std::pow(4 * M_PI, -1.0) * 192.0 * s * s * 2;
        CHECK(boundary_a(2, bd, can3, pack3) == doctest::Approx(expect).epsilon(1e-13));
        CHECK_THROWS_AS(boundary_a(3, bd, can3, pack3), UnsupportedError);
    }

    SUBCASE("projection consistency is enforced") {
        BoundaryData bd;
        bd.m = 1;
        bd.fiberDim = 1;
        bd.L = DenseR(0, 0);
        bd.piD = DenseC::identity(1);
        bd.piN = DenseC::identity(1);
        bd.S = DenseC(1, 1);
        CHECK_THROWS_AS(boundary_a(0, bd, can1, pack1), ConfigError);
    }
}

TEST_CASE("Dolbeault index density") {
    const Chart flat = tensor::euclidean_chart(2);
    const CurvaturePack packFlat = tensor::curvature(flat.metric_jet({0, 0}));

    SUBCASE("constant twists on flat charts vanish") {
        CHECK(dolbeault_a2_flat(packFlat, cplx(0, 0), cplx(0, 0)) == 0.0);
    }

    SUBCASE("sinusoidal twist: pointwise value and zero integral") {
        const std::array<double, 2> omega{2 * M_PI, 2 * M_PI};
        const TrigPoly theta = TrigPoly::sine(2, 0, 1, 1.0, omega);
        const TrigPoly dx = theta.derivative(0), dy = theta.derivative(1);
        const auto model = models::complex_torus();
        const double integral = models::integrate(model, [&](const std::vector<double>& p) {
            return dolbeault_a2_flat(packFlat, dx.eval(p[0], p[1]), dy.eval(p[0], p[1]));
        });
        CHECK(std::abs(integral) < 1e-12);
        const double d = dolbeault_a2_flat(packFlat, dx.eval(0.1, 0.0), dy.eval(0.1, 0.0));
        CHECK(d == doctest::Approx(2.0 * std::cos(2 * M_PI * 0.1)).epsilon(1e-13));
    }

    SUBCASE("untwisted round sphere integrates to the arithmetic genus 1") {
        const auto s2 = models::round_sphere(2, 1.0);
        const Chart chart = models::chart_of(s2);
        const double integral = models::integrate(s2, [&](const std::vector<double>& p) {
            return dolbeault_a2(tensor::curvature(chart.metric_jet(p), 0), 0.0);
        });
        CHECK(integral == doctest::Approx(1.0).epsilon(1e-10));
    }

    SUBCASE("only surfaces are supported") {
        const Chart flat3 = tensor::euclidean_chart(3);
        const CurvaturePack p3 = tensor::curvature(flat3.metric_jet({0, 0, 0}));
        CHECK_THROWS_AS(dolbeault_a2(p3, 0.0), UnsupportedError);
    }
}
