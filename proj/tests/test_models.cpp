#include <doctest.h>

#include <cmath>
#include <random>

#include "heatlab/models.hpp"

using namespace heatlab;
using namespace heatlab::models;

TEST_CASE("quadrature volumes") {
    CHECK(integrate(circle(), [](const std::vector<double>&) { return 1.0; }) ==
          doctest::Approx(2 * M_PI).epsilon(1e-13));
    CHECK(integrate(circle(3.0), [](const std::vector<double>&) { return 1.0; }) ==
          doctest::Approx(3.0).epsilon(1e-13));
    CHECK(integrate(flat_torus({2 * M_PI, 3.0}), [](const std::vector<double>&) { return 1.0; }) ==
          doctest::Approx(6 * M_PI).epsilon(1e-12));
    CHECK(integrate(round_sphere(2), [](const std::vector<double>&) { return 1.0; }) ==
          doctest::Approx(4 * M_PI).epsilon(1e-12));
    CHECK(integrate(round_sphere(4), [](const std::vector<double>&) { return 1.0; }) ==
          doctest::Approx(8 * M_PI * M_PI / 3).epsilon(1e-10));
    CHECK(integrate(interval(M_PI), [](const std::vector<double>&) { return 1.0; }) ==
          doctest::Approx(M_PI).epsilon(1e-13));
    CHECK(integrate(point_model(), [](const std::vector<double>&) { return 42.0; }) ==
          doctest::Approx(42.0));
}

TEST_CASE("band-limited integrands are integrated exactly") {
    std::mt19937 rng(515);
    for (int trial = 0; trial < 10; ++trial) {
        TrigPoly p = TrigPoly::constant(1, 0.0);
        double c0 = 0;
        for (int k = 1; k <= 20; ++k) {
            const double a = (rng() * (1.0 / 4294967296.0)) - 0.5;
            const double b = (rng() * (1.0 / 4294967296.0)) - 0.5;
            p += TrigPoly::sine(1, 0, k, a);
            p += TrigPoly::cosine(1, 0, k, b);
        }
        const double mean = (rng() * (1.0 / 4294967296.0));
        p += TrigPoly::constant(1, mean);
        c0 = mean;
        const double got = integrate(circle(), [&](const std::vector<double>& x) {
            return p.eval(x[0]).real();
        });
        CHECK(got == doctest::Approx(2 * M_PI * c0).epsilon(1e-12));
    }
}

TEST_CASE("parallel and serial integration agree") {
    const auto model = round_sphere(2);
    const auto f = [](const std::vector<double>& x) {
        return std::sin(x[0]) * std::cos(3 * x[1]) + 0.25;
    };
    CHECK(integrate(model, f) == doctest::Approx(integrate_serial(model, f)).epsilon(1e-13));
}

TEST_CASE("non-finite densities are rejected") {
    CHECK_THROWS_AS(integrate(circle(), [](const std::vector<double>& x) {
        return 1.0 / std::sin(x[0] * 0.0);
    }), NumericalContractError);
}

TEST_CASE("products and twists") {
    const ModelManifold t2 = product(circle(), circle(3.0));
    CHECK(t2.kind == ModelKind::FlatTorus);
    CHECK(t2.dim == 2);
    CHECK(integrate(t2, [](const std::vector<double>&) { return 1.0; }) ==
          doctest::Approx(6 * M_PI).epsilon(1e-12));

    const TwistForm a = twist_from_expressions(circle(), "0.7*sin(x)");
    const TwistForm b = TwistForm::none(1, {1.0, 1.0});
    const TwistForm tw = product_twist(a, b);
    CHECK(tw.dim == 2);
    CHECK(tw.comp[0].eval(0.4, 9.9).real() ==
          doctest::Approx(0.7 * std::sin(0.4)).epsilon(1e-14));
    CHECK(tw.comp[1].is_zero());
    CHECK(tw.verify_closed());

    CHECK_THROWS_AS(product(interval(), circle()), UnsupportedError);
}

TEST_CASE("twist closedness and cohomology classes") {
    const ModelManifold t2 = flat_torus({2 * M_PI, 2 * M_PI});
    TwistForm closed = twist_from_expressions(t2, "0.7", "0.3*sin(y)");
    CHECK(closed.verify_closed());
    CHECK(closed.cohomology_class()[0] == cplx(0.7, 0));

    TwistForm notClosed = TwistForm::none(2, {1.0, 1.0});
    notClosed.comp[0] = TrigPoly::sine(2, 1, 1, 1.0, {1.0, 1.0}); // sin(y) dx
    CHECK_FALSE(notClosed.verify_closed());

    // adding an exact form keeps closedness and the class
    TwistForm shifted = twist_plus_exact(closed, TrigPoly::sine(2, 0, 2, 0.4, {1.0, 1.0}));
    CHECK(shifted.verify_closed());
    CHECK(std::abs(shifted.cohomology_class()[0] - closed.cohomology_class()[0]) < 1e-15);
}

TEST_CASE("restriction-by-circle products") {
    CHECK(restrict_by_circle(point_model()).kind == ModelKind::Circle);
    const ModelManifold t2 = restrict_by_circle(circle());
    CHECK(t2.kind == ModelKind::FlatTorus);
    const ModelManifold cyl = restrict_by_circle(interval());
    CHECK(cyl.has_boundary());
    CHECK(cyl.dim == 2);
    CHECK(integrate(cyl, [](const std::vector<double>&) { return 1.0; }) ==
          doctest::Approx(2 * M_PI * M_PI).epsilon(1e-12));
    const TwistForm tw = restrict_by_circle_twist(twist_from_expressions(circle(), "0.5"));
    CHECK(tw.dim == 2);
    CHECK(tw.comp[1].is_zero());
}

TEST_CASE("model descriptors round-trip through chart JSON") {
    for (const ModelManifold& m :
         {circle(3.5), flat_torus({1.0, 2.0}), interval(2.0), round_sphere(2, 1.5),
          round_sphere(4), complex_torus(), product(round_sphere(2), circle())}) {
        const ModelManifold back = model_from_chart_json(to_chart_json(m));
        CHECK(back.dim == m.dim);
        CHECK(back.has_boundary() == m.has_boundary());
        const double va = integrate(m, [](const std::vector<double>&) { return 1.0; });
        const double vb = integrate(back, [](const std::vector<double>&) { return 1.0; });
        CHECK(va == doctest::Approx(vb).epsilon(1e-12));
    }
}
