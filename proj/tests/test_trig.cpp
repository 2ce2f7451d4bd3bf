#include <doctest.h>

#include <cmath>

#include "heatlab/errors.hpp"
#include "heatlab/trig.hpp"

using namespace heatlab;

TEST_CASE("parser handles constants, harmonics, and complex coefficients") {
    const TrigPoly p = parse_trig("0.7*sin(x)", 1);
    CHECK(p.eval(0.3).real() == doctest::Approx(0.7 * std::sin(0.3)).epsilon(1e-15));
    CHECK(p.is_real());
    CHECK(p.bandwidth() == 1);

    const TrigPoly q = parse_trig("0.3+0.5*cos(2*x)", 1);
    CHECK(q.eval(1.1).real() == doctest::Approx(0.3 + 0.5 * std::cos(2.2)).epsilon(1e-14));

    const TrigPoly c = parse_trig("0.3+0.2i", 2);
    CHECK(c.eval(0.4, 0.9) == cplx(0.3, 0.2));
    CHECK_FALSE(c.is_real());

    const TrigPoly im = parse_trig("i*cos(x)", 1);
    CHECK(im.eval(0.2).imag() == doctest::Approx(std::cos(0.2)).epsilon(1e-15));

    const TrigPoly neg = parse_trig("-0.25*sin(x)+0.1*cos(3*x)", 1);
    CHECK(neg.eval(0.8).real() ==
          doctest::Approx(-0.25 * std::sin(0.8) + 0.1 * std::cos(2.4)).epsilon(1e-14));

    CHECK_THROWS_AS(parse_trig("0.4*tan(x)", 1), ConfigError);
    CHECK_THROWS_AS(parse_trig("sin(y)", 1), ConfigError);
}

TEST_CASE("derivatives respect the per-axis frequency scale") {
    const TrigPoly p = parse_trig("sin(x)", 2, {2 * M_PI, 2 * M_PI}); // unit periods
    const TrigPoly dp = p.derivative(0);
    CHECK(dp.eval(0.0, 0.0).real() == doctest::Approx(2 * M_PI).epsilon(1e-14));
    CHECK(p.derivative(1).is_zero());
}

TEST_CASE("products convolve harmonics exactly") {
    const TrigPoly s = parse_trig("sin(x)", 1);
    const TrigPoly prod = s * s;
    // sin^2 = 1/2 - cos(2x)/2
    CHECK(prod.constant_part().real() == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(prod.eval(0.7).real() ==
          doctest::Approx(std::sin(0.7) * std::sin(0.7)).epsilon(1e-14));
    CHECK(prod.bandwidth() == 2);
}

TEST_CASE("conjugation and realness checks") {
    TrigPoly p = TrigPoly::zero(1);
    p.add_harmonic({2, 0}, cplx(0.5, 0.25));
    CHECK_FALSE(p.is_real());
    TrigPoly q = p + p.conjugated();
    CHECK(q.is_real());
}
