#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "heatlab/sym_eigen.hpp"

using namespace heatlab;

namespace {

DenseR random_symmetric(int n, unsigned seed) {
    std::mt19937 rng(seed);
    DenseR a(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j <= i; ++j) {
            const double v = (rng() * (1.0 / 4294967296.0)) * 2.0 - 1.0;
            a(i, j) = v;
            a(j, i) = v;
        }
    return a;
}

} // namespace

TEST_CASE("diagonal matrices pass straight through") {
    DenseR a(4, 4);
    a(0, 0) = 3;
    a(1, 1) = -1;
    a(2, 2) = 7;
    a(3, 3) = 0.5;
    const auto e = sym_eigenvalues(a);
    CHECK(e[0] == doctest::Approx(-1).epsilon(1e-14));
    CHECK(e[3] == doctest::Approx(7).epsilon(1e-14));
}

TEST_CASE("tridiagonal Toeplitz spectrum matches the closed form") {
    const int n = 40;
    DenseR a(n, n);
    for (int i = 0; i < n; ++i) {
        a(i, i) = 2;
        if (i > 0) {
            a(i, i - 1) = -1;
            a(i - 1, i) = -1;
        }
    }
    const auto e = sym_eigenvalues(a);
    for (int k = 1; k <= n; ++k) {
        const double expect = 2 - 2 * std::cos(k * M_PI / (n + 1));
        CHECK(e[k - 1] == doctest::Approx(expect).epsilon(1e-12));
    }
}

TEST_CASE("serial and parallel paths agree, trace and Frobenius identities hold") {
    for (int n : {33, 120, 257}) {
        const DenseR a = random_symmetric(n, 1000 + n);
        double tr = 0, fro = 0;
        for (int i = 0; i < n; ++i) {
            tr += a(i, i);
            for (int j = 0; j < n; ++j) fro += a(i, j) * a(i, j);
        }
        const auto es = sym_eigenvalues_serial(a);
        const auto ep = sym_eigenvalues(a);
        REQUIRE(es.size() == static_cast<size_t>(n));
        double sum = 0, sum2 = 0, dev = 0;
        for (int i = 0; i < n; ++i) {
            sum += es[i];
            sum2 += es[i] * es[i];
            dev = std::max(dev, std::abs(es[i] - ep[i]));
        }
        CHECK(sum == doctest::Approx(tr).epsilon(1e-10));
        CHECK(sum2 == doctest::Approx(fro).epsilon(1e-10));
        CHECK(dev < 1e-10 * std::max(1.0, std::abs(es.back())));
    }
}

TEST_CASE("2x2 Hermitian eigenvalues are exact") {
    DenseC h(2, 2);
    h(0, 0) = 1;
    h(1, 1) = -1;
    h(0, 1) = cplx(0, 2);
    h(1, 0) = cplx(0, -2);
    const auto e = herm_eigenvalues(h);
    const double r = std::sqrt(5.0);
    CHECK(e[0] == doctest::Approx(-r).epsilon(1e-13));
    CHECK(e[1] == doctest::Approx(r).epsilon(1e-13));
}

TEST_CASE("Hermitian embedding matches a real symmetric special case") {
    const int n = 24;
    const DenseR a = random_symmetric(n, 7);
    DenseC h(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) h(i, j) = a(i, j);
    const auto er = sym_eigenvalues(a);
    const auto ec = herm_eigenvalues(h);
    for (int i = 0; i < n; ++i) CHECK(ec[i] == doctest::Approx(er[i]).epsilon(1e-11));
}

TEST_CASE("block-diagonal 2x2 structure takes the sparse path and stays exact") {
    const int n = 300;
    DenseR a(n, n);
    std::mt19937 rng(99);
    std::vector<double> expected;
    for (int b = 0; b < n / 2; ++b) {
        const double x = rng() * (1.0 / 4294967296.0) * 4 - 2;
        const double y = rng() * (1.0 / 4294967296.0) * 4 - 2;
        const double z = rng() * (1.0 / 4294967296.0) * 4 - 2;
        a(2 * b, 2 * b) = x;
        a(2 * b + 1, 2 * b + 1) = y;
        a(2 * b, 2 * b + 1) = z;
        a(2 * b + 1, 2 * b) = z;
        const double mid = 0.5 * (x + y), rad = std::sqrt(0.25 * (x - y) * (x - y) + z * z);
        expected.push_back(mid - rad);
        expected.push_back(mid + rad);
    }
    std::sort(expected.begin(), expected.end());
    const auto e = sym_eigenvalues(a);
    for (int i = 0; i < n; ++i) CHECK(e[i] == doctest::Approx(expected[i]).epsilon(1e-12));
}
