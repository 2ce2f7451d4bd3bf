#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <random>

#include "heatlab/complexes.hpp"
#include "heatlab/spectral.hpp"

using namespace heatlab;
using namespace heatlab::complexes;
using models::ModelManifold;
using models::TwistForm;

namespace {

double urand(std::mt19937& rng, double lo, double hi) {
    return lo + (hi - lo) * (rng() * (1.0 / 4294967296.0));
}

std::vector<double> eigs_of(const GradedOperatorSet& ops, int degree) {
    const auto spec = spectral::eigensolve(ops);
    for (const auto& d : spec.degrees)
        if (d.degree == degree) return d.eigs;
    return {};
}

} // namespace

TEST_CASE("untwisted circle spectra are the squared frequencies") {
    const ModelManifold s1 = models::circle();
    const auto ops = assemble_circle(s1, TwistForm::none(1, {1.0, 1.0}), 8);
    for (int p : {0, 1}) {
        const auto e = eigs_of(ops, p);
        REQUIRE(e.size() == 17);
        CHECK(e[0] == doctest::Approx(0.0).epsilon(1e-14));
        CHECK(e[1] == doctest::Approx(1.0));
        CHECK(e[2] == doctest::Approx(1.0));
        CHECK(e[3] == doctest::Approx(4.0));
        CHECK(e[16] == doctest::Approx(64.0));
    }
}

TEST_CASE("constant twists shift the circle spectrum to n^2 + c^2") {
    const ModelManifold s1 = models::circle();
    const auto ops = assemble_circle(s1, models::twist_from_expressions(s1, "0.5"), 8);
    const auto e = eigs_of(ops, 0);
    CHECK(e[0] == doctest::Approx(0.25).epsilon(1e-13));
    CHECK(e[1] == doctest::Approx(1.25).epsilon(1e-13));
    CHECK(e[2] == doctest::Approx(1.25).epsilon(1e-13));
    // kernel is empty once the class is nonzero
    const auto spec = spectral::eigensolve(ops);
    CHECK(spectral::betti(spec) == std::vector<int>({0, 0}));
}

TEST_CASE("degree swap with sign: spectrum of the 1-form block at theta equals the "
          "function block at -theta") {
    const ModelManifold s1 = models::circle();
    const TwistForm tw = models::twist_from_expressions(s1, "0.8*sin(x)");
    const auto plus = assemble_circle(s1, tw, 24);
    const auto minus = assemble_circle(s1, tw.negated(), 24);
    const auto e1 = eigs_of(plus, 1);
    const auto e0 = eigs_of(minus, 0);
    double worst = 0;
    for (size_t i = 0; i < e1.size(); ++i) worst = std::max(worst, std::abs(e1[i] - e0[i]));
    CHECK(worst < 1e-9);
}

TEST_CASE("circle circumference scales frequencies") {
    const ModelManifold s1 = models::circle(4 * M_PI); // kappa = 1/2
    const auto ops = assemble_circle(s1, TwistForm::none(1, {0.5, 1.0}), 6);
    const auto e = eigs_of(ops, 0);
    CHECK(e[1] == doctest::Approx(0.25).epsilon(1e-13));
}

TEST_CASE("aliasing refusal and closedness rejection") {
    const ModelManifold s1 = models::circle();
    CHECK_THROWS_AS(assemble_circle(s1, models::twist_from_expressions(s1, "0.1*cos(5*x)"), 4),
                    ConfigError);
    const ModelManifold t2 = models::flat_torus({2 * M_PI, 2 * M_PI});
    TwistForm notClosed = TwistForm::none(2, {1.0, 1.0});
    notClosed.comp[0] = TrigPoly::sine(2, 1, 1, 1.0, {1.0, 1.0});
    CHECK_THROWS_AS(assemble_torus(t2, notClosed, 8), ConfigError);
}

TEST_CASE("untwisted torus Betti numbers and spectra") {
    const ModelManifold t2 = models::flat_torus({2 * M_PI, 2 * M_PI});
    const auto ops = assemble_torus(t2, TwistForm::none(2, {1.0, 1.0}), 6);
    const auto spec = spectral::eigensolve(ops);
    CHECK(spectral::betti(spec) == std::vector<int>({1, 2, 1}));
    CHECK(spectral::index(spec) == 0);
    const auto e0 = eigs_of(ops, 0);
    CHECK(e0[0] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(e0[1] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(e0[4] == doctest::Approx(1.0).epsilon(1e-12)); // multiplicity 4 of 1
    CHECK(e0[5] == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("constant torus twists kill the kernel in every degree") {
    const ModelManifold t2 = models::flat_torus({2 * M_PI, 2 * M_PI});
    const auto ops = assemble_torus(t2, models::twist_from_expressions(t2, "0.7", ""), 8);
    CHECK(spectral::betti(spectral::eigensolve(ops)) == std::vector<int>({0, 0, 0}));
}

TEST_CASE("exact shifts leave kernel dimensions alone") {
    const ModelManifold t2 = models::flat_torus({2 * M_PI, 2 * M_PI});
    const TwistForm base = models::twist_from_expressions(t2, "0.7", "");
    const TwistForm shifted =
        models::twist_plus_exact(base, TrigPoly::sine(2, 0, 1, 0.4, {1.0, 1.0}));
    CHECK(spectral::betti(spectral::eigensolve(assemble_torus(t2, shifted, 8))) ==
          std::vector<int>({0, 0, 0}));
}

TEST_CASE("chain property after truncation masking, adjointness by construction") {
    std::mt19937 rng(808);
    const ModelManifold t2 = models::flat_torus({2 * M_PI, 2 * M_PI});
    for (int trial = 0; trial < 5; ++trial) {
        TwistForm tw = TwistForm::none(2, {1.0, 1.0});
        tw.comp[0] += TrigPoly::constant(2, urand(rng, -1, 1), tw.omega);
        tw.comp[1] += TrigPoly::constant(2, urand(rng, -1, 1), tw.omega);
        TrigPoly h = TrigPoly::sine(2, 0, 1, urand(rng, -0.5, 0.5), tw.omega);
        h += TrigPoly::cosine(2, 1, 1, urand(rng, -0.5, 0.5), tw.omega);
        tw = models::twist_plus_exact(tw, h);
        const auto ops = assemble_torus(t2, tw, 10);
        CHECK(chain_residual(ops) < 1e-9);

        // delta is the conjugate transpose of d, entry by entry
        const SparseC delta = delta_of(ops.chains[0]);
        const DenseC d = ops.chains[0].d.dense();
        const DenseC dl = delta.dense();
        double worst = 0;
        for (int i = 0; i < d.rows; ++i)
            for (int j = 0; j < d.cols; ++j)
                worst = std::max(worst, std::abs(dl(j, i) - std::conj(d(i, j))));
        CHECK(worst == 0.0);
    }
}

TEST_CASE("interval resolutions") {
    const ModelManifold seg = models::interval(M_PI);

    SUBCASE("relative: Dirichlet functions, Neumann 1-forms, index -1") {
        const auto ops = assemble_interval(seg, BoundaryFlavor::Relative, 40);
        const auto e0 = eigs_of(ops, 0);
        const auto e1 = eigs_of(ops, 1);
        CHECK(e0[0] == doctest::Approx(1.0));
        CHECK(e0[1] == doctest::Approx(4.0));
        CHECK(e1[0] == doctest::Approx(0.0));
        CHECK(e1[1] == doctest::Approx(1.0));
        const auto spec = spectral::eigensolve(ops);
        CHECK(spectral::betti(spec) == std::vector<int>({0, 1}));
        CHECK(spectral::index(spec) == -1);
    }

    SUBCASE("absolute swaps the pattern, index +1") {
        const auto ops = assemble_interval(seg, BoundaryFlavor::Absolute, 40);
        const auto spec = spectral::eigensolve(ops);
        CHECK(spectral::betti(spec) == std::vector<int>({1, 0}));
        CHECK(spectral::index(spec) == +1);
    }

    SUBCASE("length L = 2 pi rescales to n^2 / 4") {
        const auto ops = assemble_interval(models::interval(2 * M_PI), BoundaryFlavor::Relative, 20);
        const auto e0 = eigs_of(ops, 0);
        CHECK(e0[0] == doctest::Approx(0.25));
        CHECK(e0[1] == doctest::Approx(1.0));
        CHECK(e0[2] == doctest::Approx(2.25));
    }
}

TEST_CASE("Dolbeault blocks on the unit complex torus") {
    SUBCASE("theta = 0: spectra 4 pi^2 (n^2+m^2) with 1-dimensional kernels") {
        const auto ops = assemble_dolbeault_torus(TrigPoly::zero(2, {2 * M_PI, 2 * M_PI}), 6);
        const auto spec = spectral::eigensolve(ops);
        CHECK(spectral::betti(spec) == std::vector<int>({1, 1}));
        CHECK(spectral::index(spec) == 0);
        const auto e = eigs_of(ops, 0);
        CHECK(e[0] == doctest::Approx(0.0).epsilon(1e-10));
        CHECK(e[1] == doctest::Approx(4 * M_PI * M_PI).epsilon(1e-10));
    }

    SUBCASE("generic constants have trivial kernels but index 0") {
        const auto ops =
            assemble_dolbeault_torus(TrigPoly::constant(2, cplx(0.3, 0.2), {2 * M_PI, 2 * M_PI}), 6);
        const auto spec = spectral::eigensolve(ops);
        CHECK(spectral::betti(spec) == std::vector<int>({0, 0}));
        CHECK(spectral::index(spec) == 0);
    }

    SUBCASE("nonzero spectra of the two blocks coincide") {
        const auto ops = assemble_dolbeault_torus(
            TrigPoly::sine(2, 0, 1, cplx(0.4, 0.3), {2 * M_PI, 2 * M_PI}), 8);
        const auto e0 = eigs_of(ops, 0);
        const auto e1 = eigs_of(ops, 1);
        // strip near-kernel values below 1e-8 and compare the shared prefix
        std::vector<double> n0, n1;
        for (double v : e0)
            if (v > 1e-8) n0.push_back(v);
        for (double v : e1)
            if (v > 1e-8) n1.push_back(v);
        const size_t count = std::min(n0.size(), n1.size());
        double worst = 0;
        for (size_t i = 0; i < count; ++i) worst = std::max(worst, std::abs(n0[i] - n1[i]));
        CHECK(worst < 1e-9);
    }
}

TEST_CASE("product complex: Kuenneth kernel dimensions and index multiplicativity") {
    const ModelManifold s1 = models::circle();
    const TwistForm zero = TwistForm::none(1, {1.0, 1.0});
    const auto ca = assemble_circle(s1, zero, 6);
    const auto cb = assemble_circle(s1, models::twist_from_expressions(s1, "0.4"), 6);

    const auto prodZZ = product_complex(ca, ca);
    const auto specZZ = spectral::eigensolve(prodZZ);
    CHECK(spectral::betti(specZZ) == std::vector<int>({1, 2, 1}));
    CHECK(spectral::index(specZZ) == 0);

    const auto prodZT = product_complex(ca, cb);
    const auto specZT = spectral::eigensolve(prodZT);
    CHECK(spectral::betti(specZT) == std::vector<int>({0, 0, 0}));
    CHECK(spectral::index(specZT) == 0);

    CHECK_THROWS_AS(product_complex(assemble_circle(s1, zero, 40),
                                    assemble_circle(s1, zero, 40), 1000),
                    UnsupportedError);
}

TEST_CASE("imaginary exact twists are isospectral with the untwisted complex") {
    const ModelManifold s1 = models::circle();
    TwistForm imag = TwistForm::none(1, {1.0, 1.0});
    imag.comp[0] = TrigPoly::cosine(1, 0, 1, cplx(0, 0.5), {1.0, 1.0});
    const auto twisted = spectral::eigensolve(assemble_circle(s1, imag, 24));
    const auto plain =
        spectral::eigensolve(assemble_circle(s1, TwistForm::none(1, {1.0, 1.0}), 24));
    const double cutoff = std::min(twisted.shared_cutoff(), plain.shared_cutoff());
    for (size_t d = 0; d < twisted.degrees.size(); ++d) {
        size_t count = 0;
        while (count < twisted.degrees[d].eigs.size() && count < plain.degrees[d].eigs.size() &&
               twisted.degrees[d].eigs[count] <= cutoff &&
               plain.degrees[d].eigs[count] <= cutoff)
            ++count;
        REQUIRE(count > 10);
        double worst = 0;
        for (size_t i = 0; i < count; ++i)
            worst = std::max(worst,
                             std::abs(twisted.degrees[d].eigs[i] - plain.degrees[d].eigs[i]));
        CHECK(worst < 1e-8);
    }
}

TEST_CASE("matrix bundles round-trip through the export format") {
    const ModelManifold s1 = models::circle();
    const auto ops = assemble_circle(s1, models::twist_from_expressions(s1, "0.3*sin(x)"), 6);
    const std::string path = "test_bundle.bin";
    export_bundle(ops, path);
    const auto back = import_bundle(path);
    REQUIRE(back.blocks.size() == ops.blocks.size());
    REQUIRE(back.chains.size() == ops.chains.size());
    for (size_t b = 0; b < ops.blocks.size(); ++b) {
        const DenseC lhs = ops.blocks[b].laplacian.dense();
        const DenseC rhs = back.blocks[b].laplacian.dense();
        CHECK(max_abs(lhs - rhs) == 0.0);
        CHECK(back.blocks[b].degree == ops.blocks[b].degree);
        CHECK(back.blocks[b].label == ops.blocks[b].label);
    }
    const DenseC dl = ops.chains[0].d.dense();
    const DenseC dr = back.chains[0].d.dense();
    CHECK(max_abs(dl - dr) == 0.0);
    std::remove(path.c_str());
}

TEST_CASE("nonzero twist classes empty the degree-0 kernel") {
    std::mt19937 rng(90210);
    const ModelManifold t2 = models::flat_torus({2 * M_PI, 2 * M_PI});
    for (int trial = 0; trial < 5; ++trial) {
        TwistForm tw = TwistForm::none(2, {1.0, 1.0});
        const double c1 = 0.3 + 0.6 * (rng() * (1.0 / 4294967296.0));
        const double c2 = (trial % 2) ? 0.0 : -0.4 - 0.4 * (rng() * (1.0 / 4294967296.0));
        tw.comp[0] += TrigPoly::constant(2, c1, tw.omega);
        tw.comp[1] += TrigPoly::constant(2, c2, tw.omega);
        tw = models::twist_plus_exact(tw, TrigPoly::sine(2, 0, 1, 0.3, tw.omega));
        const auto spec = spectral::eigensolve(assemble_torus(t2, tw, 8));
        CHECK(spectral::betti(spec)[0] == 0);
    }
}

TEST_CASE("graded block sizes follow the binomial fiber pattern") {
    const ModelManifold t2 = models::flat_torus({2 * M_PI, 2 * M_PI});
    const auto ops = assemble_torus(t2, TwistForm::none(2, {1.0, 1.0}), 5);
    const int modes = 11 * 11;
    REQUIRE(ops.blocks.size() == 3);
    CHECK(ops.blocks[0].size == 1 * modes);
    CHECK(ops.blocks[1].size == 2 * modes);
    CHECK(ops.blocks[2].size == 1 * modes);
}
