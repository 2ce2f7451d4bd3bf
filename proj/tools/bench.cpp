// Compares the serial reference kernels against the OpenMP ones: dense
// symmetric eigensolve (tridiagonalization-dominated) and curvature
// quadrature. Run manually; sizes are chosen to finish in about a minute.
#include <chrono>
#include <cstdio>
#include <random>
#include <vector>

#include "heatlab/laplace_ops.hpp"
#include "heatlab/models.hpp"
#include "heatlab/parallel.hpp"
#include "heatlab/sym_eigen.hpp"
#include "heatlab/tensor_core.hpp"

using namespace heatlab;

namespace {

double now_seconds() {
    return std::chrono::duration<double>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

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

int main() {
    std::printf("threads available: %d\n\n", thread_count());

    std::printf("%-28s %10s %10s %8s\n", "kernel", "serial[s]", "parallel[s]", "speedup");
    for (int n : {512, 1024, 2048}) {
        const DenseR a = random_symmetric(n, 42);
        double t0 = now_seconds();
        const auto serial = sym_eigenvalues_serial(a);
        double t1 = now_seconds();
        const auto parallel = sym_eigenvalues(a);
        double t2 = now_seconds();
        double worst = 0;
        for (int i = 0; i < n; ++i) worst = std::max(worst, std::abs(serial[i] - parallel[i]));
        std::printf("sym_eigenvalues n=%-10d %10.3f %10.3f %7.2fx   (max dev %.2e)\n", n,
                    t1 - t0, t2 - t1, (t1 - t0) / std::max(t2 - t1, 1e-9), worst);
    }

    {
        const auto s4 = models::round_sphere(4, 1.0);
        const auto chart = models::chart_of(s4);
        const auto density = [&](const std::vector<double>& x) {
            return laplace::euler_form(tensor::curvature(chart.metric_jet(x), 0));
        };
        double t0 = now_seconds();
        const double serial = models::integrate_serial(s4, density);
        double t1 = now_seconds();
        const double parallel = models::integrate(s4, density);
        double t2 = now_seconds();
        std::printf("euler_form quadrature on S^4 %10.3f %10.3f %7.2fx   (dev %.2e)\n",
                    t1 - t0, t2 - t1, (t1 - t0) / std::max(t2 - t1, 1e-9),
                    std::abs(serial - parallel));
    }
    return 0;
}
