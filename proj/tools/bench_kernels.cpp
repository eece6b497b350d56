// Timing comparison of the OpenMP assembly kernels against the serial
// reference, on meshes large enough for the parallel cutoff to engage.
// Outputs agree bitwise by construction; this target reports the speedup.

#include <cstdio>
#include <random>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "pqs/domain.hpp"
#include "pqs/kernels.hpp"

namespace ker = pqs::kernels;

namespace {

double now() {
#ifdef _OPENMP
    return omp_get_wtime();
#else
    return double(clock()) / CLOCKS_PER_SEC;
#endif
}

template <class F>
double time_best_of(int reps, F&& f) {
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        const double t0 = now();
        f();
        best = std::min(best, now() - t0);
    }
    return best;
}

}  // namespace

int main() {
    const double p = 3.0, q = 1.5, mu = 1e-6;
#ifdef _OPENMP
    std::printf("openmp threads: %d\n", omp_get_max_threads());
#else
    std::printf("built without openmp; both columns run serial code\n");
#endif
    std::printf("%-16s %10s %12s %12s %9s %7s\n", "kernel", "n", "serial[ms]", "openmp[ms]",
                "speedup", "equal");

    for (std::size_t n : {std::size_t(100000), std::size_t(1000000), std::size_t(4000000)}) {
        std::mt19937 rng(42);
        std::uniform_real_distribution<double> unif(0.1, 1.0);
        std::vector<double> u(n + 1), h(n), w(n), src(n);
        for (auto& v : u) v = unif(rng);
        for (std::size_t e = 0; e < n; ++e) {
            h[e] = unif(rng);
            w[e] = h[e];
            src[e] = unif(rng);
        }
        std::vector<double> a(n), b(n), g1(n - 1), g2(n - 1), d1(n - 1), d2(n - 1), o1(n - 2),
            o2(n - 2);

        const int reps = 5;
        struct Row {
            const char* name;
            double ts, tp;
            bool equal;
        };
        std::vector<Row> rows;

        ker::serial::diff_quotients(u, h, a);
        double ts = time_best_of(reps, [&] { ker::serial::power_density(a, w, p, mu, b); });
        std::vector<double> ref = b;
        double tp = time_best_of(reps, [&] { ker::power_density(a, w, p, mu, b); });
        rows.push_back({"power_density", ts, tp, ref == b});

        ts = time_best_of(reps, [&] { ker::serial::stress_flux(a, w, h, p, q, mu, b); });
        ref = b;
        tp = time_best_of(reps, [&] { ker::stress_flux(a, w, h, p, q, mu, b); });
        rows.push_back({"stress_flux", ts, tp, ref == b});

        ts = time_best_of(reps, [&] { ker::serial::hessian_coeffs(a, w, h, p, q, mu, b); });
        ref = b;
        tp = time_best_of(reps, [&] { ker::hessian_coeffs(a, w, h, p, q, mu, b); });
        rows.push_back({"hessian_coeffs", ts, tp, ref == b});

        ker::serial::load_gather(src, w, 1, n, g1);
        ts = time_best_of(reps, [&] { ker::serial::gradient_gather(b, g1, 1, n, g2); });
        ref = g2;
        tp = time_best_of(reps, [&] { ker::gradient_gather(b, g1, 1, n, g2); });
        rows.push_back({"gradient_gather", ts, tp, ref == g2});

        ts = time_best_of(reps, [&] { ker::serial::tridiag_gather(b, 1, n, d1, o1); });
        tp = time_best_of(reps, [&] { ker::tridiag_gather(b, 1, n, d2, o2); });
        rows.push_back({"tridiag_gather", ts, tp, d1 == d2 && o1 == o2});

        for (const Row& r : rows)
            std::printf("%-16s %10zu %12.3f %12.3f %8.2fx %7s\n", r.name, n, 1e3 * r.ts,
                        1e3 * r.tp, r.ts / r.tp, r.equal ? "yes" : "NO");
    }
    return 0;
}
