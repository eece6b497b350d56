#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "pqs/domain.hpp"
#include "pqs/kernels.hpp"

using namespace pqs;
namespace ker = kernels;

namespace {

struct Data {
    std::vector<double> u, h, w, src;
    explicit Data(std::size_t n, unsigned seed) : u(n + 1), h(n), w(n), src(n) {
        std::mt19937 rng(seed);
        std::uniform_real_distribution<double> unif(0.05, 1.0);
        for (auto& v : u) v = unif(rng) - 0.5;
        for (std::size_t e = 0; e < n; ++e) {
            h[e] = unif(rng);
            w[e] = unif(rng);
            src[e] = unif(rng);
        }
    }
};

}  // namespace

TEST_CASE("openmp kernels agree bitwise with the serial reference") {
    // sizes straddling the parallel cutoff
    for (std::size_t n : {3ul, 100ul, ker::kParallelCutoff - 1, ker::kParallelCutoff + 5, 40000ul}) {
        Data d(n, unsigned(n));
        const double p = 2.7, q = 1.4, mu = 1e-5;
        std::vector<double> a1(n), a2(n), b1(n), b2(n);

        ker::serial::diff_quotients(d.u, d.h, a1);
        ker::diff_quotients(d.u, d.h, a2);
        REQUIRE(a1 == a2);

        ker::serial::power_density(a1, d.w, p, mu, b1);
        ker::power_density(a1, d.w, p, mu, b2);
        CHECK(b1 == b2);

        ker::serial::source_density(d.u, d.w, d.src, b1);
        ker::source_density(d.u, d.w, d.src, b2);
        CHECK(b1 == b2);

        ker::serial::stress_flux(a1, d.w, d.h, p, q, mu, b1);
        ker::stress_flux(a1, d.w, d.h, p, q, mu, b2);
        CHECK(b1 == b2);

        std::vector<double> c1(n), c2(n);
        ker::serial::hessian_coeffs(a1, d.w, d.h, p, q, mu, c1);
        ker::hessian_coeffs(a1, d.w, d.h, p, q, mu, c2);
        CHECK(c1 == c2);

        const std::size_t fb = 1, fe = n;
        std::vector<double> l1(fe - fb), l2(fe - fb), g1(fe - fb), g2(fe - fb);
        ker::serial::load_gather(d.src, d.w, fb, fe, l1);
        ker::load_gather(d.src, d.w, fb, fe, l2);
        CHECK(l1 == l2);

        ker::serial::gradient_gather(b1, l1, fb, fe, g1);
        ker::gradient_gather(b1, l1, fb, fe, g2);
        CHECK(g1 == g2);

        std::vector<double> di1(fe - fb), di2(fe - fb), o1(fe - fb - 1), o2(fe - fb - 1);
        ker::serial::tridiag_gather(c1, fb, fe, di1, o1);
        ker::tridiag_gather(c1, fb, fe, di2, o2);
        CHECK(di1 == di2);
        CHECK(o1 == o2);

        CHECK(ker::serial::ordered_sum(b1) == ker::ordered_sum(b1));
        CHECK(ker::serial::sup_abs_diff(d.src, d.w) == ker::sup_abs_diff(d.src, d.w));
    }
}

TEST_CASE("assembled gradient matches finite differences of the energy") {
    const std::size_t n = 12;
    Data d(n, 99);
    const double p = 3.0, q = 1.5, mu = 1e-3;
    const std::size_t fb = 1, fe = n;

    const auto energy = [&](const std::vector<double>& u) {
        std::vector<double> du(n), dens(n);
        ker::diff_quotients(u, d.h, du);
        ker::power_density(du, d.w, p, mu, dens);
        double e = ker::ordered_sum(dens) / p;
        ker::power_density(du, d.w, q, mu, dens);
        e += ker::ordered_sum(dens) / q;
        ker::source_density(u, d.w, d.src, dens);
        return e - ker::ordered_sum(dens);
    };

    std::vector<double> du(n), flux(n), load(fe - fb), g(fe - fb);
    ker::diff_quotients(d.u, d.h, du);
    ker::stress_flux(du, d.w, d.h, p, q, mu, flux);
    ker::load_gather(d.src, d.w, fb, fe, load);
    ker::gradient_gather(flux, load, fb, fe, g);

    const double step = 1e-7;
    for (std::size_t k = 0; k < fe - fb; ++k) {
        std::vector<double> up = d.u, dn = d.u;
        up[fb + k] += step;
        dn[fb + k] -= step;
        const double fd = (energy(up) - energy(dn)) / (2 * step);
        CHECK(g[k] == doctest::Approx(fd).epsilon(1e-5));
    }
}

TEST_CASE("hessian coefficients match finite differences of the flux") {
    const std::size_t n = 8;
    Data d(n, 5);
    const double p = 2.6, q = 1.3, mu = 1e-2;
    std::vector<double> du(n), f0(n), f1(n), coeff(n);
    ker::diff_quotients(d.u, d.h, du);
    ker::hessian_coeffs(du, d.w, d.h, p, q, mu, coeff);
    ker::stress_flux(du, d.w, d.h, p, q, mu, f0);

    // bump one nodal value; only the two touching elements react
    const double step = 1e-7;
    std::vector<double> u = d.u;
    u[3] += step;
    std::vector<double> du2(n);
    ker::diff_quotients(u, d.h, du2);
    ker::stress_flux(du2, d.w, d.h, p, q, mu, f1);
    // d flux_e / d u_{e+1} = w_e a_e / h_e^2 = coeff[e]
    CHECK((f1[2] - f0[2]) / step == doctest::Approx(coeff[2]).epsilon(1e-5));
    // d flux_e / d u_e = -coeff[e]
    CHECK((f1[3] - f0[3]) / step == doctest::Approx(-coeff[3]).epsilon(1e-5));
}

TEST_CASE("exact stress stays finite at mu = 0") {
    std::vector<double> du{0.0, 1e-12, -2.0};
    std::vector<double> w{1.0, 1.0, 1.0}, h{1.0, 1.0, 1.0}, out(3);
    ker::stress_flux(du, w, h, 1.5, 1.2, 0.0, out);  // exponents below 2
    CHECK(out[0] == 0.0);
    CHECK(std::isfinite(out[1]));
    CHECK(out[2] < 0.0);
}
