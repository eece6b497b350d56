#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "pqs/barriers.hpp"

using namespace pqs;

namespace {

ProblemSpec make_spec(double p, double q, double delta, double beta, double length = 1.0) {
    ProblemSpec s;
    s.p = p;
    s.q = q;
    s.delta = delta;
    s.beta = beta;
    s.domain = Domain::interval(length);
    return s;
}

// independent simpson quadrature used by the torsion centre-value oracle
template <class F>
double simpson(F&& f, double a, double b, int n) {
    double sum = f(a) + f(b);
    const double h = (b - a) / n;
    for (int i = 1; i < n; ++i) sum += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
    return sum * h / 3.0;
}

}  // namespace

TEST_CASE("power barriers: quoted values and boundary vanishing") {
    ProblemSpec s = make_spec(3, 2, 1, 1);  // tau = 2/3
    BarrierParams b = BarrierParams::for_spec(s);
    CHECK(b.tau == doctest::Approx(2.0 / 3.0));

    CHECK(lower_barrier_power(0.001, 0.0, s, b) == doctest::Approx(1e-2));
    CHECK(lower_barrier_power(0.0, 0.37, s, b) == 0.0);
    CHECK(lower_barrier_power(0.0, 0.0, s, b) == 0.0);

    ProblemSpec s2 = make_spec(2, 2, 2, 0.5);  // tau = 0.5
    BarrierParams b2 = BarrierParams::for_spec(s2);
    b2.eta = 0.7;
    CHECK(lower_barrier_power(0.04, 0.0, s2, b2) == doctest::Approx(0.7 * 0.2));

    b.gamma = 2.0;
    CHECK(upper_barrier_power(0.001, 0.0, s, b) == doctest::Approx(0.02));
    b.gamma = b.eta;
    CHECK(upper_barrier_power(0.3, 0.01, s, b) ==
          doctest::Approx(lower_barrier_power(0.3, 0.01, s, b)));
    CHECK(upper_barrier_power(0.01, 0.0, s, b) > upper_barrier_power(0.001, 0.0, s, b));

    CHECK_THROWS_AS(lower_barrier_power(0.1, 0.0, make_spec(2, 1.5, 0.3, 0.2), b),
                    std::invalid_argument);  // wrong regime
}

TEST_CASE("barriers grow with their amplitude") {
    ProblemSpec s = make_spec(3, 2, 1, 1);
    for (double d : {1e-4, 1e-2, 0.3}) {
        double prev = 0.0;
        for (double eta : {0.5, 1.0, 2.0, 4.0}) {
            BarrierParams b = BarrierParams::for_spec(s);
            b.eta = eta;
            const double v = lower_barrier_power(d, 1e-3, s, b);
            CHECK(v > prev);
            prev = v;
        }
    }
}

TEST_CASE("log barrier: hand oracle, boundary zero, monotone range") {
    ProblemSpec s = make_spec(2, 2, 0.5, 0.5);  // beta+delta = 1, k = 1/(p-beta) = 2/3
    BarrierParams b = BarrierParams::for_spec(s);
    b.L = std::exp(10.0);

    CHECK(barrier_log(0.0, 0.2, 1.0, s, b) == 0.0);
    CHECK(barrier_log(0.0, 0.0, 1.0, s, b) == 0.0);

    // eps'=0, d=1e-3: d (log(L/d))^{2/3} = 1e-3 (10 + 3 log 10)^{2/3}
    const double expect = 1e-3 * std::pow(10.0 + 3.0 * std::log(10.0), 2.0 / 3.0);
    CHECK(barrier_log(1e-3, 0.0, 1.0, s, b) == doctest::Approx(expect).epsilon(1e-12));

    // calculus oracle: s log^k(L/s) increases while log(L/s) > k
    double prev = 0.0;
    for (double d = 1e-4; d < 0.5; d *= 1.6) {
        const double v = barrier_log(d, 0.0, 1.0, s, b);
        CHECK(v > prev);
        prev = v;
    }

    BarrierParams tiny = b;
    tiny.L = 1.0;  // below (diam+1) e^{2/(p-beta)}
    CHECK_THROWS_AS(barrier_log(0.1, 0.0, 1.0, s, tiny), std::invalid_argument);
}

TEST_CASE("theta shoot: monotonicity, companion inequality, linear bound") {
    ProblemSpec s = make_spec(2, 1.5, 0.3, 0.3);
    const ThetaTable t = theta_shoot(1.0, s, 0.5, 1e-4);
    REQUIRE(t.r.size() > 100);
    for (std::size_t i = 1; i < t.r.size(); ++i) {
        CHECK(t.theta[i] > t.theta[i - 1]);    // strictly increasing profile
        CHECK(t.dtheta[i] < t.dtheta[i - 1]);  // strictly decreasing slope
        CHECK(t.theta[i] <= 1.0 * t.r[i] * (1 + 1e-12));  // theta_alpha(r) <= alpha r
    }
    // companion: -d/dr (theta'^{q-1}) >= 0, checked by finite differences
    for (std::size_t i = 1; i + 1 < t.r.size(); ++i) {
        const double fd = (std::pow(t.dtheta[i + 1], s.q - 1.0) -
                           std::pow(t.dtheta[i - 1], s.q - 1.0)) /
                          (t.r[i + 1] - t.r[i - 1]);
        CHECK(-fd >= -1e-10);
    }
}

TEST_CASE("theta shoot is second order in h") {
    ProblemSpec s = make_spec(2, 1.5, 0.3, 0.3);
    const double r_probe = 0.04;  // inside the turning radius R_1 = 0.0527
    const double f1 = theta_shoot(1.0, s, 0.05, 4e-4).value_at(r_probe);
    const double f2 = theta_shoot(1.0, s, 0.05, 2e-4).value_at(r_probe);
    const double f3 = theta_shoot(1.0, s, 0.05, 1e-4).value_at(r_probe);
    const double rate = std::log2(std::fabs(f1 - f2) / std::fabs(f2 - f3));
    CHECK(rate > 1.6);
    CHECK(rate < 2.6);
}

TEST_CASE("theta shoot guards") {
    ProblemSpec s = make_spec(2, 1.5, 0.3, 0.3);
    CHECK_THROWS_AS(theta_shoot(1.0, make_spec(2, 1.5, 0.8, 0.4), 1.0, 1e-3),
                    std::invalid_argument);  // beta+delta >= 1
    CHECK_THROWS_AS(theta_shoot(0.05, s, 2.0, 0.45), std::invalid_argument);  // h too coarse
}

TEST_CASE("theta scaling: identity at alpha=1, detected turning radius grows with alpha") {
    ProblemSpec s = make_spec(2, 1.5, 0.3, 0.3);
    const ThetaTable t1 = theta_shoot(1.0, s, 0.6, 1e-4);
    CHECK(theta_scaling_check(1.0, s, std::vector<double>{0.01, 0.04}, t1, t1) == 0.0);

    const ThetaTable t2 = theta_shoot(2.0, s, 3.0, 1e-4);
    const ThetaTable t1full = theta_shoot(1.0, s, 3.0, 1e-4);
    CHECK(t1full.hit_turning);
    CHECK(t2.hit_turning);
    CHECK(t2.turning_radius > t1full.turning_radius);

    const double err = theta_scaling_check(2.0, s, std::vector<double>{0.5}, t2, t1full);
    CHECK(err < 1e-5);  // h = 1e-4 here; the acceptance run tightens h to 1e-5

    CHECK_THROWS_AS(theta_scaling_check(2.0, s, std::vector<double>{10.0}, t2, t1full),
                    std::invalid_argument);  // probe beyond the table
}

TEST_CASE("flux law inversion") {
    CHECK(flux_law(1.0, 3.0, 2.0) == doctest::Approx(2.0));
    CHECK(flux_law_inverse(2.0, 3.0, 2.0) == doctest::Approx(1.0));  // s^2 + s = 2
    CHECK(flux_law_inverse(0.0, 2.5, 1.5) == 0.0);
    for (double F : {1e-6, 0.3, 7.0, 1e4}) {
        const double sv = flux_law_inverse(F, 2.7, 1.4);
        CHECK(flux_law(sv, 2.7, 1.4) == doctest::Approx(F).epsilon(1e-12));
    }
}

TEST_CASE("torsion oracle: closed form, centre quadrature, monotone in rho") {
    ProblemSpec lin = make_spec(2, 2, 1, 0, 2.0);
    MeshPtr mesh = build_mesh(lin.domain, 64, 1.0);
    const DiscreteField u = torsion_oracle(1.0, lin, mesh);
    for (std::size_t i = 0; i < mesh->num_nodes(); ++i) {
        const double x = mesh->nodes()[i] - 1.0;
        CHECK(u.values[i] == doctest::Approx(0.25 * (1 - x * x)).epsilon(1e-12));
    }

    // p=3, q=2, rho=2: u(centre) = int_0^1 hinv(2t) dt by simpson
    ProblemSpec pq = make_spec(3, 2, 1, 0, 2.0);
    const DiscreteField v = torsion_oracle(2.0, pq, mesh);
    const double centre = simpson(
        [&](double t) { return flux_law_inverse(2.0 * t, 3.0, 2.0); }, 0.0, 1.0, 4000);
    CHECK(v.values[mesh->num_nodes() / 2] == doctest::Approx(centre).epsilon(1e-10));

    // the map rho -> u_rho is increasing, nodewise
    const DiscreteField a = torsion_oracle(0.5, pq, mesh);
    const DiscreteField b = torsion_oracle(1.0, pq, mesh);
    const DiscreteField c = torsion_oracle(2.0, pq, mesh);
    for (std::size_t i = 1; i + 1 < mesh->num_nodes(); ++i) {
        CHECK(a.values[i] < b.values[i]);
        CHECK(b.values[i] < c.values[i]);
    }
}

TEST_CASE("torsion oracle satisfies the discrete weak form under refinement") {
    ProblemSpec pq = make_spec(3, 2, 1, 0, 2.0);
    const double rho = 1.0;
    double prev = 1e9;
    double prev_h = 0.0;
    std::vector<double> rates;
    for (std::size_t n : {32, 64, 128, 256}) {
        MeshPtr mesh = build_mesh(pq.domain, n, 1.0);
        const DiscreteField u = torsion_oracle(rho, pq, mesh);
        // residual of: sum_e w (|Du|^{p-2}+|Du|^{q-2}) Du dphi_i - rho int phi_i
        double res = 0.0;
        const auto& h = mesh->element_length();
        const auto& w = mesh->element_weight();
        for (std::size_t i = 1; i + 1 < mesh->num_nodes(); ++i) {
            const double dul = (u.values[i] - u.values[i - 1]) / h[i - 1];
            const double dur = (u.values[i + 1] - u.values[i]) / h[i];
            const double sl = (std::pow(std::fabs(dul), pq.p - 2.0) +
                               std::pow(std::fabs(dul), pq.q - 2.0)) * dul;
            const double sr = (std::pow(std::fabs(dur), pq.p - 2.0) +
                               std::pow(std::fabs(dur), pq.q - 2.0)) * dur;
            res = std::max(res, std::fabs(w[i - 1] / h[i - 1] * sl - w[i] / h[i] * sr -
                                          rho * 0.5 * (w[i - 1] + w[i])));
        }
        if (prev < 1e8) rates.push_back(std::log2(prev / res) / std::log2(prev_h / h[0]));
        prev = res;
        prev_h = h[0];
    }
    for (double r : rates) CHECK(r >= 1.0);
}
