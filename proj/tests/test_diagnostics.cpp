#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "pqs/barriers.hpp"
#include "pqs/diagnostics.hpp"

using namespace pqs;

namespace {

ProblemSpec make_spec(double p, double q, double delta, double beta, double cf = 1.0) {
    ProblemSpec s;
    s.p = p;
    s.q = q;
    s.delta = delta;
    s.beta = beta;
    s.amplitude = cf;
    s.domain = Domain::interval(1.0);
    return s;
}

DiscreteField synthetic_power(MeshPtr mesh, double c, double s) {
    DiscreteField u(mesh);
    const auto& d = mesh->distance_node();
    for (std::size_t i = 0; i < u.values.size(); ++i)
        u.values[i] = d[i] > 0.0 ? c * std::pow(d[i], s) : 0.0;
    return u;
}

}  // namespace

TEST_CASE("exponent fit recovers synthetic powers exactly") {
    MeshPtr mesh = build_mesh(Domain::interval(1.0), 2048, 3.0);
    const ExponentFit f1 = fit_boundary_exponent(synthetic_power(mesh, 1.0, 2.0 / 3.0),
                                                 FitWindow{1e-4, 1e-2});
    CHECK(f1.slope == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK(f1.residual < 1e-12);
    CHECK(f1.count >= 16);
    CHECK(f1.asymmetry < 1e-12);

    const ExponentFit f2 = fit_boundary_exponent(synthetic_power(mesh, 3.0, 1.0),
                                                 FitWindow{1e-4, 1e-2});
    CHECK(f2.slope == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(f2.intercept == doctest::Approx(std::log(3.0)).epsilon(1e-10));
}

TEST_CASE("exponent fit rejects thin windows and non-positive fields") {
    MeshPtr coarse = build_mesh(Domain::interval(1.0), 16, 1.0);
    CHECK_THROWS_AS(fit_boundary_exponent(synthetic_power(coarse, 1.0, 0.5),
                                          FitWindow{1e-4, 1e-2}),
                    std::invalid_argument);
    MeshPtr mesh = build_mesh(Domain::interval(1.0), 2048, 3.0);
    DiscreteField zero(mesh);
    CHECK_THROWS_AS(fit_boundary_exponent(zero, FitWindow{1e-4, 1e-2}), std::invalid_argument);
    CHECK_THROWS_AS(fit_boundary_exponent(synthetic_power(mesh, 1.0, 0.5), FitWindow{1e-3, 0.4}),
                    std::invalid_argument);  // window beyond quarter extent
}

TEST_CASE("log-regime band: synthetic profile gives a unit band") {
    ProblemSpec s = make_spec(2.0, 1.5, 0.6, 0.4);
    const double L = default_log_scale(s);
    const double k = 1.0 / (s.p - s.beta);
    MeshPtr mesh = build_mesh(Domain::interval(1.0), 2048, 3.0);
    DiscreteField u(mesh);
    const auto& d = mesh->distance_node();
    for (std::size_t i = 0; i < u.values.size(); ++i)
        u.values[i] = d[i] > 0.0 ? d[i] * std::pow(std::log(L / d[i]), k) : 0.0;
    const LogBand band = fit_log_regime(u, s, L, FitWindow{1e-4, 1e-2});
    CHECK(band.r_min == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(band.r_max == doctest::Approx(1.0).epsilon(1e-12));
    // the matching power fit drifts between the halves of the window
    CHECK(band.power_slope_drift > 0.01);
}

TEST_CASE("log-regime band widens for a plain linear profile") {
    ProblemSpec s = make_spec(2.0, 1.5, 0.6, 0.4);
    const double L = default_log_scale(s);
    MeshPtr mesh = build_mesh(Domain::interval(1.0), 2048, 3.0);
    DiscreteField u(mesh);
    for (std::size_t i = 0; i < u.values.size(); ++i) u.values[i] = mesh->distance_node()[i];
    const double k = 1.0 / (s.p - s.beta);
    const LogBand band = fit_log_regime(u, s, L, FitWindow{1e-4, 1e-2});
    // closed-form ratio: r(d) = log^{-k}(L/d), increasing in d
    const double expect_min = std::pow(std::log(L / 1e-4), -k);
    const double expect_max = std::pow(std::log(L / 1e-2), -k);
    CHECK(band.r_min == doctest::Approx(expect_min).epsilon(1e-3));
    CHECK(band.r_max == doctest::Approx(expect_max).epsilon(1e-3));
    CHECK_THROWS_AS(fit_log_regime(u, make_spec(2, 1.5, 1.0, 0.5), L, FitWindow{}),
                    std::invalid_argument);  // wrong regime
}

TEST_CASE("power energy tracks the improper-integral criterion on synthetic fields") {
    // E(u^rho) with u = d^tau stays bounded under refinement iff (rho tau - 1) p > -1
    const double tau = 0.5, p = 2.0;
    for (double rho : {0.8, 1.2}) {
        std::vector<double> energies;
        for (std::size_t n : {256, 512, 1024, 2048}) {
            MeshPtr mesh = build_mesh(Domain::interval(1.0), n, 3.0);
            energies.push_back(power_energy(synthetic_power(mesh, 1.0, tau), rho, p));
        }
        const bool integrable = (rho * tau - 1.0) * p > -1.0;
        const double last_ratio = energies.back() / energies[energies.size() - 2];
        if (integrable)
            CHECK(last_ratio < kBoundedRatio);
        else
            CHECK(last_ratio > kDivergentRatio);
    }
}

TEST_CASE("sobolev probe validates its inputs") {
    SolverSettings settings;
    const std::vector<std::size_t> levels{16, 32, 64};
    CHECK_THROWS_AS(sobolev_probe(make_spec(2, 1.5, 1.0, 2.5), settings, 1.0, levels, 1.0, 1e-2),
                    std::invalid_argument);  // beta >= p
    const std::vector<std::size_t> two{16, 32};
    CHECK_THROWS_AS(sobolev_probe(make_spec(2, 1.5, 1.0, 0.0), settings, 1.0, two, 1.0, 1e-2),
                    std::invalid_argument);  // < 3 levels
}

TEST_CASE("barrier sandwich: exact profiles and scale equivariance") {
    ProblemSpec s = make_spec(3, 2, 1, 1);
    MeshPtr mesh = build_mesh(Domain::interval(1.0), 256, 3.0);
    const double eps = 1e-4;
    DiscreteField u(mesh);
    for (std::size_t i = 0; i < u.values.size(); ++i)
        u.values[i] = barrier_unit(mesh->nodes()[i], eps, s);

    const SandwichConstants one = barrier_sandwich(u, eps, s);
    CHECK(one.eta_star == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(one.gamma_star == doctest::Approx(1.0).epsilon(1e-12));

    DiscreteField u2 = u;
    for (double& v : u2.values) v *= 2.0;
    const SandwichConstants two = barrier_sandwich(u2, eps, s);
    CHECK(two.eta_star == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(two.gamma_star == doctest::Approx(2.0).epsilon(1e-12));

    // ratios scale by exactly lambda
    DiscreteField u3 = u;
    for (std::size_t i = 0; i < u3.values.size(); ++i) u3.values[i] *= (1.0 + 0.3 * (i % 7));
    const SandwichConstants base = barrier_sandwich(u3, eps, s);
    for (double& v : u3.values) v *= 5.0;
    const SandwichConstants scaled = barrier_sandwich(u3, eps, s);
    CHECK(scaled.eta_star == doctest::Approx(5.0 * base.eta_star).epsilon(1e-12));
    CHECK(scaled.gamma_star == doctest::Approx(5.0 * base.gamma_star).epsilon(1e-12));

    DiscreteField zero(mesh);
    CHECK_THROWS_AS(barrier_sandwich(zero, eps, s), std::runtime_error);
}

TEST_CASE("comparison check is reflexively zero and tracks the ordering") {
    ProblemSpec s = make_spec(2, 1.5, 1.0, 0.5);
    SolverSettings settings;
    MeshPtr mesh = build_mesh(Domain::interval(1.0), 128, 3.0);

    const ComparisonResult same = comparison_check(s, settings, 1.0, 1.0, 1e-4, mesh);
    CHECK(same.regime_ok);
    CHECK(same.max_violation <= settings.picard_tol * 10);

    const ComparisonResult ordered = comparison_check(s, settings, 1.0, 2.0, 1e-4, mesh);
    CHECK(ordered.max_violation <= 1e-8);

    // antisymmetry of the report: swapping roles surfaces the previous gap
    const DiscreteField u1 = solve_at_eps(s.with_amplitude(1.0), settings, mesh, 1e-4);
    const DiscreteField u2 = solve_at_eps(s.with_amplitude(2.0), settings, mesh, 1e-4);
    double fwd = -1e300, gap = -1e300;
    for (std::size_t i = 0; i < u1.values.size(); ++i) {
        fwd = std::max(fwd, u1.values[i] - u2.values[i]);
        gap = std::max(gap, u2.values[i] - u1.values[i]);
    }
    CHECK(fwd == ordered.max_violation);
    CHECK(gap > 0.0);

    const ComparisonResult outside =
        comparison_check(make_spec(2, 1.5, 1.0, 1.8), settings, 1.0, 2.0, 1e-3, mesh);
    CHECK_FALSE(outside.regime_ok);  // beta >= 2 - 1/p: reported, not asserted
    CHECK_THROWS_AS(comparison_check(s, settings, 2.0, 1.0, 1e-4, mesh), std::invalid_argument);
}

TEST_CASE("nonexistence probe: tau formula values and input validation") {
    ProblemSpec s = make_spec(2, 1.5, 1.0, 2.5);
    // direct substitution: tau = (p - beta~) / (p - 1 + delta)
    const std::vector<double> betas{1.5, 1.8, 1.9, 1.95};
    const std::vector<double> expect{0.25, 0.1, 0.05, 0.025};
    for (std::size_t i = 0; i < betas.size(); ++i)
        CHECK(s.with_beta(betas[i]).tau() == doctest::Approx(expect[i]));

    SolverSettings settings;
    const std::vector<std::size_t> levels{16, 32};
    const std::vector<double> gammas{1.0};
    CHECK_THROWS_AS(
        nonexistence_probe(make_spec(2, 1.5, 1.0, 0.5), settings, levels, 1.0, 1e-2, gammas),
        std::invalid_argument);  // beta < p is not the non-existence regime
}

TEST_CASE("synthetic hardy integrals diverge exactly when the improper integral does") {
    // H = sum w (u/d)^p with u = d^sigma: finite iff (sigma - 1) p > -1
    const double p = 2.0;
    for (double sigma : {0.25, 0.1, 0.05, 0.025, 0.8}) {
        std::vector<double> h;
        for (std::size_t n : {256, 512, 1024}) {
            MeshPtr mesh = build_mesh(Domain::interval(1.0), n, 3.0);
            const auto& w = mesh->element_weight();
            const auto& dm = mesh->distance_mid();
            double sum = 0.0;
            for (std::size_t e = 0; e < mesh->num_elements(); ++e)
                sum += w[e] * std::pow(std::pow(dm[e], sigma) / dm[e], p);
            h.push_back(sum);
        }
        const bool integrable = (sigma - 1.0) * p > -1.0;  // sigma > 1 - 1/p = 0.5
        const double growth = h.back() / h[h.size() - 2];
        if (integrable)
            CHECK(growth < 1.2);
        else
            CHECK(growth >= 1.2);  // every listed boundary exponent fails for p=2
    }
}
