#include "pqs/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "pqs/barriers.hpp"
#include "pqs/kernels.hpp"

namespace pqs {

namespace {

struct LinePoints {
    std::vector<double> lx, ly;
};

struct LineFit {
    double slope, intercept;
};

LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= double(n);
    my /= double(n);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0.0) throw std::invalid_argument("exponent fit: degenerate abscissas");
    const double a = sxy / sxx;
    return LineFit{a, my - a * mx};
}

// log-log samples of one boundary side, ordered from the boundary inward
LinePoints collect_side(const DiscreteField& u, FitWindow w, bool left_side) {
    const Mesh& m = *u.mesh;
    const auto& d = m.distance_node();
    const auto& x = m.nodes();
    const double half = m.domain().kind == DomainKind::Interval ? 0.5 * m.domain().extent
                                                                : -1.0;
    LinePoints pts;
    for (std::size_t i = 0; i < m.num_nodes(); ++i) {
        if (m.domain().kind == DomainKind::Interval) {
            const bool on_left = x[i] < half;
            if (on_left != left_side || x[i] == half) continue;
        }
        if (d[i] < w.d_min || d[i] > w.d_max) continue;
        if (!(u.values[i] > 0.0))
            throw std::invalid_argument("exponent fit: field not positive inside the window");
        pts.lx.push_back(std::log(d[i]));
        pts.ly.push_back(std::log(u.values[i]));
    }
    return pts;
}

double max_residual(const LinePoints& pts, LineFit fit) {
    double r = 0.0;
    for (std::size_t i = 0; i < pts.lx.size(); ++i)
        r = std::max(r, std::fabs(pts.ly[i] - (fit.slope * pts.lx[i] + fit.intercept)));
    return r;
}

LineFit fit_restricted(const LinePoints& pts, double lo, double hi, bool& ok) {
    std::vector<double> x, y;
    for (std::size_t i = 0; i < pts.lx.size(); ++i) {
        if (pts.lx[i] >= lo && pts.lx[i] <= hi) {
            x.push_back(pts.lx[i]);
            y.push_back(pts.ly[i]);
        }
    }
    if (x.size() < 4) {
        ok = false;
        return LineFit{0.0, 0.0};
    }
    ok = true;
    return least_squares(x, y);
}

}  // namespace

ExponentFit fit_boundary_exponent(const DiscreteField& u, FitWindow window) {
    if (!(window.d_min > 0.0) || !(window.d_min < window.d_max))
        throw std::invalid_argument("exponent fit: need 0 < d_min < d_max");
    const Mesh& m = *u.mesh;
    const double quarter = 0.25 * m.domain().diameter();
    if (window.d_max > quarter)
        throw std::invalid_argument("exponent fit: window must stay within a quarter of the domain");

    const bool interval = m.domain().kind == DomainKind::Interval;
    std::vector<LinePoints> sides;
    sides.push_back(collect_side(u, window, true));
    if (interval) sides.push_back(collect_side(u, window, false));

    int count = 0;
    for (const auto& s : sides) {
        if (s.lx.size() < 8)
            throw std::invalid_argument(
                "exponent fit: fewer than 8 nodes in the window; rebuild the mesh with more "
                "elements or a stronger grading");
        count += int(s.lx.size());
    }

    ExponentFit out;
    out.window = window;
    out.count = count;

    std::vector<LineFit> fits;
    for (const auto& s : sides) fits.push_back(least_squares(s.lx, s.ly));
    out.slope = fits.size() == 2 ? 0.5 * (fits[0].slope + fits[1].slope) : fits[0].slope;
    out.intercept =
        fits.size() == 2 ? 0.5 * (fits[0].intercept + fits[1].intercept) : fits[0].intercept;
    out.asymmetry = fits.size() == 2 ? std::fabs(fits[0].slope - fits[1].slope) : 0.0;
    for (std::size_t s = 0; s < sides.size(); ++s)
        out.residual = std::max(out.residual, max_residual(sides[s], fits[s]));

    // slope drift between the window's log-halves (used by the critical
    // regime check; NaN when either half is too thin)
    const double lmid = 0.5 * (std::log(window.d_min) + std::log(window.d_max));
    double lo_sum = 0.0, hi_sum = 0.0;
    int lo_n = 0, hi_n = 0;
    for (const auto& s : sides) {
        bool ok = false;
        LineFit f = fit_restricted(s, std::log(window.d_min), lmid, ok);
        if (ok) {
            lo_sum += f.slope;
            ++lo_n;
        }
        f = fit_restricted(s, lmid, std::log(window.d_max), ok);
        if (ok) {
            hi_sum += f.slope;
            ++hi_n;
        }
    }
    out.half_drift = (lo_n > 0 && hi_n > 0)
                         ? std::fabs(lo_sum / lo_n - hi_sum / hi_n)
                         : std::numeric_limits<double>::quiet_NaN();
    return out;
}

LogBand fit_log_regime(const DiscreteField& u, const ProblemSpec& spec, double L,
                       FitWindow window) {
    if (spec.regime() != Regime::Critical)
        throw std::invalid_argument("fit_log_regime: beta+delta = 1 regime only");
    if (L < min_log_scale(spec)) throw std::invalid_argument("fit_log_regime: L too small");
    const Mesh& m = *u.mesh;
    const auto& d = m.distance_node();
    const double k = 1.0 / (spec.p - spec.beta);

    LogBand band;
    band.r_min = std::numeric_limits<double>::infinity();
    band.r_max = 0.0;
    for (std::size_t i = 0; i < m.num_nodes(); ++i) {
        if (d[i] < window.d_min || d[i] > window.d_max) continue;
        const double profile = d[i] * std::pow(std::log(L / d[i]), k);
        const double r = u.values[i] / profile;
        band.r_min = std::min(band.r_min, r);
        band.r_max = std::max(band.r_max, r);
        ++band.count;
    }
    if (band.count < 8)
        throw std::invalid_argument("fit_log_regime: fewer than 8 nodes in the window");
    band.power_slope_drift = fit_boundary_exponent(u, window).half_drift;
    return band;
}

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::Bounded: return "bounded";
        case Verdict::Divergent: return "divergent";
        default: return "inconclusive";
    }
}

double power_energy(const DiscreteField& u, double rho, double p) {
    const Mesh& m = *u.mesh;
    std::vector<double> upow(m.num_nodes()), du(m.num_elements()), dens(m.num_elements());
    for (std::size_t i = 0; i < upow.size(); ++i) upow[i] = std::pow(u.values[i], rho);
    kernels::diff_quotients(upow, m.element_length(), du);
    kernels::power_density(du, m.element_weight(), p, 0.0, dens);
    return kernels::ordered_sum(dens);
}

SobolevProbe sobolev_probe(const ProblemSpec& spec, const SolverSettings& settings, double rho,
                           std::span<const std::size_t> levels, double grading, double eps) {
    spec.validate();
    if (!(spec.beta < spec.p)) throw std::invalid_argument("sobolev_probe: beta < p required");
    if (levels.size() < 3) throw std::invalid_argument("sobolev_probe: need >= 3 mesh levels");
    if (!(rho > 0.0)) throw std::invalid_argument("sobolev_probe: rho must be positive");

    SobolevProbe probe;
    probe.rho = rho;
    probe.rho0 = spec.rho0();
    probe.eps = eps;
    probe.grading = grading;
    probe.levels.assign(levels.begin(), levels.end());

    for (std::size_t n : levels) {
        try {
            MeshPtr mesh = build_mesh(spec.domain, n, grading);
            const DiscreteField u = solve_at_eps(spec, settings, mesh, eps);
            probe.energies.push_back(power_energy(u, rho, spec.p));
        } catch (const std::exception& ex) {
            probe.failure = ex.what();
            probe.verdict = Verdict::Inconclusive;
            return probe;  // aborted, partial data kept
        }
    }
    for (std::size_t j = 0; j + 1 < probe.energies.size(); ++j)
        probe.ratios.push_back(probe.energies[j + 1] / probe.energies[j]);

    const double worst = *std::max_element(probe.ratios.begin(), probe.ratios.end());
    const double best = *std::min_element(probe.ratios.begin(), probe.ratios.end());
    if (worst <= kBoundedRatio)
        probe.verdict = Verdict::Bounded;
    else if (best >= kDivergentRatio)
        probe.verdict = Verdict::Divergent;
    else
        probe.verdict = Verdict::Inconclusive;
    return probe;
}

SandwichConstants barrier_sandwich(const DiscreteField& u, double eps, const ProblemSpec& spec) {
    const Mesh& m = *u.mesh;
    SandwichConstants out;
    out.eta_star = std::numeric_limits<double>::infinity();
    out.gamma_star = 0.0;
    const auto& x = m.nodes();
    std::size_t used = 0;
    for (std::size_t i = m.free_begin(); i < m.free_end(); ++i) {
        const double b = barrier_unit(x[i], eps, spec);
        if (b == 0.0) {
            ++out.excluded;
            continue;
        }
        const double ratio = u.values[i] / b;
        out.eta_star = std::min(out.eta_star, ratio);
        out.gamma_star = std::max(out.gamma_star, ratio);
        ++used;
    }
    if (used == 0 || !(out.eta_star > 0.0) || !std::isfinite(out.gamma_star))
        throw std::runtime_error("barrier_sandwich: degenerate ratios (field not strictly "
                                 "positive against the barrier)");
    return out;
}

ComparisonResult comparison_check(const ProblemSpec& spec, const SolverSettings& settings,
                                  double cf1, double cf2, double eps, MeshPtr mesh) {
    if (!(cf1 <= cf2)) throw std::invalid_argument("comparison_check: needs cf1 <= cf2");
    ComparisonResult out;
    out.regime_ok = spec.beta < 2.0 - 1.0 / spec.p;
    out.pass_threshold = 1e-8 + settings.picard_tol;
    const DiscreteField u1 = solve_at_eps(spec.with_amplitude(cf1), settings, mesh, eps);
    const DiscreteField u2 = solve_at_eps(spec.with_amplitude(cf2), settings, mesh, eps);
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < u1.values.size(); ++i)
        worst = std::max(worst, u1.values[i] - u2.values[i]);
    out.max_violation = worst;
    return out;
}

NonexistenceReport nonexistence_probe(const ProblemSpec& spec, const SolverSettings& settings,
                                      std::span<const std::size_t> levels, double grading,
                                      double eps, std::span<const double> gammas,
                                      double tau_tolerance) {
    spec.validate();
    if (!(spec.beta >= spec.p))
        throw std::invalid_argument("nonexistence_probe: spec must sit at or above beta = p");
    if (levels.size() < 2) throw std::invalid_argument("nonexistence_probe: need >= 2 levels");

    NonexistenceReport rep;
    rep.tau_tolerance = tau_tolerance;
    rep.beta_tilde = {spec.p - 0.5, spec.p - 0.2, spec.p - 0.1, spec.p - 0.05};
    rep.gammas.assign(gammas.begin(), gammas.end());
    rep.levels.assign(levels.begin(), levels.end());
    rep.hardy.assign(rep.gammas.size(),
                     std::vector<std::vector<double>>(rep.beta_tilde.size()));

    const std::size_t fit_level = *std::max_element(levels.begin(), levels.end());
    bool taus_ok = true;
    try {
        for (std::size_t b = 0; b < rep.beta_tilde.size(); ++b) {
            const ProblemSpec family = spec.with_beta(rep.beta_tilde[b]);
            rep.tau_expected.push_back(family.tau());

            // per-level solves feed the Hardy integrals; the finest level
            // also carries the exponent fit
            DiscreteField finest;
            for (std::size_t j = 0; j < rep.levels.size(); ++j) {
                MeshPtr mesh = build_mesh(family.domain, rep.levels[j], grading);
                DiscreteField u = solve_at_eps(family, settings, mesh, eps);
                const Mesh& m = *mesh;
                for (std::size_t g = 0; g < rep.gammas.size(); ++g) {
                    std::vector<double> dens(m.num_elements());
                    for (std::size_t e = 0; e < dens.size(); ++e) {
                        const double um = 0.5 * (u.values[e] + u.values[e + 1]);
                        const double val = std::pow(um, rep.gammas[g]) / m.distance_mid()[e];
                        dens[e] = m.element_weight()[e] * std::pow(val, family.p);
                    }
                    rep.hardy[g][b].push_back(kernels::ordered_sum(dens));
                }
                if (rep.levels[j] == fit_level) finest = std::move(u);
            }
            const ExponentFit fit = fit_boundary_exponent(finest, FitWindow{});
            rep.tau_fitted.push_back(fit.slope);
            if (std::fabs(fit.slope - family.tau()) > tau_tolerance) taus_ok = false;
        }
    } catch (const std::exception& ex) {
        rep.failure = ex.what();
        return rep;  // partial report
    }

    // decreasing-to-zero trend of the fitted exponents
    for (std::size_t b = 0; b + 1 < rep.tau_fitted.size(); ++b)
        if (!(rep.tau_fitted[b + 1] < rep.tau_fitted[b])) taus_ok = false;
    rep.tau_trend_ok = taus_ok;

    // Hardy growth without saturation at the smallest gap, for every gamma
    const std::size_t last_b = rep.beta_tilde.size() - 1;
    bool growth = true;
    for (std::size_t g = 0; g < rep.gammas.size(); ++g) {
        const auto& h = rep.hardy[g][last_b];
        for (std::size_t j = 0; j + 1 < h.size(); ++j)
            if (!(h[j + 1] >= (1.0 + rep.growth_threshold) * h[j])) growth = false;
    }
    rep.hardy_growth_ok = growth;
    rep.confirmed = rep.tau_trend_ok && rep.hardy_growth_ok;
    return rep;
}

DiscreteField solve_at_eps(const ProblemSpec& spec, const SolverSettings& settings, MeshPtr mesh,
                           double eps, double eps0) {
    if (!(eps > 0.0)) throw std::invalid_argument("solve_at_eps: eps must be positive");
    if (eps >= eps0) {
        SolveStats stats;
        return picard_solve(eps, spec, settings, picard_seed(spec, mesh), &stats);
    }
    const int steps = int(std::ceil(std::log10(eps0 / eps)));
    const double ratio = std::pow(eps / eps0, 1.0 / steps);
    ContinuationTrace trace = continuation(spec, settings, eps0, ratio, steps, mesh);
    return trace.entries.back().field;
}

}  // namespace pqs
