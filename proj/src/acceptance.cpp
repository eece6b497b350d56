#include "pqs/acceptance.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>

#include "pqs/artifacts.hpp"
#include "pqs/barriers.hpp"
#include "pqs/diagnostics.hpp"
#include "pqs/runner.hpp"

namespace pqs {

namespace {

namespace fs = std::filesystem;
using clock = std::chrono::steady_clock;

std::string fmt(double v) {
    std::ostringstream ss;
    ss.precision(6);
    ss << v;
    return ss.str();
}

ProblemSpec interval_spec(double p, double q, double delta, double beta, double cf = 1.0,
                          double length = 1.0) {
    ProblemSpec s;
    s.p = p;
    s.q = q;
    s.delta = delta;
    s.beta = beta;
    s.amplitude = cf;
    s.domain = Domain::interval(length);
    return s;
}

// --- criterion 1: torsion solver against the closed form and the oracle ---

CriterionResult torsion_exactness() {
    CriterionResult r{1, "torsion oracle exactness"};
    SolverSettings settings;

    // p=q=2, rho=1 on (-1,1): u = (1-x^2)/4, peak 0.25, mesh of 1025 nodes
    ProblemSpec lin = interval_spec(2.0, 2.0, 1.0, 0.0, 1.0, 2.0);
    MeshPtr mesh = build_mesh(lin.domain, 1024, 1.0);
    const std::vector<double> one(mesh->num_elements(), 1.0);
    const DiscreteField u2 = solve_frozen_source(mesh, lin, one, settings);
    double err2 = 0.0;
    for (std::size_t i = 0; i < mesh->num_nodes(); ++i) {
        const double x = mesh->nodes()[i] - 1.0;
        err2 = std::max(err2, std::fabs(u2.values[i] - 0.25 * (1.0 - x * x)));
    }
    const bool pass2 = err2 <= 1e-3 * 0.25;

    // p=3, q=2 against the semi-analytic profile
    ProblemSpec pq = interval_spec(3.0, 2.0, 1.0, 0.0, 1.0, 2.0);
    const DiscreteField upq = solve_frozen_source(mesh, pq, one, settings);
    const DiscreteField oracle = torsion_oracle(1.0, pq, mesh);
    const double errpq = upq.sup_distance(oracle);
    const bool passpq = errpq <= 1e-3 * oracle.sup_norm();

    r.pass = pass2 && passpq;
    r.detail = "p=q=2 sup err " + fmt(err2) + " (tol 2.5e-4); p=3,q=2 sup err " + fmt(errpq) +
               " (tol " + fmt(1e-3 * oracle.sup_norm()) + ")";
    return r;
}

// --- criteria 2-4: boundary growth regimes ---

CriterionResult regime_superlinear() {
    CriterionResult r{2, "boundary regime beta+delta>1 (slope 2/3)"};
    ProblemSpec spec = interval_spec(3.0, 2.0, 1.0, 1.0);
    SolverSettings settings;
    MeshPtr mesh = build_mesh(spec.domain, 2048, 3.0);
    const DiscreteField u = solve_at_eps(spec, settings, mesh, 1e-6);
    const ExponentFit fit = fit_boundary_exponent(u, FitWindow{1e-4, 1e-2});
    const double expected = spec.tau();  // 2/3
    r.pass = std::fabs(fit.slope - expected) <= 0.05;
    r.detail = "slope " + fmt(fit.slope) + " vs " + fmt(expected) + " +- 0.05 (asymmetry " +
               fmt(fit.asymmetry) + ")";
    return r;
}

CriterionResult regime_sublinear() {
    CriterionResult r{3, "boundary regime beta+delta<1 (slope 1)"};
    ProblemSpec spec = interval_spec(2.0, 1.5, 0.5, 0.2);
    SolverSettings settings;
    MeshPtr mesh = build_mesh(spec.domain, 2048, 3.0);
    const DiscreteField u = solve_direct(spec, settings, mesh);
    // the direct method is eps-free, so the window can sit deeper where the
    // d^{1.3} correction to the linear profile is weaker
    const ExponentFit fit = fit_boundary_exponent(u, FitWindow{1e-5, 1e-3});
    r.pass = std::fabs(fit.slope - 1.0) <= 0.05;
    r.detail = "slope " + fmt(fit.slope) + " vs 1 +- 0.05 on window [1e-5,1e-3]";
    return r;
}

CriterionResult regime_critical() {
    CriterionResult r{4, "boundary regime beta+delta=1 (log band)"};
    ProblemSpec spec = interval_spec(2.0, 1.5, 0.6, 0.4);
    SolverSettings settings;
    MeshPtr mesh = build_mesh(spec.domain, 2048, 3.0);
    const DiscreteField u = solve_at_eps(spec, settings, mesh, 1e-6);
    const double L = default_log_scale(spec);
    const LogBand band = fit_log_regime(u, spec, L, FitWindow{1e-4, 1e-2});
    const double spread = band.r_max / band.r_min;
    r.pass = spread <= 2.0 && band.power_slope_drift >= 0.02;
    r.detail = "band spread " + fmt(spread) + " (<= 2), power drift " +
               fmt(band.power_slope_drift) + " (>= 0.02)";
    return r;
}

// --- criteria 5-6: Sobolev threshold probes ---

CriterionResult sobolev_threshold() {
    CriterionResult r{5, "sobolev threshold rho0 = 1"};
    ProblemSpec spec = interval_spec(2.0, 1.5, 2.0, 0.5);
    SolverSettings settings;
    const std::vector<std::size_t> levels{512, 1024, 2048, 4096};
    const SobolevProbe hi = sobolev_probe(spec, settings, 1.2, levels, 3.0, 1e-6);
    const SobolevProbe lo = sobolev_probe(spec, settings, 0.8, levels, 3.0, 1e-6);
    r.pass = hi.verdict == Verdict::Bounded && lo.verdict == Verdict::Divergent &&
             std::fabs(spec.rho0() - 1.0) < 1e-12;
    r.detail = "rho=1.2 " + to_string(hi.verdict) + ", rho=0.8 " + to_string(lo.verdict) +
               ", rho0 " + fmt(spec.rho0());
    if (!hi.failure.empty()) r.detail += "; failure: " + hi.failure;
    if (!lo.failure.empty()) r.detail += "; failure: " + lo.failure;
    return r;
}

CriterionResult membership_flip() {
    CriterionResult r{6, "W^{1,p}_0 membership flips across delta = 3 (p=2, beta=0)"};
    SolverSettings settings;
    // The 1.1/1.2 dead zone and exponents within 0.05 of the Hardy border
    // force different instrument settings per side: the bounded side needs
    // gentle refinement (d_min shrink well under ~15x per level), the
    // divergent side aggressive shrinkage (>= 46x per level) with eps low
    // enough that its contamination scale eps^{1/tau} stays below d_min.
    ProblemSpec inside = interval_spec(2.0, 1.5, 2.8, 0.0);
    const std::vector<std::size_t> gentle{256, 512, 1024, 2048};
    const SobolevProbe bounded = sobolev_probe(inside, settings, 1.0, gentle, 3.0, 1e-6);

    ProblemSpec outside = interval_spec(2.0, 1.5, 3.2, 0.0);
    const std::vector<std::size_t> aggressive{1024, 4096, 16384};
    const SobolevProbe divergent = sobolev_probe(outside, settings, 1.0, aggressive, 3.0, 1e-7);

    r.pass = bounded.verdict == Verdict::Bounded && divergent.verdict == Verdict::Divergent;
    r.detail = "delta=2.8 " + to_string(bounded.verdict) + ", delta=3.2 " +
               to_string(divergent.verdict);
    if (!bounded.failure.empty()) r.detail += "; failure: " + bounded.failure;
    if (!divergent.failure.empty()) r.detail += "; failure: " + divergent.failure;
    return r;
}

// --- criterion 7 and 9 share the continuation runs ---

struct RegimeRuns {
    std::vector<ContinuationTrace> traces;
    std::vector<std::string> names;
};

const RegimeRuns& continuation_runs() {
    static RegimeRuns runs = [] {
        RegimeRuns out;
        SolverSettings settings;
        const std::vector<ProblemSpec> specs = {
            interval_spec(3.0, 2.0, 1.0, 1.0),   // item 2
            interval_spec(2.0, 1.5, 0.5, 0.2),   // item 3
            interval_spec(2.0, 1.5, 0.6, 0.4),   // item 4
        };
        const std::vector<std::string> names = {"superlinear", "sublinear", "critical"};
        for (std::size_t i = 0; i < specs.size(); ++i) {
            MeshPtr mesh = build_mesh(specs[i].domain, 1024, 3.0);
            out.traces.push_back(continuation(specs[i], settings, 1e-2, 0.1, 4, mesh));
            out.names.push_back(names[i]);
        }
        return out;
    }();
    return runs;
}

CriterionResult eps_monotonicity() {
    CriterionResult r{7, "monotone growth of u_eps as eps drops"};
    const RegimeRuns& runs = continuation_runs();
    double worst = 0.0;
    std::string worst_name = "-";
    for (std::size_t t = 0; t < runs.traces.size(); ++t) {
        const auto& entries = runs.traces[t].entries;
        for (std::size_t k = 1; k < entries.size(); ++k) {
            for (std::size_t i = 0; i < entries[k].field.values.size(); ++i) {
                const double drop = entries[k - 1].field.values[i] - entries[k].field.values[i];
                if (drop > worst) {
                    worst = drop;
                    worst_name = runs.names[t];
                }
            }
        }
    }
    r.pass = worst <= 1e-8;
    r.detail = "worst nodewise decrease " + fmt(worst) + " (<= 1e-8), spec " + worst_name;
    return r;
}

CriterionResult comparison_principle() {
    CriterionResult r{8, "comparison principle u(c_f=1) <= u(c_f=2)"};
    ProblemSpec spec = interval_spec(2.0, 1.5, 1.0, 0.5);
    SolverSettings settings;
    MeshPtr mesh = build_mesh(spec.domain, 1024, 3.0);
    const ComparisonResult res = comparison_check(spec, settings, 1.0, 2.0, 1e-6, mesh);
    r.pass = res.regime_ok && res.max_violation <= 1e-8;
    r.detail = "max violation " + fmt(res.max_violation) + " (<= 1e-8), beta < 2-1/p " +
               (res.regime_ok ? "holds" : "fails");
    return r;
}

CriterionResult sandwich_stability() {
    CriterionResult r{9, "barrier sandwich constants stable in eps"};
    const RegimeRuns& runs = continuation_runs();
    const ContinuationTrace& trace = runs.traces[0];  // superlinear spec of item 2
    ProblemSpec spec = interval_spec(3.0, 2.0, 1.0, 1.0);
    std::vector<double> etas, gammas;
    for (const auto& entry : trace.entries) {
        const SandwichConstants sc = barrier_sandwich(entry.field, entry.eps, spec);
        etas.push_back(sc.eta_star);
        gammas.push_back(sc.gamma_star);
    }
    const auto swing = [](const std::vector<double>& v) {
        const double lo = *std::min_element(v.begin(), v.end());
        const double hi = *std::max_element(v.begin(), v.end());
        return (hi - lo) / lo;
    };
    const double eta_swing = swing(etas), gamma_swing = swing(gammas);
    const bool positive = *std::min_element(etas.begin(), etas.end()) > 0.0 &&
                          std::isfinite(*std::max_element(gammas.begin(), gammas.end()));
    r.pass = positive && eta_swing < 0.2 && gamma_swing < 0.2;
    r.detail = "eta* swing " + fmt(eta_swing) + ", Gamma* swing " + fmt(gamma_swing) +
               " (< 0.2 each), eta* " + fmt(etas.back()) + ", Gamma* " + fmt(gammas.back());
    return r;
}

CriterionResult theta_scaling() {
    CriterionResult r{10, "theta profile scaling law"};
    ProblemSpec spec = interval_spec(2.0, 1.5, 0.3, 0.3);
    const double h = 1e-5;
    const ThetaTable t2 = theta_shoot(2.0, spec, 1.0, h);
    const ThetaTable t1 = theta_shoot(1.0, spec, 1.0, h);
    const std::vector<double> probes{0.5};
    const double err = theta_scaling_check(2.0, spec, probes, t2, t1);
    r.pass = err <= 1e-6;
    r.detail = "relative error " + fmt(err) + " at r=0.5 (<= 1e-6)";
    return r;
}

CriterionResult nonexistence_signature() {
    CriterionResult r{11, "non-existence signature at beta = 2.5"};
    ProblemSpec spec = interval_spec(2.0, 1.5, 1.0, 2.5);
    SolverSettings settings;
    const std::vector<std::size_t> levels{512, 1024, 2048, 4096};
    const std::vector<double> gammas{1.0, 2.0};
    const NonexistenceReport rep =
        nonexistence_probe(spec, settings, levels, 3.0, 1e-6, gammas, 0.03);
    r.pass = rep.confirmed;
    std::string taus;
    for (std::size_t b = 0; b < rep.tau_fitted.size(); ++b)
        taus += (b ? "," : "") + fmt(rep.tau_fitted[b]);
    r.detail = "tau fits {" + taus + "} vs {0.25,0.1,0.05,0.025} +-0.03; hardy growth " +
               (rep.hardy_growth_ok ? "ok" : "saturated");
    if (!rep.failure.empty()) r.detail += "; failure: " + rep.failure;
    return r;
}

// --- criterion 12: invariant suites ---

bool weights_invariants(std::string& detail) {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> up(1.2, 3.5), uq(0.0, 1.0), ud(0.1, 2.5),
        ub(0.0, 1.0);
    const Domain dom = Domain::interval(1.0);
    MeshPtr mesh = build_mesh(dom, 64, 2.0);
    for (int trial = 0; trial < 50; ++trial) {
        ProblemSpec s;
        s.p = up(rng);
        s.q = 1.0 + uq(rng) * (s.p - 1.0);
        s.delta = ud(rng);
        s.beta = ub(rng) * 0.95 * s.p;  // beta < p
        s.amplitude = 0.5 + uq(rng);
        s.domain = dom;
        for (double x : mesh->element_mid()) {
            double prev = -1.0;
            for (double eps : {1e-1, 1e-3, 1e-5, 1e-7}) {
                const double fe = eval_f_eps(s, x, eps);
                const double f = eval_f(s, x);
                if (fe > f * (1.0 + 1e-12)) {
                    detail = "domination failed";
                    return false;
                }
                if (prev >= 0.0 && fe < prev * (1.0 - 1e-12)) {
                    detail = "monotonicity in eps failed";
                    return false;
                }
                prev = fe;
            }
        }
        // limit surrogate needs the regularisation exponent bounded below;
        // probe interior points with a moderated draw
        ProblemSpec lim = s;
        lim.p = 1.5 + 1.7 * uq(rng);
        lim.q = 1.0 + uq(rng) * (lim.p - 1.0);
        lim.delta = 0.5 + 1.5 * uq(rng);
        lim.beta = 0.3 + uq(rng) * (0.9 * lim.p - 0.3);
        for (double x : {0.05, 0.25, 0.5}) {
            const double limit = eval_f_eps(lim, x, 1e-10);
            if (std::fabs(limit - eval_f(lim, x)) > 1e-6 * eval_f(lim, x)) {
                detail = "pointwise limit failed";
                return false;
            }
        }
    }
    return true;
}

bool auxiliary_comparison(std::string& detail) {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    SolverSettings settings;
    const Domain dom = Domain::interval(1.0);
    MeshPtr mesh = build_mesh(dom, 64, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        ProblemSpec s;
        s.p = 1.5 + 2.0 * unif(rng);
        s.q = 1.0 + unif(rng) * (s.p - 1.0);
        s.delta = 1.0;
        s.domain = dom;
        std::vector<double> s1(mesh->num_elements()), s2(mesh->num_elements());
        for (std::size_t e = 0; e < s1.size(); ++e) {
            s1[e] = unif(rng);
            s2[e] = s1[e] + unif(rng);  // s1 <= s2 elementwise
        }
        const DiscreteField w1 = solve_frozen_source(mesh, s, s1, settings);
        const DiscreteField w2 = solve_frozen_source(mesh, s, s2, settings);
        for (std::size_t i = 0; i < w1.values.size(); ++i) {
            if (w1.values[i] > w2.values[i] + settings.newton_tol) {
                detail = "ordering violated by " + fmt(w1.values[i] - w2.values[i]) + " at trial " +
                         std::to_string(trial);
                return false;
            }
        }
    }
    return true;
}

bool fit_exactness(std::string& detail) {
    const Domain dom = Domain::interval(1.0);
    MeshPtr mesh = build_mesh(dom, 2048, 3.0);
    for (double s : {0.3, 0.5, 1.0, 2.0}) {
        for (double c : {0.5, 1.0, 3.0}) {
            DiscreteField u(mesh);
            const auto& d = mesh->distance_node();
            for (std::size_t i = 0; i < u.values.size(); ++i)
                u.values[i] = d[i] > 0.0 ? c * std::pow(d[i], s) : 0.0;
            const ExponentFit fit = fit_boundary_exponent(u, FitWindow{1e-4, 1e-2});
            if (std::fabs(fit.slope - s) > 1e-11 || std::fabs(fit.intercept - std::log(c)) > 1e-9) {
                detail = "synthetic d^" + fmt(s) + " recovered slope " + fmt(fit.slope) +
                         " intercept err " + fmt(std::fabs(fit.intercept - std::log(c)));
                return false;
            }
        }
    }
    return true;
}

std::uint64_t hash_run_dir(const fs::path& dir) {
    // FNV-1a over the payload lines; the manifest and per-entry wall times
    // are the timestamps excluded from the comparison
    std::uint64_t h = 1469598103934665603ull;
    std::vector<fs::path> files;
    for (const auto& entry : fs::recursive_directory_iterator(dir))
        if (entry.is_regular_file() && entry.path().filename() != "manifest.json")
            files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    for (const auto& file : files) {
        std::ifstream in(file, std::ios::binary);
        std::string line;
        while (std::getline(in, line)) {
            if (line.find("\"seconds\"") != std::string::npos) continue;
            for (unsigned char c : line) {
                h ^= std::uint64_t(c);
                h *= 1099511628211ull;
            }
            h ^= std::uint64_t('\n');
            h *= 1099511628211ull;
        }
    }
    return h;
}

bool determinism_hash(std::string& detail) {
    const fs::path base = fs::temp_directory_path() / "pqs_determinism";
    fs::remove_all(base);
    KeyTree tree = KeyTree::parse_text(
        "[problem]\np = 3\nq = 2\ndelta = 1\nbeta = 1\n[mesh]\nn = 256\ngrading = 3\n"
        "[continuation]\neps0 = 1e-2\nratio = 0.1\nsteps = 2\n");
    std::uint64_t hashes[2];
    for (int run = 0; run < 2; ++run) {
        tree.set("output.dir", (base / ("run" + std::to_string(run))).string());
        RunConfig cfg = RunConfig::from_tree(tree);
        std::ostringstream sink;
        if (run_command("continue", cfg, sink) != kExitPass) {
            detail = "continuation run failed";
            return false;
        }
        hashes[run] = hash_run_dir(base / ("run" + std::to_string(run)));
    }
    if (hashes[0] != hashes[1]) {
        detail = "payload hashes differ across identical runs";
        return false;
    }
    return true;
}

CriterionResult invariant_suites() {
    CriterionResult r{12, "invariant suites"};
    std::string detail;
    const bool w = weights_invariants(detail);
    if (!w) {
        r.detail = "weights: " + detail;
        return r;
    }
    reset_newton_counters();
    const bool cmp = auxiliary_comparison(detail);
    const NewtonCounters counters = newton_counters();
    if (!cmp) {
        r.detail = "auxiliary comparison: " + detail;
        return r;
    }
    if (counters.accepted_steps == 0 || counters.descent_violations != 0) {
        r.detail = "energy descent audit: " + std::to_string(counters.descent_violations) +
                   " violations over " + std::to_string(counters.accepted_steps) + " steps";
        return r;
    }
    const bool fit = fit_exactness(detail);
    if (!fit) {
        r.detail = "exponent fit: " + detail;
        return r;
    }
    const bool det = determinism_hash(detail);
    if (!det) {
        r.detail = "determinism: " + detail;
        return r;
    }
    r.pass = true;
    r.detail = "weights monotonicity/domination, descent audit (" +
               std::to_string(counters.accepted_steps) + " steps), 50 comparison pairs, " +
               "fit exactness, determinism hash";
    return r;
}

}  // namespace

std::vector<CriterionResult> run_acceptance(std::ostream& log) {
    const std::vector<std::function<CriterionResult()>> criteria = {
        torsion_exactness,   regime_superlinear, regime_sublinear,  regime_critical,
        sobolev_threshold,   membership_flip,    eps_monotonicity,  comparison_principle,
        sandwich_stability,  theta_scaling,      nonexistence_signature, invariant_suites,
    };
    std::vector<CriterionResult> results;
    for (const auto& fn : criteria) {
        const auto t0 = clock::now();
        CriterionResult r;
        try {
            r = fn();
        } catch (const std::exception& ex) {
            r.id = int(results.size()) + 1;
            r.name = "criterion " + std::to_string(r.id);
            r.pass = false;
            r.detail = std::string("exception: ") + ex.what();
        }
        r.seconds = std::chrono::duration<double>(clock::now() - t0).count();
        results.push_back(r);
        log << (r.pass ? "PASS" : "FAIL") << " criterion " << r.id << ": " << r.name << " | "
            << r.detail << " [" << fmt(r.seconds) << " s]\n";
    }
    return results;
}

}  // namespace pqs
