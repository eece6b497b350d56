#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "pqs/solver.hpp"

namespace pqs {

struct FitWindow {
    double d_min = 1e-4;
    double d_max = 1e-2;
};

/// Least-squares exponent fit of log u against log d over a boundary
/// window; intervals fit both sides separately and average.
struct ExponentFit {
    FitWindow window;
    double slope = 0.0;
    double intercept = 0.0;
    double residual = 0.0;  // max abs deviation of log u from the fit line
    int count = 0;          // nodes used (both sides together on an interval)
    double asymmetry = 0.0; // |left slope - right slope|, intervals only
    double half_drift = 0.0;  // slope difference between the window's halves
};

ExponentFit fit_boundary_exponent(const DiscreteField& u, FitWindow window);

/// Ratio band u / (d log^{1/(p-beta)}(L/d)) over the window for the
/// critical regime, plus the drift a pure power fit shows there.
struct LogBand {
    double r_min = 0.0;
    double r_max = 0.0;
    int count = 0;
    double power_slope_drift = 0.0;
};

LogBand fit_log_regime(const DiscreteField& u, const ProblemSpec& spec, double L,
                       FitWindow window);

enum class Verdict { Bounded, Divergent, Inconclusive };

std::string to_string(Verdict v);

/// Growth-ratio thresholds of the discrete Sobolev dichotomy; the band
/// between them is an honest inconclusive zone near rho = rho0.
inline constexpr double kBoundedRatio = 1.1;
inline constexpr double kDivergentRatio = 1.2;

struct SobolevProbe {
    double rho = 1.0;
    double rho0 = 0.0;
    double eps = 1e-6;
    double grading = 3.0;
    std::vector<std::size_t> levels;
    std::vector<double> energies;  // E_j = sum w_e |D(u^rho)|^p per level
    std::vector<double> ratios;    // E_{j+1} / E_j
    Verdict verdict = Verdict::Inconclusive;
    std::string failure;  // set when a level's solve failed (partial data)
};

/// Solves on nested mesh levels at fixed eps and classifies the growth of
/// the p-energy of u^rho. Needs beta < p and at least 3 levels.
SobolevProbe sobolev_probe(const ProblemSpec& spec, const SolverSettings& settings, double rho,
                           std::span<const std::size_t> levels, double grading, double eps);

/// Discrete p-energy of u^rho (midpoint/elementwise, same quadrature the
/// solver uses).
double power_energy(const DiscreteField& u, double rho, double p);

struct SandwichConstants {
    double eta_star = 0.0;
    double gamma_star = 0.0;
    std::size_t excluded = 0;  // interior nodes where the unit barrier vanishes
};

/// Largest and smallest ratio of u against the amplitude-1 barrier profile
/// over interior nodes; throws if the ratios degenerate.
SandwichConstants barrier_sandwich(const DiscreteField& u, double eps, const ProblemSpec& spec);

struct ComparisonResult {
    bool regime_ok = false;  // beta < 2 - 1/p hypothesis
    double max_violation = 0.0;  // max over nodes of u1 - u2
    double pass_threshold = 0.0;
};

/// Solves with amplitudes cf1 <= cf2 at a common eps and mesh, returns the
/// worst ordering violation. Outside the beta < 2-1/p regime the check is
/// reported as skipped (regime_ok = false) but still evaluated.
ComparisonResult comparison_check(const ProblemSpec& spec, const SolverSettings& settings,
                                  double cf1, double cf2, double eps, MeshPtr mesh);

struct NonexistenceReport {
    std::vector<double> beta_tilde;
    std::vector<double> tau_expected;
    std::vector<double> tau_fitted;
    std::vector<double> gammas;
    std::vector<std::size_t> levels;
    // hardy[g][b][j]: Hardy integral for gammas[g], beta_tilde[b], level j
    std::vector<std::vector<std::vector<double>>> hardy;
    double tau_tolerance = 0.03;
    double growth_threshold = 0.2;  // calibration choice, recorded in reports
    bool tau_trend_ok = false;
    bool hardy_growth_ok = false;
    bool confirmed = false;
    std::string failure;
};

/// Runs the beta-tilde family {p-0.5, p-0.2, p-0.1, p-0.05} below the
/// non-existence threshold, fits each boundary exponent, and tracks the
/// discrete Hardy integral sum w_e (u^gamma/d)^p across nested meshes.
/// Requires beta >= p in the input spec.
NonexistenceReport nonexistence_probe(const ProblemSpec& spec, const SolverSettings& settings,
                                      std::span<const std::size_t> levels, double grading,
                                      double eps, std::span<const double> gammas,
                                      double tau_tolerance = 0.03);

/// Continuation from eps0 geometrically down to eps; returns the final field.
DiscreteField solve_at_eps(const ProblemSpec& spec, const SolverSettings& settings, MeshPtr mesh,
                           double eps, double eps0 = 1e-2);

}  // namespace pqs
