#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "pqs/field.hpp"
#include "pqs/weights.hpp"

namespace pqs {

struct SolverSettings {
    /// Gradient-regularisation continuation: |Du|^{t-2} is smoothed as
    /// (mu^2+|Du|^2)^{(t-2)/2} and mu walks down this schedule.
    std::vector<double> mu_schedule = {1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8};
    /// Newton stops when the gradient of the exact energy (or, where the
    /// exact stress stalls on flat elements, of the final-mu energy)
    /// satisfies sup|g| <= newton_tol * (1 + sup|load|).
    double newton_tol = 1e-11;
    int newton_max_iter = 100;
    /// Picard stops when the sup-norm fixed-point residual drops below this.
    double picard_tol = 1e-10;
    int picard_max_iter = 400;
    double line_search_shrink = 0.5;

    void validate() const;
};

/// Thrown when an iteration budget runs out or a line search stalls; the
/// last iterate (and for Picard oscillations the one before it) rides along
/// for post-mortems.
class solver_error : public std::runtime_error {
public:
    solver_error(const std::string& what, DiscreteField last)
        : std::runtime_error(what), last_iterate(std::move(last)) {}
    solver_error(const std::string& what, DiscreteField last, DiscreteField prev)
        : std::runtime_error(what), last_iterate(std::move(last)), previous_iterate(std::move(prev)) {}

    DiscreteField last_iterate;
    std::optional<DiscreteField> previous_iterate;
};

struct SolveStats {
    int picard_iterations = 0;
    long newton_iterations = 0;
    double residual = 0.0;  // fixed-point residual at return
    bool damping_engaged = false;
    bool newton_fallback = false;  // stalled iteration handed to the convex solve
    double energy = 0.0;  // regularised problem energy of the returned field
    double seconds = 0.0;
    std::vector<double> residual_history;
};

/// (1/t) sum_e w_e (mu^2 + |Du_e|^2)^{t/2}; mu = 0 is the exact discrete
/// t-Dirichlet energy (elementwise-constant gradients make it exact).
double dirichlet_energy(const DiscreteField& u, double t, double mu);

/// int f_eps(x) Phi_eps(u) with Phi_eps the primitive of s -> (s+eps)^{-delta}
/// vanishing at 0; midpoint quadrature. Throws solver_error when u dips
/// below -eps at a quadrature point (non-finite primitive = divergence).
double potential_energy(const DiscreteField& u, double eps, const ProblemSpec& spec);

/// Energy of the regularised problem, dirichlet parts minus the potential.
double problem_energy(const DiscreteField& u, double eps, const ProblemSpec& spec);

/// Minimise (1/p)int|Dw|^p + (1/q)int|Dw|^q - sum_e w_e source_e * mid(w)
/// over Dirichlet fields for a frozen per-element source; damped Newton
/// with mu-continuation. Warm starts skip straight to the final mu.
DiscreteField solve_frozen_source(MeshPtr mesh, const ProblemSpec& spec,
                                  std::span<const double> source,
                                  const SolverSettings& settings,
                                  const DiscreteField* warm_start = nullptr,
                                  long* newton_iterations = nullptr);

/// One Schauder-map application: minimiser of the auxiliary convex energy
/// with source f_eps(x) (|v|+eps)^{-delta} frozen at v.
DiscreteField solve_auxiliary(const DiscreteField& v, double eps, const ProblemSpec& spec,
                              const SolverSettings& settings,
                              long* newton_iterations = nullptr);

/// Fixed point of the auxiliary map: iterates w <- S(w) from u_init until
/// the sup-norm residual falls below picard_tol. The map is order-reversing
/// in its argument, so the plain iteration alternates around the fixed
/// point; when the residual stops contracting, the damped form
/// w <- (w + S(w))/2 takes over.
DiscreteField picard_solve(double eps, const ProblemSpec& spec, const SolverSettings& settings,
                           const DiscreteField& u_init, SolveStats* stats = nullptr);

struct TraceEntry {
    double eps;
    DiscreteField field;
    int picard_iterations;
    long newton_iterations;
    double energy;
    double seconds;
    double sup_change_from_previous;  // recorded Cauchy diagnostic
};

struct ContinuationTrace {
    std::vector<TraceEntry> entries;
};

/// Solve (P_eps) along eps_k = eps0 * ratio^k, k = 0..steps, warm-starting
/// each level from the previous field. In solution mode (beta < p) the
/// nodewise monotone growth of u_eps as eps drops is checked; a violation
/// beyond picard_tol triggers one cold restart from the lower barrier
/// before failing. probe_mode skips the check (beta > p experiments).
ContinuationTrace continuation(const ProblemSpec& spec, const SolverSettings& settings,
                               double eps0, double ratio, int steps, MeshPtr mesh,
                               bool probe_mode = false);

/// Direct method for beta+delta < 1: minimises the unregularised energy
/// with the singular term handled by freezing u^{-delta} (Picard at eps = 0
/// with a positive floor from the lower barrier).
DiscreteField solve_direct(const ProblemSpec& spec, const SolverSettings& settings, MeshPtr mesh,
                           SolveStats* stats = nullptr);

/// Regime-appropriate small lower-barrier profile used to seed Picard.
DiscreteField picard_seed(const ProblemSpec& spec, MeshPtr mesh, double amplitude = 1e-3);

/// Running totals of the per-step strict-descent check inside the line
/// search (every accepted Newton step must lower the regularised energy).
struct NewtonCounters {
    long accepted_steps = 0;
    long descent_violations = 0;
};
NewtonCounters newton_counters();
void reset_newton_counters();

}  // namespace pqs
