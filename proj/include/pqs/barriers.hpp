#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "pqs/field.hpp"
#include "pqs/weights.hpp"

namespace pqs {

/// Parameters of the explicit sub/supersolution families.
struct BarrierParams {
    double eta = 1.0;    // lower amplitude
    double gamma = 1.0;  // upper amplitude
    double tau = 0.0;    // (p-beta)/(p-1+delta), filled by for_spec
    double L = 0.0;      // log-barrier scale, filled by for_spec
    double alpha = 1.0;  // shooting slope for the Theta profile

    static BarrierParams for_spec(const ProblemSpec& spec);
};

/// Smallest admissible log scale is (diam+1) e^{2/(p-beta)}; the default
/// adds a factor e of headroom.
double min_log_scale(const ProblemSpec& spec);
double default_log_scale(const ProblemSpec& spec);

/// eta ((d + eps^{1/tau})^tau - eps); the subsolution profile of the
/// superlinear regime (beta+delta > 1, beta < p). Vanishes exactly at d = 0.
double lower_barrier_power(double x, double eps, const ProblemSpec& spec,
                           const BarrierParams& params);
double upper_barrier_power(double x, double eps, const ProblemSpec& spec,
                           const BarrierParams& params);

/// (a d + eps') log^{1/(p-beta)}(L/(a d + eps')) - eps' log^{1/(p-beta)}(L/eps')
/// for the critical regime beta+delta = 1; eps' = 0 gives the limit profile
/// a d log^{1/(p-beta)}(L/(a d)).
double barrier_log(double x, double eps_prime, double amplitude, const ProblemSpec& spec,
                   const BarrierParams& params);

/// Amplitude-1 profile of the regime's barrier family (eta = 1), used for
/// the sandwich-constant extraction.
double barrier_unit(double x, double eps, const ProblemSpec& spec);

/// Solution table of  -(|T'|^{p-2} T')' = T^{-delta-beta},  T(0)=0, T'(0)=alpha,
/// integrated with an explicit midpoint scheme from a series start at r = h.
struct ThetaTable {
    double h = 0.0;
    double alpha = 0.0;
    std::vector<double> r;
    std::vector<double> theta;
    std::vector<double> dtheta;
    double turning_radius = 0.0;  // first r with T' <= 0, +inf if none found
    bool hit_turning = false;

    double value_at(double rr) const;  // linear interpolation
    void write_csv(std::ostream& out) const;
};

/// Requires the sublinear regime beta+delta < 1 (the startup integral of
/// (alpha s)^{-delta-beta} must converge). Stops at r_max or at the turning
/// point; rejects h so coarse that T' flips sign within the first steps.
ThetaTable theta_shoot(double alpha, const ProblemSpec& spec, double r_max, double h);

/// Largest relative mismatch between the alpha-table and the rescaled
/// unit-slope table over the probe points. The profile obeys
///   T_alpha(r) = alpha^{p/(1-beta-delta)} T_1(alpha^{-(p-1+delta+beta)/(1-beta-delta)} r),
/// the unique rescaling that maps unit slope to slope alpha under the ODE.
double theta_scaling_check(double alpha, const ProblemSpec& spec, std::span<const double> probes,
                           const ThetaTable& table_alpha, const ThetaTable& table_one);

/// s -> s^{p-1} + s^{q-1}, the scalar flux law, and its inverse by
/// bisection on [0, 1 + F^{1/(p-1)}].
double flux_law(double s, double p, double q);
double flux_law_inverse(double F, double p, double q);

/// Semi-analytic solution of the constant-source torsion problem
/// -Delta_p u - Delta_q u = rho: flux integration plus inversion of the
/// flux law, nodal values by high-order quadrature from the boundary in.
DiscreteField torsion_oracle(double rho, const ProblemSpec& spec, MeshPtr mesh);

}  // namespace pqs
