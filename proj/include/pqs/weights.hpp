#pragma once

#include "pqs/domain.hpp"

namespace pqs {

/// Sign of beta+delta-1 selects the boundary growth profile.
enum class Regime { Sublinear, Critical, Superlinear };

enum class Solvability { Solvable, NonExistence };

/// Problem data for  -div(|Du|^{p-2}Du + |Du|^{q-2}Du) = f(x) u^{-delta}
/// with the model weight f(x) = amplitude * d(x)^{-beta}.
struct ProblemSpec {
    double p = 2.0;
    double q = 2.0;
    double delta = 1.0;
    double beta = 0.0;
    double amplitude = 1.0;  // c_f
    Domain domain = Domain::interval(1.0);

    void validate() const;

    Regime regime() const;
    Solvability solvability() const { return beta < p ? Solvability::Solvable : Solvability::NonExistence; }

    /// q = p is admitted as a degenerate test mode (closed-form oracles);
    /// flagged in run reports.
    bool degenerate_pq() const { return q == p; }

    /// Boundary growth exponent (p-beta)/(p-1+delta), the superlinear-regime profile power.
    double tau() const { return (p - beta) / (p - 1.0 + delta); }

    /// Sharp Sobolev power: u^rho has finite p-energy with zero trace iff rho > rho0.
    double rho0() const { return (p - 1.0) * (beta + delta - 1.0) / (p - beta); }

    ProblemSpec with_beta(double b) const {
        ProblemSpec s = *this;
        s.beta = b;
        return s;
    }
    ProblemSpec with_amplitude(double a) const {
        ProblemSpec s = *this;
        s.amplitude = a;
        return s;
    }
};

/// f(x) = c_f d(x)^{-beta}; +inf at the boundary when beta > 0.
double eval_f(const ProblemSpec& spec, double x);

/// Regularised weight (f^{-1/beta} + eps^{(p-1+delta)/(p-beta)})^{-beta},
/// finite up to the boundary and below f everywhere. beta = 0 returns f
/// unchanged; beta = p is rejected (non-existence threshold).
double eval_f_eps(const ProblemSpec& spec, double x, double eps);

struct TruncationParams {
    double m = 1.0;  // truncation level, > 0
};

/// min(s^{-delta}, m) for s > 0, m otherwise.
double g_m(double s, const ProblemSpec& spec, const TruncationParams& trunc);

/// Antiderivative of g_m normalised by Upsilon_m(1) = 0; continuous,
/// increasing and concave.
double upsilon_m(double s, const ProblemSpec& spec, const TruncationParams& trunc);

}  // namespace pqs
