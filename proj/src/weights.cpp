#include "pqs/weights.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace pqs {

namespace {
constexpr double kRegimeTol = 1e-12;
}

void ProblemSpec::validate() const {
    if (!(p > 1.0)) throw std::invalid_argument("spec: p must exceed 1");
    if (!(q > 1.0) || !(q <= p)) throw std::invalid_argument("spec: need 1 < q <= p");
    if (!(delta > 0.0)) throw std::invalid_argument("spec: delta must be positive");
    if (!(beta >= 0.0)) throw std::invalid_argument("spec: beta must be nonnegative");
    // amplitude = 0 is admitted so the zero-weight edge case stays testable
    if (!(amplitude >= 0.0)) throw std::invalid_argument("spec: amplitude must be nonnegative");
}

Regime ProblemSpec::regime() const {
    const double s = beta + delta - 1.0;
    if (s > kRegimeTol) return Regime::Superlinear;
    if (s < -kRegimeTol) return Regime::Sublinear;
    return Regime::Critical;
}

double eval_f(const ProblemSpec& spec, double x) {
    const double d = spec.domain.distance(x);
    if (spec.beta == 0.0) return spec.amplitude;
    if (spec.amplitude == 0.0) return 0.0;
    if (d == 0.0) return std::numeric_limits<double>::infinity();
    return spec.amplitude * std::pow(d, -spec.beta);
}

double eval_f_eps(const ProblemSpec& spec, double x, double eps) {
    if (!(eps > 0.0)) throw std::invalid_argument("eval_f_eps: eps must be positive");
    if (spec.beta == spec.p)
        throw std::invalid_argument(
            "eval_f_eps: beta = p sits on the non-existence threshold; the "
            "regularisation exponent (p-1+delta)/(p-beta) is undefined there");
    if (spec.beta == 0.0) return eval_f(spec, x);  // bounded weight needs no regularisation
    if (spec.amplitude == 0.0) return 0.0;
    const double d = spec.domain.distance(x);
    const double kappa = (spec.p - 1.0 + spec.delta) / (spec.p - spec.beta);
    // f^{-1/beta} = c_f^{-1/beta} d for the model weight
    const double base = std::pow(spec.amplitude, -1.0 / spec.beta) * d + std::pow(eps, kappa);
    return std::pow(base, -spec.beta);
}

double g_m(double s, const ProblemSpec& spec, const TruncationParams& trunc) {
    if (!(trunc.m > 0.0)) throw std::invalid_argument("g_m: truncation level must be positive");
    if (s <= 0.0) return trunc.m;
    return std::min(std::pow(s, -spec.delta), trunc.m);
}

double upsilon_m(double s, const ProblemSpec& spec, const TruncationParams& trunc) {
    if (!(trunc.m > 0.0)) throw std::invalid_argument("upsilon_m: truncation level must be positive");
    const double delta = spec.delta;
    const double sb = std::pow(trunc.m, -1.0 / delta);  // where s^{-delta} meets m
    // primitive of t^{-delta} on the singular branch
    const auto prim = [delta](double t) {
        return delta == 1.0 ? std::log(t) : std::pow(t, 1.0 - delta) / (1.0 - delta);
    };
    if (sb <= 1.0) {
        // normalisation point lies on the singular branch
        if (s >= sb) return prim(s) - prim(1.0);
        return prim(sb) - prim(1.0) + trunc.m * (s - sb);
    }
    // m < 1: the normalisation point lies on the truncated branch
    if (s <= sb) return trunc.m * (s - 1.0);
    return trunc.m * (sb - 1.0) + prim(s) - prim(sb);
}

}  // namespace pqs
