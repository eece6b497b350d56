#include "pqs/barriers.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "pqs/io_util.hpp"

namespace pqs {

namespace {

void require_superlinear(const ProblemSpec& spec) {
    if (spec.regime() != Regime::Superlinear || !(spec.beta < spec.p))
        throw std::invalid_argument("power barrier needs beta+delta > 1 and beta < p");
}

double power_profile(double d, double eps, double tau) {
    if (d == 0.0) return 0.0;  // exact boundary zero
    const double shift = eps > 0.0 ? std::pow(eps, 1.0 / tau) : 0.0;
    return std::pow(d + shift, tau) - eps;
}

}  // namespace

BarrierParams BarrierParams::for_spec(const ProblemSpec& spec) {
    BarrierParams b;
    b.tau = spec.tau();
    b.L = default_log_scale(spec);
    return b;
}

double min_log_scale(const ProblemSpec& spec) {
    return (spec.domain.diameter() + 1.0) * std::exp(2.0 / (spec.p - spec.beta));
}

double default_log_scale(const ProblemSpec& spec) {
    return min_log_scale(spec) * std::exp(1.0);
}

double lower_barrier_power(double x, double eps, const ProblemSpec& spec,
                           const BarrierParams& params) {
    require_superlinear(spec);
    if (eps < 0.0) throw std::invalid_argument("barrier: eps must be nonnegative");
    return params.eta * power_profile(spec.domain.distance(x), eps, spec.tau());
}

double upper_barrier_power(double x, double eps, const ProblemSpec& spec,
                           const BarrierParams& params) {
    require_superlinear(spec);
    if (eps < 0.0) throw std::invalid_argument("barrier: eps must be nonnegative");
    return params.gamma * power_profile(spec.domain.distance(x), eps, spec.tau());
}

double barrier_log(double x, double eps_prime, double amplitude, const ProblemSpec& spec,
                   const BarrierParams& params) {
    if (spec.regime() != Regime::Critical)
        throw std::invalid_argument("log barrier is the beta+delta = 1 family");
    if (eps_prime < 0.0) throw std::invalid_argument("barrier: eps' must be nonnegative");
    if (params.L < min_log_scale(spec))
        throw std::invalid_argument("log barrier: L below (diam+1) e^{2/(p-beta)}");
    const double d = spec.domain.distance(x);
    if (d == 0.0) return 0.0;
    const double k = 1.0 / (spec.p - spec.beta);
    const double ad = amplitude * d;
    if (eps_prime == 0.0) return ad * std::pow(std::log(params.L / ad), k);
    return (ad + eps_prime) * std::pow(std::log(params.L / (ad + eps_prime)), k) -
           eps_prime * std::pow(std::log(params.L / eps_prime), k);
}

double barrier_unit(double x, double eps, const ProblemSpec& spec) {
    BarrierParams unit = BarrierParams::for_spec(spec);
    switch (spec.regime()) {
        case Regime::Superlinear:
            return lower_barrier_power(x, eps, spec, unit);
        case Regime::Critical:
            return barrier_log(x, eps, 1.0, spec, unit);
        case Regime::Sublinear:
            return spec.domain.distance(x);
    }
    return 0.0;
}

double ThetaTable::value_at(double rr) const {
    if (r.empty() || rr < r.front() || rr > r.back())
        throw std::invalid_argument("theta table: point outside the tabulated range");
    // uniform abscissas after the first interval
    std::size_t i = rr <= r[1] ? 0 : 1 + std::size_t((rr - r[1]) / h);
    if (i >= r.size() - 1) i = r.size() - 2;
    while (i + 2 < r.size() && rr > r[i + 1]) ++i;  // guard against rounding
    const double w = (rr - r[i]) / (r[i + 1] - r[i]);
    return (1.0 - w) * theta[i] + w * theta[i + 1];
}

void ThetaTable::write_csv(std::ostream& out) const {
    out << "r,theta,dtheta\n";
    for (std::size_t i = 0; i < r.size(); ++i)
        out << io::shortest(r[i]) << ',' << io::shortest(theta[i]) << ','
            << io::shortest(dtheta[i]) << '\n';
}

ThetaTable theta_shoot(double alpha, const ProblemSpec& spec, double r_max, double h) {
    spec.validate();
    if (!(alpha > 0.0)) throw std::invalid_argument("theta_shoot: alpha must be positive");
    if (!(h > 0.0) || !(r_max > h)) throw std::invalid_argument("theta_shoot: need 0 < h < r_max");
    const double sigma = spec.delta + spec.beta;
    if (!(sigma < 1.0))
        throw std::invalid_argument("theta_shoot: needs beta+delta < 1 for an integrable start");
    const double p = spec.p;
    const double nu = 1.0 - sigma;

    // The profile is analytic in u = r^nu: Theta = alpha r A(u), flux
    // Phi = alpha^{p-1} B(u). Picard iteration on the integral form gives
    // the coefficients; jumping the singular region with the series keeps
    // the subsequent midpoint march genuinely second order.
    constexpr int M = 16;
    std::array<double, M + 1> A{}, B{};
    A[0] = B[0] = 1.0;
    const auto series_pow = [](const std::array<double, M + 1>& in, double gamma) {
        std::array<double, M + 1> out{};
        out[0] = 1.0;
        for (int k = 1; k <= M; ++k) {
            double acc = 0.0;
            for (int j = 1; j <= k; ++j) acc += (gamma * j - (k - j)) * in[j] * out[k - j];
            out[k] = acc / k;
        }
        return out;
    };
    for (int it = 0; it < M + 2; ++it) {
        const auto G = series_pow(A, -sigma);
        std::array<double, M + 1> Bn{};
        Bn[0] = 1.0;
        for (int k = 1; k <= M; ++k)
            Bn[k] = -std::pow(alpha, 1.0 - sigma - p) * G[k - 1] / (nu * k);
        const auto C = series_pow(Bn, 1.0 / (p - 1.0));
        for (int j = 0; j <= M; ++j) A[j] = C[j] / (1.0 + j * nu);
        B = Bn;
    }
    const auto eval = [](const std::array<double, M + 1>& c, double u) {
        double acc = c[M];
        for (int j = M - 1; j >= 0; --j) acc = acc * u + c[j];
        return acc;
    };
    const auto slope_of = [p](double f) {
        return f <= 0.0 ? 0.0 : std::pow(f, 1.0 / (p - 1.0));
    };
    const std::array<double, M + 1> C = series_pow(B, 1.0 / (p - 1.0));

    // largest grid-aligned radius where the series is trustworthy
    const auto series_ok = [&](double r) {
        const double u = std::pow(r, nu);
        return u <= 0.5 && std::fabs(A[M]) * std::pow(u, M) <= 1e-13 &&
               eval(B, u) >= 0.5;
    };
    long switch_steps = 0;
    while (switch_steps + 1 < long(r_max / h) && series_ok((switch_steps + 1) * h))
        ++switch_steps;

    ThetaTable tab;
    tab.h = h;
    tab.alpha = alpha;
    tab.turning_radius = std::numeric_limits<double>::infinity();
    tab.r.push_back(0.0);
    tab.theta.push_back(0.0);
    tab.dtheta.push_back(alpha);

    double r, theta, flux;
    long step = 0;
    if (switch_steps >= 1) {
        for (long k = 1; k <= switch_steps; ++k) {
            const double rk = k * h;
            const double u = std::pow(rk, nu);
            tab.r.push_back(rk);
            tab.theta.push_back(alpha * rk * eval(A, u));
            tab.dtheta.push_back(alpha * eval(C, u));
            ++step;
        }
        r = switch_steps * h;
        const double u = std::pow(r, nu);
        theta = alpha * r * eval(A, u);
        flux = std::pow(alpha, p - 1.0) * eval(B, u);
    } else {
        // series untrustworthy at r = h (alpha or h extreme): fall back to
        // the two-term start there
        r = h;
        const double a2 = std::pow(alpha, 2.0 - p - sigma) / ((p - 1.0) * (1.0 - sigma) * (2.0 - sigma));
        const double b1 = std::pow(alpha, -sigma) / (1.0 - sigma);
        const double b2 = sigma * (a2 / alpha) * std::pow(alpha, -sigma) / (2.0 - 2.0 * sigma);
        theta = alpha * h - a2 * std::pow(h, 2.0 - sigma);
        flux = std::pow(alpha, p - 1.0) - b1 * std::pow(h, 1.0 - sigma) -
               b2 * std::pow(h, 2.0 - 2.0 * sigma);
        if (flux > 0.0 && theta > 0.0) {
            tab.r.push_back(r);
            tab.theta.push_back(theta);
            tab.dtheta.push_back(slope_of(flux));
            ++step;
        }
    }

    while (true) {
        if (flux <= 0.0 || theta <= 0.0) {
            tab.turning_radius = r;
            tab.hit_turning = true;
            if (step < 5)
                throw std::invalid_argument(
                    "theta_shoot: slope lost within the first steps, h too large");
            break;
        }
        if (r >= r_max) break;

        // explicit midpoint step for (theta, flux)
        const double k1t = slope_of(flux);
        const double k1f = -std::pow(theta, -sigma);
        const double th_half = theta + 0.5 * h * k1t;
        const double fl_half = flux + 0.5 * h * k1f;
        if (th_half <= 0.0)
            throw std::runtime_error("theta_shoot: profile hit zero (integration fault)");
        const double k2t = slope_of(fl_half);
        const double k2f = -std::pow(th_half, -sigma);
        theta += h * k2t;
        flux += h * k2f;
        r += h;
        ++step;
        if (theta <= 0.0)
            throw std::runtime_error("theta_shoot: profile hit zero (integration fault)");
        if (flux > 0.0) {
            tab.r.push_back(r);
            tab.theta.push_back(theta);
            tab.dtheta.push_back(slope_of(flux));
        }
    }
    return tab;
}

double theta_scaling_check(double alpha, const ProblemSpec& spec, std::span<const double> probes,
                           const ThetaTable& table_alpha, const ThetaTable& table_one) {
    const double denom = 1.0 - spec.beta - spec.delta;
    if (!(denom > 0.0)) throw std::invalid_argument("theta scaling: needs beta+delta < 1");
    const double amp = std::pow(alpha, spec.p / denom);
    const double arg = std::pow(alpha, -(spec.p - 1.0 + spec.delta + spec.beta) / denom);
    double worst = 0.0;
    for (double r : probes) {
        const double ta = table_alpha.value_at(r);
        const double t1 = table_one.value_at(arg * r);
        worst = std::max(worst, std::fabs(ta - amp * t1) / ta);
    }
    return worst;
}

double flux_law(double s, double p, double q) {
    return std::pow(s, p - 1.0) + std::pow(s, q - 1.0);
}

double flux_law_inverse(double F, double p, double q) {
    if (F < 0.0) throw std::invalid_argument("flux_law_inverse: negative flux");
    if (F == 0.0) return 0.0;
    double lo = 0.0, hi = 1.0 + std::pow(F, 1.0 / (p - 1.0));  // h(s) >= s^{p-1}
    for (int it = 0; it < 2000; ++it) {
        const double mid = 0.5 * (lo + hi);
        (flux_law(mid, p, q) < F ? lo : hi) = mid;
        if (hi - lo <= 1e-14 * hi) break;  // relative: roots can sit far below 1
    }
    return 0.5 * (lo + hi);
}

namespace {

// 4-point Gauss-Legendre on [a,b], composite over nsub panels
template <class F>
double gauss4(F&& f, double a, double b, int nsub) {
    static constexpr std::array<double, 4> xi = {-0.8611363115940526, -0.3399810435848563,
                                                 0.3399810435848563, 0.8611363115940526};
    static constexpr std::array<double, 4> wi = {0.3478548451374538, 0.6521451548625461,
                                                 0.6521451548625461, 0.3478548451374538};
    double total = 0.0;
    const double step = (b - a) / nsub;
    for (int s = 0; s < nsub; ++s) {
        const double lo = a + s * step;
        const double half = 0.5 * step;
        const double mid = lo + half;
        double acc = 0.0;
        for (int k = 0; k < 4; ++k) acc += wi[k] * f(mid + half * xi[k]);
        total += half * acc;
    }
    return total;
}

}  // namespace

DiscreteField torsion_oracle(double rho, const ProblemSpec& spec, MeshPtr mesh) {
    spec.validate();
    if (!(rho > 0.0)) throw std::invalid_argument("torsion_oracle: rho must be positive");
    const Mesh& m = *mesh;
    const auto& x = m.nodes();
    DiscreteField u(mesh);
    constexpr int nsub = 8;

    if (spec.domain.kind == DomainKind::Interval) {
        const double c = 0.5 * spec.domain.extent;
        const auto du = [&](double t) {
            return flux_law_inverse(rho * std::fabs(c - t), spec.p, spec.q);
        };
        // integrate from the left boundary to the midpoint, then mirror;
        // the interval mesh is symmetric so the mirrored values land on nodes
        const std::size_t n = m.num_elements();
        for (std::size_t i = 1; i <= n / 2; ++i)
            u.values[i] = u.values[i - 1] + gauss4(du, x[i - 1], x[i], nsub);
        for (std::size_t i = n / 2 + 1; i <= n; ++i) u.values[i] = u.values[n - i];
    } else {
        const double N = double(spec.domain.dimension);
        const auto du = [&](double s) { return flux_law_inverse(rho * s / N, spec.p, spec.q); };
        const std::size_t n = m.num_elements();
        u.values[n] = 0.0;
        for (std::size_t i = n; i-- > 0;)
            u.values[i] = u.values[i + 1] + gauss4(du, x[i], x[i + 1], nsub);
    }
    return u;
}

}  // namespace pqs
