#include "pqs/kernels.hpp"

#include <cassert>
#include <cmath>

namespace pqs::kernels {

namespace {

// Per-element expressions shared by both backends, so serial and OpenMP
// outputs agree bitwise (IEEE ops, no reassociation at -O2).
inline double density_at(double du, double w, double t, double mu) {
    return w * std::pow(mu * mu + du * du, 0.5 * t);
}

inline double sigma_sum(double du, double p, double q, double mu) {
    if (mu == 0.0) {
        // exact stress |du|^{t-2} du, finite for t > 1
        if (du == 0.0) return 0.0;
        const double a = std::fabs(du);
        return std::copysign(std::pow(a, p - 1.0) + std::pow(a, q - 1.0), du);
    }
    const double s = mu * mu + du * du;
    return (std::pow(s, 0.5 * (p - 2.0)) + std::pow(s, 0.5 * (q - 2.0))) * du;
}

inline double hess_sum(double du, double p, double q, double mu) {
    const double s = mu * mu + du * du;
    return std::pow(s, 0.5 * (p - 4.0)) * (mu * mu + (p - 1.0) * du * du) +
           std::pow(s, 0.5 * (q - 4.0)) * (mu * mu + (q - 1.0) * du * du);
}

}  // namespace

void diff_quotients(std::span<const double> u, std::span<const double> length,
                    std::span<double> du) {
    const std::ptrdiff_t n = std::ptrdiff_t(du.size());
#pragma omp parallel for if (n >= std::ptrdiff_t(kParallelCutoff))
    for (std::ptrdiff_t e = 0; e < n; ++e) du[e] = (u[e + 1] - u[e]) / length[e];
}

void power_density(std::span<const double> du, std::span<const double> weight,
                   double t, double mu, std::span<double> dens) {
    const std::ptrdiff_t n = std::ptrdiff_t(du.size());
#pragma omp parallel for if (n >= std::ptrdiff_t(kParallelCutoff))
    for (std::ptrdiff_t e = 0; e < n; ++e) dens[e] = density_at(du[e], weight[e], t, mu);
}

void source_density(std::span<const double> u, std::span<const double> weight,
                    std::span<const double> source, std::span<double> dens) {
    const std::ptrdiff_t n = std::ptrdiff_t(source.size());
#pragma omp parallel for if (n >= std::ptrdiff_t(kParallelCutoff))
    for (std::ptrdiff_t e = 0; e < n; ++e)
        dens[e] = weight[e] * source[e] * (0.5 * (u[e] + u[e + 1]));
}

void stress_flux(std::span<const double> du, std::span<const double> weight,
                 std::span<const double> length, double p, double q, double mu,
                 std::span<double> flux) {
    const std::ptrdiff_t n = std::ptrdiff_t(du.size());
#pragma omp parallel for if (n >= std::ptrdiff_t(kParallelCutoff))
    for (std::ptrdiff_t e = 0; e < n; ++e)
        flux[e] = weight[e] / length[e] * sigma_sum(du[e], p, q, mu);
}

void hessian_coeffs(std::span<const double> du, std::span<const double> weight,
                    std::span<const double> length, double p, double q, double mu,
                    std::span<double> coeff) {
    assert(mu > 0.0);
    const std::ptrdiff_t n = std::ptrdiff_t(du.size());
#pragma omp parallel for if (n >= std::ptrdiff_t(kParallelCutoff))
    for (std::ptrdiff_t e = 0; e < n; ++e)
        coeff[e] = weight[e] / (length[e] * length[e]) * hess_sum(du[e], p, q, mu);
}

void gradient_gather(std::span<const double> flux, std::span<const double> load,
                     std::size_t fb, std::size_t fe, std::span<double> g) {
    const std::ptrdiff_t n = std::ptrdiff_t(fe - fb);
#pragma omp parallel for if (n >= std::ptrdiff_t(kParallelCutoff))
    for (std::ptrdiff_t k = 0; k < n; ++k) {
        const std::size_t i = fb + std::size_t(k);
        const double left = i == 0 ? 0.0 : flux[i - 1];
        g[k] = left - flux[i] - load[k];
    }
}

void tridiag_gather(std::span<const double> coeff, std::size_t fb, std::size_t fe,
                    std::span<double> diag, std::span<double> off) {
    const std::ptrdiff_t n = std::ptrdiff_t(fe - fb);
#pragma omp parallel for if (n >= std::ptrdiff_t(kParallelCutoff))
    for (std::ptrdiff_t k = 0; k < n; ++k) {
        const std::size_t i = fb + std::size_t(k);
        const double left = i == 0 ? 0.0 : coeff[i - 1];
        diag[k] = left + coeff[i];
        if (k + 1 < n) off[k] = -coeff[i];
    }
}

void load_gather(std::span<const double> source, std::span<const double> weight,
                 std::size_t fb, std::size_t fe, std::span<double> load) {
    const std::ptrdiff_t n = std::ptrdiff_t(fe - fb);
#pragma omp parallel for if (n >= std::ptrdiff_t(kParallelCutoff))
    for (std::ptrdiff_t k = 0; k < n; ++k) {
        const std::size_t i = fb + std::size_t(k);
        const double left = i == 0 ? 0.0 : weight[i - 1] * source[i - 1];
        load[k] = 0.5 * (left + weight[i] * source[i]);
    }
}

double ordered_sum(std::span<const double> a) {
    // compensated, fixed order: deterministic, and accurate enough for the
    // strict-descent checks in the line search
    double s = 0.0, c = 0.0;
    for (double v : a) {
        const double y = v - c;
        const double t = s + y;
        c = (t - s) - y;
        s = t;
    }
    return s;
}

double sup_abs_diff(std::span<const double> a, std::span<const double> b) {
    const std::ptrdiff_t n = std::ptrdiff_t(a.size());
    double m = 0.0;
#pragma omp parallel for reduction(max : m) if (n >= std::ptrdiff_t(kParallelCutoff))
    for (std::ptrdiff_t i = 0; i < n; ++i) m = std::max(m, std::fabs(a[i] - b[i]));
    return m;
}

namespace serial {

void diff_quotients(std::span<const double> u, std::span<const double> length,
                    std::span<double> du) {
    for (std::size_t e = 0; e < du.size(); ++e) du[e] = (u[e + 1] - u[e]) / length[e];
}

void power_density(std::span<const double> du, std::span<const double> weight,
                   double t, double mu, std::span<double> dens) {
    for (std::size_t e = 0; e < du.size(); ++e) dens[e] = density_at(du[e], weight[e], t, mu);
}

void source_density(std::span<const double> u, std::span<const double> weight,
                    std::span<const double> source, std::span<double> dens) {
    for (std::size_t e = 0; e < source.size(); ++e)
        dens[e] = weight[e] * source[e] * (0.5 * (u[e] + u[e + 1]));
}

void stress_flux(std::span<const double> du, std::span<const double> weight,
                 std::span<const double> length, double p, double q, double mu,
                 std::span<double> flux) {
    for (std::size_t e = 0; e < du.size(); ++e)
        flux[e] = weight[e] / length[e] * sigma_sum(du[e], p, q, mu);
}

void hessian_coeffs(std::span<const double> du, std::span<const double> weight,
                    std::span<const double> length, double p, double q, double mu,
                    std::span<double> coeff) {
    assert(mu > 0.0);
    for (std::size_t e = 0; e < du.size(); ++e)
        coeff[e] = weight[e] / (length[e] * length[e]) * hess_sum(du[e], p, q, mu);
}

void gradient_gather(std::span<const double> flux, std::span<const double> load,
                     std::size_t fb, std::size_t fe, std::span<double> g) {
    for (std::size_t k = 0; k < fe - fb; ++k) {
        const std::size_t i = fb + k;
        const double left = i == 0 ? 0.0 : flux[i - 1];
        g[k] = left - flux[i] - load[k];
    }
}

void tridiag_gather(std::span<const double> coeff, std::size_t fb, std::size_t fe,
                    std::span<double> diag, std::span<double> off) {
    for (std::size_t k = 0; k < fe - fb; ++k) {
        const std::size_t i = fb + k;
        const double left = i == 0 ? 0.0 : coeff[i - 1];
        diag[k] = left + coeff[i];
        if (k + 1 < fe - fb) off[k] = -coeff[i];
    }
}

void load_gather(std::span<const double> source, std::span<const double> weight,
                 std::size_t fb, std::size_t fe, std::span<double> load) {
    for (std::size_t k = 0; k < fe - fb; ++k) {
        const std::size_t i = fb + k;
        const double left = i == 0 ? 0.0 : weight[i - 1] * source[i - 1];
        load[k] = 0.5 * (left + weight[i] * source[i]);
    }
}

double ordered_sum(std::span<const double> a) { return kernels::ordered_sum(a); }

double sup_abs_diff(std::span<const double> a, std::span<const double> b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::fabs(a[i] - b[i]));
    return m;
}

}  // namespace serial

}  // namespace pqs::kernels
