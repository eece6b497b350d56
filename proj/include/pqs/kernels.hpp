#pragma once

#include <cstddef>
#include <span>

namespace pqs::kernels {

/// Element loops below this size are not worth a parallel region.
inline constexpr std::size_t kParallelCutoff = 8192;

// Assembly kernels for piecewise-linear fields on a 1D mesh. Each output
// slot is computed independently from its inputs (maps and gathers, no
// scatters), so the OpenMP versions are bit-identical to the serial
// reference for any thread count; sums run in element order. The serial
// namespace keeps the reference implementations used by the equivalence
// tests and the benchmark.

/// du[e] = (u[e+1] - u[e]) / length[e]
void diff_quotients(std::span<const double> u, std::span<const double> length,
                    std::span<double> du);

/// dens[e] = weight[e] * (mu^2 + du[e]^2)^{t/2}
void power_density(std::span<const double> du, std::span<const double> weight,
                   double t, double mu, std::span<double> dens);

/// dens[e] = weight[e] * source[e] * (u[e] + u[e+1]) / 2
void source_density(std::span<const double> u, std::span<const double> weight,
                    std::span<const double> source, std::span<double> dens);

/// flux[e] = weight[e]/length[e] * sum_{t in {p,q}} (mu^2+du^2)^{(t-2)/2} du
void stress_flux(std::span<const double> du, std::span<const double> weight,
                 std::span<const double> length, double p, double q, double mu,
                 std::span<double> flux);

/// coeff[e] = weight[e]/length[e]^2 * sum_t (mu^2+du^2)^{(t-4)/2} (mu^2+(t-1)du^2)
void hessian_coeffs(std::span<const double> du, std::span<const double> weight,
                    std::span<const double> length, double p, double q, double mu,
                    std::span<double> coeff);

/// g[i-fb] = flux[i-1] - flux[i] - load[i] for free nodes i in [fb, fe);
/// a missing left element (ball centre, fb = 0) contributes zero.
void gradient_gather(std::span<const double> flux, std::span<const double> load,
                     std::size_t fb, std::size_t fe, std::span<double> g);

/// Tridiagonal Hessian on the free nodes: diag[k] = C[i-1] + C[i],
/// off[k] = -C[i] coupling nodes i and i+1.
void tridiag_gather(std::span<const double> coeff, std::size_t fb, std::size_t fe,
                    std::span<double> diag, std::span<double> off);

/// load[i] = sum over the elements touching node i of weight*source/2,
/// i.e. the midpoint-quadrature load vector of the frozen source.
void load_gather(std::span<const double> source, std::span<const double> weight,
                 std::size_t fb, std::size_t fe, std::span<double> load);

/// Ordered sum (deterministic regardless of thread count).
double ordered_sum(std::span<const double> a);

double sup_abs_diff(std::span<const double> a, std::span<const double> b);

namespace serial {
void diff_quotients(std::span<const double> u, std::span<const double> length,
                    std::span<double> du);
void power_density(std::span<const double> du, std::span<const double> weight,
                   double t, double mu, std::span<double> dens);
void source_density(std::span<const double> u, std::span<const double> weight,
                    std::span<const double> source, std::span<double> dens);
void stress_flux(std::span<const double> du, std::span<const double> weight,
                 std::span<const double> length, double p, double q, double mu,
                 std::span<double> flux);
void hessian_coeffs(std::span<const double> du, std::span<const double> weight,
                    std::span<const double> length, double p, double q, double mu,
                    std::span<double> coeff);
void gradient_gather(std::span<const double> flux, std::span<const double> load,
                     std::size_t fb, std::size_t fe, std::span<double> g);
void tridiag_gather(std::span<const double> coeff, std::size_t fb, std::size_t fe,
                    std::span<double> diag, std::span<double> off);
void load_gather(std::span<const double> source, std::span<const double> weight,
                 std::size_t fb, std::size_t fe, std::span<double> load);
double ordered_sum(std::span<const double> a);
double sup_abs_diff(std::span<const double> a, std::span<const double> b);
}  // namespace serial

}  // namespace pqs::kernels
