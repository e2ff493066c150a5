// kernels.hpp — OpenMP inner loops, each with a serial reference version
//
// Parallel variants partition modes into contiguous per-thread ranges and
// combine per-thread partial sums in thread order, so results are
// reproducible for a fixed thread count.

#pragma once

#include <complex>
#include <cstddef>
#include <span>

namespace qreset::kernels {

using cplx = std::complex<double>;

double sum_abs2(std::span<const cplx> values);
double sum_abs2_serial(std::span<const cplx> values);

// One-step rule f <- rot * f + u * drv applied n_steps times per mode,
// exact per step for piecewise-constant u. Records sum_k |f_k|^2 after
// every step and optional state snapshots.
struct ModeEvolveArgs {
    std::span<const double> rot_re;   // per-mode Re e^{i w' h}
    std::span<const double> rot_im;   // per-mode Im e^{i w' h}
    std::span<const double> drv_re;   // per-mode Re g (e^{i w' h} - 1)/(2 w')
    std::span<const double> drv_im;
    std::span<const double> u_mid;    // control per step (midpoint value)
    std::span<cplx> f;                // in: f(0); out: f(t_f)
    std::span<double> sum_f2_by_step; // out, size n_steps + 1; entry 0 = initial
    std::span<const std::size_t> record_steps;  // ascending indices in [0, n_steps]
    cplx* snapshots = nullptr;        // row r = state after record_steps[r]; may be null
};

void evolve_modes(const ModeEvolveArgs& args);
void evolve_modes_serial(const ModeEvolveArgs& args);

// Classical RK4 for the coupled form
//   df_k/dt = i f_k (omega_q e^{-2 sum|f|^2} + omega_k) + (i/2) g_k u(t),
// which needs a global sum at every stage.
struct Rk4Args {
    std::span<const double> omega;    // bath frequencies w_k
    std::span<const double> g;
    double omega_q = 0.0;
    double h = 0.0;                   // step size
    std::span<const double> u_nodes;  // u at t, t+h/2, t+h per step: size 2*n_steps + 1
    std::span<cplx> f;
    std::span<double> sum_f2_by_step;
    std::span<const std::size_t> record_steps;
    cplx* snapshots = nullptr;
};

void evolve_modes_rk4(const Rk4Args& args);
void evolve_modes_rk4_serial(const Rk4Args& args);

// out = A^T P A for the block-diagonal rotation A with per-mode 2x2 blocks
// [[c, -s], [s, c]]. P and out are column-major (2n x 2n); out must not
// alias P. Elementwise-parallel, bitwise independent of thread count.
void rotated_congruence(std::size_t n_modes, const double* cos_wdt, const double* sin_wdt,
                        const double* P, double* out);
void rotated_congruence_serial(std::size_t n_modes, const double* cos_wdt,
                               const double* sin_wdt, const double* P, double* out);

} // namespace qreset::kernels
