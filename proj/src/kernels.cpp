#include "qreset/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include <omp.h>

namespace qreset::kernels {

namespace {

constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

// contiguous range of modes owned by thread tid out of a team of size team
std::pair<std::size_t, std::size_t> mode_range(std::size_t n, int tid, int team) {
    const std::size_t lo = n * static_cast<std::size_t>(tid) / static_cast<std::size_t>(team);
    const std::size_t hi = n * static_cast<std::size_t>(tid + 1) / static_cast<std::size_t>(team);
    return {lo, hi};
}

std::vector<std::size_t> snapshot_rows(std::span<const std::size_t> record_steps,
                                       std::size_t n_steps) {
    std::vector<std::size_t> row(n_steps + 1, npos);
    for (std::size_t r = 0; r < record_steps.size(); ++r) row[record_steps[r]] = r;
    return row;
}

// propagate modes [lo, hi), adding per-step |f|^2 into sums (size n_steps + 1)
void evolve_range(const ModeEvolveArgs& a, std::size_t lo, std::size_t hi,
                  const std::vector<std::size_t>& row, double* sums) {
    const std::size_t n = a.f.size();
    const std::size_t n_steps = a.u_mid.size();
    for (std::size_t k = lo; k < hi; ++k) {
        const double cr = a.rot_re[k], ci = a.rot_im[k];
        const double dr = a.drv_re[k], di = a.drv_im[k];
        double fr = a.f[k].real(), fi = a.f[k].imag();
        sums[0] += fr * fr + fi * fi;
        if (a.snapshots && row[0] != npos) a.snapshots[row[0] * n + k] = {fr, fi};
        for (std::size_t s = 0; s < n_steps; ++s) {
            const double u = a.u_mid[s];
            const double nr = cr * fr - ci * fi + u * dr;
            const double ni = cr * fi + ci * fr + u * di;
            fr = nr;
            fi = ni;
            sums[s + 1] += fr * fr + fi * fi;
            if (a.snapshots && row[s + 1] != npos)
                a.snapshots[row[s + 1] * n + k] = {fr, fi};
        }
        a.f[k] = {fr, fi};
    }
}

} // namespace

double sum_abs2_serial(std::span<const cplx> values) {
    double sum = 0.0;
    for (const cplx& v : values) sum += v.real() * v.real() + v.imag() * v.imag();
    return sum;
}

double sum_abs2(std::span<const cplx> values) {
    const std::size_t n = values.size();
    const int max_team = omp_get_max_threads();
    std::vector<double> partial(static_cast<std::size_t>(max_team), 0.0);
    int team = 1;
#pragma omp parallel
    {
#pragma omp single
        team = omp_get_num_threads();
        const int tid = omp_get_thread_num();
        const auto [lo, hi] = mode_range(n, tid, omp_get_num_threads());
        double s = 0.0;
        for (std::size_t k = lo; k < hi; ++k)
            s += values[k].real() * values[k].real() + values[k].imag() * values[k].imag();
        partial[static_cast<std::size_t>(tid)] = s;
    }
    double sum = 0.0;
    for (int t = 0; t < team; ++t) sum += partial[static_cast<std::size_t>(t)];
    return sum;
}

void evolve_modes_serial(const ModeEvolveArgs& a) {
    const std::size_t n_steps = a.u_mid.size();
    const auto row = snapshot_rows(a.record_steps, n_steps);
    for (double& s : a.sum_f2_by_step) s = 0.0;
    evolve_range(a, 0, a.f.size(), row, a.sum_f2_by_step.data());
}

void evolve_modes(const ModeEvolveArgs& a) {
    const std::size_t n = a.f.size();
    const std::size_t n_steps = a.u_mid.size();
    const auto row = snapshot_rows(a.record_steps, n_steps);
    for (double& s : a.sum_f2_by_step) s = 0.0;

    const int max_team = omp_get_max_threads();
    const std::size_t stride = n_steps + 1;
    std::vector<double> partial(static_cast<std::size_t>(max_team) * stride, 0.0);
    int team = 1;
#pragma omp parallel
    {
#pragma omp single
        team = omp_get_num_threads();
        const int tid = omp_get_thread_num();
        const auto [lo, hi] = mode_range(n, tid, omp_get_num_threads());
        evolve_range(a, lo, hi, row, partial.data() + static_cast<std::size_t>(tid) * stride);
    }
    for (int t = 0; t < team; ++t) {
        const double* p = partial.data() + static_cast<std::size_t>(t) * stride;
        for (std::size_t s = 0; s < stride; ++s) a.sum_f2_by_step[s] += p[s];
    }
}

namespace {

// k = i y (omega_q e^{-2 S} + omega) + (i/2) g u, elementwise over [lo, hi)
void rk4_stage(const Rk4Args& a, const std::vector<cplx>& y, double sum_abs2_y, double u,
               std::vector<cplx>& k_out, std::size_t lo, std::size_t hi) {
    const double shift = a.omega_q * std::exp(-2.0 * sum_abs2_y);
    for (std::size_t m = lo; m < hi; ++m) {
        const double w = shift + a.omega[m];
        const double yr = y[m].real(), yi = y[m].imag();
        k_out[m] = {-w * yi, w * yr + 0.5 * a.g[m] * u};
    }
}

} // namespace

void evolve_modes_rk4_serial(const Rk4Args& a) {
    const std::size_t n = a.f.size();
    const std::size_t n_steps = (a.u_nodes.size() - 1) / 2;
    const auto row = snapshot_rows(a.record_steps, n_steps);

    std::vector<cplx> y(n), k1(n), k2(n), k3(n), k4(n);
    std::vector<cplx> f(a.f.begin(), a.f.end());
    const double h = a.h;

    a.sum_f2_by_step[0] = sum_abs2_serial(f);
    if (a.snapshots && row[0] != npos)
        std::copy(f.begin(), f.end(), a.snapshots + row[0] * n);

    for (std::size_t s = 0; s < n_steps; ++s) {
        const double u0 = a.u_nodes[2 * s];
        const double um = a.u_nodes[2 * s + 1];
        const double u1 = a.u_nodes[2 * s + 2];
        rk4_stage(a, f, sum_abs2_serial(f), u0, k1, 0, n);
        for (std::size_t m = 0; m < n; ++m) y[m] = f[m] + 0.5 * h * k1[m];
        rk4_stage(a, y, sum_abs2_serial(y), um, k2, 0, n);
        for (std::size_t m = 0; m < n; ++m) y[m] = f[m] + 0.5 * h * k2[m];
        rk4_stage(a, y, sum_abs2_serial(y), um, k3, 0, n);
        for (std::size_t m = 0; m < n; ++m) y[m] = f[m] + h * k3[m];
        rk4_stage(a, y, sum_abs2_serial(y), u1, k4, 0, n);
        for (std::size_t m = 0; m < n; ++m)
            f[m] += (h / 6.0) * (k1[m] + 2.0 * k2[m] + 2.0 * k3[m] + k4[m]);
        a.sum_f2_by_step[s + 1] = sum_abs2_serial(f);
        if (a.snapshots && row[s + 1] != npos)
            std::copy(f.begin(), f.end(), a.snapshots + row[s + 1] * n);
    }
    std::copy(f.begin(), f.end(), a.f.begin());
}

// One parallel region for the whole run. Each thread owns a fixed mode range;
// the y/k arrays are only ever touched within the owning range, so the sole
// cross-thread traffic is the stage sum. Every thread folds the per-thread
// partials itself in thread order (identical doubles on every thread), and the
// partial buffers are double-buffered so one barrier per reduction suffices.
void evolve_modes_rk4(const Rk4Args& a) {
    const std::size_t n = a.f.size();
    const std::size_t n_steps = (a.u_nodes.size() - 1) / 2;
    const auto row = snapshot_rows(a.record_steps, n_steps);

    std::vector<cplx> y(n), k1(n), k2(n), k3(n), k4(n);
    std::vector<cplx> f(a.f.begin(), a.f.end());
    const double h = a.h;

    const auto max_team = static_cast<std::size_t>(omp_get_max_threads());
    constexpr std::size_t pad = 8;  // one cache line per slot
    std::vector<double> partial(2 * max_team * pad, 0.0);

#pragma omp parallel
    {
        const int tid = omp_get_thread_num();
        const int team = omp_get_num_threads();
        const auto [lo, hi] = mode_range(n, tid, team);
        std::size_t parity = 0;
        double stage_sum = 0.0;

        auto reduce_abs2 = [&](const std::vector<cplx>& v) {
            double s = 0.0;
            for (std::size_t m = lo; m < hi; ++m)
                s += v[m].real() * v[m].real() + v[m].imag() * v[m].imag();
            double* buffer = partial.data() + parity * max_team * pad;
            buffer[static_cast<std::size_t>(tid) * pad] = s;
            parity ^= 1;
#pragma omp barrier
            double total = 0.0;
            for (int t = 0; t < team; ++t) total += buffer[static_cast<std::size_t>(t) * pad];
            stage_sum = total;
        };

        reduce_abs2(f);
        if (tid == 0) a.sum_f2_by_step[0] = stage_sum;
        if (a.snapshots && row[0] != npos)
            std::copy(f.begin() + static_cast<std::ptrdiff_t>(lo),
                      f.begin() + static_cast<std::ptrdiff_t>(hi),
                      a.snapshots + row[0] * n + lo);

        for (std::size_t s = 0; s < n_steps; ++s) {
            const double u0 = a.u_nodes[2 * s];
            const double um = a.u_nodes[2 * s + 1];
            const double u1 = a.u_nodes[2 * s + 2];
            rk4_stage(a, f, stage_sum, u0, k1, lo, hi);
            for (std::size_t m = lo; m < hi; ++m) y[m] = f[m] + 0.5 * h * k1[m];
            reduce_abs2(y);
            rk4_stage(a, y, stage_sum, um, k2, lo, hi);
            for (std::size_t m = lo; m < hi; ++m) y[m] = f[m] + 0.5 * h * k2[m];
            reduce_abs2(y);
            rk4_stage(a, y, stage_sum, um, k3, lo, hi);
            for (std::size_t m = lo; m < hi; ++m) y[m] = f[m] + h * k3[m];
            reduce_abs2(y);
            rk4_stage(a, y, stage_sum, u1, k4, lo, hi);
            for (std::size_t m = lo; m < hi; ++m)
                f[m] += (h / 6.0) * (k1[m] + 2.0 * k2[m] + 2.0 * k3[m] + k4[m]);
            reduce_abs2(f);
            if (tid == 0) a.sum_f2_by_step[s + 1] = stage_sum;
            if (a.snapshots && row[s + 1] != npos)
                std::copy(f.begin() + static_cast<std::ptrdiff_t>(lo),
                          f.begin() + static_cast<std::ptrdiff_t>(hi),
                          a.snapshots + row[s + 1] * n + lo);
        }
    }
    std::copy(f.begin(), f.end(), a.f.begin());
}

namespace {

// pass 1: out = P A; pass 2 (in place): out = A^T out
template <bool Parallel>
void congruence_run(std::size_t n_modes, const double* c, const double* s, const double* P,
                    double* out) {
    const std::size_t dim = 2 * n_modes;
#pragma omp parallel for if (Parallel)
    for (std::ptrdiff_t lp = 0; lp < static_cast<std::ptrdiff_t>(n_modes); ++lp) {
        const auto l = static_cast<std::size_t>(lp);
        const double cl = c[l], sl = s[l];
        const double* p0 = P + (2 * l) * dim;
        const double* p1 = P + (2 * l + 1) * dim;
        double* o0 = out + (2 * l) * dim;
        double* o1 = out + (2 * l + 1) * dim;
        for (std::size_t i = 0; i < dim; ++i) {
            o0[i] = p0[i] * cl + p1[i] * sl;
            o1[i] = -p0[i] * sl + p1[i] * cl;
        }
    }
#pragma omp parallel for if (Parallel)
    for (std::ptrdiff_t jp = 0; jp < static_cast<std::ptrdiff_t>(dim); ++jp) {
        double* col = out + static_cast<std::size_t>(jp) * dim;
        for (std::size_t k = 0; k < n_modes; ++k) {
            const double a = col[2 * k], b = col[2 * k + 1];
            col[2 * k] = c[k] * a + s[k] * b;
            col[2 * k + 1] = -s[k] * a + c[k] * b;
        }
    }
}

} // namespace

void rotated_congruence(std::size_t n_modes, const double* cos_wdt, const double* sin_wdt,
                        const double* P, double* out) {
    congruence_run<true>(n_modes, cos_wdt, sin_wdt, P, out);
}

void rotated_congruence_serial(std::size_t n_modes, const double* cos_wdt,
                               const double* sin_wdt, const double* P, double* out) {
    congruence_run<false>(n_modes, cos_wdt, sin_wdt, P, out);
}

} // namespace qreset::kernels
