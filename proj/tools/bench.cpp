// bench: serial reference vs OpenMP kernels on production-sized problems

#include <chrono>
#include <cmath>
#include <cstdio>
#include <vector>

#include <omp.h>

#include "qreset/bath.hpp"
#include "qreset/kernels.hpp"
#include "qreset/lqr.hpp"
#include "qreset/polaron.hpp"
#include "qreset/tdvp.hpp"

namespace {

using Clock = std::chrono::steady_clock;

template <class F>
double best_of(int reps, F&& body) {
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        const auto start = Clock::now();
        body();
        const auto stop = Clock::now();
        best = std::min(best, std::chrono::duration<double, std::milli>(stop - start).count());
    }
    return best;
}

void report(const char* name, double serial_ms, double parallel_ms) {
    std::printf("%-28s serial %9.3f ms   openmp %9.3f ms   speedup %5.2fx\n", name,
                serial_ms, parallel_ms, serial_ms / parallel_ms);
}

} // namespace

int main() {
    using namespace qreset;
    std::printf("threads: %d\n", omp_get_max_threads());

    const bath::SpectralDensityParams params;
    const double omega_q = params.omega_q;

    {
        const auto full = bath::discretize(params, 2000, 10.0 * params.omega_c,
                                           bath::Scheme::GaussLegendre);
        const auto relaxed = polaron::ground_state(full, omega_q);
        const auto profile = tdvp::SwitchProfile::rational(2.0, 0.4);
        tdvp::EvolveOptions opts;
        opts.record_displacements = false;
        opts.record_stride = 400;

        tdvp::EvolveOptions serial_opts = opts;
        serial_opts.use_serial_kernels = true;
        const double serial_ms = best_of(5, [&] {
            (void)tdvp::evolve(relaxed, full, omega_q, profile, serial_opts);
        });
        const double parallel_ms = best_of(5, [&] {
            (void)tdvp::evolve(relaxed, full, omega_q, profile, opts);
        });
        report("evolve linear 2000x400", serial_ms, parallel_ms);

    }

    // the RK4 kernels pay one synchronized reduction per stage, so the
    // parallel variant only wins once the mode count is large; measure both
    // sides of the crossover
    for (const std::size_t n : {std::size_t{2000}, std::size_t{32768}}) {
        const std::size_t n_steps = 400;
        std::vector<double> omega(n), g(n);
        std::vector<kernels::cplx> f0(n);
        for (std::size_t k = 0; k < n; ++k) {
            omega[k] = 1.0 + 313.0 * static_cast<double>(k) / static_cast<double>(n);
            g[k] = 0.1;
            f0[k] = {1e-3, 0.0};
        }
        std::vector<double> u_nodes(2 * n_steps + 1, 1.0);
        std::vector<double> sums(n_steps + 1);
        auto run = [&](bool serial) {
            std::vector<kernels::cplx> f = f0;
            kernels::Rk4Args args;
            args.omega = omega;
            args.g = g;
            args.omega_q = omega_q;
            args.h = 1e-3;
            args.u_nodes = u_nodes;
            args.f = f;
            args.sum_f2_by_step = sums;
            serial ? kernels::evolve_modes_rk4_serial(args) : kernels::evolve_modes_rk4(args);
        };
        const double serial_ms = best_of(3, [&] { run(true); });
        const double parallel_ms = best_of(3, [&] { run(false); });
        char name[64];
        std::snprintf(name, sizeof(name), "rk4 kernel %zux%zu", n, n_steps);
        report(name, serial_ms, parallel_ms);
    }

    {
        const std::size_t n_modes = 150;
        const auto coarse = bath::discretize(params, n_modes, 10.0 * params.omega_c,
                                             bath::Scheme::GaussLegendre);
        const auto system = lqr::build_system(coarse, omega_q, 1e-3);
        const std::size_t dim = system.dim();
        std::vector<double> P(dim * dim, 0.0), K(dim * dim, 0.0);
        for (std::size_t i = 0; i < dim; ++i) P[i * dim + i] = 1.0 + 0.01 * static_cast<double>(i);

        const double serial_ms = best_of(20, [&] {
            for (int rep = 0; rep < 50; ++rep)
                kernels::rotated_congruence_serial(n_modes, system.cos_wdt.data(),
                                                   system.sin_wdt.data(), P.data(), K.data());
        });
        const double parallel_ms = best_of(20, [&] {
            for (int rep = 0; rep < 50; ++rep)
                kernels::rotated_congruence(n_modes, system.cos_wdt.data(),
                                            system.sin_wdt.data(), P.data(), K.data());
        });
        report("congruence 300x300 (x50)", serial_ms, parallel_ms);
    }

    {
        std::vector<kernels::cplx> values(1u << 22);
        for (std::size_t i = 0; i < values.size(); ++i) {
            const double x = static_cast<double>(i % 1024) * 1e-3;
            values[i] = {std::sin(x), std::cos(x)};
        }
        volatile double sink = 0.0;
        const double serial_ms =
            best_of(10, [&] { sink = kernels::sum_abs2_serial(values); });
        const double parallel_ms = best_of(10, [&] { sink = kernels::sum_abs2(values); });
        (void)sink;
        report("sum_abs2 4M", serial_ms, parallel_ms);
    }
    return 0;
}
