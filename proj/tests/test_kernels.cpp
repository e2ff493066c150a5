#include <doctest.h>

#include <cmath>
#include <cstring>
#include <vector>

#include <Eigen/Dense>

#include "qreset/kernels.hpp"
#include "support/oracles.hpp"

using namespace qreset;
using kernels::cplx;

namespace {

// deterministic synthetic problem: n modes, n_steps of rotation + drive
struct Problem {
    std::vector<double> rot_re, rot_im, drv_re, drv_im, u_mid;
    std::vector<cplx> f0;

    Problem(std::size_t n, std::size_t n_steps) {
        testsupport::SplitMix64 rng(42);
        rot_re.resize(n);
        rot_im.resize(n);
        drv_re.resize(n);
        drv_im.resize(n);
        f0.resize(n);
        for (std::size_t k = 0; k < n; ++k) {
            const double angle = 0.3 * rng.uniform();
            rot_re[k] = std::cos(angle);
            rot_im[k] = std::sin(angle);
            drv_re[k] = 0.01 * rng.uniform();
            drv_im[k] = 0.01 * rng.uniform();
            f0[k] = {0.1 * rng.uniform(), 0.1 * rng.uniform()};
        }
        u_mid.resize(n_steps);
        for (std::size_t s = 0; s < n_steps; ++s)
            u_mid[s] = 1.0 - static_cast<double>(s) / static_cast<double>(n_steps);
    }
};

} // namespace

TEST_CASE("sum_abs2 parallel matches serial") {
    testsupport::SplitMix64 rng(7);
    std::vector<cplx> values(100003);
    for (auto& v : values) v = {rng.uniform(), rng.uniform()};
    const double serial = kernels::sum_abs2_serial(values);
    const double parallel = kernels::sum_abs2(values);
    CHECK(parallel == doctest::Approx(serial).epsilon(1e-13));
    CHECK(kernels::sum_abs2(values) == parallel);  // reproducible
}

TEST_CASE("evolve_modes parallel matches the serial reference") {
    const std::size_t n = 257, n_steps = 100;
    Problem problem(n, n_steps);
    const std::vector<std::size_t> record_steps{0, 37, 100};

    auto run = [&](bool serial) {
        std::vector<cplx> f = problem.f0;
        std::vector<double> sums(n_steps + 1, 0.0);
        std::vector<cplx> snapshots(record_steps.size() * n);
        kernels::ModeEvolveArgs args;
        args.rot_re = problem.rot_re;
        args.rot_im = problem.rot_im;
        args.drv_re = problem.drv_re;
        args.drv_im = problem.drv_im;
        args.u_mid = problem.u_mid;
        args.f = f;
        args.sum_f2_by_step = sums;
        args.record_steps = record_steps;
        args.snapshots = snapshots.data();
        serial ? kernels::evolve_modes_serial(args) : kernels::evolve_modes(args);
        return std::tuple(f, sums, snapshots);
    };

    const auto [f_s, sums_s, snap_s] = run(true);
    const auto [f_p, sums_p, snap_p] = run(false);

    // per-mode arithmetic is identical; only the reduction regroups
    CHECK(std::memcmp(f_s.data(), f_p.data(), n * sizeof(cplx)) == 0);
    CHECK(std::memcmp(snap_s.data(), snap_p.data(), snap_s.size() * sizeof(cplx)) == 0);
    for (std::size_t s = 0; s <= n_steps; ++s)
        CHECK(sums_p[s] == doctest::Approx(sums_s[s]).epsilon(1e-13));

    const auto [f_p2, sums_p2, snap_p2] = run(false);
    CHECK(std::memcmp(sums_p.data(), sums_p2.data(), sums_p.size() * sizeof(double)) == 0);
}

TEST_CASE("rk4 parallel matches the serial reference") {
    const std::size_t n = 61, n_steps = 50;
    testsupport::SplitMix64 rng(11);
    std::vector<double> omega(n), g(n);
    std::vector<cplx> f0(n);
    for (std::size_t k = 0; k < n; ++k) {
        omega[k] = 1.0 + 30.0 * std::abs(rng.uniform());
        g[k] = 0.5 * std::abs(rng.uniform());
        f0[k] = {0.02 * rng.uniform(), 0.02 * rng.uniform()};
    }
    std::vector<double> u_nodes(2 * n_steps + 1);
    for (std::size_t i = 0; i < u_nodes.size(); ++i)
        u_nodes[i] = 1.0 - static_cast<double>(i) / static_cast<double>(u_nodes.size() - 1);

    auto run = [&](bool serial) {
        std::vector<cplx> f = f0;
        std::vector<double> sums(n_steps + 1, 0.0);
        kernels::Rk4Args args;
        args.omega = omega;
        args.g = g;
        args.omega_q = 31.4;
        args.h = 1e-3;
        args.u_nodes = u_nodes;
        args.f = f;
        args.sum_f2_by_step = sums;
        serial ? kernels::evolve_modes_rk4_serial(args) : kernels::evolve_modes_rk4(args);
        return std::pair(f, sums);
    };
    const auto [f_s, sums_s] = run(true);
    const auto [f_p, sums_p] = run(false);
    for (std::size_t k = 0; k < n; ++k)
        CHECK(std::abs(f_p[k] - f_s[k]) <= 1e-12 * (1.0 + std::abs(f_s[k])));
    for (std::size_t s = 0; s <= n_steps; ++s)
        CHECK(sums_p[s] == doctest::Approx(sums_s[s]).epsilon(1e-11));
}

TEST_CASE("rotated_congruence matches a dense transpose-product and its serial twin") {
    const std::size_t n_modes = 5, dim = 2 * n_modes;
    testsupport::SplitMix64 rng(3);
    std::vector<double> c(n_modes), s(n_modes);
    for (std::size_t k = 0; k < n_modes; ++k) {
        const double angle = 0.7 * rng.uniform();
        c[k] = std::cos(angle);
        s[k] = std::sin(angle);
    }
    Eigen::MatrixXd P(dim, dim);
    for (Eigen::Index i = 0; i < P.size(); ++i) P.data()[i] = rng.uniform();
    P = (0.5 * (P + P.transpose())).eval();

    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(dim, dim);
    for (std::size_t k = 0; k < n_modes; ++k) {
        const auto i = static_cast<Eigen::Index>(2 * k);
        A(i, i) = c[k];
        A(i, i + 1) = -s[k];
        A(i + 1, i) = s[k];
        A(i + 1, i + 1) = c[k];
    }
    const Eigen::MatrixXd dense = A.transpose() * P * A;

    Eigen::MatrixXd out_parallel(dim, dim), out_serial(dim, dim);
    kernels::rotated_congruence(n_modes, c.data(), s.data(), P.data(), out_parallel.data());
    kernels::rotated_congruence_serial(n_modes, c.data(), s.data(), P.data(),
                                       out_serial.data());

    CHECK((out_parallel - dense).cwiseAbs().maxCoeff() < 1e-13);
    CHECK(std::memcmp(out_parallel.data(), out_serial.data(),
                      sizeof(double) * dim * dim) == 0);
}
