// acceptance: end-to-end checks at pinned tolerances, one line per criterion

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <string>
#include <vector>

#include "qreset/bath.hpp"
#include "qreset/experiments.hpp"
#include "qreset/lqr.hpp"
#include "qreset/oracle.hpp"
#include "qreset/polaron.hpp"
#include "qreset/tdvp.hpp"
#include "support/oracles.hpp"

using namespace qreset;
using cplx = std::complex<double>;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;

class Criterion {
public:
    Criterion(int id, std::string title) : id_(id), title_(std::move(title)), start_(Clock::now()) {}

    void expect(bool pass, const std::string& detail) {
        if (!pass) local_failures_.push_back(detail);
        details_.push_back((pass ? "" : "FAILED: ") + detail);
    }

    void finish(double runtime_limit_s) {
        const double elapsed =
            std::chrono::duration<double>(Clock::now() - start_).count();
        if (elapsed >= runtime_limit_s)
            local_failures_.push_back("runtime " + std::to_string(elapsed) + " s exceeds " +
                                      std::to_string(runtime_limit_s) + " s");
        const bool pass = local_failures_.empty();
        std::printf("[%s] criterion %d: %s (%.2f s)\n", pass ? "PASS" : "FAIL", id_,
                    title_.c_str(), elapsed);
        for (const auto& detail : details_) std::printf("        %s\n", detail.c_str());
        if (!pass) ++failures;
    }

private:
    int id_;
    std::string title_;
    Clock::time_point start_;
    std::vector<std::string> details_;
    std::vector<std::string> local_failures_;
};

std::string fmt(double v) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.6g", v);
    return buffer;
}

const bath::SpectralDensityParams kParams{};
const double kOmegaQ = kParams.omega_q;
const double kOmegaMax = 10.0 * kParams.omega_c;

} // namespace

// 1. relaxed polaron population vs the independent quadrature oracle
static void criterion_1() {
    Criterion c(1, "relaxed polaron population matches adaptive quadrature to 0.5%");
    const double oracle_sum = testsupport::simpson(
        [&](double w) {
            const double wp = w + kOmegaQ;
            return bath::spectral_density(w, kParams) / (4.0 * wp * wp);
        },
        0.0, kOmegaMax);
    const double oracle_population = 0.5 * (1.0 - std::exp(-2.0 * oracle_sum));

    const auto b = bath::discretize(kParams, 2000, kOmegaMax, bath::Scheme::GaussLegendre);
    const auto state = polaron::ground_state(b, kOmegaQ);
    const double population = polaron::excited_population(state);

    c.expect(std::abs(population - oracle_population) <= 5e-3 * oracle_population,
             "P+ = " + fmt(population) + " vs oracle " + fmt(oracle_population) +
                 " (rel " + fmt(std::abs(population - oracle_population) / oracle_population) +
                 ", tol 5e-3)");
    c.expect(std::abs(oracle_population - 2.88e-3) < 0.01e-3,
             "oracle near the expected 2.88e-3");
    c.finish(1.0);
}

// 2. self-consistent fixed point: residual and closeness to weak coupling
static void criterion_2() {
    Criterion c(2, "self-consistent displacements: residual 1e-12, weak-coupling gap < 1%");
    const auto b = bath::discretize(kParams, 2000, kOmegaMax, bath::Scheme::GaussLegendre);
    const auto weak = polaron::ground_state(b, kOmegaQ);
    const auto sc = polaron::ground_state(b, kOmegaQ, {.self_consistent = true});
    const double residual = polaron::fixed_point_residual(sc, b, kOmegaQ);
    const double gap = std::abs(polaron::sum_abs2(sc) - polaron::sum_abs2(weak)) /
                       polaron::sum_abs2(weak);
    c.expect(residual < 1e-12, "per-mode residual " + fmt(residual) + " < 1e-12");
    c.expect(gap < 0.01, "sum|f|^2 weak vs self-consistent rel gap " + fmt(gap) + " < 1%");
    c.finish(1.0);
}

// 3. smooth-switch improvement: windows and ordering of the lambda family
static void criterion_3() {
    Criterion c(3, "lambda-family decoupling windows and ordering");
    const auto b = bath::discretize(kParams, 2000, kOmegaMax, bath::Scheme::GaussLegendre);
    const auto relaxed = polaron::ground_state(b, kOmegaQ);
    const double p_relaxed = polaron::excited_population(relaxed);

    tdvp::EvolveOptions opts;
    opts.dt = 1e-3;
    opts.record_displacements = false;
    opts.record_stride = 400;
    auto final_population = [&](double lambda) {
        const auto profile = tdvp::SwitchProfile::rational(lambda, 0.4);
        return tdvp::evolve(relaxed, b, kOmegaQ, profile, opts).final_population();
    };
    const double p1 = final_population(1.0);
    const double p15 = final_population(1.5);
    const double p2 = final_population(2.0);
    const double p25 = final_population(2.5);

    const double improvement = p_relaxed / p1;
    c.expect(improvement >= 30.0 && improvement <= 300.0,
             "lambda=1 improvement factor " + fmt(improvement) + " in [30, 300]");
    c.expect(p2 >= 1e-7 && p2 <= 1e-6,
             "lambda=2 final P+ " + fmt(p2) + " in [1e-7, 1e-6]");
    c.expect(p2 < p15 && p15 < p1,
             "ordering P(2) < P(3/2) < P(1): " + fmt(p2) + " < " + fmt(p15) + " < " + fmt(p1));
    c.expect(p2 < p25, "ordering P(2) < P(5/2): " + fmt(p2) + " < " + fmt(p25));
    c.finish(40.0);  // < 10 s per curve
}

// 4. LQR headline: R = 1e-7 population, monotonicity in R, u = 0 crossing
static void criterion_4() {
    Criterion c(4, "LQR closed loop: headline population, R-monotonicity, zero crossing");
    const auto coarse =
        bath::discretize(kParams, 150, kOmegaMax, bath::Scheme::GaussLegendre);
    const auto system = lqr::build_system(coarse, kOmegaQ, 1e-3);
    const Eigen::VectorXd x0 = lqr::relaxed_state(coarse, kOmegaQ);

    std::vector<double> populations;
    std::size_t crossings_at_1e7 = 0;
    for (const double R : {1e-7, 1e-9, 1e-11}) {
        const auto ric = lqr::riccati_backward(system, R, 400);
        const auto sol = lqr::closed_loop(system, ric, x0, R);
        populations.push_back(sol.final_population);
        if (R == 1e-7)
            for (std::size_t t = 1; t < sol.control.size(); ++t)
                if ((sol.control[t - 1] > 0.0) != (sol.control[t] > 0.0)) ++crossings_at_1e7;
    }
    c.expect(populations[0] >= 0.2e-6 && populations[0] <= 5e-6,
             "R=1e-7 final P+ " + fmt(populations[0]) + " within a factor 5 of 1e-6");
    c.expect(populations[0] > populations[1] && populations[1] > populations[2],
             "strictly decreasing over R = 1e-7, 1e-9, 1e-11: " + fmt(populations[0]) +
                 " > " + fmt(populations[1]) + " > " + fmt(populations[2]));
    c.expect(crossings_at_1e7 >= 1,
             "R=1e-7 control crosses zero (" + std::to_string(crossings_at_1e7) + "x)");
    c.finish(300.0);
}

// 5. optimality: cost dominance over lambda=2 and first-order stationarity
static void criterion_5() {
    Criterion c(5, "LQR optimality: beats the lambda=2 switch, no improving perturbation");
    const auto coarse =
        bath::discretize(kParams, 150, kOmegaMax, bath::Scheme::GaussLegendre);
    const auto system = lqr::build_system(coarse, kOmegaQ, 1e-3);
    const Eigen::VectorXd x0 = lqr::relaxed_state(coarse, kOmegaQ);
    const double R = 1e-7;
    const std::size_t n_steps = 400;
    const auto ric = lqr::riccati_backward(system, R, n_steps);
    const auto sol = lqr::closed_loop(system, ric, x0, R);

    const auto profile = tdvp::SwitchProfile::rational(2.0, 0.4);
    std::vector<double> u_switch(n_steps);
    for (std::size_t t = 0; t < n_steps; ++t)
        u_switch[t] = tdvp::switch_value(profile, (static_cast<double>(t) + 0.5) * 1e-3);
    const double switch_cost = lqr::cost_of_control(system, u_switch, x0, R).total;
    c.expect(sol.cost() <= switch_cost, "J_lqr = " + fmt(sol.cost()) +
                                            " <= J_lambda2 = " + fmt(switch_cost));

    const double optimal = lqr::cost_of_control(system, sol.control, x0, R).total;
    testsupport::SplitMix64 rng(101);
    double worst_gain = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<double> delta(n_steps);
        double norm = 0.0;
        for (auto& d : delta) {
            d = rng.uniform();
            norm += d * d;
        }
        const double scale = 1e-3 / std::sqrt(norm);
        std::vector<double> perturbed = sol.control;
        for (std::size_t t = 0; t < n_steps; ++t) perturbed[t] += scale * delta[t];
        worst_gain = std::min(worst_gain,
                              lqr::cost_of_control(system, perturbed, x0, R).total - optimal);
    }
    c.expect(worst_gain >= -1e-12,
             "largest cost decrease over 10 perturbations " + fmt(worst_gain) + " >= -1e-12");
    c.finish(60.0);
}

// 6. analytic/numeric cross-checks on the endpoint displacement
static void criterion_6() {
    Criterion c(6, "evolve endpoint vs displacement integral and linear closed form");
    double worst_endpoint = 0.0;
    for (const double frac : {0.37, 0.81, 1.9}) {
        const bath::Mode mode{frac * kParams.omega_c, 0.8};
        bath::Discretization one;
        one.modes = {mode};
        one.omega_max = mode.omega;
        const auto relaxed = polaron::ground_state(one, kOmegaQ);
        for (const double lambda : {1.0, 2.0}) {
            const auto profile = tdvp::SwitchProfile::rational(lambda, 0.4);
            tdvp::EvolveOptions opts;
            opts.dt = 2e-5;
            opts.record_displacements = false;
            opts.record_stride = 1 << 20;
            const auto traj = tdvp::evolve(relaxed, one, kOmegaQ, profile, opts);
            const cplx integral = tdvp::final_displacement_integral(mode, kOmegaQ, profile);
            worst_endpoint =
                std::max(worst_endpoint, std::abs(traj.final_state.displacements[0] - integral) /
                                             std::abs(integral));
        }
    }
    c.expect(worst_endpoint <= 1e-6,
             "endpoint agreement for lambda in {1, 2}: worst rel " + fmt(worst_endpoint) +
                 " <= 1e-6");

    double worst_closed = 0.0;
    for (const double frac : {0.37, 0.81, 1.9}) {
        const bath::Mode mode{frac * kParams.omega_c, 0.8};
        const double wp = mode.omega + kOmegaQ, tf = 0.4;
        const cplx integral =
            tdvp::final_displacement_integral(mode, kOmegaQ, tdvp::SwitchProfile::linear(tf));
        const double closed =
            mode.g / (2.0 * wp) * std::abs(2.0 * std::sin(0.5 * wp * tf) / (wp * tf));
        worst_closed = std::max(worst_closed, std::abs(std::abs(integral) - closed) / closed);
    }
    c.expect(worst_closed <= 1e-10,
             "linear-switch closed form: worst rel " + fmt(worst_closed) + " <= 1e-10");
    c.finish(1.0);
}

// 7. few-mode exact propagation vs the variational one
static void criterion_7() {
    Criterion c(7, "oracle validation: 20% agreement, monotone in coupling");
    experiments::ExperimentConfig config;  // validate defaults: 3 modes, linear switch
    const auto summary =
        experiments::run_validate(config, std::filesystem::temp_directory_path() /
                                              "qreset_acceptance" / "validate");
    const auto& levels = summary.at("levels");
    const double rel0 = levels[0].at("rel_discrepancy").get<double>();
    const double rel1 = levels[1].at("rel_discrepancy").get<double>();
    const double rel2 = levels[2].at("rel_discrepancy").get<double>();
    c.expect(levels[0].at("valid").get<bool>() && levels[1].at("valid").get<bool>() &&
                 levels[2].at("valid").get<bool>(),
             "all runs within the Fock leakage budget");
    c.expect(rel0 <= 0.2, "base-coupling discrepancy " + fmt(rel0) + " <= 20%");
    c.expect(rel0 > rel1 && rel1 > rel2, "discrepancy decreases under coupling halving: " +
                                             fmt(rel0) + " > " + fmt(rel1) + " > " + fmt(rel2));
    c.finish(60.0);
}

// 8. numerical hygiene: gradients, PSD, norm conservation, step refinement
static void criterion_8() {
    Criterion c(8, "numerical hygiene: gradient check, Riccati PSD, norm, dt-halving");

    {  // energy gradient vs central differences at relative 1e-6
        const auto b = bath::discretize(kParams, 8, kOmegaMax, bath::Scheme::GaussLegendre);
        polaron::State state;
        state.displacements.resize(b.size());
        for (std::size_t k = 0; k < b.size(); ++k)
            state.displacements[k] = {0.05 * std::cos(static_cast<double>(k) + 1.0),
                                      0.03 * std::sin(2.0 * static_cast<double>(k) + 0.5)};
        const auto grad = polaron::energy_gradient(state, kOmegaQ, b);
        const double h = 1e-6;
        double worst = 0.0;
        for (std::size_t k = 0; k < b.size(); ++k) {
            for (const int part : {0, 1}) {
                auto bump = [&](double sign) {
                    auto displaced = state;
                    auto& f = displaced.displacements[k];
                    f += (part == 0) ? cplx{sign * h, 0.0} : cplx{0.0, sign * h};
                    return polaron::variational_energy(displaced, kOmegaQ, b);
                };
                const double fd = (bump(1.0) - bump(-1.0)) / (2.0 * h);
                const double analytic = grad[k][static_cast<std::size_t>(part)];
                worst = std::max(worst,
                                 std::abs(fd - analytic) / std::max(1.0, std::abs(analytic)));
            }
        }
        c.expect(worst <= 1e-6, "gradient finite-difference check: worst rel " + fmt(worst));
    }

    {  // Riccati PSD probes
        const auto b = bath::discretize(kParams, 20, kOmegaMax, bath::Scheme::GaussLegendre);
        const auto system = lqr::build_system(b, kOmegaQ, 1e-3);
        lqr::RiccatiOptions opts;
        opts.keep_P = true;
        const auto ric = lqr::riccati_backward(system, 1e-7, 50, opts);
        testsupport::SplitMix64 rng(57);
        double worst = 0.0;
        for (const auto& P : ric.P_history) {
            for (int probe = 0; probe < 10; ++probe) {
                Eigen::VectorXd x(P.rows());
                for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = rng.uniform();
                worst = std::min(worst, x.dot(P * x) / x.squaredNorm());
            }
        }
        c.expect(worst >= -1e-10, "Riccati quadratic-form probes: min " + fmt(worst));
    }

    {  // u = 0 norm conservation per step at 1e-12
        const auto b = bath::discretize(kParams, 64, kOmegaMax, bath::Scheme::GaussLegendre);
        const auto relaxed = polaron::ground_state(b, kOmegaQ);
        tdvp::EvolveOptions opts;
        opts.dt = 1e-3;
        opts.record_displacements = false;
        const auto traj = tdvp::evolve(relaxed, b, kOmegaQ,
                                       tdvp::SwitchProfile::constant(0.0, 0.4), opts);
        double worst = 0.0;
        for (std::size_t r = 1; r < traj.sum_f2.size(); ++r)
            worst = std::max(worst, std::abs(traj.sum_f2[r] - traj.sum_f2[r - 1]) /
                                        traj.sum_f2[r - 1]);
        c.expect(worst <= 1e-12, "free-rotation norm drift per step: worst rel " + fmt(worst));
    }

    {  // dt halving moves the final population by < 0.1%
        const auto b = bath::discretize(kParams, 2000, kOmegaMax, bath::Scheme::GaussLegendre);
        const auto relaxed = polaron::ground_state(b, kOmegaQ);
        const auto profile = tdvp::SwitchProfile::rational(2.0, 0.4);
        tdvp::EvolveOptions opts;
        opts.record_displacements = false;
        opts.record_stride = 1 << 20;
        opts.dt = 1e-3;
        const double coarse = tdvp::evolve(relaxed, b, kOmegaQ, profile, opts).final_population();
        opts.dt = 5e-4;
        const double fine = tdvp::evolve(relaxed, b, kOmegaQ, profile, opts).final_population();
        const double change = std::abs(fine - coarse) / coarse;
        c.expect(change < 1e-3, "dt halving changes final P+ by " + fmt(change) + " < 0.1%");
    }
    c.finish(60.0);
}

int main() {
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    if (failures == 0)
        std::printf("acceptance: all criteria passed\n");
    else
        std::printf("acceptance: %d criteria FAILED\n", failures);
    return failures == 0 ? 0 : 1;
}
