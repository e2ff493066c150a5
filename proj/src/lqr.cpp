#include "qreset/lqr.hpp"

#include <cmath>

#include "qreset/errors.hpp"
#include "qreset/kernels.hpp"
#include "qreset/polaron.hpp"
#include "qreset/tdvp.hpp"

namespace qreset::lqr {

Eigen::VectorXd AffineSystem::apply_A(const Eigen::VectorXd& x) const {
    Eigen::VectorXd y(x.size());
    for (std::size_t k = 0; k < n_modes(); ++k) {
        const auto i = static_cast<Eigen::Index>(2 * k);
        y[i] = cos_wdt[k] * x[i] - sin_wdt[k] * x[i + 1];
        y[i + 1] = sin_wdt[k] * x[i] + cos_wdt[k] * x[i + 1];
    }
    return y;
}

Eigen::VectorXd AffineSystem::apply_A_transpose(const Eigen::VectorXd& x) const {
    Eigen::VectorXd y(x.size());
    for (std::size_t k = 0; k < n_modes(); ++k) {
        const auto i = static_cast<Eigen::Index>(2 * k);
        y[i] = cos_wdt[k] * x[i] + sin_wdt[k] * x[i + 1];
        y[i + 1] = -sin_wdt[k] * x[i] + cos_wdt[k] * x[i + 1];
    }
    return y;
}

Eigen::MatrixXd AffineSystem::dense_A() const {
    const auto d = static_cast<Eigen::Index>(dim());
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(d, d);
    for (std::size_t k = 0; k < n_modes(); ++k) {
        const auto i = static_cast<Eigen::Index>(2 * k);
        A(i, i) = cos_wdt[k];
        A(i, i + 1) = -sin_wdt[k];
        A(i + 1, i) = sin_wdt[k];
        A(i + 1, i + 1) = cos_wdt[k];
    }
    return A;
}

AffineSystem build_system(const bath::Discretization& bath, double omega_q, double dt) {
    if (!(dt > 0.0)) throw ConfigError("build_system: dt must be positive");
    AffineSystem sys;
    const std::size_t n = bath.size();
    sys.cos_wdt.resize(n);
    sys.sin_wdt.resize(n);
    sys.omega_p.resize(n);
    sys.g.resize(n);
    sys.B.resize(static_cast<Eigen::Index>(2 * n));
    sys.dt = dt;
    sys.omega_q = omega_q;
    for (std::size_t k = 0; k < n; ++k) {
        const double wp = bath.modes[k].omega + omega_q;
        const double gk = bath.modes[k].g;
        sys.omega_p[k] = wp;
        sys.g[k] = gk;
        sys.cos_wdt[k] = std::cos(wp * dt);
        sys.sin_wdt[k] = std::sin(wp * dt);
        sys.B[static_cast<Eigen::Index>(2 * k)] = gk * (sys.cos_wdt[k] - 1.0) / (2.0 * wp);
        sys.B[static_cast<Eigen::Index>(2 * k + 1)] = gk * sys.sin_wdt[k] / (2.0 * wp);
    }
    return sys;
}

Eigen::VectorXd relaxed_state(const bath::Discretization& bath, double omega_q) {
    Eigen::VectorXd x0 = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(2 * bath.size()));
    for (std::size_t k = 0; k < bath.size(); ++k)
        x0[static_cast<Eigen::Index>(2 * k)] =
            -bath.modes[k].g / (2.0 * (bath.modes[k].omega + omega_q));
    return x0;
}

RiccatiResult riccati_backward(const AffineSystem& system, double R, std::size_t n_steps,
                               const RiccatiOptions& opts) {
    if (!(R > 0.0)) throw ConfigError("riccati_backward: R must be positive");
    if (n_steps == 0) throw ConfigError("riccati_backward: n_steps must be >= 1");
    const auto d = static_cast<Eigen::Index>(system.dim());

    RiccatiResult result;
    result.gains.resize(static_cast<Eigen::Index>(n_steps), d);
    if (opts.keep_P) result.P_history.assign(n_steps + 1, Eigen::MatrixXd());

    Eigen::MatrixXd P = Eigen::MatrixXd::Identity(d, d);
    Eigen::MatrixXd K(d, d);
    if (opts.keep_P) result.P_history[n_steps] = P;

    auto congruence = opts.use_serial_kernels ? kernels::rotated_congruence_serial
                                              : kernels::rotated_congruence;
    for (std::size_t t = n_steps; t-- > 0;) {
        const Eigen::VectorXd PB = P.selfadjointView<Eigen::Lower>() * system.B;
        const double denom = R + system.B.dot(PB);
        if (!(denom > 0.0))
            throw std::runtime_error(
                "riccati_backward: non-positive gain denominator (numerical fault)");
        const Eigen::VectorXd v = system.apply_A_transpose(PB);  // A^T P B = (B^T P A)^T
        result.gains.row(static_cast<Eigen::Index>(t)) = v.transpose() / denom;

        congruence(system.n_modes(), system.cos_wdt.data(), system.sin_wdt.data(), P.data(),
                   K.data());
        P.noalias() = K - (v * v.transpose()) / denom;
        P = 0.5 * (P + P.transpose().eval());  // keep the iterate symmetric
        if (opts.keep_P) result.P_history[t] = P;
    }
    return result;
}

Solution closed_loop(const AffineSystem& system, const RiccatiResult& riccati,
                     const Eigen::VectorXd& x0, double R) {
    const auto d = static_cast<Eigen::Index>(system.dim());
    if (x0.size() != d) throw ConfigError("closed_loop: x0 dimension mismatch");
    if (riccati.gains.cols() != d)
        throw ConfigError("closed_loop: gain dimension does not match the system");
    const auto n_steps = static_cast<std::size_t>(riccati.gains.rows());

    Solution sol;
    sol.R = R;
    sol.states.resize(static_cast<Eigen::Index>(n_steps + 1), d);
    sol.control.resize(n_steps);
    Eigen::VectorXd x = x0;
    sol.states.row(0) = x.transpose();
    double control_sq = 0.0;
    for (std::size_t t = 0; t < n_steps; ++t) {
        const double u = -riccati.gains.row(static_cast<Eigen::Index>(t)).dot(x);
        sol.control[t] = u;
        control_sq += u * u;
        x = system.apply_A(x) + system.B * u;
        sol.states.row(static_cast<Eigen::Index>(t + 1)) = x.transpose();
    }
    sol.terminal_cost = x.squaredNorm();
    sol.control_cost = R * control_sq;
    sol.final_sum_f2 = sol.terminal_cost;
    sol.final_population = 0.5 * (1.0 - std::exp(-2.0 * sol.final_sum_f2));
    return sol;
}

Eigen::MatrixXd replay_open_loop(const AffineSystem& system, std::span<const double> u,
                                 const Eigen::VectorXd& x0) {
    const auto d = static_cast<Eigen::Index>(system.dim());
    if (x0.size() != d) throw ConfigError("replay_open_loop: x0 dimension mismatch");
    Eigen::MatrixXd states(static_cast<Eigen::Index>(u.size() + 1), d);
    Eigen::VectorXd x = x0;
    states.row(0) = x.transpose();
    for (std::size_t t = 0; t < u.size(); ++t) {
        x = system.apply_A(x) + system.B * u[t];
        states.row(static_cast<Eigen::Index>(t + 1)) = x.transpose();
    }
    return states;
}

CostBreakdown cost_of_control(const AffineSystem& system, std::span<const double> u,
                              const Eigen::VectorXd& x0, double R) {
    Eigen::VectorXd x = x0;
    double control_sq = 0.0;
    for (const double ut : u) {
        control_sq += ut * ut;
        x = system.apply_A(x) + system.B * ut;
    }
    CostBreakdown cost;
    cost.terminal = x.squaredNorm();
    cost.control = R * control_sq;
    cost.total = cost.terminal + cost.control;
    return cost;
}

double evaluate_on_fine_bath(std::span<const double> u_steps, double t_f,
                             const bath::Discretization& fine_bath, double omega_q) {
    const tdvp::SwitchProfile profile = tdvp::profile_from_schedule(u_steps, t_f);
    const polaron::State relaxed = polaron::ground_state(fine_bath, omega_q);
    tdvp::EvolveOptions opts;
    opts.dt = t_f / static_cast<double>(u_steps.size());
    opts.record_displacements = false;
    opts.record_stride = u_steps.size();  // endpoints only
    const tdvp::Trajectory traj = tdvp::evolve(relaxed, fine_bath, omega_q, profile, opts);
    return traj.final_population();
}

} // namespace qreset::lqr
