// lqr.hpp — discrete-time linear-quadratic regulator over the
// real/imaginary displacement coordinates x = (f'_1, f''_1, f'_2, ...)

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "qreset/bath.hpp"

namespace qreset::lqr {

// Exact one-step discretization of df/dt = i w' f + (i/2) g u with u constant
// across a step: x_{t+1} = A x_t + B u_t, where A is block-diagonal with
// per-mode rotations by w' dt and B_k = (g_k / 2 w'_k) (cos(w' dt) - 1, sin(w' dt)).
struct AffineSystem {
    std::vector<double> cos_wdt;  // per-mode rotation blocks of A
    std::vector<double> sin_wdt;
    Eigen::VectorXd B;            // 2N
    std::vector<double> omega_p;  // w'_k = omega_k + omega_q
    std::vector<double> g;
    double dt{0.0};
    double omega_q{0.0};

    std::size_t n_modes() const noexcept { return cos_wdt.size(); }
    std::size_t dim() const noexcept { return 2 * cos_wdt.size(); }

    Eigen::VectorXd apply_A(const Eigen::VectorXd& x) const;            // O(N)
    Eigen::VectorXd apply_A_transpose(const Eigen::VectorXd& x) const;  // O(N)
    Eigen::MatrixXd dense_A() const;  // for small-system checks
};

AffineSystem build_system(const bath::Discretization& bath, double omega_q, double dt);

// weak-coupling relaxed displacements packed as a real state vector
Eigen::VectorXd relaxed_state(const bath::Discretization& bath, double omega_q);

struct RiccatiOptions {
    bool keep_P{false};             // retain every P_t (memory-heavy; tests only)
    bool use_serial_kernels{false};
};

struct RiccatiResult {
    Eigen::MatrixXd gains;                   // n_steps x 2N; row t = F_t
    std::vector<Eigen::MatrixXd> P_history;  // P_0..P_{n_steps} when keep_P
};

// Backward recursion from P_{t_f} = I with Q = 0, N = 0:
//   F_t     = (R + B^T P_{t+1} B)^{-1} (B^T P_{t+1} A)
//   P_t     = A^T P_{t+1} A - (A^T P_{t+1} B)(R + B^T P_{t+1} B)^{-1}(B^T P_{t+1} A)
// R must be positive; a non-positive gain denominator signals a numerical fault.
RiccatiResult riccati_backward(const AffineSystem& system, double R, std::size_t n_steps,
                               const RiccatiOptions& opts = {});

struct Solution {
    Eigen::MatrixXd states;       // (n_steps+1) x 2N; row t = x_t
    std::vector<double> control;  // u_t = -F_t x_t
    double R{0.0};
    double terminal_cost{0.0};  // |x_{t_f}|^2
    double control_cost{0.0};   // R sum_t u_t^2
    double final_sum_f2{0.0};
    double final_population{0.0};

    double cost() const noexcept { return terminal_cost + control_cost; }
};

Solution closed_loop(const AffineSystem& system, const RiccatiResult& riccati,
                     const Eigen::VectorXd& x0, double R);

struct CostBreakdown {
    double terminal{0.0};
    double control{0.0};
    double total{0.0};
};

// replay an arbitrary control open-loop and evaluate the same quadratic cost
CostBreakdown cost_of_control(const AffineSystem& system, std::span<const double> u,
                              const Eigen::VectorXd& x0, double R);
Eigen::MatrixXd replay_open_loop(const AffineSystem& system, std::span<const double> u,
                                 const Eigen::VectorXd& x0);

// replay a piecewise-constant schedule through the mode evolution on a finer
// bath, starting from that bath's relaxed state; returns the final P_+
double evaluate_on_fine_bath(std::span<const double> u_steps, double t_f,
                             const bath::Discretization& fine_bath, double omega_q);

} // namespace qreset::lqr
