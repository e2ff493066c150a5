// polaron.hpp — variational polaron state: ground state, population, energy

#pragma once

#include <array>
#include <complex>
#include <string>
#include <vector>

#include "qreset/bath.hpp"

namespace qreset::polaron {

struct State {
    std::vector<std::complex<double>> displacements;  // f_k, one per bath mode
    std::string bath_ref;  // Discretization::id() of the bath it belongs to

    std::size_t size() const noexcept { return displacements.size(); }
};

struct GroundStateOptions {
    bool self_consistent{false};
    double tol{1e-12};
    std::size_t max_iter{200};
};

// Weak coupling: f_k = -g_k / (2 (omega_q + omega_k)). Self-consistent:
// fixed-point iteration of f_k = -g_k / (2 (omega_q e^{-2 sum|f|^2} + omega_k))
// from the weak-coupling seed; throws IterationError on non-convergence.
State ground_state(const bath::Discretization& bath, double omega_q,
                   const GroundStateOptions& opts = {});

double sum_abs2(const State& state);

// P_+ = (1 - e^{-2 sum|f_k|^2}) / 2
double excited_population(const State& state);

// E = -(h_x/2) e^{-2 sum|f|^2} + sum w_k |f_k|^2
//     + (coupling_scale/2) sum g_k (f_k + f_k*)
double variational_energy(const State& state, double h_x, const bath::Discretization& bath,
                          double coupling_scale = 1.0);

// (dE/dx_k, dE/dy_k) for f_k = x_k + i y_k, same conventions as variational_energy
std::vector<std::array<double, 2>> energy_gradient(const State& state, double h_x,
                                                   const bath::Discretization& bath,
                                                   double coupling_scale = 1.0);

// max_k |f_k + g_k / (2 (omega_q e^{-2 sum|f|^2} + omega_k))|
double fixed_point_residual(const State& state, const bath::Discretization& bath,
                            double omega_q);

struct CorrelationSample {
    double omega;
    std::complex<double> g_f;  // g_k f_k
};

std::vector<CorrelationSample> correlation_profile(const State& state,
                                                   const bath::Discretization& bath);

} // namespace qreset::polaron
