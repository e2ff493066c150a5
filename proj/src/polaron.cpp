#include "qreset/polaron.hpp"

#include <cmath>

#include "qreset/errors.hpp"
#include "qreset/kernels.hpp"

namespace qreset::polaron {

namespace {

void check_pair(const State& state, const bath::Discretization& bath) {
    if (state.size() != bath.size())
        throw ConfigError("polaron: state has " + std::to_string(state.size()) +
                          " displacements for a bath of " + std::to_string(bath.size()) +
                          " modes");
}

} // namespace

State ground_state(const bath::Discretization& bath, double omega_q,
                   const GroundStateOptions& opts) {
    if (!(opts.tol > 0.0)) throw ConfigError("ground_state: tol must be positive");

    State state;
    state.bath_ref = bath.id();
    state.displacements.resize(bath.size());
    for (std::size_t k = 0; k < bath.size(); ++k)
        state.displacements[k] = -bath.modes[k].g / (2.0 * (omega_q + bath.modes[k].omega));
    if (!opts.self_consistent) return state;

    double residual = 0.0;
    for (std::size_t iter = 0; iter < opts.max_iter; ++iter) {
        const double shift = omega_q * std::exp(-2.0 * sum_abs2(state));
        residual = 0.0;
        for (std::size_t k = 0; k < bath.size(); ++k) {
            const std::complex<double> next =
                -bath.modes[k].g / (2.0 * (shift + bath.modes[k].omega));
            residual = std::max(residual, std::abs(next - state.displacements[k]));
            state.displacements[k] = next;
        }
        if (residual < opts.tol) return state;
    }
    throw IterationError("ground_state: fixed point did not converge within " +
                             std::to_string(opts.max_iter) + " iterations",
                         residual);
}

double sum_abs2(const State& state) {
    return kernels::sum_abs2_serial(state.displacements);
}

double excited_population(const State& state) {
    return 0.5 * (1.0 - std::exp(-2.0 * sum_abs2(state)));
}

double variational_energy(const State& state, double h_x, const bath::Discretization& bath,
                          double coupling_scale) {
    check_pair(state, bath);
    double quadratic = 0.0, coupling = 0.0, total_f2 = 0.0;
    for (std::size_t k = 0; k < bath.size(); ++k) {
        const auto& f = state.displacements[k];
        const double f2 = std::norm(f);
        total_f2 += f2;
        quadratic += bath.modes[k].omega * f2;
        coupling += bath.modes[k].g * 2.0 * f.real();
    }
    return -0.5 * h_x * std::exp(-2.0 * total_f2) + quadratic + 0.5 * coupling_scale * coupling;
}

std::vector<std::array<double, 2>> energy_gradient(const State& state, double h_x,
                                                   const bath::Discretization& bath,
                                                   double coupling_scale) {
    check_pair(state, bath);
    const double expfac = std::exp(-2.0 * sum_abs2(state));
    std::vector<std::array<double, 2>> grad(state.size());
    for (std::size_t k = 0; k < bath.size(); ++k) {
        const double x = state.displacements[k].real();
        const double y = state.displacements[k].imag();
        grad[k][0] = 2.0 * x * h_x * expfac + 2.0 * bath.modes[k].omega * x +
                     coupling_scale * bath.modes[k].g;
        grad[k][1] = 2.0 * y * h_x * expfac + 2.0 * bath.modes[k].omega * y;
    }
    return grad;
}

double fixed_point_residual(const State& state, const bath::Discretization& bath,
                            double omega_q) {
    check_pair(state, bath);
    const double shift = omega_q * std::exp(-2.0 * sum_abs2(state));
    double residual = 0.0;
    for (std::size_t k = 0; k < bath.size(); ++k)
        residual = std::max(residual,
                            std::abs(state.displacements[k] +
                                     bath.modes[k].g / (2.0 * (shift + bath.modes[k].omega))));
    return residual;
}

std::vector<CorrelationSample> correlation_profile(const State& state,
                                                   const bath::Discretization& bath) {
    check_pair(state, bath);
    std::vector<CorrelationSample> profile(state.size());
    for (std::size_t k = 0; k < bath.size(); ++k)
        profile[k] = {bath.modes[k].omega, bath.modes[k].g * state.displacements[k]};
    return profile;
}

} // namespace qreset::polaron
