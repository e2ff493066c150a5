// tdvp.hpp — switching profiles and time evolution of the bath displacements
//
// The default (linear) propagation decouples per mode,
//   df_k/dt = i w'_k f_k + (i/2) g_k u(t),   w'_k = omega_k + omega_q,
// and is stepped with the exponential one-step rule that is exact for u held
// constant across a step (evaluated at the step midpoint). The full nonlinear
// form keeps the e^{-2 sum|f|^2} frequency shift and is stepped with RK4.

#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qreset/bath.hpp"
#include "qreset/polaron.hpp"

namespace qreset::tdvp {

enum class ProfileKind { Constant, Linear, RationalLambda, Tabulated };

// Control u(t) on [0, t_f]. The rational family
//   u(t) = 1 - t^lambda / (t^lambda + (t_f - t)^lambda)
// has u(0) = 1, u(t_f) = 0 and satisfies u(t) = 1 - u(t_f - t) exactly
// (enforced by evaluating on the half domain and mirroring).
struct SwitchProfile {
    ProfileKind kind{ProfileKind::RationalLambda};
    double lambda{2.0};
    double t_f{0.4};   // ns
    double value{1.0}; // Constant only
    std::vector<std::pair<double, double>> samples;  // Tabulated: (t, u), strictly increasing

    static SwitchProfile constant(double value, double t_f);
    static SwitchProfile linear(double t_f);
    static SwitchProfile rational(double lambda, double t_f);
    static SwitchProfile tabulated(std::vector<std::pair<double, double>> samples);

    std::string label() const;  // short tag for file names
};

double switch_value(const SwitchProfile& profile, double t);

// analytic du/dt for Constant, Linear and RationalLambda; piecewise slope for
// Tabulated
double switch_derivative(const SwitchProfile& profile, double t);

// u^{(j)}(0) for j = 1..j_max. Exact power-series coefficients for integer
// lambda; for fractional lambda the derivatives below lambda vanish and higher
// integer-order derivatives do not exist (UnsupportedProfileError).
std::vector<double> switch_derivatives_at_zero(const SwitchProfile& profile,
                                               std::size_t j_max);

struct Trajectory {
    std::vector<double> times;        // ns, strictly increasing
    std::vector<double> u_values;     // u at the recorded times
    std::vector<double> sum_f2;       // sum_k |f_k|^2 at the recorded times
    std::vector<double> populations;  // P_+ at the recorded times
    std::vector<double> energies;     // empty unless requested
    std::vector<std::vector<std::complex<double>>> displacements;  // per recorded time
    polaron::State final_state;

    double final_population() const { return populations.back(); }
};

struct EvolveOptions {
    double dt{1e-3};  // ns; rounded to the nearest exact divisor of t_f
    bool full_nonlinear{false};
    std::size_t record_stride{1};
    bool record_displacements{true};
    bool record_energy{false};        // implies displacement recording
    bool use_serial_kernels{false};   // reference path, kept for testing
};

Trajectory evolve(const polaron::State& initial, const bath::Discretization& bath,
                  double omega_q, const SwitchProfile& profile,
                  const EvolveOptions& opts = {});

// Endpoint of the linear dynamics started from f(0) = f_{k0} u(0) for a
// profile with u(t_f) = 0, evaluated as
//   f_k(t_f) = -f_{k0} int_0^{t_f} e^{-i w' (t - t_f)} du/dt dt
// by adaptive quadrature (closed forms) or exact per-segment sums (tabulated).
// The overall sign is fixed by agreement with evolve()'s endpoint.
std::complex<double> final_displacement_integral(const bath::Mode& mode, double omega_q,
                                                 const SwitchProfile& profile);

// Partial sum of the large-w't_f expansion of the integral above,
//   f_k(t_f) = -f_{k0} sum_j ((-1)^j + e^{i w' t_f}) u^{(j)}(0) / (i w')^j,
// truncated at j_max. Terms with j < lambda vanish.
std::complex<double> asymptotic_final_displacement(const bath::Mode& mode, double omega_q,
                                                   const SwitchProfile& profile,
                                                   std::size_t j_max);

struct ProfileRun {
    SwitchProfile profile;
    Trajectory trajectory;
};

// One evolve() per profile, each starting from the weak-coupling relaxed state.
std::vector<ProfileRun> decoupling_experiment(const bath::Discretization& bath,
                                              double omega_q,
                                              const std::vector<SwitchProfile>& profiles,
                                              const EvolveOptions& opts = {});

// Tabulated profile whose midpoint samples reproduce a piecewise-constant
// schedule u_0..u_{n-1} on n uniform steps across [0, t_f].
SwitchProfile profile_from_schedule(std::span<const double> u_steps, double t_f);

} // namespace qreset::tdvp
