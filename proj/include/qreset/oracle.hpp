// oracle.hpp — exact dynamics of small qubit-boson systems in a truncated
// Fock space; used to validate the variational propagation at weak coupling

#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "qreset/bath.hpp"
#include "qreset/tdvp.hpp"

namespace qreset::oracle {

using StateVector = std::vector<std::complex<double>>;

// H(u) = (omega_q/2) sigma_x + sum_k omega_k n_k
//        + u (sigma_z/2) sum_k g_k (b_k^dag + b_k)
// Basis index: qubit slowest, then mode occupations, n_modes <= 4, cutoff <= 8.
struct TruncatedSystem {
    std::vector<bath::Mode> modes;
    double omega_q{bath::default_omega_q};
    std::size_t fock_cutoff{6};

    std::size_t n_modes() const noexcept { return modes.size(); }
    std::size_t dim() const noexcept;
    // upper bound on ||H(u)|| for |u| <= u_max, used to validate the step size
    double norm_bound(double u_max) const;
};

TruncatedSystem make_system(std::vector<bath::Mode> modes, double omega_q,
                            std::size_t fock_cutoff);

// Geometrically spaced frequencies in [lo_factor, hi_factor] * omega_c with
// couplings shaped by sqrt(J) and scaled so the relaxed state has the target
// sum_k |f_k0|^2.
std::vector<bath::Mode> validation_modes(std::size_t n, double target_sum_f2,
                                         const bath::SpectralDensityParams& params,
                                         double lo_factor = 0.25, double hi_factor = 2.0);

struct PreparedState {
    StateVector psi;
    double truncation_error;  // worst per-mode coherent tail mass dropped
};

// (|up, f> - |down, -f>)/sqrt(2) with truncated coherent amplitudes
// e^{-|f|^2/2} f^n / sqrt(n!); renormalized, truncation recorded.
PreparedState prepare_polaron(const TruncatedSystem& system,
                              std::span<const std::complex<double>> displacements,
                              double max_truncation_error = 1e-8);

void apply_hamiltonian(const TruncatedSystem& system, double u, const StateVector& in,
                       StateVector& out);

// P_+ = (1 + <sigma_x>)/2
double excited_population(const TruncatedSystem& system, const StateVector& psi);
double energy(const TruncatedSystem& system, double u, const StateVector& psi);
std::vector<std::complex<double>> displacement_expectations(const TruncatedSystem& system,
                                                            const StateVector& psi);
double top_level_population(const TruncatedSystem& system, const StateVector& psi,
                            std::size_t mode);

struct ExactTrajectory {
    std::vector<double> times;
    std::vector<double> populations;
    std::vector<std::vector<std::complex<double>>> displacements;  // <sigma_z b_k>
    std::vector<double> energies;
    double norm_drift{0.0};   // max | ||psi|| - 1 |
    double max_leakage{0.0};  // worst top-Fock-level population seen
    bool valid{true};         // false if the leakage budget was exceeded
    StateVector final_psi;
};

struct ExactEvolveOptions {
    double dt{0.0};  // must satisfy dt * ||H|| < 0.5
    std::size_t record_stride{1};
    double leakage_budget{1e-6};
};

// Schroedinger propagation with u held constant across each step; every step
// applies e^{-i dt H} to machine precision (truncated Taylor series of the
// exponential acting on the state, valid because dt ||H|| < 0.5).
ExactTrajectory exact_evolve(const TruncatedSystem& system,
                             const tdvp::SwitchProfile& profile, StateVector psi0,
                             const ExactEvolveOptions& opts);

} // namespace qreset::oracle
