// bath.hpp — Ohmic spectral density and its finite-mode discretizations

#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <json.hpp>

namespace qreset::bath {

// angular frequencies in rad/ns throughout; omega_q = 2*pi * 5 GHz
inline constexpr double default_omega_q = 31.41592653589793;

struct SpectralDensityParams {
    double alpha{0.03};
    double omega_c{default_omega_q};  // cutoff [rad/ns]
    double omega_q{default_omega_q};  // qubit frequency [rad/ns]

    void validate() const;  // throws ConfigError on non-positive entries
};

// J(omega) = 2 alpha omega exp(-omega/omega_c); omega < 0 is a domain error
double spectral_density(double omega, const SpectralDensityParams& params);

enum class Scheme { MidpointLinear, GaussLegendre };

std::string to_string(Scheme scheme);
Scheme scheme_from_string(const std::string& name);

struct Mode {
    double omega;  // rad/ns, strictly positive
    double g;      // rad/ns, nonnegative; g^2 carries the quadrature weight
};

struct Discretization {
    std::vector<Mode> modes;  // omega strictly increasing
    Scheme scheme{Scheme::GaussLegendre};
    double omega_max{0.0};

    std::size_t size() const noexcept { return modes.size(); }
    // stable identifier used to pair displacement vectors with their bath
    std::string id() const;
};

// Quadrature representation of J: sum_k g_k^2 phi(omega_k) ~ int J phi domega
// for smooth phi. Deterministic for fixed inputs.
Discretization discretize(const SpectralDensityParams& params, std::size_t n_modes,
                          double omega_max, Scheme scheme);

// sum_k g_k^2 / (4 (omega_k + omega_q)^2)
double sum_f2(const Discretization& bath, double omega_q);

// serializable bath specification {alpha, omega_c, omega_q, n_modes, omega_max, scheme}
struct BathSpec {
    SpectralDensityParams params{};
    std::size_t n_modes{2000};
    double omega_max{10.0 * default_omega_q};
    Scheme scheme{Scheme::GaussLegendre};

    Discretization build() const { return discretize(params, n_modes, omega_max, scheme); }
};

void to_json(nlohmann::json& j, const BathSpec& spec);
void from_json(const nlohmann::json& j, BathSpec& spec);  // rejects unknown keys

} // namespace qreset::bath
