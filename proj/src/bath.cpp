#include "qreset/bath.hpp"

#include <cmath>
#include <sstream>

#include "qreset/errors.hpp"
#include "qreset/quadrature.hpp"

namespace qreset::bath {

void SpectralDensityParams::validate() const {
    // alpha = 0 is the well-defined zero-coupling limit (J == 0, P_+ = 0)
    if (!(alpha >= 0.0)) throw ConfigError("bath: alpha must be nonnegative");
    if (!(omega_c > 0.0)) throw ConfigError("bath: omega_c must be positive");
    if (!(omega_q > 0.0)) throw ConfigError("bath: omega_q must be positive");
}

double spectral_density(double omega, const SpectralDensityParams& params) {
    if (omega < 0.0) throw std::domain_error("spectral_density: omega must be >= 0");
    return 2.0 * params.alpha * omega * std::exp(-omega / params.omega_c);
}

std::string to_string(Scheme scheme) {
    switch (scheme) {
        case Scheme::MidpointLinear: return "midpoint-linear";
        case Scheme::GaussLegendre: return "gauss-legendre";
    }
    throw ConfigError("bath: unknown scheme");
}

Scheme scheme_from_string(const std::string& name) {
    if (name == "midpoint-linear") return Scheme::MidpointLinear;
    if (name == "gauss-legendre") return Scheme::GaussLegendre;
    throw ConfigError("bath: unknown scheme '" + name + "'");
}

std::string Discretization::id() const {
    std::ostringstream out;
    out << to_string(scheme) << ":n=" << modes.size() << ":omega_max=" << omega_max;
    return out.str();
}

Discretization discretize(const SpectralDensityParams& params, std::size_t n_modes,
                          double omega_max, Scheme scheme) {
    params.validate();
    if (n_modes == 0) throw ConfigError("discretize: n_modes must be >= 1");
    if (!(omega_max > 0.0)) throw ConfigError("discretize: omega_max must be positive");

    Discretization bath;
    bath.scheme = scheme;
    bath.omega_max = omega_max;
    bath.modes.reserve(n_modes);

    switch (scheme) {
        case Scheme::MidpointLinear: {
            const double h = omega_max / static_cast<double>(n_modes);
            for (std::size_t k = 0; k < n_modes; ++k) {
                const double omega = (static_cast<double>(k) + 0.5) * h;
                bath.modes.push_back(
                    {omega, std::sqrt(spectral_density(omega, params) * h)});
            }
            break;
        }
        case Scheme::GaussLegendre: {
            for (const auto& node : quad::gauss_legendre(n_modes, 0.0, omega_max))
                bath.modes.push_back(
                    {node.x, std::sqrt(spectral_density(node.x, params) * node.w)});
            break;
        }
    }
    return bath;
}

double sum_f2(const Discretization& bath, double omega_q) {
    double sum = 0.0;
    for (const auto& mode : bath.modes) {
        const double wp = mode.omega + omega_q;
        sum += mode.g * mode.g / (4.0 * wp * wp);
    }
    return sum;
}

namespace {

void require_keys(const nlohmann::json& j, std::initializer_list<const char*> allowed) {
    for (const auto& item : j.items()) {
        bool known = false;
        for (const char* key : allowed)
            if (item.key() == key) { known = true; break; }
        if (!known)
            throw qreset::ConfigError("bath spec: unknown key '" + item.key() + "'");
    }
}

} // namespace

void to_json(nlohmann::json& j, const BathSpec& spec) {
    j = nlohmann::json{{"alpha", spec.params.alpha},
                       {"omega_c", spec.params.omega_c},
                       {"omega_q", spec.params.omega_q},
                       {"n_modes", spec.n_modes},
                       {"omega_max", spec.omega_max},
                       {"scheme", to_string(spec.scheme)}};
}

void from_json(const nlohmann::json& j, BathSpec& spec) {
    require_keys(j, {"alpha", "omega_c", "omega_q", "n_modes", "omega_max", "scheme"});
    spec = BathSpec{};
    if (j.contains("alpha")) spec.params.alpha = j.at("alpha").get<double>();
    if (j.contains("omega_c")) spec.params.omega_c = j.at("omega_c").get<double>();
    if (j.contains("omega_q")) spec.params.omega_q = j.at("omega_q").get<double>();
    if (j.contains("n_modes")) spec.n_modes = j.at("n_modes").get<std::size_t>();
    if (j.contains("omega_max")) spec.omega_max = j.at("omega_max").get<double>();
    else spec.omega_max = 10.0 * spec.params.omega_c;
    if (j.contains("scheme")) spec.scheme = scheme_from_string(j.at("scheme").get<std::string>());
    spec.params.validate();
}

} // namespace qreset::bath
