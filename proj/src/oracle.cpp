#include "qreset/oracle.hpp"

#include <algorithm>
#include <cmath>

#include "qreset/errors.hpp"

namespace qreset::oracle {

namespace {

using cplx = std::complex<double>;
constexpr cplx iu{0.0, 1.0};

// index = (spin * C + n_1) * C + n_2 ... ; stride of mode k precomputed
struct Layout {
    std::size_t cutoff;
    std::vector<std::size_t> stride;  // per mode
    std::size_t spin_stride;

    explicit Layout(const TruncatedSystem& sys) {
        cutoff = sys.fock_cutoff;
        const std::size_t m = sys.n_modes();
        stride.resize(m);
        std::size_t s = 1;
        for (std::size_t k = m; k-- > 0;) {
            stride[k] = s;
            s *= cutoff;
        }
        spin_stride = s;  // cutoff^m
    }

    std::size_t level(std::size_t index, std::size_t mode) const {
        return (index / stride[mode]) % cutoff;
    }
    bool spin_up(std::size_t index) const { return index < spin_stride; }
};

double norm_of(const StateVector& psi) {
    double s = 0.0;
    for (const cplx& a : psi) s += std::norm(a);
    return std::sqrt(s);
}

} // namespace

std::size_t TruncatedSystem::dim() const noexcept {
    std::size_t d = 2;
    for (std::size_t k = 0; k < modes.size(); ++k) d *= fock_cutoff;
    return d;
}

double TruncatedSystem::norm_bound(double u_max) const {
    double bound = 0.5 * omega_q;
    const double top = static_cast<double>(fock_cutoff - 1);
    for (const auto& mode : modes) {
        bound += mode.omega * top;
        bound += std::abs(u_max) * mode.g * std::sqrt(static_cast<double>(fock_cutoff));
    }
    return bound;
}

TruncatedSystem make_system(std::vector<bath::Mode> modes, double omega_q,
                            std::size_t fock_cutoff) {
    if (modes.empty() || modes.size() > 4)
        throw ConfigError("oracle: between 1 and 4 modes supported");
    if (fock_cutoff < 2 || fock_cutoff > 8)
        throw ConfigError("oracle: fock_cutoff must be in [2, 8]");
    TruncatedSystem sys;
    sys.modes = std::move(modes);
    sys.omega_q = omega_q;
    sys.fock_cutoff = fock_cutoff;
    return sys;
}

std::vector<bath::Mode> validation_modes(std::size_t n, double target_sum_f2,
                                         const bath::SpectralDensityParams& params,
                                         double lo_factor, double hi_factor) {
    if (n == 0) throw ConfigError("validation_modes: n must be >= 1");
    if (!(target_sum_f2 > 0.0))
        throw ConfigError("validation_modes: target_sum_f2 must be positive");
    const double lo = lo_factor * params.omega_c;
    const double hi = hi_factor * params.omega_c;
    std::vector<bath::Mode> modes(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double frac = (n == 1) ? 0.5
                                     : static_cast<double>(k) / static_cast<double>(n - 1);
        modes[k].omega = lo * std::pow(hi / lo, frac);
        modes[k].g = std::sqrt(spectral_density(modes[k].omega, params));
    }
    double sum = 0.0;
    for (const auto& mode : modes) {
        const double wp = mode.omega + params.omega_q;
        sum += mode.g * mode.g / (4.0 * wp * wp);
    }
    const double scale = std::sqrt(target_sum_f2 / sum);
    for (auto& mode : modes) mode.g *= scale;
    return modes;
}

PreparedState prepare_polaron(const TruncatedSystem& system,
                              std::span<const std::complex<double>> displacements,
                              double max_truncation_error) {
    if (displacements.size() != system.n_modes())
        throw ConfigError("prepare_polaron: displacement count does not match the system");
    const Layout layout(system);
    const std::size_t m = system.n_modes();
    const std::size_t cutoff = system.fock_cutoff;

    // truncated coherent-state amplitudes per mode, for +f and -f
    std::vector<std::vector<cplx>> amp_plus(m), amp_minus(m);
    double worst_tail = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
        amp_plus[k].resize(cutoff);
        amp_minus[k].resize(cutoff);
        const cplx f = displacements[k];
        const double weight = std::exp(-0.5 * std::norm(f));
        cplx power{1.0, 0.0};
        double fact = 1.0;
        double mass = 0.0;
        for (std::size_t nlev = 0; nlev < cutoff; ++nlev) {
            if (nlev > 0) {
                power *= f;
                fact *= static_cast<double>(nlev);
            }
            amp_plus[k][nlev] = weight * power / std::sqrt(fact);
            amp_minus[k][nlev] =
                (nlev % 2 == 0) ? amp_plus[k][nlev] : -amp_plus[k][nlev];
            mass += std::norm(amp_plus[k][nlev]);
        }
        worst_tail = std::max(worst_tail, 1.0 - mass);
    }
    if (worst_tail > max_truncation_error)
        throw PrecisionError("prepare_polaron: coherent-state truncation error " +
                             std::to_string(worst_tail) + " exceeds the allowed " +
                             std::to_string(max_truncation_error));

    StateVector psi(system.dim(), cplx{0.0, 0.0});
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    for (std::size_t base = 0; base < layout.spin_stride; ++base) {
        cplx up{inv_sqrt2, 0.0}, down{-inv_sqrt2, 0.0};
        for (std::size_t k = 0; k < m; ++k) {
            const std::size_t nlev = layout.level(base, k);
            up *= amp_plus[k][nlev];
            down *= amp_minus[k][nlev];
        }
        psi[base] = up;
        psi[base + layout.spin_stride] = down;
    }
    const double norm = norm_of(psi);
    for (cplx& a : psi) a /= norm;
    return {std::move(psi), worst_tail};
}

void apply_hamiltonian(const TruncatedSystem& system, double u, const StateVector& in,
                       StateVector& out) {
    const Layout layout(system);
    const std::size_t dim = system.dim();
    out.assign(dim, cplx{0.0, 0.0});
    const std::size_t m = system.n_modes();

    for (std::size_t i = 0; i < dim; ++i) {
        const cplx a = in[i];
        if (a == cplx{0.0, 0.0}) continue;
        const double sz = layout.spin_up(i) ? 1.0 : -1.0;

        // sigma_x flips the qubit
        const std::size_t flipped = layout.spin_up(i) ? i + layout.spin_stride
                                                      : i - layout.spin_stride;
        out[flipped] += 0.5 * system.omega_q * a;

        double diag = 0.0;
        for (std::size_t k = 0; k < m; ++k) {
            const std::size_t nlev = layout.level(i, k);
            diag += system.modes[k].omega * static_cast<double>(nlev);
            const double coupling = 0.5 * u * sz * system.modes[k].g;
            if (coupling != 0.0) {
                if (nlev + 1 < layout.cutoff)  // b^dag
                    out[i + layout.stride[k]] +=
                        coupling * std::sqrt(static_cast<double>(nlev + 1)) * a;
                if (nlev > 0)  // b
                    out[i - layout.stride[k]] +=
                        coupling * std::sqrt(static_cast<double>(nlev)) * a;
            }
        }
        out[i] += diag * a;
    }
}

double excited_population(const TruncatedSystem& system, const StateVector& psi) {
    const Layout layout(system);
    double sx = 0.0;
    for (std::size_t base = 0; base < layout.spin_stride; ++base)
        sx += 2.0 * std::real(std::conj(psi[base + layout.spin_stride]) * psi[base]);
    return 0.5 * (1.0 + sx);
}

double energy(const TruncatedSystem& system, double u, const StateVector& psi) {
    StateVector h_psi;
    apply_hamiltonian(system, u, psi, h_psi);
    cplx e{0.0, 0.0};
    for (std::size_t i = 0; i < psi.size(); ++i) e += std::conj(psi[i]) * h_psi[i];
    return std::real(e);
}

std::vector<std::complex<double>> displacement_expectations(const TruncatedSystem& system,
                                                            const StateVector& psi) {
    const Layout layout(system);
    const std::size_t m = system.n_modes();
    std::vector<cplx> expect(m, cplx{0.0, 0.0});
    for (std::size_t k = 0; k < m; ++k) {
        cplx sum{0.0, 0.0};
        for (std::size_t i = 0; i < psi.size(); ++i) {
            const std::size_t nlev = layout.level(i, k);
            if (nlev == 0) continue;
            // <psi| sigma_z b_k |psi>: b_k lowers level n -> n-1 with sqrt(n)
            const double sz = layout.spin_up(i) ? 1.0 : -1.0;
            sum += std::conj(psi[i - layout.stride[k]]) * psi[i] * sz *
                   std::sqrt(static_cast<double>(nlev));
        }
        expect[k] = sum;
    }
    return expect;
}

double top_level_population(const TruncatedSystem& system, const StateVector& psi,
                            std::size_t mode) {
    const Layout layout(system);
    double mass = 0.0;
    for (std::size_t i = 0; i < psi.size(); ++i)
        if (layout.level(i, mode) == layout.cutoff - 1) mass += std::norm(psi[i]);
    return mass;
}

namespace {

// psi <- exp(-i dt H(u)) psi via the Taylor series of the exponential; each
// term is one sparse H application, and dt ||H|| < 0.5 makes the series
// converge to machine precision within ~20 terms
void propagate_step(const TruncatedSystem& system, double u, double dt, StateVector& psi,
                    StateVector& term, StateVector& h_term) {
    term = psi;
    const double target = 1e-22 * norm_of(psi);
    for (std::size_t j = 1; j <= 60; ++j) {
        apply_hamiltonian(system, u, term, h_term);
        const cplx factor = -iu * dt / static_cast<double>(j);
        double term_norm_sq = 0.0;
        for (std::size_t i = 0; i < psi.size(); ++i) {
            term[i] = factor * h_term[i];
            psi[i] += term[i];
            term_norm_sq += std::norm(term[i]);
        }
        if (std::sqrt(term_norm_sq) < target) return;
    }
    throw IntegrationError("exact_evolve: exponential series did not converge");
}

} // namespace

ExactTrajectory exact_evolve(const TruncatedSystem& system,
                             const tdvp::SwitchProfile& profile, StateVector psi0,
                             const ExactEvolveOptions& opts) {
    if (psi0.size() != system.dim())
        throw ConfigError("exact_evolve: state dimension does not match the system");
    if (!(opts.dt > 0.0)) throw ConfigError("exact_evolve: dt must be positive");
    double u_max = 1.0;
    if (profile.kind == tdvp::ProfileKind::Constant)
        u_max = std::max(u_max, std::abs(profile.value));
    if (profile.kind == tdvp::ProfileKind::Tabulated)
        for (const auto& [t, u] : profile.samples) u_max = std::max(u_max, std::abs(u));
    if (opts.dt * system.norm_bound(u_max) >= 0.5)
        throw ConfigError("exact_evolve: dt does not resolve ||H||; need dt * ||H|| < 0.5");

    const auto n_steps = static_cast<std::size_t>(std::llround(profile.t_f / opts.dt));
    if (n_steps == 0) throw ConfigError("exact_evolve: dt larger than t_f");
    const double h = profile.t_f / static_cast<double>(n_steps);
    const std::size_t stride = std::max<std::size_t>(opts.record_stride, 1);

    ExactTrajectory traj;
    traj.final_psi = std::move(psi0);
    StateVector term, h_term;

    auto record = [&](std::size_t step) {
        const double t = (step == n_steps) ? profile.t_f : static_cast<double>(step) * h;
        traj.times.push_back(t);
        traj.populations.push_back(excited_population(system, traj.final_psi));
        traj.displacements.push_back(displacement_expectations(system, traj.final_psi));
        traj.energies.push_back(
            energy(system, switch_value(profile, t), traj.final_psi));
        traj.norm_drift = std::max(traj.norm_drift, std::abs(norm_of(traj.final_psi) - 1.0));
        for (std::size_t k = 0; k < system.n_modes(); ++k)
            traj.max_leakage =
                std::max(traj.max_leakage, top_level_population(system, traj.final_psi, k));
    };

    record(0);
    for (std::size_t s = 0; s < n_steps; ++s) {
        const double u = switch_value(profile, (static_cast<double>(s) + 0.5) * h);
        propagate_step(system, u, h, traj.final_psi, term, h_term);
        if (s + 1 == n_steps || (s + 1) % stride == 0) record(s + 1);
    }
    traj.valid = traj.max_leakage < opts.leakage_budget;
    return traj;
}

} // namespace qreset::oracle
