#include "qreset/tdvp.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qreset/errors.hpp"
#include "qreset/kernels.hpp"
#include "qreset/quadrature.hpp"

namespace qreset::tdvp {

namespace {

using cplx = std::complex<double>;
constexpr cplx iu{0.0, 1.0};

double rational_raw(double t, double lambda, double t_f) {
    // b/(a+b) form; valid for t <= t_f/2 where b >= a
    const double a = std::pow(t, lambda);
    const double b = std::pow(t_f - t, lambda);
    return b / (a + b);
}

std::string format_number(double v) {
    std::ostringstream out;
    out << v;
    return out.str();
}

} // namespace

SwitchProfile SwitchProfile::constant(double value, double t_f) {
    if (!(t_f > 0.0)) throw ConfigError("SwitchProfile: t_f must be positive");
    SwitchProfile p;
    p.kind = ProfileKind::Constant;
    p.value = value;
    p.t_f = t_f;
    return p;
}

SwitchProfile SwitchProfile::linear(double t_f) {
    if (!(t_f > 0.0)) throw ConfigError("SwitchProfile: t_f must be positive");
    SwitchProfile p;
    p.kind = ProfileKind::Linear;
    p.t_f = t_f;
    return p;
}

SwitchProfile SwitchProfile::rational(double lambda, double t_f) {
    if (!(t_f > 0.0)) throw ConfigError("SwitchProfile: t_f must be positive");
    if (!(lambda > 0.0)) throw ConfigError("SwitchProfile: lambda must be positive");
    SwitchProfile p;
    p.kind = ProfileKind::RationalLambda;
    p.lambda = lambda;
    p.t_f = t_f;
    return p;
}

SwitchProfile SwitchProfile::tabulated(std::vector<std::pair<double, double>> samples) {
    if (samples.size() < 2)
        throw ConfigError("SwitchProfile: tabulated profile needs at least 2 samples");
    if (samples.front().first != 0.0)
        throw ConfigError("SwitchProfile: tabulated samples must start at t = 0");
    for (std::size_t i = 1; i < samples.size(); ++i)
        if (!(samples[i].first > samples[i - 1].first))
            throw ConfigError("SwitchProfile: tabulated times must be strictly increasing");
    SwitchProfile p;
    p.kind = ProfileKind::Tabulated;
    p.t_f = samples.back().first;
    p.samples = std::move(samples);
    return p;
}

std::string SwitchProfile::label() const {
    switch (kind) {
        case ProfileKind::Constant: return "constant_" + format_number(value);
        case ProfileKind::Linear: return "linear";
        case ProfileKind::RationalLambda: return "lambda_" + format_number(lambda);
        case ProfileKind::Tabulated: return "tabulated";
    }
    return "unknown";
}

double switch_value(const SwitchProfile& profile, double t) {
    if (t < 0.0 || t > profile.t_f)
        throw std::domain_error("switch_value: t outside [0, t_f]");
    switch (profile.kind) {
        case ProfileKind::Constant:
            return profile.value;
        case ProfileKind::Linear:
            return 1.0 - t / profile.t_f;
        case ProfileKind::RationalLambda:
            // mirrored half-domain evaluation keeps u(t) = 1 - u(t_f - t) exact
            if (t <= 0.5 * profile.t_f) return rational_raw(t, profile.lambda, profile.t_f);
            return 1.0 - rational_raw(profile.t_f - t, profile.lambda, profile.t_f);
        case ProfileKind::Tabulated: {
            const auto& s = profile.samples;
            auto it = std::upper_bound(
                s.begin(), s.end(), t,
                [](double value, const auto& sample) { return value < sample.first; });
            if (it == s.begin()) return s.front().second;
            const std::size_t hi = static_cast<std::size_t>(it - s.begin());
            if (hi == s.size()) return s.back().second;
            const auto& [t0, u0] = s[hi - 1];
            const auto& [t1, u1] = s[hi];
            return u0 + (u1 - u0) * ((t - t0) / (t1 - t0));
        }
    }
    throw ConfigError("switch_value: unknown profile kind");
}

double switch_derivative(const SwitchProfile& profile, double t) {
    if (t < 0.0 || t > profile.t_f)
        throw std::domain_error("switch_derivative: t outside [0, t_f]");
    switch (profile.kind) {
        case ProfileKind::Constant:
            return 0.0;
        case ProfileKind::Linear:
            return -1.0 / profile.t_f;
        case ProfileKind::RationalLambda: {
            const double lam = profile.lambda;
            const double a = std::pow(t, lam);
            const double b = std::pow(profile.t_f - t, lam);
            const double num = lam * profile.t_f * std::pow(t, lam - 1.0) *
                               std::pow(profile.t_f - t, lam - 1.0);
            return -num / ((a + b) * (a + b));
        }
        case ProfileKind::Tabulated: {
            const auto& s = profile.samples;
            auto it = std::upper_bound(
                s.begin(), s.end(), t,
                [](double value, const auto& sample) { return value < sample.first; });
            std::size_t hi = static_cast<std::size_t>(it - s.begin());
            if (hi == 0) hi = 1;
            if (hi == s.size()) hi = s.size() - 1;
            const auto& [t0, u0] = s[hi - 1];
            const auto& [t1, u1] = s[hi];
            return (u1 - u0) / (t1 - t0);
        }
    }
    throw ConfigError("switch_derivative: unknown profile kind");
}

std::vector<double> switch_derivatives_at_zero(const SwitchProfile& profile,
                                               std::size_t j_max) {
    if (j_max == 0) throw ConfigError("switch_derivatives_at_zero: j_max must be >= 1");
    std::vector<double> derivs(j_max, 0.0);
    if (profile.kind == ProfileKind::Linear) {
        derivs[0] = -1.0 / profile.t_f;
        return derivs;
    }
    if (profile.kind != ProfileKind::RationalLambda)
        throw UnsupportedProfileError(
            "switch_derivatives_at_zero: only linear and rational-lambda profiles are smooth");

    const double lam = profile.lambda;
    const double lam_int = std::round(lam);
    if (std::abs(lam - lam_int) > 1e-12) {
        // u - 1 ~ -(t/t_f)^lambda: integer-order derivatives above floor(lambda)
        // diverge at the endpoint, so only the vanishing low orders exist
        if (static_cast<double>(j_max) >= lam)
            throw UnsupportedProfileError(
                "switch_derivatives_at_zero: non-integer lambda has no integer-order "
                "derivatives of order >= lambda at t = 0");
        return derivs;  // all zero for j < lambda
    }

    // u(t) = 1 - N(t)/D(t) with N = t^L and D = t^L + (t_f - t)^L; expand
    // N/D as a power series by long division and convert to derivatives
    const auto L = static_cast<std::size_t>(lam_int);
    const std::size_t order = std::max(j_max, L);
    std::vector<double> denom(order + 1, 0.0);
    double binom = 1.0;
    for (std::size_t i = 0; i <= L; ++i) {
        if (i <= order)
            denom[i] = binom * std::pow(profile.t_f, static_cast<double>(L - i)) *
                       ((i % 2 == 0) ? 1.0 : -1.0);
        binom *= static_cast<double>(L - i) / static_cast<double>(i + 1);
    }
    if (L <= order) denom[L] += 1.0;

    std::vector<double> series(j_max + 1, 0.0);  // coefficients of N/D
    double factorial = 1.0;
    for (std::size_t m = 0; m <= j_max; ++m) {
        double num = (m == L) ? 1.0 : 0.0;
        for (std::size_t i = 0; i < m; ++i)
            if (m - i <= order) num -= series[i] * denom[m - i];
        series[m] = num / denom[0];
        if (m >= 1) {
            factorial *= static_cast<double>(m);
            derivs[m - 1] = -factorial * series[m];
        }
    }
    return derivs;
}

namespace {

struct StepGrid {
    std::size_t n_steps;
    double h;
};

StepGrid make_grid(double t_f, double dt) {
    if (!(dt > 0.0)) throw ConfigError("evolve: dt must be positive");
    if (dt >= t_f) throw ConfigError("evolve: dt must be smaller than t_f");
    const auto n = static_cast<std::size_t>(std::llround(t_f / dt));
    return {std::max<std::size_t>(n, 1), t_f / static_cast<double>(std::max<std::size_t>(n, 1))};
}

std::vector<std::size_t> make_record_steps(std::size_t n_steps, std::size_t stride) {
    if (stride == 0) stride = 1;
    std::vector<std::size_t> steps;
    for (std::size_t s = 0; s <= n_steps; s += stride) steps.push_back(s);
    if (steps.back() != n_steps) steps.push_back(n_steps);
    return steps;
}

} // namespace

Trajectory evolve(const polaron::State& initial, const bath::Discretization& bath,
                  double omega_q, const SwitchProfile& profile, const EvolveOptions& opts) {
    if (initial.size() != bath.size())
        throw ConfigError("evolve: initial state does not match the bath mode count");
    const auto [n_steps, h] = make_grid(profile.t_f, opts.dt);
    const std::size_t n = bath.size();

    const bool want_snapshots = opts.record_displacements || opts.record_energy;
    const auto record_steps = make_record_steps(n_steps, opts.record_stride);
    const std::size_t n_rec = record_steps.size();

    std::vector<cplx> f(initial.displacements);
    std::vector<double> sums(n_steps + 1, 0.0);
    std::vector<cplx> snapshots(want_snapshots ? n_rec * n : 0);

    if (!opts.full_nonlinear) {
        std::vector<double> rot_re(n), rot_im(n), drv_re(n), drv_im(n);
        for (std::size_t k = 0; k < n; ++k) {
            const double wp = bath.modes[k].omega + omega_q;
            const double c = std::cos(wp * h), s = std::sin(wp * h);
            rot_re[k] = c;
            rot_im[k] = s;
            drv_re[k] = bath.modes[k].g * (c - 1.0) / (2.0 * wp);
            drv_im[k] = bath.modes[k].g * s / (2.0 * wp);
        }
        std::vector<double> u_mid(n_steps);
        for (std::size_t s = 0; s < n_steps; ++s)
            u_mid[s] = switch_value(profile, (static_cast<double>(s) + 0.5) * h);

        kernels::ModeEvolveArgs args;
        args.rot_re = rot_re;
        args.rot_im = rot_im;
        args.drv_re = drv_re;
        args.drv_im = drv_im;
        args.u_mid = u_mid;
        args.f = f;
        args.sum_f2_by_step = sums;
        args.record_steps = record_steps;
        args.snapshots = want_snapshots ? snapshots.data() : nullptr;
        opts.use_serial_kernels ? kernels::evolve_modes_serial(args)
                                : kernels::evolve_modes(args);
    } else {
        std::vector<double> omega(n), g(n);
        for (std::size_t k = 0; k < n; ++k) {
            omega[k] = bath.modes[k].omega;
            g[k] = bath.modes[k].g;
        }
        std::vector<double> u_nodes(2 * n_steps + 1);
        for (std::size_t i = 0; i < u_nodes.size(); ++i)
            u_nodes[i] = switch_value(profile, std::min(profile.t_f,
                                                        0.5 * static_cast<double>(i) * h));

        kernels::Rk4Args args;
        args.omega = omega;
        args.g = g;
        args.omega_q = omega_q;
        args.h = h;
        args.u_nodes = u_nodes;
        args.f = f;
        args.sum_f2_by_step = sums;
        args.record_steps = record_steps;
        args.snapshots = want_snapshots ? snapshots.data() : nullptr;
        // four barrier-synchronized reductions per step: threads only pay off
        // once the per-stage mode work dwarfs the barrier latency
        constexpr std::size_t rk4_parallel_threshold = 16384;
        const bool serial = opts.use_serial_kernels || n < rk4_parallel_threshold;
        serial ? kernels::evolve_modes_rk4_serial(args) : kernels::evolve_modes_rk4(args);
    }

    Trajectory traj;
    traj.times.reserve(n_rec);
    traj.u_values.reserve(n_rec);
    traj.sum_f2.reserve(n_rec);
    traj.populations.reserve(n_rec);
    for (const std::size_t s : record_steps) {
        const double t = (s == n_steps) ? profile.t_f : static_cast<double>(s) * h;
        const double sum = sums[s];
        if (!std::isfinite(sum))
            throw IntegrationError("evolve: non-finite displacement at step " +
                                   std::to_string(s));
        traj.times.push_back(t);
        traj.u_values.push_back(switch_value(profile, t));
        traj.sum_f2.push_back(sum);
        traj.populations.push_back(0.5 * (1.0 - std::exp(-2.0 * sum)));
    }
    if (opts.record_displacements) {
        traj.displacements.resize(n_rec);
        for (std::size_t r = 0; r < n_rec; ++r)
            traj.displacements[r].assign(snapshots.begin() + static_cast<std::ptrdiff_t>(r * n),
                                         snapshots.begin() + static_cast<std::ptrdiff_t>((r + 1) * n));
    }
    if (opts.record_energy) {
        traj.energies.resize(n_rec);
        polaron::State probe;
        probe.bath_ref = bath.id();
        for (std::size_t r = 0; r < n_rec; ++r) {
            probe.displacements.assign(snapshots.begin() + static_cast<std::ptrdiff_t>(r * n),
                                       snapshots.begin() + static_cast<std::ptrdiff_t>((r + 1) * n));
            traj.energies[r] =
                polaron::variational_energy(probe, omega_q, bath, traj.u_values[r]);
        }
    }
    traj.final_state.displacements = std::move(f);
    traj.final_state.bath_ref = bath.id();
    return traj;
}

std::complex<double> final_displacement_integral(const bath::Mode& mode, double omega_q,
                                                 const SwitchProfile& profile) {
    const double u_end = switch_value(profile, profile.t_f);
    if (std::abs(u_end) > 1e-12)
        throw ConfigError("final_displacement_integral: profile must end at u(t_f) = 0");
    const double wp = mode.omega + omega_q;
    const double f0 = -mode.g / (2.0 * wp);

    if (profile.kind == ProfileKind::Tabulated) {
        // du/dt is constant on each segment; integrate the phase exactly
        cplx total{0.0, 0.0};
        for (std::size_t i = 1; i < profile.samples.size(); ++i) {
            const auto& [t0, u0] = profile.samples[i - 1];
            const auto& [t1, u1] = profile.samples[i];
            const double slope = (u1 - u0) / (t1 - t0);
            const cplx upper = std::exp(-iu * wp * (t1 - profile.t_f));
            const cplx lower = std::exp(-iu * wp * (t0 - profile.t_f));
            total += slope * (upper - lower) / (-iu * wp);
        }
        return -f0 * total;
    }

    const std::size_t panels = std::max<std::size_t>(
        8, static_cast<std::size_t>(std::ceil(wp * profile.t_f / 3.0)));
    const cplx integral = quad::adaptive(
        [&](double t) {
            return switch_derivative(profile, t) * std::exp(-iu * wp * (t - profile.t_f));
        },
        0.0, profile.t_f, 1e-13, 0.0, panels);
    return -f0 * integral;
}

std::complex<double> asymptotic_final_displacement(const bath::Mode& mode, double omega_q,
                                                   const SwitchProfile& profile,
                                                   std::size_t j_max) {
    const auto derivs = switch_derivatives_at_zero(profile, j_max);
    const double wp = mode.omega + omega_q;
    const double f0 = -mode.g / (2.0 * wp);
    const cplx phase = std::exp(iu * wp * profile.t_f);
    cplx sum{0.0, 0.0};
    cplx inv_pow{1.0, 0.0};
    double sign = 1.0;
    for (std::size_t j = 1; j <= j_max; ++j) {
        inv_pow /= iu * wp;
        sign = -sign;  // (-1)^j
        sum += (sign + phase) * inv_pow * derivs[j - 1];
    }
    return -f0 * sum;
}

std::vector<ProfileRun> decoupling_experiment(const bath::Discretization& bath,
                                              double omega_q,
                                              const std::vector<SwitchProfile>& profiles,
                                              const EvolveOptions& opts) {
    const polaron::State relaxed = polaron::ground_state(bath, omega_q);
    std::vector<ProfileRun> runs;
    runs.reserve(profiles.size());
    for (const SwitchProfile& profile : profiles)
        runs.push_back({profile, evolve(relaxed, bath, omega_q, profile, opts)});
    return runs;
}

SwitchProfile profile_from_schedule(std::span<const double> u_steps, double t_f) {
    if (u_steps.empty()) throw ConfigError("profile_from_schedule: empty schedule");
    if (!(t_f > 0.0)) throw ConfigError("profile_from_schedule: t_f must be positive");
    const double h = t_f / static_cast<double>(u_steps.size());
    std::vector<std::pair<double, double>> samples;
    samples.reserve(u_steps.size() + 2);
    samples.emplace_back(0.0, u_steps.front());
    for (std::size_t i = 0; i < u_steps.size(); ++i)
        samples.emplace_back((static_cast<double>(i) + 0.5) * h, u_steps[i]);
    samples.emplace_back(t_f, u_steps.back());
    return SwitchProfile::tabulated(std::move(samples));
}

} // namespace qreset::tdvp
